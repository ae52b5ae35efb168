#pragma once
// Capillary energy of the region a leaf carves out of the container:
//   E = |leaf|_g - integral of cos(rho_bar) over the wetted wall,
// where the wetted wall is the part of the container boundary on the chosen
// side of the leaf and cos(rho_bar) is the prescribed angle weight from the
// reference slicing. For the default Above side the wetted wall runs from
// the contact curve up through the cap, which makes every flat slice of a
// Euclidean container an exact zero of the energy.
#include "caprig/leaf.hpp"
#include "caprig/metric.hpp"
#include "caprig/patch.hpp"

namespace caprig {

struct Region {
  Leaf leaf;
  enum class Side { Above, Below } side = Side::Above;
};

// Precomputed wetted-wall tables for one (wall grid, metric) pair: the
// weighted area density F = cos(rho_bar) * sqrt(det of the g-first form of
// the wall) on the grid, its per-column cumulative integral C up to the
// window top, and the constant piece above the window (wall beyond the
// window plus the cap).
struct WettedWall {
  BoundaryPatch patch;
  int Nu = 0, Nv = 0;
  double v_minus = 0, v_plus = 0, dv = 0;
  ArrayXXd F;       // Nv x Nu, rows bottom to top
  ArrayXXd C;       // C(j, k) = integral of F dv from v_j to v_plus
  double above = 0; // contribution from v_plus up to and including the cap
};

WettedWall build_wetted_wall(const PatchGrid& grid, const MetricField& g);

// Weighted wetted area from the per-column contact heights wb up to the top
// of the container, and its derivative with respect to each wb (the exact
// derivative of the discrete rule, used by the energy adjoint).
double wetted_above(const WettedWall& wall, const VectorXd& wb);
VectorXd wetted_above_deriv(const WettedWall& wall, const VectorXd& wb);

// E(region). The Below side integrates the wetted wall from the window
// bottom up to the contact curve; wall below the slicing window would only
// add a constant no variation can see, so it is left out.
double capillary_energy(const Region& region, const WettedWall& wall,
                        const MetricField& g, DerivScheme scheme = DerivScheme::Spectral);

}  // namespace caprig

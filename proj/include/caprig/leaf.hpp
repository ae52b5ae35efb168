#pragma once
// Disk-type surfaces ("leaves") represented as heights over a radial chart
// anchored to the container wall:
//
//   Phi(r, u) = ( c(w) + r * (wall(u, w) - c(w)),  w ),   w = w(r, u),
//
// where wall(u, v) is the patch chart, c(v) is the horizontal center path
// (level-curve centroids, or the axis through p_plus for cap-hugging
// leaves), r in (0, 1] the radial fraction and u the angle. Row i of the
// height array holds r_i = (i + 1/2) dr for i < Nr-1 and r = 1 (the contact
// curve, exactly on the wall) for i = Nr-1, with dr = 1/(Nr - 1/2); the
// staggered first node keeps the chart away from the coordinate center.
#include "caprig/common.hpp"
#include "caprig/numerics.hpp"
#include "caprig/patch.hpp"

namespace caprig {

struct Leaf {
  enum class Kind { FlatSlice, Quadratic, Solver };
  Kind kind = Kind::FlatSlice;

  BoundaryPatch patch;
  bool center_on_axis = false;  // center at p_plus instead of the centroids
  Vec3 p_plus = Vec3(0, 0, 1);
  CubicSpline center_x, center_y;  // centroid path (unused when on-axis)

  int Nr = 0, Nu = 0;
  ArrayXXd w;  // Nr x Nu heights

  double dr() const { return 1.0 / (Nr - 0.5); }
  double rnode(int i) const { return i + 1 == Nr ? 1.0 : (i + 0.5) * dr(); }
  double unode(int k) const { return 2.0 * kPi * k / Nu; }
};

// Horizontal center of the radial chart at height v.
Vec2 leaf_center(const Leaf& leaf, double v);

// Embedded position of grid node (i, k).
Vec3 leaf_point(const Leaf& leaf, int i, int k);

// Horizontal slice at the given height; heights are constant so the leaf is
// exactly the planar cross-section through the container.
Leaf flat_leaf(const PatchGrid& grid, double height, int Nr);

// Derivative discretization on the leaf grid. Spectral differentiates the
// angle by trigonometric interpolation and the radius by 4th-order banded
// stencils (one-sided at the ends); Compact uses 2nd-order three-point
// stencils throughout, which keeps the linearization of the node equations
// sparse for the implicit solves.
enum class DerivScheme { Spectral, Compact };

// Radial quadrature weights over r in [0, 1] for the staggered node layout:
// midpoint cells for the interior rows plus a two-node end rule tying in the
// contact row, exact for integrands linear in r.
VectorXd radial_weights(int Nr);

// Integral over the leaf parameter square of a per-node density,
// sum_ik q_i (2 pi / Nu) f(i, k).
double leaf_integral(const Leaf& leaf, const ArrayXXd& f);

// Pointwise surface geometry of a leaf under an ambient metric. All arrays
// are Nr x Nu over the (r, u) grid; the chart/center jets are kept so that
// downstream calculus (adjoints, linearizations) can reuse them without
// re-evaluating the wall chart.
struct LeafGeometry {
  int Nr = 0, Nu = 0;
  DerivScheme scheme = DerivScheme::Spectral;

  ArrayXXd wr, wu, wrr, wru, wuu;  // height derivatives

  // wall chart jets at (u_k, w_ik) and center path values/derivatives
  ArrayXXd bx, by, bxu, byu, bxv, byv, bxuu, byuu, bxuv, byuv, bxvv, byvv;
  ArrayXXd cx, cy, cxv, cyv, cxvv, cyvv;

  ArrayXXd px, py;                 // embedded horizontal position (z = w)
  std::array<ArrayXXd, 3> Pr, Pu;  // embedding tangents Phi_r, Phi_u

  ArrayXXd G11, G12, G22, detG, sqrtG;  // first fundamental form under g
  std::array<ArrayXXd, 3> N;            // upward g-unit normal
  ArrayXXd II11, II12, II22;            // second fundamental form toward N
  ArrayXXd H;                           // mean curvature toward N

  // contact row (r = 1) data
  VectorXd cos_rho;        // prescribed cosine of the contact angle
  VectorXd angle_residual; // <N, X>_g - cos_rho per contact node
  VectorXd bnd_ds;         // boundary line element |Phi_u|_g
  std::array<VectorXd, 3> eta;  // outward g-unit conormal along the contact

  double area = 0.0;    // total g-area
  double mean_H = 0.0;  // area average of H
};

LeafGeometry leaf_geometry(const Leaf& leaf, const MetricField& g,
                           DerivScheme scheme = DerivScheme::Spectral);

// Banded differentiation matrix (order m in {1, 2}) on the staggered radial
// grid, per the chosen scheme.
MatrixXd radial_derivative_matrix(int Nr, int m, DerivScheme scheme);

// Per-row angular derivative of order m (spectral or 3-point periodic).
ArrayXXd angular_derivative(const ArrayXXd& f, int m, DerivScheme scheme);

}  // namespace caprig

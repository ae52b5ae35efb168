#pragma once
// Boundary comparison checks between the physical metric and the Euclidean
// reference on a container wall: the scaled mean-curvature hypothesis, the
// mixed-direction lower bound, the local boundary comparison with its
// convexity weights and equality branches, the vertex-cone angle comparison,
// and the homothety invariance of the capillary functional on a cone.
#include "caprig/angle.hpp"
#include "caprig/leaf.hpp"
#include "caprig/metric.hpp"
#include "caprig/patch.hpp"

namespace caprig {

enum class RigidityBranch { None, MetricMatch, NormalAligned };

// Everything the pointwise checks need at one wall point.
struct BoundaryPoint {
  Frame fr;         // Euclidean and g frames
  AngleSample ang;  // prescribed angle and its barred derivatives
  double H = 0;     // wall mean curvature in g
  double H0 = 0;    // wall mean curvature, Euclidean
  Mat2 II_g;        // wall second fundamental form, g-unit (tau, nu) basis
  Mat2 II_e;        // same, Euclidean (tau_bar, nu_bar) basis
  Mat3 gm;          // ambient metric at the point
};
BoundaryPoint boundary_point_data(const BoundaryPatch& patch,
                                  const MetricField& g, double u, double v);

// H - H0 <a tau + b nu, a tau_bar + b nu_bar>_E / (a^2 + b^2), the
// mixed-direction consequence of the scaled mean-curvature hypothesis.
// Throws ZeroDirection when a = b = 0.
double mixed_direction_margin(const BoundaryPoint& bp, double a, double b);

// (H0 - d_nu rho) d_nu rho - (d_tau rho)^2; agrees with the Euclidean
// det II wherever the wall is weakly convex.
double weak_convexity_margin(const BoundaryPoint& bp);

struct LocalComparison {
  double margin = 0;
  double W1 = 0, W2 = 0;   // convexity weights; W1 + W2 = 1 when valid
  bool weights_valid = false;
  RigidityBranch branch = RigidityBranch::None;
};

// Margin of the local boundary comparison for one contact direction:
//   (H - d_nu rho) - <tau, (d_tau rho) nu_bar + (H0 - d_nu rho) tau_bar>_E
// with (tau, nu) a g-unit frame of the wall tangent plane, orientation
// matched to (tau_bar, nu_bar). The equality branch is classified when
// |margin| < branch_tol * (1 + |H0|).
LocalComparison local_boundary_comparison(const BoundaryPoint& bp,
                                          const Vec3& tau, const Vec3& nu,
                                          double branch_tol = 1e-7);

// Minimum margin over a fan of n equispaced g-unit contact directions.
LocalComparison local_boundary_comparison_fan(const BoundaryPoint& bp,
                                              int n = 64,
                                              double branch_tol = 1e-7);

struct ComparisonReport {
  ArrayXXd margins;  // Nv x Nu sample margins
  double min_margin = 0;
  double worst_u = 0, worst_v = 0;
  RigidityBranch branch = RigidityBranch::None;
  bool pass = false;
};

// Smallest eigenvalue of H^2 g - H0^2 g_Eucl restricted to the wall tangent
// plane (in the (tau_bar, nu_bar) basis), over an Nv x Nu sample grid of the
// slicing window. pass iff the minimum is >= -tol; the equality branch is
// classified at the worst sample.
ComparisonReport check_scaled_mc_comparison(const BoundaryPatch& patch,
                                            const MetricField& g, int Nu,
                                            int Nv, double tol = 1e-8);

struct ConeComparison {
  bool holds = false;        // cos-angle comparison holds at every sample
  double min_margin = 0, max_margin = 0;
  bool has_witness = false;  // some pair is strictly wider in g than in Euclid
  Vec3 w1 = Vec3::Zero(), w2 = Vec3::Zero();
};

// Angle-cosine comparison between a constant vertex metric and the Euclidean
// one: margin(z1, z2) = cos_g(z1, z2) - cos_E(z1, z2) over random direction
// pairs plus all axis/diagonal pairs. Throws DegenerateCone when the vertex
// metric is not positive definite.
ConeComparison conical_comparison(const Mat3& vertex_metric,
                                  int samples = 10000, double tol = 1e-9);

// |A(scaled leaf) - r^2 A(leaf)| for the vertex-side capillary functional on
// an exactly conical wall (apex at the chart origin), where the scaled leaf
// has heights r * w. The wetted term is integrated from the apex in closed
// form, so the residual isolates quadrature and roundoff. Throws
// RegionEscapesCone when the scaled leaf leaves the chart's v range.
double homothety_scaling_check(const PatchGrid& grid, const MetricField& g,
                               const Leaf& leaf, double r);

}  // namespace caprig

#pragma once
// Quadratic osculation of the container boundary at its top point, and the
// weighted quadratic graphs built from it.
//
// Near a top point p_plus with horizontal tangent plane the wall is a graph
//   z = z_plus - ( c11 x1^2 + 2 c12 x1 x2 + c22 x2^2 ) + O(|x|^3)
// over axes (x1, x2) obtained by rotating (x, y) about e_z by theta. The
// coefficients are recovered by least squares on rings of chart samples at
// three ring radii, extrapolated to radius zero.
#include "caprig/leaf.hpp"
#include "caprig/metric.hpp"
#include "caprig/patch.hpp"

namespace caprig {

struct QuadraticFit {
  Vec3 p_plus = Vec3(0, 0, 1);
  double theta = 0.0;  // ccw angle of the fit axes relative to (x, y)
  double c11 = 0.0, c12 = 0.0, c22 = 0.0;
  bool strictly_convex = false;  // c11 > 0, c22 > 0, c11*c22 - c12^2 > 0
  double fit_rms = 0.0;          // residual of the ring fit at the smallest radius
  std::array<double, 3> radii{{0.2, 0.1, 0.05}};
  // c11, c12, c22 recovered at each ring radius before extrapolation.
  std::array<std::array<double, 3>, 3> per_radius{};
};

// Fit the osculating quadratic at p_plus. When g0 is given, theta is chosen
// to diagonalize the horizontal block of g0 at p_plus and the fit is done in
// those axes; otherwise theta = 0.
QuadraticFit quadratic_fit_boundary(const BoundaryPatch& patch, const Vec3& p_plus,
                                    const Mat3* g0 = nullptr);

// Graph leaf
//   z = z_plus + c11 (b1(1+s) - 1) x1^2 + 2 c12 (b12(1+s) - 1) x1 x2
//             + c22 (b2(1+s) - 1) x2^2 - t^2
// over the fit axes, clipped to the container; b = (b1, b12, b2). The
// contact curve sits on the wall, and the rescaled leaf (1/t) * leaf
// converges to the ellipse { c11 b1 x1^2 + 2 c12 b12 x1 x2 + c22 b2 x2^2
// < 1/(1+s) } as t -> 0. Throws EmptyLeaf when the clipped graph misses the
// container or the height solve leaves the chart.
Leaf quadratic_leaf(const BoundaryPatch& patch, const QuadraticFit& fit, const Vec3& b,
                    double s, double t, int Nr = 48, int Nu = 128);

}  // namespace caprig

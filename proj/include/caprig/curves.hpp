#pragma once
// Closed curves on a container wall and the two global integrals over them:
// the total turning of the level-tangent direction (a winding number, an
// integer multiple of 2pi) and the weighted boundary-curvature integral that
// dominates it under the comparison hypotheses.
#include <functional>

#include "caprig/common.hpp"
#include "caprig/metric.hpp"
#include "caprig/patch.hpp"

namespace caprig {

// Closed curve in chart coordinates, parametrized by s in [0, 2pi).
struct WallCurve {
  std::function<Vec2(double)> uv;
  int samples = 512;  // base sampling; integrals and unwrapping refine as needed
};

// Level circle v = v0.
WallCurve level_wall_curve(double v0);
// u = s, v = v0 + amp * sin(mode * s + phase): slanted/wiggled but still
// winding once around the wall.
WallCurve wavy_wall_curve(double v0, double amp, int mode, double phase = 0.0);
// u = loops * s: winds several times (non-simple for loops > 1).
WallCurve looped_wall_curve(double v0, int loops);

struct WindingResult {
  double turning = 0;    // total turning of atan2(y_u, x_u) along the curve
  int multiple = 0;      // nearest integer k with turning ~ 2 pi k
  bool separating = false;  // k == 1, the simple separating case
};

// Total turning of the level-curve tangent direction along the curve.
// Samples are refined by bisection wherever consecutive turning angles jump
// by pi/2 or more; throws UnwrapAmbiguity if the refinement limit is hit.
WindingResult winding_integral(const BoundaryPatch& patch,
                               const WallCurve& curve);

// oint (H_wall - grad_nu rho_bar) / sin(rho_bar) ds in the metric g, where
// nu is the g-unit normal of the curve inside the wall, oriented to match
// the (tau_bar, nu_bar) level frame, and ds is g-arclength. Equals 2 pi on
// the round equality cases and dominates the winding integral under the
// mean-curvature comparison hypotheses.
double curve_estimate_integral(const BoundaryPatch& patch, const MetricField& g,
                               const WallCurve& curve, int n = 2048);

}  // namespace caprig

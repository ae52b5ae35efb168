#include "caprig/domains.hpp"

#include <cmath>

namespace caprig {

BoundaryPatch make_domain(const std::string& name) {
  BoundaryPatch p;
  p.name = name;
  if (name == "cylinder") {
    p.fx = [](double u, double) { return std::cos(u); };
    p.fy = [](double u, double) { return std::sin(u); };
    p.v_minus = -1.0;
    p.v_plus = 1.0;
    p.chart_vlo = -1.3;
    p.chart_vhi = 1.3;
    p.top_cap = BoundaryPatch::Cap::Flat;
    p.v_top = 1.0;
    p.constant_speed = true;
    return p;
  }
  if (name == "sphere") {
    // Unit sphere; the slicing window stays clear of the poles, where the
    // height derivatives of the chart blow up and would dominate the
    // truncation error of the v-stencils.
    p.fx = [](double u, double v) { return std::sqrt(1.0 - v * v) * std::cos(u); };
    p.fy = [](double u, double v) { return std::sqrt(1.0 - v * v) * std::sin(u); };
    p.v_minus = -0.55;
    p.v_plus = 0.55;
    p.chart_vlo = -0.93;
    p.chart_vhi = 0.93;
    p.top_cap = BoundaryPatch::Cap::Smooth;
    p.v_top = 1.0;
    p.constant_speed = true;
    return p;
  }
  if (name == "ellipsoid") {
    const double a = 1.3, b = 1.0, c = 0.9;
    p.fx = [a, c](double u, double v) {
      return a * std::sqrt(std::max(0.0, 1.0 - (v / c) * (v / c))) * std::cos(u);
    };
    p.fy = [b, c](double u, double v) {
      return b * std::sqrt(std::max(0.0, 1.0 - (v / c) * (v / c))) * std::sin(u);
    };
    p.v_minus = -0.45;
    p.v_plus = 0.45;
    p.chart_vlo = -0.85 * c;
    p.chart_vhi = 0.85 * c;
    p.top_cap = BoundaryPatch::Cap::Smooth;
    p.v_top = c;
    return p;
  }
  if (name == "prism") {
    // Elliptic cylinder: constant cross-section, genuinely non-constant
    // speed, flat caps.
    p.fx = [](double u, double) { return 1.5 * std::cos(u); };
    p.fy = [](double u, double) { return std::sin(u); };
    p.v_minus = -1.0;
    p.v_plus = 1.0;
    p.chart_vlo = -1.3;
    p.chart_vhi = 1.3;
    p.top_cap = BoundaryPatch::Cap::Flat;
    p.v_top = 1.0;
    return p;
  }
  if (name == "cone") {
    // Truncated cone over the unit circle, radius = v, widening upward.
    p.fx = [](double u, double v) { return v * std::cos(u); };
    p.fy = [](double u, double v) { return v * std::sin(u); };
    p.v_minus = 0.05;
    p.v_plus = 1.0;
    p.chart_vlo = 0.02;
    p.chart_vhi = 1.3;
    p.top_cap = BoundaryPatch::Cap::Flat;
    p.v_top = 1.0;
    p.constant_speed = true;
    return p;
  }
  fail("IoError", "unknown built-in domain '" + name + "'");
}

BoundaryPatch make_parametric_domain(const Expr& ex, const Expr& ey,
                                     double vmin, double vmax,
                                     const std::string& name) {
  require(vmin < vmax, "IoError", "parametric domain needs vmin < vmax");
  BoundaryPatch p;
  p.name = name;
  auto wrap = [](Expr e) {
    return [e](double u, double v) {
      double vars[6] = {u, v, 0, 0, 0, 0};
      std::vector<double> scratch;
      return e.eval(vars, scratch);
    };
  };
  p.fx = wrap(ex);
  p.fy = wrap(ey);
  const double w = vmax - vmin;
  p.v_minus = vmin;
  p.v_plus = vmax;
  p.chart_vlo = vmin - 0.05 * w;
  p.chart_vhi = vmax + 0.05 * w;
  p.top_cap = BoundaryPatch::Cap::Flat;
  p.v_top = vmax;

  // Frames assume the level curves run counterclockwise seen from +z.
  // Check the signed area of the middle level and flip u -> 2pi - u if the
  // user's chart runs the other way.
  const double vm = 0.5 * (vmin + vmax);
  const int n = 256;
  double area2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double u0 = 2.0 * kPi * j / n, u1 = 2.0 * kPi * (j + 1) / n;
    const double x0 = p.fx(u0, vm), y0 = p.fy(u0, vm);
    const double x1 = p.fx(u1, vm), y1 = p.fy(u1, vm);
    area2 += x0 * y1 - x1 * y0;
  }
  if (area2 < 0.0) {
    const ChartFn ofx = p.fx, ofy = p.fy;
    p.fx = [ofx](double u, double v) { return ofx(2.0 * kPi - u, v); };
    p.fy = [ofy](double u, double v) { return ofy(2.0 * kPi - u, v); };
  }
  return p;
}

}  // namespace caprig

#include "caprig/curves.hpp"

#include <cmath>

#include "caprig/angle.hpp"
#include "caprig/numerics.hpp"

namespace caprig {

WallCurve level_wall_curve(double v0) {
  WallCurve c;
  c.uv = [v0](double s) { return Vec2(s, v0); };
  return c;
}

WallCurve wavy_wall_curve(double v0, double amp, int mode, double phase) {
  WallCurve c;
  c.uv = [=](double s) {
    return Vec2(s, v0 + amp * std::sin(mode * s + phase));
  };
  return c;
}

WallCurve looped_wall_curve(double v0, int loops) {
  WallCurve c;
  c.uv = [v0, loops](double s) { return Vec2(loops * s, v0); };
  return c;
}

namespace {

double tangent_angle(const BoundaryPatch& patch, const WallCurve& curve,
                     double s) {
  const Vec2 uv = curve.uv(s);
  const ChartJet J = chart_jet(patch, uv(0), uv(1));
  return std::atan2(J.yu, J.xu);
}

// Difference of two angles wrapped into (-pi, pi].
double wrap_angle(double d) {
  while (d > kPi) d -= 2.0 * kPi;
  while (d <= -kPi) d += 2.0 * kPi;
  return d;
}

// Turning between parameters s0 < s1 with angles t0, t1, bisecting until
// each hop is under pi/2 so the lift is unambiguous.
double turning_between(const BoundaryPatch& patch, const WallCurve& curve,
                       double s0, double t0, double s1, double t1, int depth) {
  const double d = wrap_angle(t1 - t0);
  if (std::abs(d) < 0.5 * kPi) return d;
  require(depth < 24, "UnwrapAmbiguity",
          "turning angle jumps by >= pi/2 at the refinement limit");
  const double sm = 0.5 * (s0 + s1);
  const double tm = tangent_angle(patch, curve, sm);
  return turning_between(patch, curve, s0, t0, sm, tm, depth + 1) +
         turning_between(patch, curve, sm, tm, s1, t1, depth + 1);
}

}  // namespace

WindingResult winding_integral(const BoundaryPatch& patch,
                               const WallCurve& curve) {
  const int n = curve.samples;
  std::vector<double> sv(n + 1), tv(n + 1);
  for (int j = 0; j <= n; ++j) {
    sv[j] = 2.0 * kPi * j / n;
    tv[j] = tangent_angle(patch, curve, sv[j]);
  }
  double total = 0.0;
  for (int j = 0; j < n; ++j)
    total += turning_between(patch, curve, sv[j], tv[j], sv[j + 1], tv[j + 1], 0);

  WindingResult out;
  out.turning = total;
  out.multiple = static_cast<int>(std::llround(total / (2.0 * kPi)));
  out.separating = out.multiple == 1;
  return out;
}

double curve_estimate_integral(const BoundaryPatch& patch, const MetricField& g,
                               const WallCurve& curve, int n) {
  const bool const_g = metric_is_constant(g);
  Mat3 g_const = Mat3::Identity();
  if (const_g) g_const = metric_at(g, Vec3::Zero());

  std::vector<double> f(n);
  parallel_for(n, [&](int j) {
    const double s = 2.0 * kPi * j / n;
    const Vec2 uv = curve.uv(s);
    const double u = uv(0), v = uv(1);

    // curve velocity in chart coordinates (centered difference in s)
    const double hs = 1e-6;
    const Vec2 dp = (curve.uv(s + hs) - curve.uv(s - hs)) / (2.0 * hs);

    const ChartJet J = chart_jet(patch, u, v);
    const Vec3 pu(J.xu, J.yu, 0.0), pv(J.xv, J.yv, 1.0);
    const Vec3 vel = dp(0) * pu + dp(1) * pv;

    const Frame F = frames_at(patch, &g, u, v);
    const Mat3 gm = const_g ? g_const : metric_at(g, F.p);
    const double speed = std::sqrt(vel.dot(gm * vel));

    // g-unit tangent and the matched-orientation g-unit normal in the wall
    const Vec3 tau = vel / speed;
    Vec3 nu = F.nu_g - F.nu_g.dot(gm * tau) * tau;
    nu /= std::sqrt(nu.dot(gm * nu));
    if (tau.cross(nu).dot(F.tau_bar.cross(F.nu_bar)) < 0.0) nu = -nu;

    const WallShape shape = second_fundamental_form(patch, &g, u, v);
    const AngleSample ang = angle_at(patch, u, v);
    const double dnu_rho =
        nu.dot(F.tau_bar) * ang.dtau + nu.dot(F.nu_bar) * ang.dnu;

    f[j] = (shape.H - dnu_rho) / ang.sin_rho * speed;
  });
  return trapezoid_periodic(f.data(), n, 2.0 * kPi);
}

}  // namespace caprig

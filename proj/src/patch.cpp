#include "caprig/patch.hpp"

#include "caprig/fft.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace caprig {

namespace {

double wrap_2pi(double u) {
  double w = std::fmod(u, 2.0 * kPi);
  if (w < 0) w += 2.0 * kPi;
  return w;
}

}  // namespace

// ----------------------------------------------------------------- chart jet

namespace {

// Jet near a smooth cap apex, where the chart's v-derivatives degenerate
// like 1/sqrt(v_top - v). Differentiates in the regular meridian parameter
// xi = sqrt(v_top - v), where smooth convex caps have analytic charts, and
// chains back to v.
ChartJet apex_jet(const BoundaryPatch& patch, double u0, double v0) {
  require(v0 < patch.v_top - 1e-10, "StencilOutOfDomain",
          "chart jet requested at the cap apex itself");
  const double hu = patch.resampled ? 2e-2 : 5e-3;
  const double hx = 5e-3;
  const double xi0 = std::sqrt(patch.v_top - v0);

  double lo = std::max(0.0, xi0 - 2.0 * hx);
  const bool shifted = std::abs(lo - (xi0 - 2.0 * hx)) > 1e-13;
  const int nx = shifted ? 6 : 5;
  std::vector<double> un(5), xn(nx), vn(nx);
  for (int j = 0; j < 5; ++j) un[j] = u0 + (j - 2) * hu;
  for (int j = 0; j < nx; ++j) {
    xn[j] = lo + j * hx;
    vn[j] = patch.v_top - xn[j] * xn[j];
  }
  const auto wu1 = fd_weights(u0, un, 1), wu2 = fd_weights(u0, un, 2);
  const auto wx1 = fd_weights(xi0, xn, 1), wx2 = fd_weights(xi0, xn, 2);
  const double xi_v = -0.5 / xi0;
  const double xi_vv = -0.25 / (xi0 * xi0 * xi0);

  ChartJet J;
  J.x = patch.fx(u0, v0);
  J.y = patch.fy(u0, v0);
  for (int a = 0; a < 5; ++a) {
    const double xa = patch.fx(un[a], v0), ya = patch.fy(un[a], v0);
    J.xu += wu1[a] * xa;
    J.yu += wu1[a] * ya;
    J.xuu += wu2[a] * xa;
    J.yuu += wu2[a] * ya;
  }
  double fx1 = 0, fx2 = 0, fy1 = 0, fy2 = 0, fxu = 0, fyu = 0;
  for (int b = 0; b < nx; ++b) {
    const double xb = patch.fx(u0, vn[b]), yb = patch.fy(u0, vn[b]);
    fx1 += wx1[b] * xb;
    fy1 += wx1[b] * yb;
    fx2 += wx2[b] * xb;
    fy2 += wx2[b] * yb;
  }
  for (int a = 0; a < 5; ++a) {
    if (wu1[a] == 0.0) continue;
    for (int b = 0; b < nx; ++b) {
      if (wx1[b] == 0.0) continue;
      const double w = wu1[a] * wx1[b];
      fxu += w * patch.fx(un[a], vn[b]);
      fyu += w * patch.fy(un[a], vn[b]);
    }
  }
  J.xv = fx1 * xi_v;
  J.yv = fy1 * xi_v;
  J.xvv = fx2 * xi_v * xi_v + fx1 * xi_vv;
  J.yvv = fy2 * xi_v * xi_v + fy1 * xi_vv;
  J.xuv = fxu * xi_v;
  J.yuv = fyu * xi_v;
  return J;
}

}  // namespace

ChartJet chart_jet(const BoundaryPatch& patch, double u0, double v0) {
  const double h = patch.resampled ? 2e-2 : 5e-3;
  // The cap's sqrt degeneracy pollutes plain v-stencils well below the top
  // (truncation grows like (v_top - v)^{-9/2}), so hand the whole upper part
  // of the chart to the regularized branch.
  const double apex_from =
      std::min(patch.chart_vhi - 3.0 * h,
               patch.v_top - 0.55 * (patch.v_top - patch.chart_vlo));
  if (patch.top_cap == BoundaryPatch::Cap::Smooth && v0 > apex_from)
    return apex_jet(patch, u0, v0);
  require(v0 >= patch.chart_vlo - 1e-12 && v0 <= patch.chart_vhi + 1e-12,
          "StencilOutOfDomain", "query height outside the chart range");
  require(patch.chart_vhi - patch.chart_vlo > 4.0 * h, "StencilOutOfDomain",
          "chart v-range too small for the derivative stencil");
  double lo = v0 - 2.0 * h;
  lo = std::min(std::max(lo, patch.chart_vlo), patch.chart_vhi - 4.0 * h);
  // A shifted (one-sided) 5-node window loses an order on the second
  // derivative, so widen it to 6 nodes when the chart allows.
  const bool shifted = std::abs(lo - (v0 - 2.0 * h)) > 1e-13;
  int nv = 5;
  if (shifted && patch.chart_vhi - patch.chart_vlo > 5.0 * h) {
    nv = 6;
    lo = std::min(std::max(v0 - 2.0 * h, patch.chart_vlo),
                  patch.chart_vhi - 5.0 * h);
  }

  std::vector<double> un(5), vn(nv);
  for (int j = 0; j < 5; ++j) un[j] = u0 + (j - 2) * h;
  for (int j = 0; j < nv; ++j) vn[j] = lo + j * h;
  const auto wu1 = fd_weights(u0, un, 1), wu2 = fd_weights(u0, un, 2);
  const auto wv1 = fd_weights(v0, vn, 1), wv2 = fd_weights(v0, vn, 2);

  ChartJet J;
  J.x = patch.fx(u0, v0);
  J.y = patch.fy(u0, v0);
  for (int a = 0; a < 5; ++a) {
    const double xa = patch.fx(un[a], v0), ya = patch.fy(un[a], v0);
    J.xu += wu1[a] * xa;
    J.yu += wu1[a] * ya;
    J.xuu += wu2[a] * xa;
    J.yuu += wu2[a] * ya;
  }
  for (int b = 0; b < nv; ++b) {
    const double xb = patch.fx(u0, vn[b]), yb = patch.fy(u0, vn[b]);
    J.xv += wv1[b] * xb;
    J.yv += wv1[b] * yb;
    J.xvv += wv2[b] * xb;
    J.yvv += wv2[b] * yb;
  }
  for (int a = 0; a < 5; ++a) {
    if (wu1[a] == 0.0) continue;
    for (int b = 0; b < nv; ++b) {
      const double w = wu1[a] * wv1[b];
      if (w == 0.0) continue;
      J.xuv += w * patch.fx(un[a], vn[b]);
      J.yuv += w * patch.fy(un[a], vn[b]);
    }
  }
  return J;
}

// -------------------------------------------------------------------- frames

Frame frames_at(const BoundaryPatch& patch, const MetricField* metric,
                double u, double v) {
  const ChartJet J = chart_jet(patch, u, v);
  const double s2 = J.xu * J.xu + J.yu * J.yu;
  require(s2 > 1e-20, "DegenerateLevelCurve", "level-curve tangent vanishes");
  const double s = std::sqrt(s2);
  const double jac = J.xu * J.yv - J.xv * J.yu;
  const double q = std::sqrt(s2 + jac * jac);

  Frame F;
  F.p = Vec3(J.x, J.y, v);
  F.tau_bar = Vec3(J.xu / s, J.yu / s, 0.0);
  F.eta_bar = Vec3(J.yu / s, -J.xu / s, 0.0);
  F.cos_rho = jac / q;
  F.sin_rho = s / q;
  require(F.sin_rho > 1e-8, "DegenerateContactAngle",
          "wall is tangent to the horizontal slicing");
  F.X_out = F.cos_rho * Vec3(0, 0, 1) + F.sin_rho * F.eta_bar;
  F.nu_bar = F.tau_bar.cross(F.X_out);

  F.tau_g = F.tau_bar;
  F.nu_g = F.nu_bar;
  F.X_g = F.X_out;
  if (metric != nullptr) {
    const Mat3 g = metric_at(*metric, F.p);
    const Vec3 psi_u(J.xu, J.yu, 0.0), psi_v(J.xv, J.yv, 1.0);
    F.tau_g = psi_u / std::sqrt(psi_u.dot(g * psi_u));
    Vec3 w = psi_v - psi_v.dot(g * F.tau_g) * F.tau_g;
    const double wn = std::sqrt(w.dot(g * w));
    require(wn > 1e-14, "DegenerateLevelCurve", "tangent plane is degenerate");
    w /= wn;
    F.nu_g = w.dot(F.nu_bar) >= 0.0 ? w : Vec3(-w);
    Vec3 xg = g.inverse() * psi_u.cross(psi_v);
    xg /= std::sqrt(xg.dot(g * xg));
    F.X_g = xg;
  }
  return F;
}

WallShape second_fundamental_form(const BoundaryPatch& patch,
                                  const MetricField* metric, double u, double v) {
  const ChartJet J = chart_jet(patch, u, v);
  const Frame F = frames_at(patch, metric, u, v);
  const Vec3 psi_u(J.xu, J.yu, 0.0), psi_v(J.xv, J.yv, 1.0);
  const Vec3 psi_uu(J.xuu, J.yuu, 0.0), psi_uv(J.xuv, J.yuv, 0.0),
      psi_vv(J.xvv, J.yvv, 0.0);

  Mat3 g = Mat3::Identity();
  double gamma[3][3][3] = {};
  if (metric != nullptr) {
    g = metric_at(*metric, F.p);
    christoffel_at(*metric, F.p, 1e-4, gamma);
  }
  auto connection = [&](const Vec3& a, const Vec3& b) {
    Vec3 out = Vec3::Zero();
    for (int k = 0; k < 3; ++k) {
      double sum = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) sum += gamma[k][i][j] * a[i] * b[j];
      out[k] = sum;
    }
    return out;
  };
  const Vec3 X = metric ? F.X_g : F.X_out;
  auto form = [&](const Vec3& a, const Vec3& b, const Vec3& d2) {
    return -X.dot(g * (d2 + connection(a, b)));
  };
  // II in the (psi_u, psi_v) coordinate basis.
  Mat2 IIc;
  IIc(0, 0) = form(psi_u, psi_u, psi_uu);
  IIc(0, 1) = IIc(1, 0) = form(psi_u, psi_v, psi_uv);
  IIc(1, 1) = form(psi_v, psi_v, psi_vv);

  // Coordinates of the g-unit frame in the (psi_u, psi_v) basis.
  const Vec3 tau = metric ? F.tau_g : F.tau_bar;
  const Vec3 nu = metric ? F.nu_g : F.nu_bar;
  // tau = t1 psi_u (t2 = 0 since tau is horizontal along the level curve).
  const double t1 = (std::abs(J.xu) >= std::abs(J.yu)) ? tau[0] / J.xu : tau[1] / J.yu;
  // nu = n1 psi_u + n2 psi_v; the third component gives n2 directly.
  const double n2 = nu[2];
  const double n1 = (std::abs(J.xu) >= std::abs(J.yu))
                        ? (nu[0] - n2 * J.xv) / J.xu
                        : (nu[1] - n2 * J.yv) / J.yu;
  WallShape out;
  out.II(0, 0) = t1 * t1 * IIc(0, 0);
  out.II(0, 1) = out.II(1, 0) = t1 * (n1 * IIc(0, 0) + n2 * IIc(0, 1));
  out.II(1, 1) =
      n1 * n1 * IIc(0, 0) + 2.0 * n1 * n2 * IIc(0, 1) + n2 * n2 * IIc(1, 1);
  out.H = out.II(0, 0) + out.II(1, 1);
  return out;
}

double level_curve_curvature(const BoundaryPatch& patch, double u, double v) {
  const ChartJet J = chart_jet(patch, u, v);
  const double s2 = J.xu * J.xu + J.yu * J.yu;
  require(s2 > 1e-20, "DegenerateLevelCurve", "level-curve tangent vanishes");
  return (J.xu * J.yuu - J.yu * J.xuu) / (s2 * std::sqrt(s2));
}

// --------------------------------------------------------------- resampling

namespace {

struct LevelTable {
  double L = 0.0;
  CubicSpline s_of_a;  // arclength vs original parameter, nodes on [0, 2pi]
};

bool segments_cross(double ax, double ay, double bx, double by, double cx,
                    double cy, double dx, double dy) {
  auto orient = [](double ox, double oy, double px, double py, double qx,
                   double qy) {
    return (px - ox) * (qy - oy) - (py - oy) * (qx - ox);
  };
  const double o1 = orient(ax, ay, bx, by, cx, cy);
  const double o2 = orient(ax, ay, bx, by, dx, dy);
  const double o3 = orient(cx, cy, dx, dy, ax, ay);
  const double o4 = orient(cx, cy, dx, dy, bx, by);
  return o1 * o2 < 0.0 && o3 * o4 < 0.0;
}

void check_simple(const std::vector<double>& xs, const std::vector<double>& ys) {
  const int M = static_cast<int>(xs.size());
  const int n = std::min(96, M);
  const int stride = M / n;
  std::vector<double> px(n), py(n);
  for (int i = 0; i < n; ++i) {
    px[i] = xs[i * stride];
    py[i] = ys[i * stride];
  }
  for (int i = 0; i < n; ++i) {
    const int i2 = (i + 1) % n;
    for (int j = i + 2; j < n; ++j) {
      const int j2 = (j + 1) % n;
      if (j2 == i) continue;  // shares an endpoint
      if (segments_cross(px[i], py[i], px[i2], py[i2], px[j], py[j], px[j2],
                         py[j2]))
        fail("DegenerateLevelCurve", "level curve self-intersects");
    }
  }
}

LevelTable build_level_table(const ChartFn& fx, const ChartFn& fy, double v,
                             int M) {
  std::vector<double> xs(M), ys(M);
  for (int j = 0; j < M; ++j) {
    const double u = 2.0 * kPi * j / M;
    xs[j] = fx(u, v);
    ys[j] = fy(u, v);
  }
  const auto dx = spectral_derivative(xs, 1, 2.0 * kPi);
  const auto dy = spectral_derivative(ys, 1, 2.0 * kPi);
  std::vector<double> spd(M);
  double mn = 1e300;
  for (int j = 0; j < M; ++j) {
    spd[j] = std::hypot(dx[j], dy[j]);
    mn = std::min(mn, spd[j]);
  }
  LevelTable t;
  t.L = trapezoid_periodic(spd.data(), M, 2.0 * kPi);
  require(t.L >= 1e-10, "DegenerateLevelCurve", "level curve shorter than 1e-10");
  require(mn > 1e-8 * t.L / (2.0 * kPi), "DegenerateLevelCurve",
          "level curve is not regular");
  check_simple(xs, ys);
  auto s = spectral_antiderivative(spd, 2.0 * kPi);
  std::vector<double> anodes(M + 1), svals(M + 1);
  for (int j = 0; j < M; ++j) {
    anodes[j] = 2.0 * kPi * j / M;
    svals[j] = s[j];
  }
  anodes[M] = 2.0 * kPi;
  svals[M] = t.L;
  t.s_of_a.build(anodes, svals);
  return t;
}

// Original parameter alpha with arclength(alpha) = ufrac * L, ufrac in [0,1).
double invert_level(const LevelTable& t, double ufrac) {
  const double target = ufrac * t.L;
  const auto& xs = t.s_of_a.x;
  const auto& ss = t.s_of_a.y;
  int lo = 0, hi = static_cast<int>(ss.size()) - 1;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (ss[mid] <= target ? lo : hi) = mid;
  }
  const double span = std::max(ss[hi] - ss[lo], 1e-300);
  double a = xs[lo] + (xs[hi] - xs[lo]) * (target - ss[lo]) / span;
  for (int it = 0; it < 4; ++it) {
    const double d = t.s_of_a.deriv(a);
    if (!(d > 0.0)) break;
    a -= (t.s_of_a.eval(a) - target) / d;
    a = std::min(std::max(a, xs[lo]), xs[hi]);
  }
  return a;
}

struct ResampleMap {
  double vlo = 0.0, vhi = 0.0;
  bool single = false;           // reparametrization independent of v
  std::vector<LevelTable> levels;  // uniform over [vlo, vhi]

  double alpha(double u, double v) const {
    const double ufrac = wrap_2pi(u) / (2.0 * kPi);
    if (single) return invert_level(levels[0], ufrac);
    const int n = static_cast<int>(levels.size());
    const double step = (vhi - vlo) / (n - 1);
    int k0 = static_cast<int>(std::floor((v - vlo) / step)) - 1;
    k0 = std::min(std::max(k0, 0), n - 4);
    double av[4], vv[4];
    for (int j = 0; j < 4; ++j) {
      av[j] = invert_level(levels[k0 + j], ufrac);
      vv[j] = vlo + (k0 + j) * step;
    }
    double out = 0.0;  // 4-point Lagrange interpolation across levels
    for (int j = 0; j < 4; ++j) {
      double w = 1.0;
      for (int m = 0; m < 4; ++m)
        if (m != j) w *= (v - vv[m]) / (vv[j] - vv[m]);
      out += w * av[j];
    }
    return out;
  }
};

}  // namespace

BoundaryPatch resample_constant_speed(const BoundaryPatch& patch) {
  // Probe whether the chart is already constant-speed per level.
  bool already = true;
  for (int pk = 0; pk < 5 && already; ++pk) {
    const double v =
        patch.v_minus + (patch.v_plus - patch.v_minus) * pk / 4.0;
    const int M = 128;
    std::vector<double> xs(M), ys(M);
    for (int j = 0; j < M; ++j) {
      const double u = 2.0 * kPi * j / M;
      xs[j] = patch.fx(u, v);
      ys[j] = patch.fy(u, v);
    }
    const auto dx = spectral_derivative(xs, 1, 2.0 * kPi);
    const auto dy = spectral_derivative(ys, 1, 2.0 * kPi);
    double mean = 0.0;
    for (int j = 0; j < M; ++j) mean += std::hypot(dx[j], dy[j]);
    mean /= M;
    require(mean * 2.0 * kPi >= 1e-10, "DegenerateLevelCurve",
            "level curve shorter than 1e-10");
    for (int j = 0; j < M; ++j)
      if (std::abs(std::hypot(dx[j], dy[j]) - mean) > 1e-12 * mean) {
        already = false;
        break;
      }
  }
  if (already) {
    BoundaryPatch out = patch;
    out.constant_speed = true;
    return out;
  }

  const double w = patch.v_plus - patch.v_minus;
  auto map = std::make_shared<ResampleMap>();
  map->vlo = std::max(patch.chart_vlo, patch.v_minus - 0.12 * w);
  map->vhi = std::min(patch.chart_vhi, patch.v_plus + 0.12 * w);

  // Detect v-independent reparametrizations (levels that are scaled copies
  // of one profile). Scaling the speed scales the arclength table linearly,
  // so the inverse map is bitwise-stable under it and the probes agree to
  // rounding. One dense table then serves every height exactly, which keeps
  // the reparametrized chart smooth to machine precision.
  {
    const int Mp = std::max(8 * patch.Nu, 1024);
    std::vector<LevelTable> probes;
    for (int pk = 0; pk < 5; ++pk)
      probes.push_back(build_level_table(
          patch.fx, patch.fy, map->vlo + (map->vhi - map->vlo) * pk / 4.0, Mp));
    bool same = true;
    for (int pk = 1; pk < 5 && same; ++pk)
      for (int q = 1; q < 16 && same; ++q) {
        const double uf = q / 16.0;
        if (std::abs(invert_level(probes[pk], uf) -
                     invert_level(probes[0], uf)) > 1e-12)
          same = false;
      }
    if (same) {
      map->single = true;
      const int Ms = std::max(8 * patch.Nu, 32768);
      map->levels.push_back(build_level_table(
          patch.fx, patch.fy, 0.5 * (map->vlo + map->vhi), Ms));
    }
  }
  if (!map->single) {
    const int nlev = 2 * (patch.Nv - 1) + 1;
    const int M = std::max(8 * patch.Nu, 2048);
    map->levels.resize(nlev);
    parallel_for(nlev, [&](int k) {
      const double v = map->vlo + (map->vhi - map->vlo) * k / (nlev - 1.0);
      map->levels[k] = build_level_table(patch.fx, patch.fy, v, M);
    });
  }

  BoundaryPatch out = patch;
  out.resampled = true;
  out.constant_speed = true;
  out.chart_vlo = map->vlo;
  out.chart_vhi = map->vhi;
  const ChartFn fx0 = patch.fx, fy0 = patch.fy;
  out.fx = [map, fx0](double u, double v) {
    return fx0(map->alpha(u, v), v);
  };
  out.fy = [map, fy0](double u, double v) {
    return fy0(map->alpha(u, v), v);
  };
  return out;
}

// --------------------------------------------------------------------- grids

namespace {

ArrayXXd rows_du(const ArrayXXd& f, int order) {
  ArrayXXd out(f.rows(), f.cols());
  const int n = static_cast<int>(f.cols());
  std::vector<double> buf(n);
  for (int r = 0; r < f.rows(); ++r) {
    for (int i = 0; i < n; ++i) buf[i] = f(r, i);
    const auto d = spectral_derivative(buf, order, 2.0 * kPi);
    for (int i = 0; i < n; ++i) out(r, i) = d[i];
  }
  return out;
}

ArrayXXd cols_dv(const ArrayXXd& f, double dv, int m) {
  const int Nv = static_cast<int>(f.rows()), Nu = static_cast<int>(f.cols());
  ArrayXXd out(Nv, Nu);
  for (int k = 0; k < Nv; ++k) {
    int need = (m == 2 && (k < 2 || k > Nv - 3)) ? 6 : 5;
    need = std::min(need, Nv);
    const int s = std::min(std::max(k - need / 2, 0), Nv - need);
    std::vector<double> nodes(need);
    for (int j = 0; j < need; ++j) nodes[j] = (s + j) * dv;
    const auto w = fd_weights(k * dv, nodes, m);
    for (int i = 0; i < Nu; ++i) {
      double acc = 0.0;
      for (int j = 0; j < need; ++j) acc += w[j] * f(s + j, i);
      out(k, i) = acc;
    }
  }
  return out;
}

}  // namespace

PatchGrid build_patch_grid(const BoundaryPatch& patch, int Nu, int Nv) {
  require(Nu >= 8 && Nv >= 6, "InsufficientSamples", "grid too small");
  PatchGrid G;
  G.patch = patch;
  G.Nu = Nu;
  G.Nv = Nv;
  G.du = 2.0 * kPi / Nu;
  G.dv = (patch.v_plus - patch.v_minus) / (Nv - 1);
  G.uvals.resize(Nu);
  G.vvals.resize(Nv);
  for (int i = 0; i < Nu; ++i) G.uvals[i] = i * G.du;
  for (int k = 0; k < Nv; ++k) G.vvals[k] = patch.v_minus + k * G.dv;

  // Extend by up to two ghost rows per side (as far as the chart allows) so
  // every reported row gets a centered v-stencil; one-sided stencils are then
  // confined to ghost rows, which are dropped below.
  int elo = 0, ehi = 0;
  while (elo < 2 &&
         patch.v_minus - (elo + 1) * G.dv >= patch.chart_vlo - 1e-12)
    ++elo;
  while (ehi < 2 && patch.v_plus + (ehi + 1) * G.dv <= patch.chart_vhi + 1e-12)
    ++ehi;
  const int Nve = Nv + elo + ehi;

  ArrayXXd Xe(Nve, Nu), Ye(Nve, Nu);
  parallel_for(Nve, [&](int k) {
    const double v = patch.v_minus + (k - elo) * G.dv;
    for (int i = 0; i < Nu; ++i) {
      Xe(k, i) = patch.fx(G.uvals[i], v);
      Ye(k, i) = patch.fy(G.uvals[i], v);
    }
  });

  auto mid = [&](const ArrayXXd& a) { return a.middleRows(elo, Nv).eval(); };
  G.X = mid(Xe);
  G.Y = mid(Ye);
  G.Xu = rows_du(G.X, 1);
  G.Yu = rows_du(G.Y, 1);
  G.Xuu = rows_du(G.X, 2);
  G.Yuu = rows_du(G.Y, 2);
  const ArrayXXd Xve = cols_dv(Xe, G.dv, 1), Yve = cols_dv(Ye, G.dv, 1);
  G.Xv = mid(Xve);
  G.Yv = mid(Yve);
  G.Xvv = mid(cols_dv(Xe, G.dv, 2));
  G.Yvv = mid(cols_dv(Ye, G.dv, 2));
  G.Xuv = rows_du(G.Xv, 1);
  G.Yuv = rows_du(G.Yv, 1);

  G.level_len.resize(Nv);
  std::vector<double> cx(Nv), cy(Nv), spd(Nu);
  for (int k = 0; k < Nv; ++k) {
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < Nu; ++i) {
      spd[i] = std::hypot(G.Xu(k, i), G.Yu(k, i));
      mx += G.X(k, i) * spd[i];
      my += G.Y(k, i) * spd[i];
    }
    G.level_len[k] = trapezoid_periodic(spd.data(), Nu, 2.0 * kPi);
    require(G.level_len[k] >= 1e-10, "DegenerateLevelCurve",
            "grid level shorter than 1e-10");
    const double total = G.level_len[k] * Nu / (2.0 * kPi);
    cx[k] = mx / total;
    cy[k] = my / total;
  }
  G.centroid_x.build(G.vvals, cx);
  G.centroid_y.build(G.vvals, cy);
  return G;
}

GridWallFields grid_wall_fields(const PatchGrid& G) {
  GridWallFields F;
  const ArrayXXd s2 = G.Xu.square() + G.Yu.square();
  const ArrayXXd s = s2.sqrt();
  const ArrayXXd J = G.Xu * G.Yv - G.Xv * G.Yu;
  const ArrayXXd q = (s2 + J.square()).sqrt();
  F.cos_rho = J / q;
  F.sin_rho = s / q;

  F.kbar = (G.Xu * G.Yuu - G.Yu * G.Xuu) / (s2 * s);

  const ArrayXXd Iuu = s2;
  const ArrayXXd Iuv = G.Xu * G.Xv + G.Yu * G.Yv;
  const ArrayXXd Ivv = G.Xv.square() + G.Yv.square() + 1.0;
  const ArrayXXd detI = Iuu * Ivv - Iuv.square();

  const ArrayXXd IIuu = (G.Xu * G.Yuu - G.Yu * G.Xuu) / q;
  const ArrayXXd IIuv = (G.Xu * G.Yuv - G.Yu * G.Xuv) / q;
  const ArrayXXd IIvv = (G.Xu * G.Yvv - G.Yu * G.Xvv) / q;

  F.H0 = (Ivv * IIuu - 2.0 * Iuv * IIuv + Iuu * IIvv) / detI;
  F.det_shape = (IIuu * IIvv - IIuv.square()) / detI;

  // Gradient of cos(rho) in the chart, dotted with nu_bar. nu_bar has chart
  // coordinates (a, b) with psi_u . nu_bar = 0 and psi_v . nu_bar = -q / s,
  // so only the psi_v coefficient of the gradient contributes.
  const ArrayXXd cu = rows_du(F.cos_rho, 1);
  const ArrayXXd cv = cols_dv(F.cos_rho, G.dv, 1);
  const ArrayXXd gb = (Iuu * cv - Iuv * cu) / detI;
  const ArrayXXd psiv_dot_nu = -q / s;
  const ArrayXXd grad_nu_cos = gb * psiv_dot_nu;
  F.identity_residual = F.H0 + grad_nu_cos / F.sin_rho - F.sin_rho * F.kbar;

  // <grad_nu eta, nu> with eta = (Yu, -Xu, 0)/s and nu in chart coordinates.
  const ArrayXXd eta1 = G.Yu / s;
  const ArrayXXd eta2 = -G.Xu / s;
  const ArrayXXd e1u = rows_du(eta1, 1), e1v = cols_dv(eta1, G.dv, 1);
  const ArrayXXd e2u = rows_du(eta2, 1), e2v = cols_dv(eta2, G.dv, 1);
  const ArrayXXd na = (-Iuv * psiv_dot_nu) / detI;
  const ArrayXXd nb = (Iuu * psiv_dot_nu) / detI;
  const ArrayXXd nu1 = F.cos_rho * eta1;
  const ArrayXXd nu2 = F.cos_rho * eta2;
  F.eta_residual =
      (na * e1u + nb * e1v) * nu1 + (na * e2u + nb * e2v) * nu2;
  return F;
}

}  // namespace caprig

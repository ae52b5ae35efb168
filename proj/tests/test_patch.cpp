#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "caprig/domains.hpp"
#include "caprig/patch.hpp"

#include <cmath>
#include <random>

using namespace caprig;

namespace {

std::string thrown_code(const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    return error_code(e);
  }
  return "";
}

// Interior rows only: the window-end rows use one-sided stencils and are
// not part of the sweep accuracy contract.
double interior_max(const ArrayXXd& f) {
  const int Nv = static_cast<int>(f.rows());
  double m = 0.0;
  for (int k = 2; k <= Nv - 3; ++k)
    m = std::max(m, f.row(k).abs().maxCoeff());
  return m;
}

MetricField exp_slab() {
  std::array<CoeffFn, 6> e;
  e[0] = [](const Vec3& p) { return std::exp(2.0 * p.z()); };
  e[1] = [](const Vec3&) { return 0.0; };
  e[2] = [](const Vec3&) { return 0.0; };
  e[3] = [](const Vec3& p) { return std::exp(2.0 * p.z()); };
  e[4] = [](const Vec3&) { return 0.0; };
  e[5] = [](const Vec3&) { return 1.0; };
  return general_metric(e);
}

}  // namespace

TEST_CASE("cylinder frames") {
  const auto cyl = make_domain("cylinder");
  for (double u : {0.0, 0.9, 2.5, 5.8}) {
    for (double v : {-0.7, 0.0, 0.4}) {
      const Frame F = frames_at(cyl, nullptr, u, v);
      CHECK((F.X_out - Vec3(std::cos(u), std::sin(u), 0)).norm() < 1e-9);
      CHECK(F.cos_rho == doctest::Approx(0.0).epsilon(1e-9));
      CHECK(F.sin_rho == doctest::Approx(1.0).epsilon(1e-12));
      CHECK((F.tau_bar - Vec3(-std::sin(u), std::cos(u), 0)).norm() < 1e-9);
      CHECK((F.eta_bar - Vec3(std::cos(u), std::sin(u), 0)).norm() < 1e-9);
      CHECK((F.nu_bar - Vec3(0, 0, -1)).norm() < 1e-9);
      // Decomposition of the outward normal along e_z and eta.
      const Vec3 rec = F.cos_rho * Vec3(0, 0, 1) + F.sin_rho * F.eta_bar;
      CHECK((F.X_out - rec).norm() < 1e-10);
    }
  }
}

TEST_CASE("sphere frames and contact angle") {
  const auto sph = make_domain("sphere");
  for (double u : {0.3, 2.0, 4.4}) {
    for (double v : {-0.6, 0.0, 0.5, 0.75}) {
      const double r = std::sqrt(1.0 - v * v);
      const Frame F = frames_at(sph, nullptr, u, v);
      // Outward normal of the unit sphere is the position vector.
      CHECK((F.X_out - Vec3(r * std::cos(u), r * std::sin(u), v)).norm() < 1e-7);
      CHECK(F.cos_rho == doctest::Approx(v).epsilon(1e-7));
      CHECK(F.sin_rho == doctest::Approx(r).epsilon(1e-7));
      CHECK(F.nu_bar.dot(Vec3(0, 0, 1)) < 0.0);  // points away from the top
      // Orthonormal moving frame.
      CHECK(F.tau_bar.dot(F.nu_bar) == doctest::Approx(0.0).epsilon(1e-12));
      CHECK(F.tau_bar.dot(F.X_out) == doctest::Approx(0.0).epsilon(1e-12));
      CHECK(F.nu_bar.dot(F.X_out) == doctest::Approx(0.0).epsilon(1e-12));
      // X_out is normal to the actual chart tangents.
      const ChartJet J = chart_jet(sph, u, v);
      CHECK(std::abs(F.X_out.dot(Vec3(J.xu, J.yu, 0))) < 1e-8);
      CHECK(std::abs(F.X_out.dot(Vec3(J.xv, J.yv, 1))) < 1e-8);
    }
  }
}

TEST_CASE("level curve curvature") {
  const auto cyl = make_domain("cylinder");
  CHECK(level_curve_curvature(cyl, 1.2, 0.1) == doctest::Approx(1.0).epsilon(1e-8));
  const auto sph = make_domain("sphere");
  for (double v : {-0.5, 0.2, 0.7})
    CHECK(level_curve_curvature(sph, 0.8, v) ==
          doctest::Approx(1.0 / std::sqrt(1.0 - v * v)).epsilon(1e-8));
  // Ellipse (2 cos u, sin u): curvature a/b^2 at u=0, b/a^2 at u=pi/2.
  const auto ell = make_parametric_domain(parse_expression("2*cos(u)", "uv"),
                                          parse_expression("sin(u)", "uv"),
                                          -1.0, 1.0);
  CHECK(level_curve_curvature(ell, 0.0, 0.0) == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(level_curve_curvature(ell, kPi / 2, 0.0) ==
        doctest::Approx(0.25).epsilon(1e-7));
}

TEST_CASE("clockwise charts are reoriented") {
  const auto cw = make_parametric_domain(parse_expression("cos(u)", "uv"),
                                         parse_expression("-sin(u)", "uv"),
                                         -1.0, 1.0);
  // After the flip the chart traces the ccw unit circle.
  CHECK(level_curve_curvature(cw, 0.7, 0.0) == doctest::Approx(1.0).epsilon(1e-7));
  const Frame F = frames_at(cw, nullptr, 1.1, 0.0);
  CHECK(F.eta_bar.dot(F.p) > 0.9);  // outward
}

TEST_CASE("wall curvature: sphere, cylinder, cone") {
  const auto sph = make_domain("sphere");
  for (double v : {-0.4, 0.0, 0.6}) {
    const WallShape W = second_fundamental_form(sph, nullptr, 1.3, v);
    CHECK(W.H == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(W.II(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(W.II(1, 1) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(W.II(0, 1)) < 1e-6);
  }
  const auto cyl = make_domain("cylinder");
  const WallShape Wc = second_fundamental_form(cyl, nullptr, 0.4, -0.2);
  CHECK(Wc.H == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(Wc.II(0, 0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(Wc.II(1, 1)) < 1e-8);
  const auto cone = make_domain("cone");
  const WallShape Wk = second_fundamental_form(cone, nullptr, 1.0, 0.5);
  CHECK(Wk.H == doctest::Approx(1.0 / (0.5 * std::sqrt(2.0))).epsilon(1e-8));
  const Frame Fk = frames_at(cone, nullptr, 1.0, 0.5);
  CHECK(Fk.cos_rho == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-9));

  // The explicit Euclidean metric takes the connection branch but must agree.
  const MetricField eu = euclidean_metric();
  const WallShape We = second_fundamental_form(sph, &eu, 1.3, 0.6);
  CHECK(We.H == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("metric frames are g-orthonormal and oriented") {
  const auto cyl = make_domain("cylinder");
  const MetricField d = diagonal_metric(4, 1, 1);
  const Frame F0 = frames_at(cyl, &d, 0.0, 0.2);
  CHECK((F0.tau_g - Vec3(0, 1, 0)).norm() < 1e-8);
  CHECK((F0.X_g - Vec3(0.5, 0, 0)).norm() < 1e-8);

  const auto sph = make_domain("sphere");
  const MetricField slab = exp_slab();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> du(0.0, 2 * kPi), dv(-0.7, 0.7);
  for (int it = 0; it < 25; ++it) {
    const double u = du(rng), v = dv(rng);
    for (const MetricField* m : {&d, &slab}) {
      const Frame F = frames_at(sph, m, u, v);
      const Vec3 p = F.p;
      CHECK(inner(*m, p, F.tau_g, F.tau_g) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(inner(*m, p, F.nu_g, F.nu_g) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(inner(*m, p, F.X_g, F.X_g) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(std::abs(inner(*m, p, F.tau_g, F.nu_g)) < 1e-9);
      CHECK(std::abs(inner(*m, p, F.tau_g, F.X_g)) < 1e-9);
      CHECK(std::abs(inner(*m, p, F.nu_g, F.X_g)) < 1e-9);
      CHECK(F.X_g.dot(F.X_out) > 0.0);
      CHECK(F.nu_g.dot(F.nu_bar) > 0.0);
    }
  }
}

TEST_CASE("wall curvature under scaled and curved metrics") {
  // g = lambda^2 * Euclid turns the unit sphere into a sphere of radius
  // lambda, so H drops to 2 / lambda.
  const auto sph = make_domain("sphere");
  const MetricField four = diagonal_metric(4, 4, 4);
  const WallShape W = second_fundamental_form(sph, &four, 0.9, 0.3);
  CHECK(W.H == doctest::Approx(1.0).epsilon(1e-6));

  // Exponentially expanding slab: the unit cylinder wall has H = e^{-v}.
  const auto cyl = make_domain("cylinder");
  const MetricField slab = exp_slab();
  for (double v : {-0.5, 0.0, 0.8}) {
    const WallShape Ws = second_fundamental_form(cyl, &slab, 2.2, v);
    CHECK(Ws.H == doctest::Approx(std::exp(-v)).epsilon(1e-6));
  }
}

TEST_CASE("chart jet accuracy including one-sided windows") {
  const auto sph = make_domain("sphere");
  auto check_at = [&](double u, double v, double tol_first, double tol_second) {
    const ChartJet J = chart_jet(sph, u, v);
    const double r = std::sqrt(1.0 - v * v);
    const double rp = -v / r;
    const double rpp = -1.0 / (r * r * r);
    CHECK(J.x == doctest::Approx(r * std::cos(u)).epsilon(1e-14));
    CHECK(J.xu == doctest::Approx(-r * std::sin(u)).epsilon(tol_first));
    CHECK(J.xv == doctest::Approx(rp * std::cos(u)).epsilon(tol_first));
    CHECK(J.xuu == doctest::Approx(-r * std::cos(u)).epsilon(tol_second));
    CHECK(J.xuv == doctest::Approx(-rp * std::sin(u)).epsilon(tol_second));
    CHECK(J.xvv == doctest::Approx(rpp * std::cos(u)).epsilon(tol_second));
    CHECK(J.yv == doctest::Approx(rp * std::sin(u)).epsilon(tol_first));
  };
  check_at(0.7, 0.3, 1e-9, 1e-7);
  check_at(0.7, -0.2, 1e-9, 1e-7);
  // Near the cap apex the jet switches to the regularized meridian
  // parameter, so the singular v-derivatives stay accurate.
  check_at(1.9, 0.925, 1e-8, 1e-6);
  check_at(1.9, 0.99, 1e-8, 1e-6);
  check_at(1.9, 0.9999, 1e-7, 1e-5);
  // One-sided window against the lower chart edge at -0.93.
  check_at(1.9, -0.925, 1e-4, 5e-3);

  CHECK(thrown_code([&] { chart_jet(sph, 0.0, 1.0); }) == "StencilOutOfDomain");
  BoundaryPatch tiny = make_domain("cylinder");
  tiny.chart_vlo = -0.004;
  tiny.chart_vhi = 0.004;
  CHECK(thrown_code([&] { chart_jet(tiny, 0.0, 0.0); }) == "StencilOutOfDomain");
}

TEST_CASE("degenerate contact angle is rejected") {
  BoundaryPatch steep;
  steep.fx = [](double u, double v) { return (1.0 + 1e9 * v) * std::cos(u); };
  steep.fy = [](double u, double v) { return (1.0 + 1e9 * v) * std::sin(u); };
  steep.v_minus = -1e-10;
  steep.v_plus = 1e-10;
  steep.chart_vlo = -0.2;
  steep.chart_vhi = 0.2;
  CHECK(thrown_code([&] { frames_at(steep, nullptr, 0.3, 0.0); }) ==
        "DegenerateContactAngle");
}

TEST_CASE("grid derivatives match analytic values") {
  const auto sph = make_domain("sphere");
  const PatchGrid G = build_patch_grid(sph, 64, 65);
  double exu = 0, exv = 0, exvv = 0, eyuv = 0;
  for (int k = 0; k < G.Nv; ++k) {
    const double v = G.vvals[k];
    const double r = std::sqrt(1.0 - v * v);
    const double rp = -v / r, rpp = -1.0 / (r * r * r);
    for (int i = 0; i < G.Nu; ++i) {
      const double u = G.uvals[i];
      exu = std::max(exu, std::abs(G.Xu(k, i) + r * std::sin(u)));
      exv = std::max(exv, std::abs(G.Xv(k, i) - rp * std::cos(u)));
      exvv = std::max(exvv, std::abs(G.Xvv(k, i) - rpp * std::cos(u)));
      eyuv = std::max(eyuv, std::abs(G.Yuv(k, i) - rp * std::cos(u)));
    }
  }
  CHECK(exu < 1e-10);
  CHECK(exv < 3e-6);
  CHECK(exvv < 1e-4);
  CHECK(eyuv < 3e-6);
  const auto cyl = make_domain("cylinder");
  const PatchGrid C = build_patch_grid(cyl, 32, 9);
  CHECK(interior_max(C.Xv) < 1e-12);
  CHECK(interior_max(C.Xvv) < 1e-10);
  CHECK(C.level_len[3] == doctest::Approx(2 * kPi).epsilon(1e-12));
}

TEST_CASE("grid wall fields on exact shapes") {
  const auto cyl = make_domain("cylinder");
  const GridWallFields Fc = grid_wall_fields(build_patch_grid(cyl, 64, 17));
  CHECK((Fc.H0 - 1.0).abs().maxCoeff() < 1e-10);
  CHECK(Fc.det_shape.abs().maxCoeff() < 1e-10);
  CHECK(Fc.cos_rho.abs().maxCoeff() < 1e-12);
  CHECK((Fc.kbar - 1.0).abs().maxCoeff() < 1e-10);
  CHECK(Fc.identity_residual.abs().maxCoeff() < 1e-10);
  CHECK(Fc.eta_residual.abs().maxCoeff() < 1e-10);

  const auto cone = make_domain("cone");
  const PatchGrid Gk = build_patch_grid(cone, 64, 33);
  const GridWallFields Fk = grid_wall_fields(Gk);
  for (int k = 0; k < Gk.Nv; ++k) {
    const double v = Gk.vvals[k];
    CHECK(Fk.H0(k, 0) == doctest::Approx(1.0 / (v * std::sqrt(2.0))).epsilon(1e-9));
    CHECK(Fk.cos_rho(k, 0) ==
          doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
  }
  CHECK(Fk.identity_residual.abs().maxCoeff() < 1e-9);

  const auto sph = make_domain("sphere");
  const GridWallFields Fs = grid_wall_fields(build_patch_grid(sph, 128, 65));
  CHECK(interior_max(Fs.H0 - 2.0) < 1e-5);
  CHECK(interior_max(Fs.det_shape - 1.0) < 1e-5);
}

TEST_CASE("slicing identity residual converges at 4th order") {
  for (const char* name : {"sphere", "ellipsoid"}) {
    BoundaryPatch dom = make_domain(name);
    if (!dom.constant_speed) dom = resample_constant_speed(dom);
    std::vector<std::pair<double, double>> idsamples;
    double finest_id = 0.0, finest_eta = 0.0;
    for (int n : {32, 48, 64, 128}) {
      const PatchGrid G = build_patch_grid(dom, 2 * n, n + 1);
      const GridWallFields F = grid_wall_fields(G);
      finest_id = F.identity_residual.abs().maxCoeff();
      finest_eta = F.eta_residual.abs().maxCoeff();
      idsamples.push_back({G.dv, finest_id});
    }
    CHECK(finest_id < 1e-5);
    CHECK(finest_eta < 1e-8);
    const OrderFit fid = fit_order(idsamples);
    INFO(name << " identity order " << fid.exponent);
    CHECK(fid.exponent >= 2.0);
  }
}

TEST_CASE("resampling leaves constant-speed charts alone") {
  for (const char* name : {"cylinder", "sphere", "cone"}) {
    const auto dom = make_domain(name);
    const auto r = resample_constant_speed(dom);
    CHECK(r.constant_speed);
    CHECK(!r.resampled);
    for (double u : {0.1, 3.3})
      for (double v : {dom.v_minus, 0.5 * (dom.v_minus + dom.v_plus)})
        CHECK(r.fx(u, v) == dom.fx(u, v));
  }
}

TEST_CASE("resampling the prism and the ellipsoid") {
  for (const char* name : {"prism", "ellipsoid"}) {
    const auto dom = make_domain(name);
    const auto r = resample_constant_speed(dom);
    CHECK(r.resampled);
    CHECK(r.constant_speed);
    const PatchGrid G = build_patch_grid(r, 128, 17);
    // Constant speed along every level.
    for (int k = 0; k < G.Nv; ++k) {
      double mean = 0.0;
      for (int i = 0; i < G.Nu; ++i) mean += std::hypot(G.Xu(k, i), G.Yu(k, i));
      mean /= G.Nu;
      for (int i = 0; i < G.Nu; ++i)
        CHECK(std::abs(std::hypot(G.Xu(k, i), G.Yu(k, i)) - mean) < 1e-8 * mean);
    }
    // Points stay exactly on the original level curves.
    for (int k = 0; k < G.Nv; k += 4)
      for (int i = 0; i < G.Nu; i += 5) {
        const double v = G.vvals[k];
        double rhs = 1.0, a = 1.5, b = 1.0;
        if (std::string(name) == "ellipsoid") {
          a = 1.3;
          b = 1.0;
          rhs = 1.0 - (v / 0.9) * (v / 0.9);
        }
        const double lhs = sqr(G.X(k, i) / a) + sqr(G.Y(k, i) / b);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
      }
    // Total length is preserved (reparametrization invariance).
    const PatchGrid G0 = build_patch_grid(dom, 256, 17);
    CHECK(G.level_len[8] == doctest::Approx(G0.level_len[8]).epsilon(1e-9));
  }
}

TEST_CASE("resampling a level family that changes shape with height") {
  const auto ex = parse_expression("(1.3 + 0.3*v)*cos(u)", "uv");
  const auto ey = parse_expression("(1 - 0.2*v)*sin(u)", "uv");
  const auto dom = make_parametric_domain(ex, ey, -0.5, 0.5);
  const auto r = resample_constant_speed(dom);
  CHECK(r.resampled);
  const PatchGrid G = build_patch_grid(r, 128, 17);
  for (int k = 0; k < G.Nv; ++k) {
    const double v = G.vvals[k];
    const double a = 1.3 + 0.3 * v, b = 1.0 - 0.2 * v;
    double mean = 0.0;
    for (int i = 0; i < G.Nu; ++i) mean += std::hypot(G.Xu(k, i), G.Yu(k, i));
    mean /= G.Nu;
    for (int i = 0; i < G.Nu; ++i) {
      CHECK(std::abs(std::hypot(G.Xu(k, i), G.Yu(k, i)) - mean) < 1e-6 * mean);
      CHECK(sqr(G.X(k, i) / a) + sqr(G.Y(k, i) / b) ==
            doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("degenerate level curves are rejected") {
  BoundaryPatch tinycircle;
  tinycircle.fx = [](double u, double) { return 1e-12 * std::cos(u); };
  tinycircle.fy = [](double u, double) { return 1e-12 * std::sin(u); };
  CHECK(thrown_code([&] { resample_constant_speed(tinycircle); }) ==
        "DegenerateLevelCurve");

  // Limacon with an inner loop: the level curve self-intersects.
  BoundaryPatch lima;
  lima.fx = [](double u, double) { return (1.0 + 2.0 * std::cos(u)) * std::cos(u); };
  lima.fy = [](double u, double) { return (1.0 + 2.0 * std::cos(u)) * std::sin(u); };
  CHECK(thrown_code([&] { resample_constant_speed(lima); }) ==
        "DegenerateLevelCurve");
}

TEST_CASE("level centroids") {
  const auto ex = parse_expression("cos(u) + 0.3", "uv");
  const auto ey = parse_expression("sin(u)", "uv");
  const auto dom = make_parametric_domain(ex, ey, -1.0, 1.0);
  const auto r = resample_constant_speed(dom);
  CHECK(!r.resampled);  // unit speed already
  const PatchGrid G = build_patch_grid(r, 64, 9);
  CHECK(G.centroid_x.eval(0.0) == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(G.centroid_y.eval(0.0) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(G.level_len[4] == doctest::Approx(2 * kPi).epsilon(1e-12));

  const auto prism = resample_constant_speed(make_domain("prism"));
  const PatchGrid P = build_patch_grid(prism, 64, 9);
  CHECK(std::abs(P.centroid_x.eval(0.2)) < 1e-9);
  CHECK(std::abs(P.centroid_y.eval(0.2)) < 1e-9);
}

TEST_CASE("pointwise and grid curvature agree on a resampled wall") {
  const auto dom = resample_constant_speed(make_domain("ellipsoid"));
  const PatchGrid G = build_patch_grid(dom, 128, 65);
  const GridWallFields F = grid_wall_fields(G);
  for (int k : {16, 32, 48}) {
    for (int i : {0, 21, 77}) {
      const WallShape W =
          second_fundamental_form(dom, nullptr, G.uvals[i], G.vvals[k]);
      CHECK(W.H == doctest::Approx(F.H0(k, i)).epsilon(1e-4));
    }
  }
}

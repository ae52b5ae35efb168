#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "caprig/domains.hpp"
#include "caprig/energy.hpp"
#include "caprig/variation.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <string>

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

Leaf hemisphere_leaf(const PatchGrid& grid, double R, double z0, int Nr) {
  Leaf leaf = flat_leaf(grid, 0.0, Nr);
  leaf.kind = Leaf::Kind::Solver;
  for (int i = 0; i < leaf.Nr; ++i) {
    const double r = leaf.rnode(i);
    leaf.w.row(i).setConstant(z0 + std::sqrt(R * R - r * r));
  }
  return leaf;
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

// Cylinder of unit circular cross-section whose axis is tilted in x.
BoundaryPatch tilted_cylinder() {
  return make_parametric_domain(parse_expression("cos(u) + 0.3*v", "uv"),
                                parse_expression("sin(u)", "uv"), -0.5, 0.5,
                                "tilted-cylinder");
}

// Random low-order height field, smooth on the disk (polynomial in r times
// single Fourier modes in u).
ArrayXXd smooth_field(const Leaf& leaf, std::mt19937& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double a0 = U(rng), a1 = U(rng), p1 = kPi * U(rng);
  const double a2 = U(rng), p2 = kPi * U(rng), a3 = U(rng);
  ArrayXXd d(leaf.Nr, leaf.Nu);
  for (int i = 0; i < leaf.Nr; ++i) {
    const double r = leaf.rnode(i);
    for (int k = 0; k < leaf.Nu; ++k) {
      const double u = leaf.unode(k);
      d(i, k) = a0 + a1 * r * std::cos(u + p1) +
                a2 * r * r * std::cos(2.0 * u + p2) + a3 * r * r * (1.0 - r);
    }
  }
  return d;
}

ArrayXXd noise_field(const Leaf& leaf, std::mt19937& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  ArrayXXd d(leaf.Nr, leaf.Nu);
  for (int i = 0; i < leaf.Nr; ++i)
    for (int k = 0; k < leaf.Nu; ++k) d(i, k) = U(rng);
  return d;
}

double fd_once(const Leaf& leaf, const WettedWall& wall, const MetricField& g,
               const ArrayXXd& delta, double h, DerivScheme scheme) {
  Region plus{leaf, Region::Side::Above}, minus{leaf, Region::Side::Above};
  plus.leaf.w += h * delta;
  minus.leaf.w -= h * delta;
  return (capillary_energy(plus, wall, g, scheme) -
          capillary_energy(minus, wall, g, scheme)) /
         (2.0 * h);
}

// Richardson-extrapolated centered difference, error O(h^4).
double fd_pairing(const Leaf& leaf, const WettedWall& wall,
                  const MetricField& g, const ArrayXXd& delta, double h,
                  DerivScheme scheme) {
  const double c = fd_once(leaf, wall, g, delta, h, scheme);
  const double f = fd_once(leaf, wall, g, delta, 0.5 * h, scheme);
  return (4.0 * f - c) / 3.0;
}

double pair_with(const ArrayXXd& grad, const ArrayXXd& delta) {
  return (grad * delta).sum();
}

// Node motion along the chart fibers (the direction a height change moves
// the embedded node); wall-tangent at the contact row by construction.
std::array<ArrayXXd, 3> fiber_variation(const Leaf& leaf,
                                        const LeafGeometry& geo,
                                        const ArrayXXd& delta) {
  std::array<ArrayXXd, 3> Y;
  for (auto& c : Y) c.resize(leaf.Nr, leaf.Nu);
  for (int i = 0; i < leaf.Nr; ++i) {
    const double r = leaf.rnode(i);
    for (int k = 0; k < leaf.Nu; ++k) {
      const double Evx = geo.bxv(i, k) - geo.cxv(i, k);
      const double Evy = geo.byv(i, k) - geo.cyv(i, k);
      Y[0](i, k) = delta(i, k) * (geo.cxv(i, k) + r * Evx);
      Y[1](i, k) = delta(i, k) * (geo.cyv(i, k) + r * Evy);
      Y[2](i, k) = delta(i, k);
    }
  }
  return Y;
}

}  // namespace

TEST_CASE("flat slices of Euclidean containers carry zero energy") {
  const MetricField g = euclidean_metric();

  const PatchGrid cyl = build_patch_grid(make_domain("cylinder"), 128, 65);
  const WettedWall wall_c = build_wetted_wall(cyl, g);
  for (double h : {-0.6, 0.0, 0.35, 0.7}) {
    const Region reg{flat_leaf(cyl, h, 32), Region::Side::Above};
    CHECK(std::abs(capillary_energy(reg, wall_c, g)) < 1e-9);
  }

  const PatchGrid sph = build_patch_grid(make_domain("sphere"), 128, 129);
  const WettedWall wall_s = build_wetted_wall(sph, g);
  for (double h : {-0.4, 0.0, 0.2, 0.45}) {
    const Region reg{flat_leaf(sph, h, 32), Region::Side::Above};
    CHECK(std::abs(capillary_energy(reg, wall_s, g)) < 5e-8);
  }

  const PatchGrid ell = build_patch_grid(make_domain("ellipsoid"), 128, 129);
  const WettedWall wall_e = build_wetted_wall(ell, g);
  for (double h : {-0.3, 0.0, 0.25}) {
    const Region reg{flat_leaf(ell, h, 32), Region::Side::Above};
    CHECK(std::abs(capillary_energy(reg, wall_e, g)) < 1e-7);
  }
}

TEST_CASE("spherical cap over the cylinder: energy matches the closed form") {
  const MetricField g = euclidean_metric();
  const PatchGrid grid = build_patch_grid(make_domain("cylinder"), 128, 65);
  const WettedWall wall = build_wetted_wall(grid, g);
  const double R = 1.5;
  const Region reg{hemisphere_leaf(grid, R, -0.3, 96), Region::Side::Above};
  const double cap_area = 2.0 * kPi * R * (R - std::sqrt(R * R - 1.0));
  // the cylinder wall has cos(rho_bar) = 0, so only the flat top cap is wet
  const double want = cap_area - kPi;
  CHECK(std::abs(capillary_energy(reg, wall, g) - want) / want < 5e-3);
}

TEST_CASE("wetted-area derivative matches finite differences") {
  const MetricField g = euclidean_metric();
  const PatchGrid grid = build_patch_grid(make_domain("sphere"), 64, 129);
  const WettedWall wall = build_wetted_wall(grid, g);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  VectorXd wb(64), dv(64);
  for (int k = 0; k < 64; ++k) {
    wb(k) = 0.1 + 0.2 * U(rng);
    dv(k) = U(rng);
  }
  const double h = 1e-5;
  const double fd =
      (wetted_above(wall, wb + h * dv) - wetted_above(wall, wb - h * dv)) /
      (2.0 * h);
  const double exact = wetted_above_deriv(wall, wb).dot(dv);
  CHECK(std::abs(fd - exact) < 1e-6 * (1.0 + std::abs(exact)));
}

TEST_CASE("energy gradient is the exact adjoint of the discrete energy") {
  const MetricField ge = euclidean_metric();
  std::mt19937 rng(29);

  struct Config {
    std::string label;
    PatchGrid grid;
    Leaf leaf;
    const MetricField* g;
    DerivScheme scheme;
    double tol;  // smooth directions; the metric-coefficient differences
                 // bound it for non-constant metrics
  };

  const MetricField slab = exp_slab();
  std::vector<Config> configs;
  {
    PatchGrid grid = build_patch_grid(make_domain("cylinder"), 64, 65);
    configs.push_back({"cylinder slice", grid, flat_leaf(grid, 0.1, 32), &ge,
                       DerivScheme::Spectral, 1e-8});
    configs.push_back({"cylinder slice compact", grid, flat_leaf(grid, 0.1, 32),
                       &ge, DerivScheme::Compact, 1e-8});
    configs.push_back({"spherical cap", grid, hemisphere_leaf(grid, 1.5, -0.3, 48),
                       &ge, DerivScheme::Spectral, 1e-8});
    configs.push_back({"cylinder slice curved metric", grid,
                       flat_leaf(grid, 0.1, 32), &slab, DerivScheme::Spectral,
                       1e-6});
  }
  {
    PatchGrid grid = build_patch_grid(make_domain("sphere"), 64, 129);
    configs.push_back({"sphere slice", grid, flat_leaf(grid, 0.15, 32), &ge,
                       DerivScheme::Spectral, 1e-7});
  }
  {
    PatchGrid grid = build_patch_grid(tilted_cylinder(), 64, 65);
    configs.push_back({"tilted cylinder slice", grid, flat_leaf(grid, 0.1, 32),
                       &ge, DerivScheme::Spectral, 1e-7});
  }

  for (const auto& cfg : configs) {
    CAPTURE(cfg.label);
    const WettedWall wall = build_wetted_wall(cfg.grid, *cfg.g);
    const ArrayXXd grad = energy_gradient(cfg.leaf, wall, *cfg.g, cfg.scheme);
    // smooth directions (including the constant): the finite difference
    // itself converges, so the match is tight
    for (int trial = 0; trial < 3; ++trial) {
      const ArrayXXd delta = trial == 2
                                 ? ArrayXXd::Constant(cfg.leaf.Nr, cfg.leaf.Nu, 1.0)
                                 : smooth_field(cfg.leaf, rng);
      const double fd = fd_pairing(cfg.leaf, wall, *cfg.g, delta, 2e-3, cfg.scheme);
      const double exact = pair_with(grad, delta);
      CHECK(std::abs(fd - exact) < cfg.tol * (1.0 + std::abs(fd)));
    }
    // node-wise white noise: rough directions inflate the centered
    // difference's own truncation (the third-derivative term scales with the
    // inverse grid spacing squared), so use a small step and a looser bar
    {
      const ArrayXXd delta = 0.1 * noise_field(cfg.leaf, rng);
      const double fd = fd_pairing(cfg.leaf, wall, *cfg.g, delta, 5e-4, cfg.scheme);
      const double exact = pair_with(grad, delta);
      CHECK(std::abs(fd - exact) < 1e-5 * (1.0 + std::abs(fd)));
    }
  }
}

TEST_CASE("gradient pairings against closed forms") {
  const PatchGrid grid = build_patch_grid(make_domain("cylinder"), 64, 65);

  // vertical translation of a spherical cap changes nothing: the wall is
  // straight and carries no angle weight
  const MetricField ge = euclidean_metric();
  const WettedWall wall_e = build_wetted_wall(grid, ge);
  const Leaf cap = hemisphere_leaf(grid, 1.5, -0.3, 48);
  const ArrayXXd grad_cap = energy_gradient(cap, wall_e, ge);
  CHECK(std::abs(grad_cap.sum()) < 1e-9);

  // in the exponential slab the slice area is pi e^{2h}, and the wetted wall
  // is height-independent, so dE/dh = 2 pi e^{2h}
  const MetricField slab = exp_slab();
  const WettedWall wall_s = build_wetted_wall(grid, slab);
  for (double h : {-0.4, 0.2}) {
    const Leaf leaf = flat_leaf(grid, h, 32);
    const ArrayXXd grad = energy_gradient(leaf, wall_s, slab);
    const double want = 2.0 * kPi * std::exp(2.0 * h);
    CHECK(std::abs(grad.sum() - want) / want < 1e-6);
  }
}

TEST_CASE("first variation agrees with the discrete gradient") {
  const MetricField g = euclidean_metric();
  std::mt19937 rng(47);

  const PatchGrid cyl = build_patch_grid(make_domain("cylinder"), 64, 65);
  const WettedWall wall_c = build_wetted_wall(cyl, g);
  {
    const Leaf leaf = flat_leaf(cyl, 0.1, 32);
    const LeafGeometry geo = leaf_geometry(leaf, g);
    const ArrayXXd grad = energy_gradient(leaf, wall_c, g);
    for (int trial = 0; trial < 2; ++trial) {
      const ArrayXXd delta = smooth_field(leaf, rng);
      const double fv = first_variation(leaf, g, fiber_variation(leaf, geo, delta));
      CHECK(std::abs(fv - pair_with(grad, delta)) < 1e-6);
    }
  }

  // On curved walls the two differ by the radial quadrature error of the
  // variation integrand, O(dr^2): check the size and that doubling the
  // radial resolution shrinks the gap accordingly.
  const PatchGrid sph = build_patch_grid(make_domain("sphere"), 64, 129);
  const WettedWall wall_s = build_wetted_wall(sph, g);
  {
    auto gap = [&](int Nr, const std::function<ArrayXXd(const Leaf&)>& mk) {
      const Leaf leaf = flat_leaf(sph, 0.15, Nr);
      const LeafGeometry geo = leaf_geometry(leaf, g);
      const ArrayXXd grad = energy_gradient(leaf, wall_s, g);
      const ArrayXXd delta = mk(leaf);
      const double fv =
          first_variation(leaf, g, fiber_variation(leaf, geo, delta));
      return std::abs(fv - pair_with(grad, delta));
    };
    std::mt19937 rng32(53), rng64(53);  // same field on both resolutions
    const double g32 = gap(32, [&](const Leaf& l) { return smooth_field(l, rng32); });
    const double g64 = gap(64, [&](const Leaf& l) { return smooth_field(l, rng64); });
    CHECK(g32 < 5e-4);
    CHECK(g64 < 0.4 * g32);
  }

  // rigid vertical shift of a cap costs nothing
  {
    const Leaf cap = hemisphere_leaf(cyl, 1.5, -0.3, 96);
    std::array<ArrayXXd, 3> Y;
    for (auto& c : Y) c = ArrayXXd::Zero(cap.Nr, cap.Nu);
    Y[2].setConstant(1.0);
    CHECK(std::abs(first_variation(cap, g, Y)) < 1e-4);
  }

  // horizontal motion leaves the cylinder wall: rejected
  {
    const Leaf leaf = flat_leaf(cyl, 0.1, 32);
    std::array<ArrayXXd, 3> Y;
    for (auto& c : Y) c = ArrayXXd::Zero(leaf.Nr, leaf.Nu);
    Y[0].setConstant(1.0);
    CHECK(thrown_code([&] { first_variation(leaf, g, Y); }) ==
          "VariationNotTangent");
  }
}

TEST_CASE("stability form: critical slices and the two arrangements") {
  const MetricField g = euclidean_metric();

  // equatorial disk of the ball: every term cancels
  {
    const PatchGrid sph = build_patch_grid(make_domain("sphere"), 64, 129);
    const Leaf leaf = flat_leaf(sph, 0.0, 48);
    const LeafGeometry geo = leaf_geometry(leaf, g);
    const StabilityQ Q = stability_Q(leaf, geo, g);
    CHECK(Q.direct.cwiseAbs().maxCoeff() < 1e-6);
    CHECK(Q.composite.cwiseAbs().maxCoeff() < 1e-6);
  }

  // flat slice of the cylinder: wall curvature balances the contact circle
  {
    const PatchGrid cyl = build_patch_grid(make_domain("cylinder"), 64, 65);
    const Leaf leaf = flat_leaf(cyl, 0.3, 48);
    const LeafGeometry geo = leaf_geometry(leaf, g);
    const StabilityQ Q = stability_Q(leaf, geo, g);
    CHECK(Q.direct.cwiseAbs().maxCoeff() < 1e-6);
    CHECK(Q.composite.cwiseAbs().maxCoeff() < 1e-6);
  }

  // off-center slice of the ellipsoid: the wall terms vary around the
  // contact ellipse, yet Q vanishes identically -- the slicing identity
  // H0 + (grad_nu cos rho)/sin rho = sin rho kbar cancels the combination
  // on every horizontal slice, which is the neutral stability of slices
  {
    const PatchGrid ell = build_patch_grid(make_domain("ellipsoid"), 64, 129);
    const Leaf leaf = flat_leaf(ell, 0.2, 48);
    const LeafGeometry geo = leaf_geometry(leaf, g);
    const StabilityQ Q = stability_Q(leaf, geo, g);
    CHECK(Q.direct.cwiseAbs().maxCoeff() < 1e-6);
    CHECK(Q.composite.cwiseAbs().maxCoeff() < 1e-6);
    CHECK((Q.direct - Q.composite).cwiseAbs().maxCoeff() < 1e-6);
  }

  // curved metric: slices of the exponential slab stay capillary and the
  // arrangements agree through the Christoffel terms
  {
    const MetricField slab = exp_slab();
    const PatchGrid cyl = build_patch_grid(make_domain("cylinder"), 64, 65);
    const Leaf leaf = flat_leaf(cyl, 0.25, 48);
    const LeafGeometry geo = leaf_geometry(leaf, slab);
    const StabilityQ Q = stability_Q(leaf, geo, slab);
    CHECK((Q.direct - Q.composite).cwiseAbs().maxCoeff() < 1e-5);
  }

  // spherical cap on the cylinder (prescribed angle pi/2): Q = A_wall(tau,tau) - kappa
  {
    const PatchGrid cyl = build_patch_grid(make_domain("cylinder"), 64, 65);
    const double R = 1.5;
    const Leaf cap = hemisphere_leaf(cyl, R, -0.3, 96);
    const LeafGeometry geo = leaf_geometry(cap, g);
    const StabilityQ Q = stability_Q(cap, geo, g);
    const double cos_a = 1.0 / R;  // actual meeting angle of cap and wall
    const double sin_a = std::sqrt(1.0 - cos_a * cos_a);
    const double kappa = (1.0 - cos_a / R) / sin_a;
    CHECK((Q.direct.array() - (1.0 - kappa)).abs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("surface laplacian and second variation on model leaves") {
  const MetricField g = euclidean_metric();
  const PatchGrid sph = build_patch_grid(make_domain("sphere"), 64, 129);
  const Leaf disk = flat_leaf(sph, 0.0, 48);
  const LeafGeometry geo = leaf_geometry(disk, g);

  // Lap(x) = 0 and Lap(x^2 + y^2) = 4 on the flat disk
  CHECK(surface_laplacian(geo, geo.px).abs().maxCoeff() < 1e-7);
  const ArrayXXd r2 = geo.px * geo.px + geo.py * geo.py;
  CHECK((surface_laplacian(geo, r2) - 4.0).abs().maxCoeff() < 1e-7);

  // vertical translation of the equatorial disk is neutral
  const ArrayXXd ones = ArrayXXd::Constant(disk.Nr, disk.Nu, 1.0);
  CHECK(std::abs(second_variation(disk, geo, g, ones)) < 1e-6);

  // f = x: interior terms vanish, oint x dx/deta ds = pi > 0 (stable)
  CHECK(std::abs(second_variation(disk, geo, g, geo.px) - kPi) < 1e-6);

  // spherical cap over the cylinder, f = 1: -|A|^2 area - oint Q
  const PatchGrid cyl = build_patch_grid(make_domain("cylinder"), 64, 65);
  const double R = 1.5;
  const Leaf cap = hemisphere_leaf(cyl, R, -0.3, 96);
  const LeafGeometry cgeo = leaf_geometry(cap, g);
  const ArrayXXd cones = ArrayXXd::Constant(cap.Nr, cap.Nu, 1.0);
  const double cap_area = 2.0 * kPi * R * (R - std::sqrt(R * R - 1.0));
  const double cos_a = 1.0 / R, sin_a = std::sqrt(1.0 - cos_a * cos_a);
  const double kappa = (1.0 - cos_a / R) / sin_a;
  const double want = -(2.0 / (R * R)) * cap_area - (1.0 - kappa) * 2.0 * kPi;
  CHECK(std::abs(second_variation(cap, cgeo, g, cones) - want) / std::abs(want) <
        5e-3);
}

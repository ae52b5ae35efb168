#include "caprig/comparison.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "caprig/numerics.hpp"

namespace caprig {

BoundaryPoint boundary_point_data(const BoundaryPatch& patch,
                                  const MetricField& g, double u, double v) {
  BoundaryPoint bp;
  bp.fr = frames_at(patch, &g, u, v);
  bp.ang = angle_at(patch, u, v);
  const WallShape we = second_fundamental_form(patch, nullptr, u, v);
  const WallShape wg = second_fundamental_form(patch, &g, u, v);
  bp.II_e = we.II;
  bp.II_g = wg.II;
  bp.H0 = we.H;
  bp.H = wg.H;
  bp.gm = metric_at(g, bp.fr.p);
  return bp;
}

double mixed_direction_margin(const BoundaryPoint& bp, double a, double b) {
  const double n2 = a * a + b * b;
  require(n2 > 1e-30, "ZeroDirection",
          "mixed-direction margin needs a nonzero direction");
  const Vec3 dir_g = a * bp.fr.tau_g + b * bp.fr.nu_g;
  const Vec3 dir_e = a * bp.fr.tau_bar + b * bp.fr.nu_bar;
  return bp.H - bp.H0 / n2 * dir_g.dot(dir_e);
}

double weak_convexity_margin(const BoundaryPoint& bp) {
  return (bp.H0 - bp.ang.dnu) * bp.ang.dnu - bp.ang.dtau * bp.ang.dtau;
}

namespace {

RigidityBranch classify_branch(const BoundaryPoint& bp, const Vec3& nu,
                               double tol) {
  // Form match: H^2 g and H0^2 g_Eucl agree on the wall tangent plane.
  const Vec3 tb = bp.fr.tau_bar, nb = bp.fr.nu_bar;
  Mat2 Mg;
  Mg << tb.dot(bp.gm * tb), tb.dot(bp.gm * nb), tb.dot(bp.gm * nb),
      nb.dot(bp.gm * nb);
  const Mat2 D = bp.H * bp.H * Mg - bp.H0 * bp.H0 * Mat2::Identity();
  const double scale = 1.0 + bp.H0 * bp.H0;
  if (D.cwiseAbs().maxCoeff() < tol * scale) return RigidityBranch::MetricMatch;

  // Aligned-normal branch: both mean curvatures equal the normal slope of
  // the angle (positively) and the g-normal is parallel to the Euclidean one.
  const double dnu_rho_g =
      nu.dot(bp.fr.tau_bar) * bp.ang.dtau + nu.dot(bp.fr.nu_bar) * bp.ang.dnu;
  const bool aligned =
      nu.cross(bp.fr.nu_bar).norm() < tol * (1.0 + nu.norm());
  if (std::abs(bp.H0 - bp.ang.dnu) < tol * scale && bp.ang.dnu > 0.0 &&
      std::abs(bp.H - dnu_rho_g) < tol * scale && dnu_rho_g > 0.0 && aligned)
    return RigidityBranch::NormalAligned;
  return RigidityBranch::None;
}

}  // namespace

LocalComparison local_boundary_comparison(const BoundaryPoint& bp,
                                          const Vec3& tau, const Vec3& nu,
                                          double branch_tol) {
  LocalComparison out;
  const double dtau = bp.ang.dtau, dnu = bp.ang.dnu, H0 = bp.H0;

  const double dnu_rho_g =
      nu.dot(bp.fr.tau_bar) * dtau + nu.dot(bp.fr.nu_bar) * dnu;
  const Vec3 rhs_dir = dtau * bp.fr.nu_bar + (H0 - dnu) * bp.fr.tau_bar;
  out.margin = (bp.H - dnu_rho_g) - tau.dot(rhs_dir);

  const double den = H0 * (H0 - dnu);
  if (std::abs(H0) > 1e-10 && std::abs(H0 - dnu) > 1e-10) {
    out.W1 = (dtau * dtau + (H0 - dnu) * (H0 - dnu)) / den;
    out.W2 = ((H0 - dnu) * dnu - dtau * dtau) / den;
    out.weights_valid = true;
  }
  if (std::abs(out.margin) < branch_tol * (1.0 + std::abs(H0)))
    out.branch = classify_branch(bp, nu, branch_tol);
  return out;
}

LocalComparison local_boundary_comparison_fan(const BoundaryPoint& bp, int n,
                                              double branch_tol) {
  LocalComparison best;
  best.margin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    const double th = 2.0 * kPi * j / n;
    const Vec3 tau = std::cos(th) * bp.fr.tau_g + std::sin(th) * bp.fr.nu_g;
    const Vec3 nu = -std::sin(th) * bp.fr.tau_g + std::cos(th) * bp.fr.nu_g;
    const LocalComparison lc = local_boundary_comparison(bp, tau, nu, branch_tol);
    if (lc.margin < best.margin) best = lc;
  }
  return best;
}

ComparisonReport check_scaled_mc_comparison(const BoundaryPatch& patch,
                                            const MetricField& g, int Nu,
                                            int Nv, double tol) {
  ComparisonReport rep;
  rep.margins.resize(Nv, Nu);
  std::vector<double> us(Nu), vs(Nv);
  for (int k = 0; k < Nu; ++k) us[k] = 2.0 * kPi * k / Nu;
  for (int j = 0; j < Nv; ++j)
    vs[j] = patch.v_minus +
            (patch.v_plus - patch.v_minus) * (Nv == 1 ? 0.5 : double(j) / (Nv - 1));

  parallel_for(Nv, [&](int j) {
    for (int k = 0; k < Nu; ++k) {
      const Frame F = frames_at(patch, &g, us[k], vs[j]);
      const WallShape we = second_fundamental_form(patch, nullptr, us[k], vs[j]);
      const WallShape wg = second_fundamental_form(patch, &g, us[k], vs[j]);
      const Mat3 gm = metric_at(g, F.p);
      const Vec3 tb = F.tau_bar, nb = F.nu_bar;
      const double a = tb.dot(gm * tb), b = tb.dot(gm * nb),
                   c = nb.dot(gm * nb);
      const double H2 = wg.H * wg.H, H02 = we.H * we.H;
      const double m = 0.5 * (H2 * a + H2 * c) - H02;
      const double d = 0.5 * (H2 * a - H2 * c);
      rep.margins(j, k) = m - std::hypot(d, H2 * b);
    }
  });

  int wj = 0, wk = 0;
  rep.min_margin = rep.margins(0, 0);
  for (int j = 0; j < Nv; ++j)
    for (int k = 0; k < Nu; ++k)
      if (rep.margins(j, k) < rep.min_margin) {
        rep.min_margin = rep.margins(j, k);
        wj = j;
        wk = k;
      }
  rep.worst_u = us[wk];
  rep.worst_v = vs[wj];
  rep.pass = rep.min_margin >= -tol;

  const BoundaryPoint bp = boundary_point_data(patch, g, rep.worst_u, rep.worst_v);
  const double branch_tol = 1e-7 * (1.0 + std::abs(bp.H0));
  if (std::abs(rep.min_margin) < branch_tol)
    rep.branch = classify_branch(bp, bp.fr.nu_g, 1e-7);
  return rep;
}

ConeComparison conical_comparison(const Mat3& vertex_metric, int samples,
                                  double tol) {
  const Eigen::SelfAdjointEigenSolver<Mat3> es(vertex_metric);
  require(es.eigenvalues().minCoeff() > 0.0, "DegenerateCone",
          "vertex metric is not positive definite");

  std::vector<Vec3> dirs;
  for (int i = 0; i < 3; ++i) {
    dirs.push_back(Vec3::Unit(i));
    dirs.push_back(-Vec3::Unit(i));
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      for (double s : {1.0, -1.0}) {
        dirs.push_back((Vec3::Unit(i) + s * Vec3::Unit(j)).normalized());
        dirs.push_back(-(Vec3::Unit(i) + s * Vec3::Unit(j)).normalized());
      }

  ConeComparison out;
  out.min_margin = std::numeric_limits<double>::infinity();
  out.max_margin = -std::numeric_limits<double>::infinity();
  const auto consider = [&](const Vec3& z1, const Vec3& z2) {
    const double ce = z1.dot(z2) / (z1.norm() * z2.norm());
    const double n1 = std::sqrt(z1.dot(vertex_metric * z1));
    const double n2 = std::sqrt(z2.dot(vertex_metric * z2));
    const double cg = z1.dot(vertex_metric * z2) / (n1 * n2);
    const double margin = cg - ce;
    if (margin < out.min_margin) out.min_margin = margin;
    if (margin > out.max_margin) {
      out.max_margin = margin;
      out.w1 = z1;
      out.w2 = z2;
    }
  };

  for (size_t i = 0; i < dirs.size(); ++i)
    for (size_t j = i + 1; j < dirs.size(); ++j) consider(dirs[i], dirs[j]);

  std::mt19937 rng(0x5eedu);
  std::normal_distribution<double> N(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    Vec3 z1(N(rng), N(rng), N(rng)), z2(N(rng), N(rng), N(rng));
    if (z1.norm() < 1e-8 || z2.norm() < 1e-8) continue;
    consider(z1, z2);
  }

  out.holds = out.min_margin >= -tol;
  out.has_witness = out.max_margin > tol;
  return out;
}

double homothety_scaling_check(const PatchGrid& grid, const MetricField& g,
                               const Leaf& leaf, double r) {
  const bool const_g = metric_is_constant(g);
  Mat3 g_const = Mat3::Identity();
  if (const_g) g_const = metric_at(g, Vec3::Zero());

  // Vertex-side functional: leaf area minus the wetted integral taken from
  // the apex, which is quadratic in the contact height on an exact cone
  // (the wall area density is linear in v and vanishes at the apex).
  const auto vertex_energy = [&](const Leaf& L) {
    const LeafGeometry geo = leaf_geometry(L, g);
    double wet = 0.0;
    for (int k = 0; k < L.Nu; ++k) {
      const double u = L.unode(k);
      const double wb = L.w(L.Nr - 1, k);
      const ChartJet J = chart_jet(L.patch, u, wb);
      const Vec3 pu(J.xu, J.yu, 0.0), pv(J.xv, J.yv, 1.0);
      const Mat3 gm = const_g ? g_const : metric_at(g, Vec3(J.x, J.y, wb));
      const double a = pu.dot(gm * pu), b = pu.dot(gm * pv),
                   c = pv.dot(gm * pv);
      const double density = std::sqrt(std::max(0.0, a * c - b * b));
      const double cos_rho = angle_at(L.patch, u, wb).cos_rho;
      wet += 0.5 * cos_rho * density * wb;
    }
    return geo.area - wet * 2.0 * kPi / L.Nu;
  };

  Leaf scaled = leaf;
  scaled.w *= r;
  const double lo = grid.patch.chart_vlo, hi = grid.patch.v_plus;
  require(scaled.w.minCoeff() > lo && scaled.w.maxCoeff() <= hi,
          "RegionEscapesCone",
          "scaled region leaves the cone truncation window");

  const double e0 = vertex_energy(leaf);
  const double e1 = vertex_energy(scaled);
  return std::abs(e1 - r * r * e0);
}

}  // namespace caprig

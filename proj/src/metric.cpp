#include "caprig/metric.hpp"

#include <Eigen/Cholesky>

namespace caprig {

namespace {

Mat3 raw_value(const MetricField& f, const Vec3& p) {
  switch (f.kind) {
    case MetricKind::Euclidean:
      return Mat3::Identity();
    case MetricKind::ConstantDiagonalBlock:
      return f.constant;
    case MetricKind::Perturbed: {
      Mat3 h;
      h << f.entries[0](p), f.entries[1](p), f.entries[2](p),
           f.entries[1](p), f.entries[3](p), f.entries[4](p),
           f.entries[2](p), f.entries[4](p), f.entries[5](p);
      return f.overall_scale * (f.base + f.t * h);
    }
    case MetricKind::General: {
      Mat3 g;
      g << f.entries[0](p), f.entries[1](p), f.entries[2](p),
           f.entries[1](p), f.entries[3](p), f.entries[4](p),
           f.entries[2](p), f.entries[4](p), f.entries[5](p);
      return f.overall_scale * g;
    }
  }
  return Mat3::Identity();
}

void check_spd(const Mat3& g) {
  Eigen::LLT<Mat3> llt(g);
  require(llt.info() == Eigen::Success, "NonPositiveDefinite",
          "metric is not positive definite at the query point");
}

void check_stencil_box(const MetricField& f, const Vec3& p, double h) {
  for (int c = 0; c < 3; ++c)
    require(p[c] - h >= f.box_lo[c] && p[c] + h <= f.box_hi[c],
            "StencilOutOfDomain", "derivative stencil exits the evaluation box");
}

}  // namespace

MetricField euclidean_metric() { return MetricField{}; }

MetricField diagonal_metric(double a11, double a22, double a33,
                            double a13, double a23) {
  require(a11 > 0 && a22 > 0 && a33 > 0, "NonPositiveDefinite",
          "diagonal entries must be positive");
  MetricField f;
  f.kind = MetricKind::ConstantDiagonalBlock;
  f.constant << a11, 0, a13, 0, a22, a23, a13, a23, a33;
  check_spd(f.constant);
  return f;
}

MetricField perturbed_metric(const MetricField& base_diag, double t,
                             std::array<CoeffFn, 6> h) {
  require(base_diag.kind == MetricKind::Euclidean ||
              base_diag.kind == MetricKind::ConstantDiagonalBlock,
          "NonPositiveDefinite", "perturbation base must be a constant metric");
  for (const auto& fn : h)
    require(static_cast<bool>(fn), "IoError", "missing perturbation entry");
  MetricField f;
  f.kind = MetricKind::Perturbed;
  f.base = base_diag.kind == MetricKind::Euclidean ? Mat3::Identity()
                                                   : base_diag.constant;
  f.t = t;
  f.entries = std::move(h);
  return f;
}

MetricField general_metric(std::array<CoeffFn, 6> g) {
  for (const auto& fn : g)
    require(static_cast<bool>(fn), "IoError", "missing metric entry");
  MetricField f;
  f.kind = MetricKind::General;
  f.entries = std::move(g);
  return f;
}

bool metric_is_constant(const MetricField& f) {
  return f.kind == MetricKind::Euclidean ||
         f.kind == MetricKind::ConstantDiagonalBlock;
}

Mat3 metric_at(const MetricField& f, const Vec3& p) {
  const Mat3 g = raw_value(f, p);
  check_spd(g);
  return g;
}

double inner(const MetricField& f, const Vec3& p, const Vec3& v1, const Vec3& v2) {
  return v1.dot(metric_at(f, p) * v2);
}

std::array<Mat3, 3> metric_gradient(const MetricField& f, const Vec3& p,
                                    double spacing) {
  std::array<Mat3, 3> dg;
  if (metric_is_constant(f)) {
    dg.fill(Mat3::Zero());
    return dg;
  }
  check_stencil_box(f, p, spacing);
  for (int m = 0; m < 3; ++m) {
    Vec3 e = Vec3::Zero();
    e[m] = spacing;
    dg[m] = (raw_value(f, p + e) - raw_value(f, p - e)) / (2.0 * spacing);
  }
  return dg;
}

void christoffel_at(const MetricField& f, const Vec3& p, double spacing,
                    double gamma[3][3][3]) {
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) gamma[k][i][j] = 0.0;
  if (metric_is_constant(f)) return;
  const Mat3 ginv = metric_at(f, p).inverse();
  const auto dg = metric_gradient(f, p, spacing);
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int l = 0; l < 3; ++l)
          s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        gamma[k][i][j] = 0.5 * s;
      }
}

CurvaturePack curvature_at(const MetricField& f, const Vec3& p, double spacing) {
  CurvaturePack out;
  if (metric_is_constant(f)) return out;
  check_stencil_box(f, p, 2.0 * spacing);

  const Mat3 g0 = metric_at(f, p);
  const Mat3 ginv = g0.inverse();
  const auto dg = metric_gradient(f, p, spacing);

  // Second derivatives d2g[m][i] = d_m d_i g, symmetric in (m, i).
  Mat3 d2g[3][3];
  for (int m = 0; m < 3; ++m) {
    Vec3 em = Vec3::Zero();
    em[m] = spacing;
    d2g[m][m] = (raw_value(f, p + em) - 2.0 * g0 + raw_value(f, p - em)) /
                (spacing * spacing);
    for (int i = m + 1; i < 3; ++i) {
      Vec3 ei = Vec3::Zero();
      ei[i] = spacing;
      d2g[m][i] = (raw_value(f, p + em + ei) - raw_value(f, p + em - ei) -
                   raw_value(f, p - em + ei) + raw_value(f, p - em - ei)) /
                  (4.0 * spacing * spacing);
      d2g[i][m] = d2g[m][i];
    }
  }

  double (&gam)[3][3][3] = out.christoffel;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int l = 0; l < 3; ++l)
          s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        gam[k][i][j] = 0.5 * s;
      }

  // dGam[m][k][i][j] = d_m Gamma^k_{ij}, via d_m g^{kl} = -(ginv dg[m] ginv).
  double dGam[3][3][3][3];
  for (int m = 0; m < 3; ++m) {
    const Mat3 dginv = -(ginv * dg[m] * ginv);
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double s = 0.0;
          for (int l = 0; l < 3; ++l) {
            s += dginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
            s += ginv(k, l) *
                 (d2g[m][i](j, l) + d2g[m][j](i, l) - d2g[m][l](i, j));
          }
          dGam[m][k][i][j] = 0.5 * s;
        }
  }

  // Ricci_{sn} = R^r_{srn} = d_r Gam^r_{ns} - d_n Gam^r_{rs}
  //              + Gam^r_{rl} Gam^l_{ns} - Gam^r_{nl} Gam^l_{rs}.
  for (int s = 0; s < 3; ++s)
    for (int n = 0; n < 3; ++n) {
      double r = 0.0;
      for (int rho = 0; rho < 3; ++rho) {
        r += dGam[rho][rho][n][s] - dGam[n][rho][rho][s];
        for (int l = 0; l < 3; ++l)
          r += gam[rho][rho][l] * gam[l][n][s] - gam[rho][n][l] * gam[l][rho][s];
      }
      out.ricci(s, n) = r;
    }
  out.ricci = 0.5 * (out.ricci + out.ricci.transpose()).eval();
  out.scalar = (ginv * out.ricci).trace();
  return out;
}

MetricField scale_metric(const MetricField& f, double lambda) {
  require(lambda > 0, "NonPositiveScale", "metric scale must be positive");
  MetricField out = f;
  switch (f.kind) {
    case MetricKind::Euclidean:
      out.kind = MetricKind::ConstantDiagonalBlock;
      out.constant = lambda * Mat3::Identity();
      break;
    case MetricKind::ConstantDiagonalBlock:
      out.constant = lambda * f.constant;
      break;
    case MetricKind::Perturbed:
    case MetricKind::General:
      out.overall_scale = lambda * f.overall_scale;
      break;
  }
  return out;
}

double sectional_curvature(const MetricField& f, const Vec3& p,
                           const Vec3& e1, const Vec3& e2, double spacing) {
  const Mat3 g = metric_at(f, p);
  const double g11 = e1.dot(g * e1), g22 = e2.dot(g * e2), g12 = e1.dot(g * e2);
  const double area2 = g11 * g22 - g12 * g12;
  require(area2 > 1e-14 * g11 * g22 + 1e-300, "ZeroDirection",
          "sectional plane is degenerate");
  const CurvaturePack cp = curvature_at(f, p, spacing);
  // Dimension 3: R_{abcd} = g_ac P_bd + g_bd P_ac - g_ad P_bc - g_bc P_ad
  // with P = Ric - (R/4) g.
  const Mat3 P = cp.ricci - 0.25 * cp.scalar * g;
  const double P11 = e1.dot(P * e1), P22 = e2.dot(P * e2), P12 = e1.dot(P * e2);
  const double R1212 = g11 * P22 + g22 * P11 - 2.0 * g12 * P12;
  return R1212 / area2;
}

}  // namespace caprig

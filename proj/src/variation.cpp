#include "caprig/variation.hpp"

#include <cmath>
#include <vector>

#include "caprig/fft.hpp"

namespace caprig {

ArrayXXd energy_gradient(const Leaf& leaf, const WettedWall& wall,
                         const MetricField& g, DerivScheme scheme) {
  const LeafGeometry geo = leaf_geometry(leaf, g, scheme);
  const int Nr = leaf.Nr, Nu = leaf.Nu;
  const VectorXd q = radial_weights(Nr);
  const double du_w = 2.0 * kPi / Nu;

  const bool const_g = metric_is_constant(g);
  Mat3 g_const = Mat3::Identity();
  if (const_g) g_const = metric_at(g, Vec3::Zero());

  // Per-node partials of the area element sqrtG with respect to (w, wr, wu).
  // Nodes move along T = dPhi/dw; the same vector is dPr/dwr and dPu/dwu,
  // while w itself also feeds the chart/center jets and the metric.
  ArrayXXd gw(Nr, Nu), a1(Nr, Nu), a2(Nr, Nu);
  parallel_for(Nu, [&](int k) {
    for (int i = 0; i < Nr; ++i) {
      const double r = leaf.rnode(i);
      const Vec3 Pr(geo.Pr[0](i, k), geo.Pr[1](i, k), geo.Pr[2](i, k));
      const Vec3 Pu(geo.Pu[0](i, k), geo.Pu[1](i, k), geo.Pu[2](i, k));
      const double Evx = geo.bxv(i, k) - geo.cxv(i, k);
      const double Evy = geo.byv(i, k) - geo.cyv(i, k);
      const double Evvx = geo.bxvv(i, k) - geo.cxvv(i, k);
      const double Evvy = geo.byvv(i, k) - geo.cyvv(i, k);
      const Vec3 T(geo.cxv(i, k) + r * Evx, geo.cyv(i, k) + r * Evy, 1.0);
      const double wr = geo.wr(i, k), wu = geo.wu(i, k);
      const Vec3 dPr(geo.cxvv(i, k) * wr + Evx + r * Evvx * wr,
                     geo.cyvv(i, k) * wr + Evy + r * Evvy * wr, 0.0);
      const Vec3 dPu(geo.cxvv(i, k) * wu + r * (geo.bxuv(i, k) + Evvx * wu),
                     geo.cyvv(i, k) * wu + r * (geo.byuv(i, k) + Evvy * wu),
                     0.0);

      const Vec3 p(geo.px(i, k), geo.py(i, k), leaf.w(i, k));
      const Mat3 gm = const_g ? g_const : metric_at(g, p);
      Mat3 dg = Mat3::Zero();
      if (!const_g) {
        const std::array<Mat3, 3> dgs = metric_gradient(g, p);
        dg = T(0) * dgs[0] + T(1) * dgs[1] + T(2) * dgs[2];
      }

      const Vec3 gPr = gm * Pr, gPu = gm * Pu;
      const double G11 = geo.G11(i, k), G12 = geo.G12(i, k),
                   G22 = geo.G22(i, k);
      const double inv2S = 0.5 / geo.sqrtG(i, k);
      const auto dS = [&](double d11, double d12, double d22) {
        return inv2S * (G22 * d11 - 2.0 * G12 * d12 + G11 * d22);
      };

      const double w11 = 2.0 * dPr.dot(gPr) + Pr.dot(dg * Pr);
      const double w12 = dPr.dot(gPu) + dPu.dot(gPr) + Pr.dot(dg * Pu);
      const double w22 = 2.0 * dPu.dot(gPu) + Pu.dot(dg * Pu);

      const double Q = q(i) * du_w;
      gw(i, k) = Q * dS(w11, w12, w22);
      a1(i, k) = Q * dS(2.0 * T.dot(gPr), T.dot(gPu), 0.0);
      a2(i, k) = Q * dS(0.0, T.dot(gPr), 2.0 * T.dot(gPu));
    }
  });

  // Pull the derivative channels back through the difference operators.
  // The angular operators of both schemes are antisymmetric circulants, so
  // their transpose is just a sign flip.
  const MatrixXd D1 = radial_derivative_matrix(Nr, 1, scheme);
  ArrayXXd grad = gw;
  grad.matrix() += D1.transpose() * a1.matrix();
  grad -= angular_derivative(a2, 1, scheme);

  const VectorXd wb = leaf.w.row(Nr - 1).transpose();
  grad.row(Nr - 1) -= wetted_above_deriv(wall, wb).transpose().array();
  return grad;
}

double first_variation(const Leaf& leaf, const MetricField& g,
                       const std::array<ArrayXXd, 3>& Y, DerivScheme scheme) {
  const LeafGeometry geo = leaf_geometry(leaf, g, scheme);
  const int Nr = leaf.Nr, Nu = leaf.Nu;
  const bool const_g = metric_is_constant(g);
  Mat3 g_const = Mat3::Identity();
  if (const_g) g_const = metric_at(g, Vec3::Zero());

  ArrayXXd dens(Nr, Nu);
  parallel_for(Nu, [&](int k) {
    for (int i = 0; i < Nr; ++i) {
      const Vec3 p(geo.px(i, k), geo.py(i, k), leaf.w(i, k));
      const Mat3 gm = const_g ? g_const : metric_at(g, p);
      const Vec3 Yv(Y[0](i, k), Y[1](i, k), Y[2](i, k));
      const Vec3 Nv(geo.N[0](i, k), geo.N[1](i, k), geo.N[2](i, k));
      dens(i, k) = geo.H(i, k) * Yv.dot(gm * Nv) * geo.sqrtG(i, k);
    }
  });
  double total = leaf_integral(leaf, dens);

  double bnd = 0.0;
  for (int k = 0; k < Nu; ++k) {
    const double u = leaf.unode(k);
    const double v = leaf.w(Nr - 1, k);
    const Frame F = frames_at(leaf.patch, &g, u, v);
    const Mat3 gm = const_g ? g_const : metric_at(g, F.p);
    const Vec3 Yv(Y[0](Nr - 1, k), Y[1](Nr - 1, k), Y[2](Nr - 1, k));
    const double off = Yv.dot(gm * F.X_g);
    require(std::abs(off) < 1e-8 * (1.0 + std::sqrt(Yv.dot(gm * Yv))),
            "VariationNotTangent",
            "variation leaves the wall at the contact curve");
    const Vec3 eta(geo.eta[0](k), geo.eta[1](k), geo.eta[2](k));
    const Vec3 dir = eta - F.cos_rho * F.nu_g;
    bnd += Yv.dot(gm * dir) * geo.bnd_ds(k);
  }
  return total + bnd * (2.0 * kPi / Nu);
}

namespace {

// Coefficients of the outward conormal eta = alpha Pr + beta Pu at a
// contact node, matching the eta stored in LeafGeometry.
void eta_coefficients(const LeafGeometry& geo, int k, double* alpha,
                      double* beta) {
  const int i = geo.Nr - 1;
  const double G11 = geo.G11(i, k), G12 = geo.G12(i, k), G22 = geo.G22(i, k);
  const double L = std::sqrt(G11 - G12 * G12 / G22);
  *alpha = 1.0 / L;
  *beta = -(G12 / G22) / L;
}

}  // namespace

ContactFields contact_fields(const Leaf& leaf, const LeafGeometry& geo,
                             const MetricField& g) {
  const int Nr = leaf.Nr, Nu = leaf.Nu;
  const bool const_g = metric_is_constant(g);
  Mat3 g_const = Mat3::Identity();
  if (const_g) g_const = metric_at(g, Vec3::Zero());

  // g-unit tangent of the contact curve, then its u-derivative for the
  // geodesic curvature (the row is periodic, differentiate spectrally).
  ArrayXXd That(3, Nu);
  for (int k = 0; k < Nu; ++k) {
    const double s = std::sqrt(geo.G22(Nr - 1, k));
    for (int c = 0; c < 3; ++c) That(c, k) = geo.Pu[c](Nr - 1, k) / s;
  }
  ArrayXXd dThat(3, Nu);
  for (int c = 0; c < 3; ++c) {
    std::vector<double> row(Nu);
    for (int k = 0; k < Nu; ++k) row[k] = That(c, k);
    const std::vector<double> drow = spectral_derivative(row, 1, 2.0 * kPi);
    for (int k = 0; k < Nu; ++k) dThat(c, k) = drow[k];
  }

  ContactFields out;
  for (VectorXd* f : {&out.kappa, &out.wall_H, &out.wall_A_nunu,
                      &out.leaf_A_etaeta, &out.dnu_cos, &out.leaf_H,
                      &out.cos_rho, &out.sin_rho})
    f->resize(Nu);

  parallel_for(Nu, [&](int k) {
    const int i = Nr - 1;
    const double u = leaf.unode(k);
    const double v = leaf.w(i, k);
    const Frame F = frames_at(leaf.patch, &g, u, v);
    out.cos_rho(k) = F.cos_rho;
    out.sin_rho(k) = F.sin_rho;
    out.leaf_H(k) = geo.H(i, k);
    const Vec3 p(geo.px(i, k), geo.py(i, k), v);
    const Mat3 gm = const_g ? g_const : metric_at(g, p);

    // geodesic curvature of the contact curve inside the leaf
    const Vec3 Tv(That(0, k), That(1, k), That(2, k));
    Vec3 acc(dThat(0, k), dThat(1, k), dThat(2, k));
    acc /= std::sqrt(geo.G22(i, k));
    if (!const_g) {
      double gamma[3][3][3];
      christoffel_at(g, p, 1e-4, gamma);
      for (int m = 0; m < 3; ++m) {
        double s = 0;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) s += gamma[m][a][b] * Tv(a) * Tv(b);
        acc(m) += s;
      }
    }
    const Vec3 eta(geo.eta[0](k), geo.eta[1](k), geo.eta[2](k));
    out.kappa(k) = -acc.dot(gm * eta);

    // Conormal of the contact curve within the wall: g-orthogonalize the
    // level frame's nu against the curve tangent (they differ only when the
    // contact height varies around the curve).
    Vec3 nu = F.nu_g - F.nu_g.dot(gm * Tv) * Tv;
    nu /= std::sqrt(nu.dot(gm * nu));

    // wall shape data in the g-unit (tau, nu_level) basis, contracted with nu
    const WallShape shape = second_fundamental_form(leaf.patch, &g, u, v);
    out.wall_H(k) = shape.H;
    const Vec2 c(nu.dot(gm * F.tau_g), nu.dot(gm * F.nu_g));
    out.wall_A_nunu(k) = c.dot(shape.II * c);

    // slope of the prescribed cosine along nu: express nu in chart
    // coordinates, then use the analytic chart derivatives of cos(rho).
    const ChartJet J = chart_jet(leaf.patch, u, v);
    const Vec3 pu(J.xu, J.yu, 0.0), pv(J.xv, J.yv, 1.0);
    Eigen::Matrix2d gram;
    gram << pu.dot(pu), pu.dot(pv), pu.dot(pv), pv.dot(pv);
    const Eigen::Vector2d rhs(nu.dot(pu), nu.dot(pv));
    const Eigen::Vector2d ab = gram.ldlt().solve(rhs);
    const double D = J.xu * J.yv - J.yu * J.xv;
    const double s2 = J.xu * J.xu + J.yu * J.yu;
    const double q = std::sqrt(s2 + D * D);
    const double Du =
        J.xuu * J.yv + J.xu * J.yuv - J.yuu * J.xv - J.yu * J.xuv;
    const double Dv =
        J.xuv * J.yv + J.xu * J.yvv - J.yuv * J.xv - J.yu * J.xvv;
    const double s2u = 2.0 * (J.xu * J.xuu + J.yu * J.yuu);
    const double s2v = 2.0 * (J.xu * J.xuv + J.yu * J.yuv);
    const double dcos_du = (Du - D * (s2u + 2.0 * D * Du) / (2.0 * q * q)) / q;
    const double dcos_dv = (Dv - D * (s2v + 2.0 * D * Dv) / (2.0 * q * q)) / q;
    out.dnu_cos(k) = ab(0) * dcos_du + ab(1) * dcos_dv;

    // leaf shape operator contracted with the conormal
    double alpha, beta;
    eta_coefficients(geo, k, &alpha, &beta);
    out.leaf_A_etaeta(k) = alpha * alpha * geo.II11(i, k) +
                           2.0 * alpha * beta * geo.II12(i, k) +
                           beta * beta * geo.II22(i, k);
  });
  return out;
}

ArrayXXd gauss_curvature(const Leaf& leaf, const LeafGeometry& geo,
                         const MetricField& g) {
  const int Nr = leaf.Nr, Nu = leaf.Nu;
  const bool const_g = metric_is_constant(g);
  ArrayXXd K = (geo.II11 * geo.II22 - geo.II12.square()) / geo.detG;
  if (const_g) return K;
  parallel_for(Nu, [&](int k) {
    for (int i = 0; i < Nr; ++i) {
      const Vec3 p(geo.px(i, k), geo.py(i, k), leaf.w(i, k));
      const Vec3 e1(geo.Pr[0](i, k), geo.Pr[1](i, k), geo.Pr[2](i, k));
      const Vec3 e2(geo.Pu[0](i, k), geo.Pu[1](i, k), geo.Pu[2](i, k));
      K(i, k) += sectional_curvature(g, p, e1, e2);
    }
  });
  return K;
}

StabilityQ stability_Q(const Leaf& leaf, const LeafGeometry& geo,
                       const MetricField& g) {
  const ContactFields cf = contact_fields(leaf, geo, g);
  const int Nu = leaf.Nu;
  StabilityQ out;
  out.direct.resize(Nu);
  out.composite.resize(Nu);
  for (int k = 0; k < Nu; ++k) {
    const double cr = cf.cos_rho(k), sr = cf.sin_rho(k);
    out.direct(k) = -cf.leaf_H(k) * cr / sr + cf.wall_H(k) / sr -
                    cf.kappa(k) + cf.dnu_cos(k) / (sr * sr);
    out.composite(k) = cf.wall_A_nunu(k) / sr -
                       (cr / sr) * cf.leaf_A_etaeta(k) +
                       cf.dnu_cos(k) / (sr * sr);
  }
  return out;
}

ArrayXXd surface_laplacian(const LeafGeometry& geo, const ArrayXXd& f) {
  const MatrixXd D1 = radial_derivative_matrix(geo.Nr, 1, geo.scheme);
  const ArrayXXd fr = (D1 * f.matrix()).array();
  const ArrayXXd fu = angular_derivative(f, 1, geo.scheme);
  const ArrayXXd I11 = geo.G22 / geo.detG;
  const ArrayXXd I12 = -geo.G12 / geo.detG;
  const ArrayXXd I22 = geo.G11 / geo.detG;
  const ArrayXXd flux1 = geo.sqrtG * (I11 * fr + I12 * fu);
  const ArrayXXd flux2 = geo.sqrtG * (I12 * fr + I22 * fu);
  const ArrayXXd div =
      (D1 * flux1.matrix()).array() + angular_derivative(flux2, 1, geo.scheme);
  return div / geo.sqrtG;
}

double second_variation(const Leaf& leaf, const LeafGeometry& geo,
                        const MetricField& g, const ArrayXXd& f) {
  const int Nr = leaf.Nr, Nu = leaf.Nu;
  const ArrayXXd lap = surface_laplacian(geo, f);
  const bool const_g = metric_is_constant(g);

  ArrayXXd dens(Nr, Nu);
  parallel_for(Nu, [&](int k) {
    for (int i = 0; i < Nr; ++i) {
      const double det = geo.detG(i, k);
      const double I11 = geo.G22(i, k) / det, I12 = -geo.G12(i, k) / det,
                   I22 = geo.G11(i, k) / det;
      const double S11 = I11 * geo.II11(i, k) + I12 * geo.II12(i, k);
      const double S12 = I11 * geo.II12(i, k) + I12 * geo.II22(i, k);
      const double S21 = I12 * geo.II11(i, k) + I22 * geo.II12(i, k);
      const double S22 = I12 * geo.II12(i, k) + I22 * geo.II22(i, k);
      const double A2 = S11 * S11 + 2.0 * S12 * S21 + S22 * S22;
      double ric = 0.0;
      if (!const_g) {
        const Vec3 p(geo.px(i, k), geo.py(i, k), leaf.w(i, k));
        const CurvaturePack cp = curvature_at(g, p);
        const Vec3 Nv(geo.N[0](i, k), geo.N[1](i, k), geo.N[2](i, k));
        ric = Nv.dot(cp.ricci * Nv);
      }
      dens(i, k) = -(f(i, k) * lap(i, k) + (A2 + ric) * f(i, k) * f(i, k)) *
                   geo.sqrtG(i, k);
    }
  });
  double total = leaf_integral(leaf, dens);

  const StabilityQ Q = stability_Q(leaf, geo, g);
  const MatrixXd D1 = radial_derivative_matrix(Nr, 1, geo.scheme);
  const ArrayXXd fr = (D1 * f.matrix()).array();
  const ArrayXXd fu = angular_derivative(f, 1, geo.scheme);
  double bnd = 0.0;
  for (int k = 0; k < Nu; ++k) {
    const int i = Nr - 1;
    double alpha, beta;
    eta_coefficients(geo, k, &alpha, &beta);
    const double dfeta = alpha * fr(i, k) + beta * fu(i, k);
    bnd += f(i, k) * (dfeta - Q.direct(k) * f(i, k)) * geo.bnd_ds(k);
  }
  return total + bnd * (2.0 * kPi / Nu);
}

}  // namespace caprig

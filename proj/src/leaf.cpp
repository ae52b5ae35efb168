#include "caprig/leaf.hpp"

#include "caprig/fft.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace caprig {

Vec2 leaf_center(const Leaf& leaf, double v) {
  if (leaf.center_on_axis) return Vec2(leaf.p_plus.x(), leaf.p_plus.y());
  return Vec2(leaf.center_x.eval(v), leaf.center_y.eval(v));
}

Vec3 leaf_point(const Leaf& leaf, int i, int k) {
  const double v = leaf.w(i, k);
  const double r = leaf.rnode(i);
  const double u = leaf.unode(k);
  const Vec2 c = leaf_center(leaf, v);
  const double wx = leaf.patch.fx(u, v);
  const double wy = leaf.patch.fy(u, v);
  return Vec3(c.x() + r * (wx - c.x()), c.y() + r * (wy - c.y()), v);
}

Leaf flat_leaf(const PatchGrid& grid, double height, int Nr) {
  require(Nr >= 8, "IoError", "leaf needs at least 8 radial nodes");
  const BoundaryPatch& p = grid.patch;
  require(height >= p.v_minus - 1e-12 && height <= p.v_plus + 1e-12, "EmptyLeaf",
          "slice height outside the wall window");
  Leaf leaf;
  leaf.kind = Leaf::Kind::FlatSlice;
  leaf.patch = p;
  leaf.center_x = grid.centroid_x;
  leaf.center_y = grid.centroid_y;
  leaf.Nr = Nr;
  leaf.Nu = grid.Nu;
  leaf.w = ArrayXXd::Constant(Nr, grid.Nu, height);
  return leaf;
}

VectorXd radial_weights(int Nr) {
  const double d = 1.0 / (Nr - 0.5);
  VectorXd q = VectorXd::Constant(Nr, d);
  q(Nr - 2) = 9.0 * d / 8.0;
  q(Nr - 1) = 3.0 * d / 8.0;
  return q;
}

double leaf_integral(const Leaf& leaf, const ArrayXXd& f) {
  const VectorXd q = radial_weights(leaf.Nr);
  double acc = 0.0;
  for (int i = 0; i < leaf.Nr; ++i) acc += q(i) * f.row(i).sum();
  return acc * (2.0 * kPi / leaf.Nu);
}

MatrixXd radial_derivative_matrix(int Nr, int m, DerivScheme scheme) {
  require(m == 1 || m == 2, "IoError", "derivative order must be 1 or 2");
  require(Nr >= 8, "IoError", "radial grid too small for the stencils");
  const double d = 1.0 / (Nr - 0.5);
  MatrixXd D = MatrixXd::Zero(Nr, Nr);
  for (int i = 0; i < Nr; ++i) {
    int width = scheme == DerivScheme::Spectral ? 5 : 3;
    int j0;
    if (scheme == DerivScheme::Spectral) {
      j0 = std::clamp(i - 2, 0, Nr - width);
      // a shifted window loses an order on the second derivative: widen it
      if (m == 2 && j0 != i - 2) {
        width = 6;
        j0 = std::clamp(i - 2, 0, Nr - width);
      }
    } else {
      j0 = std::clamp(i - 1, 0, Nr - width);
      if (m == 2 && j0 != i - 1) {
        width = 4;
        j0 = std::clamp(i - 1, 0, Nr - width);
      }
    }
    std::vector<double> nodes(width);
    for (int j = 0; j < width; ++j) nodes[j] = (j0 + j + 0.5) * d;
    const std::vector<double> wts = fd_weights((i + 0.5) * d, nodes, m);
    for (int j = 0; j < width; ++j) D(i, j0 + j) = wts[j];
  }
  return D;
}

ArrayXXd angular_derivative(const ArrayXXd& f, int m, DerivScheme scheme) {
  const int Nr = static_cast<int>(f.rows());
  const int Nu = static_cast<int>(f.cols());
  ArrayXXd out(Nr, Nu);
  if (scheme == DerivScheme::Spectral) {
    parallel_for(Nr, [&](int i) {
      std::vector<double> row(Nu);
      for (int k = 0; k < Nu; ++k) row[k] = f(i, k);
      const std::vector<double> der = spectral_derivative(row, m, 2.0 * kPi);
      for (int k = 0; k < Nu; ++k) out(i, k) = der[k];
    });
    return out;
  }
  const double du = 2.0 * kPi / Nu;
  for (int i = 0; i < Nr; ++i)
    for (int k = 0; k < Nu; ++k) {
      const double fm = f(i, (k + Nu - 1) % Nu), fp = f(i, (k + 1) % Nu);
      out(i, k) = m == 1 ? (fp - fm) / (2.0 * du)
                         : (fp - 2.0 * f(i, k) + fm) / (du * du);
    }
  return out;
}

LeafGeometry leaf_geometry(const Leaf& leaf, const MetricField& g, DerivScheme scheme) {
  const int Nr = leaf.Nr, Nu = leaf.Nu;
  require(Nr >= 8 && Nu >= 16, "IoError", "leaf grid too small");

  LeafGeometry geo;
  geo.Nr = Nr;
  geo.Nu = Nu;
  geo.scheme = scheme;

  const MatrixXd D1 = radial_derivative_matrix(Nr, 1, scheme);
  const MatrixXd D2 = radial_derivative_matrix(Nr, 2, scheme);
  geo.wr = (D1 * leaf.w.matrix()).array();
  geo.wrr = (D2 * leaf.w.matrix()).array();
  geo.wu = angular_derivative(leaf.w, 1, scheme);
  geo.wuu = angular_derivative(leaf.w, 2, scheme);
  geo.wru = (D1 * geo.wu.matrix()).array();

  for (ArrayXXd* a : {&geo.bx, &geo.by, &geo.bxu, &geo.byu, &geo.bxv, &geo.byv,
                      &geo.bxuu, &geo.byuu, &geo.bxuv, &geo.byuv, &geo.bxvv, &geo.byvv,
                      &geo.cx, &geo.cy, &geo.cxv, &geo.cyv, &geo.cxvv, &geo.cyvv,
                      &geo.px, &geo.py, &geo.G11, &geo.G12, &geo.G22, &geo.detG,
                      &geo.sqrtG, &geo.II11, &geo.II12, &geo.II22, &geo.H})
    a->resize(Nr, Nu);
  for (auto& a : geo.Pr) a.resize(Nr, Nu);
  for (auto& a : geo.Pu) a.resize(Nr, Nu);
  for (auto& a : geo.N) a.resize(Nr, Nu);
  geo.cos_rho.resize(Nu);
  geo.angle_residual.resize(Nu);
  geo.bnd_ds.resize(Nu);
  for (auto& a : geo.eta) a.resize(Nu);

  const bool const_g = metric_is_constant(g);
  Mat3 g_const = Mat3::Identity(), gi_const = Mat3::Identity();
  if (const_g) {
    g_const = metric_at(g, Vec3::Zero());
    gi_const = g_const.inverse();
  }

  parallel_for(Nr, [&](int i) {
    const double r = leaf.rnode(i);
    double gamma[3][3][3] = {};
    for (int k = 0; k < Nu; ++k) {
      const double u = leaf.unode(k);
      const double v = leaf.w(i, k);
      const ChartJet J = chart_jet(leaf.patch, u, v);

      double ccx, ccy, cvx, cvy, cwx, cwy;
      if (leaf.center_on_axis) {
        ccx = leaf.p_plus.x();
        ccy = leaf.p_plus.y();
        cvx = cvy = cwx = cwy = 0.0;
      } else {
        ccx = leaf.center_x.eval(v);
        ccy = leaf.center_y.eval(v);
        cvx = leaf.center_x.deriv(v);
        cvy = leaf.center_y.deriv(v);
        cwx = leaf.center_x.deriv2(v);
        cwy = leaf.center_y.deriv2(v);
      }
      geo.bx(i, k) = J.x;
      geo.by(i, k) = J.y;
      geo.bxu(i, k) = J.xu;
      geo.byu(i, k) = J.yu;
      geo.bxv(i, k) = J.xv;
      geo.byv(i, k) = J.yv;
      geo.bxuu(i, k) = J.xuu;
      geo.byuu(i, k) = J.yuu;
      geo.bxuv(i, k) = J.xuv;
      geo.byuv(i, k) = J.yuv;
      geo.bxvv(i, k) = J.xvv;
      geo.byvv(i, k) = J.yvv;
      geo.cx(i, k) = ccx;
      geo.cy(i, k) = ccy;
      geo.cxv(i, k) = cvx;
      geo.cyv(i, k) = cvy;
      geo.cxvv(i, k) = cwx;
      geo.cyvv(i, k) = cwy;

      const double Ex = J.x - ccx, Ey = J.y - ccy;
      const double Evx = J.xv - cvx, Evy = J.yv - cvy;
      const double Evvx = J.xvv - cwx, Evvy = J.yvv - cwy;
      const double wr = geo.wr(i, k), wu = geo.wu(i, k);
      const double wrr = geo.wrr(i, k), wru = geo.wru(i, k), wuu = geo.wuu(i, k);

      geo.px(i, k) = ccx + r * Ex;
      geo.py(i, k) = ccy + r * Ey;
      const Vec3 p(geo.px(i, k), geo.py(i, k), v);

      const Vec3 Pr(cvx * wr + Ex + r * Evx * wr, cvy * wr + Ey + r * Evy * wr, wr);
      const Vec3 Pu(cvx * wu + r * (J.xu + Evx * wu), cvy * wu + r * (J.yu + Evy * wu),
                    wu);
      const Vec3 Prr(cwx * wr * wr + cvx * wrr + 2.0 * Evx * wr +
                         r * (Evvx * wr * wr + Evx * wrr),
                     cwy * wr * wr + cvy * wrr + 2.0 * Evy * wr +
                         r * (Evvy * wr * wr + Evy * wrr),
                     wrr);
      const Vec3 Pru(cwx * wu * wr + cvx * wru + J.xu + Evx * wu +
                         r * (J.xuv * wr + Evvx * wu * wr + Evx * wru),
                     cwy * wu * wr + cvy * wru + J.yu + Evy * wu +
                         r * (J.yuv * wr + Evvy * wu * wr + Evy * wru),
                     wru);
      const Vec3 Puu(cwx * wu * wu + cvx * wuu +
                         r * (J.xuu + 2.0 * J.xuv * wu + Evvx * wu * wu + Evx * wuu),
                     cwy * wu * wu + cvy * wuu +
                         r * (J.yuu + 2.0 * J.yuv * wu + Evvy * wu * wu + Evy * wuu),
                     wuu);
      for (int c = 0; c < 3; ++c) {
        geo.Pr[c](i, k) = Pr(c);
        geo.Pu[c](i, k) = Pu(c);
      }

      const Mat3 gm = const_g ? g_const : metric_at(g, p);
      const Mat3 gi = const_g ? gi_const : gm.inverse();
      const double G11 = Pr.dot(gm * Pr);
      const double G12 = Pr.dot(gm * Pu);
      const double G22 = Pu.dot(gm * Pu);
      const double det = G11 * G22 - G12 * G12;
      require(det > 1e-30, "LeafDegenerate", "leaf chart tangents are degenerate");
      geo.G11(i, k) = G11;
      geo.G12(i, k) = G12;
      geo.G22(i, k) = G22;
      geo.detG(i, k) = det;
      geo.sqrtG(i, k) = std::sqrt(det);

      const Vec3 cross = Pr.cross(Pu);
      const Vec3 Nraw = gi * cross;
      const double nn = cross.dot(Nraw);
      const Vec3 N = Nraw / std::sqrt(nn);
      for (int c = 0; c < 3; ++c) geo.N[c](i, k) = N(c);

      if (!const_g) christoffel_at(g, p, 1e-4, gamma);
      const Vec3 gN = gm * N;
      auto second = [&](const Vec3& A, const Vec3& B, const Vec3& Pab) {
        Vec3 corr = Pab;
        if (!const_g)
          for (int m = 0; m < 3; ++m) {
            double acc = 0.0;
            for (int a = 0; a < 3; ++a)
              for (int b = 0; b < 3; ++b) acc += gamma[m][a][b] * A(a) * B(b);
            corr(m) += acc;
          }
        return -gN.dot(corr);
      };
      const double IIrr = second(Pr, Pr, Prr);
      const double IIru = second(Pr, Pu, Pru);
      const double IIuu = second(Pu, Pu, Puu);
      geo.II11(i, k) = IIrr;
      geo.II12(i, k) = IIru;
      geo.II22(i, k) = IIuu;
      geo.H(i, k) = (G22 * IIrr - 2.0 * G12 * IIru + G11 * IIuu) / det;

      if (i == Nr - 1) {
        const Frame F = frames_at(leaf.patch, &g, u, v);
        geo.cos_rho(k) = F.cos_rho;
        geo.angle_residual(k) = N.dot(gm * F.X_g) - F.cos_rho;
        geo.bnd_ds(k) = std::sqrt(G22);
        const Vec3 eraw = Pr - (G12 / G22) * Pu;
        const Vec3 e = eraw / std::sqrt(G11 - G12 * G12 / G22);
        for (int c = 0; c < 3; ++c) geo.eta[c](k) = e(c);
      }
    }
  });

  geo.area = leaf_integral(leaf, geo.sqrtG);
  geo.mean_H = leaf_integral(leaf, (geo.H * geo.sqrtG).eval()) / geo.area;
  return geo;
}

}  // namespace caprig

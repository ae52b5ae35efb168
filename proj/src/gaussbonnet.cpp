#include "caprig/gaussbonnet.hpp"

#include <cmath>

#include "caprig/numerics.hpp"

namespace caprig {

GaussBonnetAudit gauss_bonnet_audit(const Leaf& leaf, const LeafGeometry& geo,
                                    const MetricField& g) {
  GaussBonnetAudit out;
  const ArrayXXd K = gauss_curvature(leaf, geo, g);
  out.total_gauss = leaf_integral(leaf, K * geo.sqrtG);

  const ContactFields cf = contact_fields(leaf, geo, g);
  double turning = 0.0;
  for (int k = 0; k < leaf.Nu; ++k) turning += cf.kappa(k) * geo.bnd_ds(k);
  out.total_turning = turning * 2.0 * kPi / leaf.Nu;

  out.residual = out.total_gauss + out.total_turning - 2.0 * kPi * out.euler;
  return out;
}

RigidityAudit rigidity_audit(const Leaf& leaf, const LeafGeometry& geo,
                             const MetricField& g) {
  const int Nr = leaf.Nr, Nu = leaf.Nu;
  RigidityAudit out;

  const GaussBonnetAudit gb = gauss_bonnet_audit(leaf, geo, g);
  out.euler_residual =
      std::abs((gb.total_gauss + gb.total_turning) / (2.0 * kPi) - 1.0);

  const bool const_g = metric_is_constant(g);
  const ArrayXXd K = gauss_curvature(leaf, geo, g);
  out.gauss_max = K.abs().maxCoeff();

  std::vector<double> col_scalar(Nu, 0.0), col_shape(Nu, 0.0);
  parallel_for(Nu, [&](int k) {
    for (int i = 0; i < Nr; ++i) {
      if (!const_g) {
        const Vec3 p(geo.px(i, k), geo.py(i, k), leaf.w(i, k));
        col_scalar[k] =
            std::max(col_scalar[k], std::abs(curvature_at(g, p).scalar));
      }
      const double det = geo.detG(i, k);
      const double I11 = geo.G22(i, k) / det, I12 = -geo.G12(i, k) / det,
                   I22 = geo.G11(i, k) / det;
      const double S11 = I11 * geo.II11(i, k) + I12 * geo.II12(i, k);
      const double S12 = I11 * geo.II12(i, k) + I12 * geo.II22(i, k);
      const double S21 = I12 * geo.II11(i, k) + I22 * geo.II12(i, k);
      const double S22 = I12 * geo.II12(i, k) + I22 * geo.II22(i, k);
      const double A2 = S11 * S11 + 2.0 * S12 * S21 + S22 * S22;
      col_shape[k] = std::max(col_shape[k], std::sqrt(std::max(0.0, A2)));
    }
  });
  for (int k = 0; k < Nu; ++k) {
    out.scalar_max = std::max(out.scalar_max, col_scalar[k]);
    out.shape_norm_max = std::max(out.shape_norm_max, col_shape[k]);
  }

  const ContactFields cf = contact_fields(leaf, geo, g);
  for (int k = 0; k < Nu; ++k) {
    const double sr = cf.sin_rho(k);
    const double rhs = cf.wall_H(k) / sr + cf.dnu_cos(k) / (sr * sr);
    out.boundary_identity_max =
        std::max(out.boundary_identity_max, std::abs(cf.kappa(k) - rhs));
    out.angle_match_max =
        std::max(out.angle_match_max, std::abs(geo.angle_residual(k)));
  }
  return out;
}

}  // namespace caprig

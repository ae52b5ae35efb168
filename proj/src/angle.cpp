#include "caprig/angle.hpp"

#include <cmath>

#include "caprig/numerics.hpp"

namespace caprig {

AngleSample angle_at(const BoundaryPatch& patch, double u, double v) {
  const ChartJet J = chart_jet(patch, u, v);

  const double s2 = J.xu * J.xu + J.yu * J.yu;
  const double s = std::sqrt(s2);
  const double D = J.xu * J.yv - J.yu * J.xv;  // signed horizontal Jacobian
  const double q2 = s2 + D * D;
  const double q = std::sqrt(q2);

  AngleSample a;
  a.cos_rho = D / q;
  a.sin_rho = s / q;
  a.rho = std::atan2(s, D);
  require(a.sin_rho > 1e-8, "DegenerateContactAngle",
          "wall is horizontal at the requested point");

  // d(cos rho) in chart coordinates from the product/quotient rules.
  const double Du = J.xuu * J.yv + J.xu * J.yuv - J.yuu * J.xv - J.yu * J.xuv;
  const double Dv = J.xuv * J.yv + J.xu * J.yvv - J.yuv * J.xv - J.yu * J.xvv;
  const double s2u = 2.0 * (J.xu * J.xuu + J.yu * J.yuu);
  const double s2v = 2.0 * (J.xu * J.xuv + J.yu * J.yuv);
  const double qu = (s2u + 2.0 * D * Du) / (2.0 * q);
  const double qv = (s2v + 2.0 * D * Dv) / (2.0 * q);
  const double cos_u = (Du * q - D * qu) / q2;
  const double cos_v = (Dv * q - D * qv) / q2;

  // tau_bar is psi_u / s; nu_bar = alpha psi_u + beta psi_v points down the
  // wall and is fixed by <nu,psi_u> = 0, <nu,psi_v> = -q/s. The first
  // fundamental form of the chart has det = q^2.
  const double Iuv = J.xu * J.xv + J.yu * J.yv;
  const double alpha = Iuv * q / (s * q2);
  const double beta = -s2 * q / (s * q2);

  a.dtau_cos = cos_u / s;
  a.dnu_cos = alpha * cos_u + beta * cos_v;
  a.dtau = -a.dtau_cos / a.sin_rho;
  a.dnu = -a.dnu_cos / a.sin_rho;
  return a;
}

AngleField prescribed_angle(const PatchGrid& grid) {
  AngleField f;
  f.Nu = grid.Nu;
  f.Nv = grid.Nv;
  for (ArrayXXd* arr : {&f.rho, &f.cos_rho, &f.sin_rho, &f.dtau, &f.dnu})
    arr->resize(grid.Nv, grid.Nu);
  parallel_for(grid.Nv, [&](int j) {
    for (int k = 0; k < grid.Nu; ++k) {
      const AngleSample a =
          angle_at(grid.patch, grid.uvals[k], grid.vvals[j]);
      f.rho(j, k) = a.rho;
      f.cos_rho(j, k) = a.cos_rho;
      f.sin_rho(j, k) = a.sin_rho;
      f.dtau(j, k) = a.dtau;
      f.dnu(j, k) = a.dnu;
    }
  });
  return f;
}

}  // namespace caprig

#pragma once
// Integral curvature audits over a leaf: the Gauss-Bonnet balance for
// disk-type leaves and the clause-by-clause residuals of the flat
// angle-matched configuration every stable minimizer must satisfy.
#include "caprig/leaf.hpp"
#include "caprig/metric.hpp"
#include "caprig/variation.hpp"

namespace caprig {

struct GaussBonnetAudit {
  double total_gauss = 0;    // integral of the leaf's Gauss curvature
  double total_turning = 0;  // integral of the contact curve's geodesic curvature
  int euler = 1;             // leaves are disks by construction
  double residual = 0;       // total_gauss + total_turning - 2 pi euler
};

GaussBonnetAudit gauss_bonnet_audit(const Leaf& leaf, const LeafGeometry& geo,
                                    const MetricField& g);

// Residual per clause of the flat rigid configuration: disk Euler number via
// the curvature balance, ambient scalar curvature, leaf shape operator, leaf
// Gauss curvature, the boundary curvature identity
//   kappa = H_wall / sin(rho) + d_nu cos(rho) / sin^2(rho),
// and the prescribed-angle match <X, N>_g = cos(rho).
struct RigidityAudit {
  double euler_residual = 0;
  double scalar_max = 0;
  double shape_norm_max = 0;
  double gauss_max = 0;
  double boundary_identity_max = 0;
  double angle_match_max = 0;
  bool pass(double tol) const {
    return euler_residual < tol && scalar_max < tol && shape_norm_max < tol &&
           gauss_max < tol && boundary_identity_max < tol &&
           angle_match_max < tol;
  }
};

RigidityAudit rigidity_audit(const Leaf& leaf, const LeafGeometry& geo,
                             const MetricField& g);

}  // namespace caprig

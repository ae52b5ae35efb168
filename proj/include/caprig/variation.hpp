#pragma once
// Calculus around the capillary energy: the exact gradient of the discrete
// energy with respect to the leaf heights, the continuum first and second
// variation formulas, and the boundary stability form that couples leaf,
// wall and contact angle.
#include "caprig/energy.hpp"

namespace caprig {

// dE/dw(i, k) of the discrete Above-side energy. This is the exact adjoint
// of the quadrature + differentiation stack (not a finite difference), so
// pairings <grad, delta> reproduce centered differences of capillary_energy
// down to roundoff.
ArrayXXd energy_gradient(const Leaf& leaf, const WettedWall& wall,
                         const MetricField& g,
                         DerivScheme scheme = DerivScheme::Spectral);

// Continuum first variation of the Above-side energy under a variation
// field Y sampled on the leaf nodes:
//   dE(Y) = int H <Y, N>_g dA + oint <Y, eta - cos(rho_bar) nu>_g ds,
// with H, N, eta oriented as in LeafGeometry (sphere with outward normal
// has H > 0) and nu the g-unit wall tangent pointing away from the top.
// Throws VariationNotTangent when Y has a g-normal component against the
// wall at the contact curve (such motions leave the admissible class).
double first_variation(const Leaf& leaf, const MetricField& g,
                       const std::array<ArrayXXd, 3>& Y,
                       DerivScheme scheme = DerivScheme::Spectral);

// Geometry gathered per contact-curve node, shared by the stability form,
// the curvature audits and the boundary checks. The wall conormal nu used
// here is the g-unit direction inside the wall that is g-orthogonal to the
// contact curve and points away from the top; for level contact curves it
// coincides with the frame's nu_g.
struct ContactFields {
  VectorXd kappa;          // geodesic curvature of the contact curve in the leaf
  VectorXd wall_H;         // mean curvature of the wall in g
  VectorXd wall_A_nunu;    // wall second fundamental form on (nu, nu)
  VectorXd leaf_A_etaeta;  // leaf second fundamental form on (eta, eta)
  VectorXd dnu_cos;        // slope of the prescribed cosine along nu
  VectorXd leaf_H;         // leaf mean curvature at the contact row
  VectorXd cos_rho, sin_rho;
};
ContactFields contact_fields(const Leaf& leaf, const LeafGeometry& geo,
                             const MetricField& g);

// Gauss curvature of the leaf: shape-operator determinant plus the ambient
// sectional curvature of the tangent plane (from the 3d curvature
// decomposition; zero for constant metrics).
ArrayXXd gauss_curvature(const Leaf& leaf, const LeafGeometry& geo,
                         const MetricField& g);

// Boundary stability form along the contact curve, reported in two
// algebraically equal arrangements (their agreement is a strong check on
// the curvature bookkeeping):
//   direct    = -H cot(rho) + H_wall / sin(rho) - kappa + d_nu cos(rho_bar) / sin^2(rho)
//   composite =  A_wall(nu, nu) / sin(rho) - cot(rho) A_leaf(eta, eta)
//               + d_nu cos(rho_bar) / sin^2(rho)
// where kappa is the g-geodesic curvature of the contact curve inside the
// leaf (positive for the flat unit disk) and d_nu differentiates the
// prescribed-angle field along nu on the wall.
struct StabilityQ {
  VectorXd direct, composite;
};
StabilityQ stability_Q(const Leaf& leaf, const LeafGeometry& geo,
                       const MetricField& g);

// Second variation of energy for a normal speed f on the leaf:
//   Q(f, f) = -int (f Lap f + (|A|^2 + Ric(N, N)) f^2) dA
//             + oint f (df/deta - Q f) ds,
// with Q the stability form above (direct arrangement).
double second_variation(const Leaf& leaf, const LeafGeometry& geo,
                        const MetricField& g, const ArrayXXd& f);

// Laplace-Beltrami of a node field on the leaf, divergence form
// (1/sqrtG) d_a (sqrtG G^{ab} d_b f) with the scheme's derivatives.
ArrayXXd surface_laplacian(const LeafGeometry& geo, const ArrayXXd& f);

}  // namespace caprig

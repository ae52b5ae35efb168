#pragma once
// Pointwise metric evaluation on subsets of R^3: values, inner products,
// finite-difference Christoffel symbols, Ricci/scalar curvature, and
// pointwise scaling. Everything is coordinates on R^3; no abstract charts.
#include "caprig/common.hpp"

#include <array>
#include <functional>

namespace caprig {

// Scalar coefficient of a tensor entry as a function of position.
using CoeffFn = std::function<double(const Vec3&)>;

enum class MetricKind { Euclidean, ConstantDiagonalBlock, Perturbed, General };

struct MetricField {
  MetricKind kind = MetricKind::Euclidean;
  // ConstantDiagonalBlock: the full (scaled) constant matrix, including the
  // optional off-block entries a13, a23; the 2x2 upper block stays diagonal.
  Mat3 constant = Mat3::Identity();
  // Perturbed: g = overall_scale * (base + t * h(p)).
  Mat3 base = Mat3::Identity();
  double t = 0.0;
  // Perturbed h / General g entries in the order xx, xy, xz, yy, yz, zz.
  std::array<CoeffFn, 6> entries{};
  // General: g = overall_scale * entries(p).
  double overall_scale = 1.0;
  // Evaluation box for stencil safety checks.
  Vec3 box_lo = Vec3(-1e6, -1e6, -1e6);
  Vec3 box_hi = Vec3(1e6, 1e6, 1e6);
};

MetricField euclidean_metric();
MetricField diagonal_metric(double a11, double a22, double a33,
                            double a13 = 0.0, double a23 = 0.0);
MetricField perturbed_metric(const MetricField& base_diag, double t,
                             std::array<CoeffFn, 6> h);
MetricField general_metric(std::array<CoeffFn, 6> g);

// True when the field has constant coefficients (derivatives vanish exactly).
bool metric_is_constant(const MetricField& f);

// g(p), symmetric by construction; throws NonPositiveDefinite when the
// smallest eigenvalue is <= 0.
Mat3 metric_at(const MetricField& f, const Vec3& p);

double inner(const MetricField& f, const Vec3& p, const Vec3& v1, const Vec3& v2);

// First derivatives d g / d x^m, m = 0,1,2 (central differences at `spacing`;
// exact zeros for constant kinds).
std::array<Mat3, 3> metric_gradient(const MetricField& f, const Vec3& p,
                                    double spacing = 1e-4);

// Christoffel symbols gamma[k][i][j] = \Gamma^k_{ij}.
void christoffel_at(const MetricField& f, const Vec3& p, double spacing,
                    double gamma[3][3][3]);

struct CurvaturePack {
  double christoffel[3][3][3] = {};  // \Gamma^k_{ij}
  Mat3 ricci = Mat3::Zero();
  double scalar = 0.0;
};

// Christoffels, Ricci, and scalar curvature from nested central differences
// of the metric coefficients. Constant kinds short-circuit to exact zeros.
CurvaturePack curvature_at(const MetricField& f, const Vec3& p,
                           double spacing = 1e-4);

// lambda * g pointwise. Christoffels are unchanged; scalar curvature scales
// by 1/lambda. Throws NonPositiveScale for lambda <= 0.
MetricField scale_metric(const MetricField& f, double lambda);

// Sectional curvature of the plane spanned by (e1, e2) at p. In dimension 3
// the full Riemann tensor is determined by Ricci and the scalar curvature.
double sectional_curvature(const MetricField& f, const Vec3& p,
                           const Vec3& e1, const Vec3& e2,
                           double spacing = 1e-4);

}  // namespace caprig

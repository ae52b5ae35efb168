#pragma once
// Small numerical toolbox: finite-difference weights on arbitrary nodes,
// quadrature rules used by the surface integrals, log-log order fitting,
// Richardson extrapolation, Halton sequences, and a bounded parallel_for
// with deterministic reductions.
#include "caprig/common.hpp"

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace caprig {

// Finite-difference weights (Fornberg): f^(m)(x0) ~ sum_i w[i] f(nodes[i]).
// Nodes need not be equispaced or contain x0.
std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int m);

// Periodic trapezoid on n equispaced samples over [0, period); spectrally
// accurate for smooth periodic integrands.
double trapezoid_periodic(const double* f, int n, double period);

// Composite Simpson on an inclusive equispaced grid; when the sample count
// is even the trailing interval uses the cubic cell rule on the last four
// nodes, so the composite rule is exact for cubics for any count >= 3.
double simpson(const std::vector<double>& f, double h);

// Gauss-Legendre nodes/weights on [a, b].
void gauss_legendre(int n, double a, double b,
                    std::vector<double>& x, std::vector<double>& w);

// Cumulative integral C[k] = int_{x_k}^{x_{n-1}} f dx on an equispaced grid,
// 4th order (per-cell rule -f[k-1]+13f[k]+13f[k+1]-f[k+2], shifted at ends).
std::vector<double> cumulative_from_right(const std::vector<double>& f, double h);

// Cubic Hermite on one interval [x0, x1] with values/derivatives at the ends.
double hermite(double x, double x0, double x1, double f0, double f1, double d0, double d1);
double hermite_deriv(double x, double x0, double x1, double f0, double f1, double d0, double d1);

// Cubic spline through (x_i, y_i), x strictly increasing. Ends are clamped
// to slopes fitted from the data (one-sided 5-point stencils), which keeps
// 4th-order accuracy up to the boundary and reproduces cubics exactly.
struct CubicSpline {
  std::vector<double> x, y, m;  // m = second derivatives at nodes
  void build(const std::vector<double>& xs, const std::vector<double>& ys);
  double eval(double t) const;
  double deriv(double t) const;
  double deriv2(double t) const;
};

// Least-squares power-law fit value ~ coefficient * scale^exponent on
// (log scale, log |value|). Values with |value| < 1e-15 are dropped and
// counted in `flagged`; the coefficient sign is the majority sign.
struct OrderFit {
  double exponent = 0;
  double coefficient = 0;
  double r2 = 0;
  int used = 0;
  int flagged = 0;
  std::vector<std::pair<double, double>> samples;
};
OrderFit fit_order(std::vector<std::pair<double, double>> samples);

// Richardson: two samples at h and h/2 of a quantity with leading error h^p.
inline double richardson(double vh, double vh2, double p) {
  const double f = std::pow(2.0, p);
  return (f * vh2 - vh) / (f - 1.0);
}

// Halton low-discrepancy sequence (index >= 0), radical inverse in `base`.
double halton(uint64_t index, uint32_t base);

// Worker pool bounds. set_default_jobs(0) restores the hardware default.
int default_jobs();
void set_default_jobs(int jobs);

// Runs body(i) for i in [0, n) on up to `jobs` threads (default_jobs() when
// jobs <= 0). Exceptions propagate (first one wins).
void parallel_for(int n, const std::function<void(int)>& body, int jobs = 0);

// Deterministic parallel sum: chunk sums are combined in index order, so the
// result is independent of thread scheduling.
double parallel_sum(int n, const std::function<double(int)>& term, int jobs = 0);

}  // namespace caprig

#include "caprig/numerics.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

namespace caprig {

std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int m) {
  // Fornberg 1988. c[j] accumulates the weights for derivative order m.
  const int n = static_cast<int>(nodes.size());
  require(n >= m + 1, "InsufficientSamples", "stencil needs at least m+1 nodes");
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  c[0][0] = 1.0;
  double c1 = 1.0;
  for (int i = 1; i < n; ++i) {
    double c2 = 1.0;
    const double xd = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double xj = nodes[i] - nodes[j];
      c2 *= xj;
      if (j == i - 1) {
        for (int k = std::min(i, m); k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - (nodes[i - 1] - x0) * c[i - 1][k]) / c2;
        c[i][0] = -c1 * (nodes[i - 1] - x0) * c[i - 1][0] / c2;
      }
      for (int k = std::min(i, m); k >= 1; --k)
        c[j][k] = (xd * c[j][k] - k * c[j][k - 1]) / xj;
      c[j][0] = xd * c[j][0] / xj;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = c[j][m];
  return w;
}

double trapezoid_periodic(const double* f, int n, double period) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += f[i];
  return s * (period / n);
}

double simpson(const std::vector<double>& f, double h) {
  const int n = static_cast<int>(f.size());
  require(n >= 3, "InsufficientSamples", "simpson needs >= 3 samples");
  double s = 0.0;
  int i = 0;
  // Composite over pairs of intervals; a trailing odd interval is handled by
  // the cubic cell rule on the last four nodes so the whole rule stays exact
  // for cubics regardless of parity.
  for (; i + 2 < n; i += 2) s += h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
  if (i + 1 < n)
    s += h / 24.0 * (f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1]);
  return s;
}

void gauss_legendre(int n, double a, double b,
                    std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  // Newton on Legendre polynomials, standard [-1,1] then affine map.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    const double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
    x[i] = xm - xl * z;
    x[n - 1 - i] = xm + xl * z;
    w[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

std::vector<double> cumulative_from_right(const std::vector<double>& f, double h) {
  const int n = static_cast<int>(f.size());
  require(n >= 4, "InsufficientSamples", "cumulative rule needs >= 4 samples");
  // Integral over one cell [x_k, x_{k+1}] from the 4-point stencil around it.
  auto cell = [&](int k) {
    int s = std::clamp(k - 1, 0, n - 4);  // stencil start: nodes s..s+3
    const double t = k - s;               // cell position within the stencil (0,1,2)
    // Exact integral of the cubic through the 4 nodes over [t, t+1], nodes at 0..3.
    auto I = [&](double a, double b) {
      // antiderivatives of Lagrange basis on nodes 0..3
      auto F0 = [](double u) { return u - 11.0 / 12 * u * u + u * u * u / 3 - u * u * u * u / 24; };
      auto F1 = [](double u) { return 1.5 * u * u - 5.0 / 6 * u * u * u + u * u * u * u / 8; };
      auto F2 = [](double u) { return -0.75 * u * u + 2.0 / 3 * u * u * u - u * u * u * u / 8; };
      auto F3 = [](double u) { return u * u / 6 - u * u * u / 6 + u * u * u * u / 24; };
      return std::array<double, 4>{F0(b) - F0(a), F1(b) - F1(a), F2(b) - F2(a), F3(b) - F3(a)};
    };
    const auto wgt = I(t, t + 1.0);
    double s4 = 0.0;
    for (int j = 0; j < 4; ++j) s4 += wgt[j] * f[s + j];
    return h * s4;
  };
  std::vector<double> C(n, 0.0);
  for (int k = n - 2; k >= 0; --k) C[k] = C[k + 1] + cell(k);
  return C;
}

double hermite(double x, double x0, double x1, double f0, double f1, double d0, double d1) {
  const double h = x1 - x0, t = (x - x0) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * h * d0 +
         (-2 * t3 + 3 * t2) * f1 + (t3 - t2) * h * d1;
}

double hermite_deriv(double x, double x0, double x1, double f0, double f1, double d0, double d1) {
  const double h = x1 - x0, t = (x - x0) / h;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * f0 + (3 * t2 - 4 * t + 1) * h * d0 +
          (-6 * t2 + 6 * t) * f1 + (3 * t2 - 2 * t) * h * d1) / h;
}

void CubicSpline::build(const std::vector<double>& xs, const std::vector<double>& ys) {
  const int n = static_cast<int>(xs.size());
  require(n >= 3, "InsufficientSamples", "spline needs >= 3 nodes");
  x = xs;
  y = ys;
  m.assign(n, 0.0);
  // Clamped ends with slopes fitted from the data by one-sided stencils, so
  // the spline stays 4th order up to the boundary (and exact on cubics).
  auto end_slope = [&](bool left) {
    const int k = std::min(5, n);
    std::vector<double> nodes(k);
    for (int i = 0; i < k; ++i) nodes[i] = left ? x[i] : x[n - k + i];
    auto wts = fd_weights(left ? x[0] : x[n - 1], nodes, 1);
    double d = 0.0;
    for (int i = 0; i < k; ++i) d += wts[i] * (left ? y[i] : y[n - k + i]);
    return d;
  };
  const double d0 = end_slope(true), d1 = end_slope(false);
  std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
  const double h0 = x[1] - x[0], h1 = x[n - 1] - x[n - 2];
  b[0] = h0 / 3.0;
  c[0] = h0 / 6.0;
  d[0] = (y[1] - y[0]) / h0 - d0;
  a[n - 1] = h1 / 6.0;
  b[n - 1] = h1 / 3.0;
  d[n - 1] = d1 - (y[n - 1] - y[n - 2]) / h1;
  for (int i = 1; i + 1 < n; ++i) {
    const double hl = x[i] - x[i - 1], hr = x[i + 1] - x[i];
    a[i] = hl / 6.0;
    b[i] = (hl + hr) / 3.0;
    c[i] = hr / 6.0;
    d[i] = (y[i + 1] - y[i]) / hr - (y[i] - y[i - 1]) / hl;
  }
  for (int i = 1; i < n; ++i) {  // Thomas
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  m[n - 1] = d[n - 1] / b[n - 1];
  for (int i = n - 2; i >= 0; --i) m[i] = (d[i] - c[i] * m[i + 1]) / b[i];
}

double CubicSpline::eval(double t) const {
  const int n = static_cast<int>(x.size());
  int i = static_cast<int>(std::upper_bound(x.begin(), x.end(), t) - x.begin()) - 1;
  i = std::clamp(i, 0, n - 2);
  const double h = x[i + 1] - x[i], A = (x[i + 1] - t) / h, B = (t - x[i]) / h;
  return A * y[i] + B * y[i + 1] +
         ((A * A * A - A) * m[i] + (B * B * B - B) * m[i + 1]) * h * h / 6.0;
}

double CubicSpline::deriv(double t) const {
  const int n = static_cast<int>(x.size());
  int i = static_cast<int>(std::upper_bound(x.begin(), x.end(), t) - x.begin()) - 1;
  i = std::clamp(i, 0, n - 2);
  const double h = x[i + 1] - x[i], A = (x[i + 1] - t) / h, B = (t - x[i]) / h;
  return (y[i + 1] - y[i]) / h +
         ((3 * B * B - 1) * m[i + 1] - (3 * A * A - 1) * m[i]) * h / 6.0;
}

double CubicSpline::deriv2(double t) const {
  const int n = static_cast<int>(x.size());
  int i = static_cast<int>(std::upper_bound(x.begin(), x.end(), t) - x.begin()) - 1;
  i = std::clamp(i, 0, n - 2);
  const double h = x[i + 1] - x[i], A = (x[i + 1] - t) / h, B = (t - x[i]) / h;
  return A * m[i] + B * m[i + 1];
}

OrderFit fit_order(std::vector<std::pair<double, double>> samples) {
  require(samples.size() >= 4, "InsufficientSamples", "need >= 4 (scale, value) samples");
  OrderFit out;
  out.samples = samples;
  int pos = 0, neg = 0;
  std::vector<double> lx, ly;
  for (auto& [s, v] : samples) {
    require(s > 0, "DegenerateScales", "scales must be positive");
    if (std::abs(v) < 1e-15) {
      ++out.flagged;
      continue;
    }
    (v > 0 ? pos : neg)++;
    lx.push_back(std::log(s));
    ly.push_back(std::log(std::abs(v)));
  }
  for (size_t i = 0; i + 1 < lx.size(); ++i)
    for (size_t j = i + 1; j < lx.size(); ++j)
      require(std::abs(lx[i] - lx[j]) > 1e-14, "DegenerateScales", "scales must be distinct");
  out.used = static_cast<int>(lx.size());
  if (out.used < 2) return out;  // all flagged: exponent/coefficient stay 0
  const int n = out.used;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
    syy += ly[i] * ly[i];
  }
  const double den = n * sxx - sx * sx;
  out.exponent = (n * sxy - sx * sy) / den;
  const double intercept = (sy - out.exponent * sx) / n;
  out.coefficient = std::exp(intercept) * (pos >= neg ? 1.0 : -1.0);
  const double sstot = syy - sy * sy / n;
  double ssres = 0;
  for (int i = 0; i < n; ++i) ssres += sqr(ly[i] - (intercept + out.exponent * lx[i]));
  out.r2 = sstot > 0 ? 1.0 - ssres / sstot : 1.0;
  return out;
}

double halton(uint64_t index, uint32_t base) {
  double f = 1.0, r = 0.0;
  uint64_t i = index + 1;  // skip the zero
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

namespace {
std::atomic<int> g_jobs{0};
}

int default_jobs() {
  const int j = g_jobs.load();
  if (j > 0) return j;
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min(hw == 0 ? 4u : hw, 8u));
}

void set_default_jobs(int jobs) { g_jobs.store(jobs); }

void parallel_for(int n, const std::function<void(int)>& body, int jobs) {
  if (n <= 0) return;
  int nw = jobs > 0 ? jobs : default_jobs();
  nw = std::min(nw, n);
  if (nw <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

double parallel_sum(int n, const std::function<double(int)>& term, int jobs) {
  if (n <= 0) return 0.0;
  // Chunking is fixed (independent of the worker count) and chunk sums are
  // combined in index order, so the result is bit-identical for any `jobs`.
  const int chunk = 1024;
  const int nchunks = (n + chunk - 1) / chunk;
  std::vector<double> partial(nchunks, 0.0);
  parallel_for(nchunks, [&](int c) {
    double s = 0.0;
    const int lo = c * chunk, hi = std::min(n, lo + chunk);
    for (int i = lo; i < hi; ++i) s += term(i);
    partial[c] = s;
  }, jobs);
  return std::accumulate(partial.begin(), partial.end(), 0.0);
}

}  // namespace caprig

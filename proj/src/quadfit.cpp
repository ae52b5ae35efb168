#include "caprig/quadfit.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <cmath>

namespace caprig {

namespace {

// Horizontal distance from the vertical axis through p_plus to the wall
// chart point at (u, v).
double ring_radius(const BoundaryPatch& p, const Vec3& p_plus, double u, double v) {
  const double dx = p.fx(u, v) - p_plus.x();
  const double dy = p.fy(u, v) - p_plus.y();
  return std::hypot(dx, dy);
}

// Height at which the wall passes horizontal distance `target` from the
// axis, bisected between the slicing window top and the apex.
double height_at_radius(const BoundaryPatch& p, const Vec3& p_plus, double u, double target) {
  double lo = p.v_plus;        // ring wider than target here
  double hi = p_plus.z();      // ring closed (narrower than target) here
  require(ring_radius(p, p_plus, u, lo) >= target,
          "StencilOutOfDomain", "fit ring is wider than the slicing window allows");
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ring_radius(p, p_plus, u, mid) >= target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

QuadraticFit quadratic_fit_boundary(const BoundaryPatch& patch, const Vec3& p_plus,
                                    const Mat3* g0) {
  require(p_plus.z() > patch.v_plus, "IoError", "apex height is below the slicing window");
  for (int j = 0; j < 8; ++j)
    require(ring_radius(patch, p_plus, 2.0 * kPi * j / 8, p_plus.z()) < 1e-7,
            "IoError", "wall does not close up at the apex point");

  QuadraticFit fit;
  fit.p_plus = p_plus;
  if (g0 != nullptr && std::abs((*g0)(0, 1)) > 1e-14)
    fit.theta = 0.5 * std::atan2(2.0 * (*g0)(0, 1), (*g0)(0, 0) - (*g0)(1, 1));
  const double ct = std::cos(fit.theta), st = std::sin(fit.theta);

  const int nang = 48, nring = 12;
  for (int ri = 0; ri < 3; ++ri) {
    const double R = fit.radii[ri];
    Eigen::MatrixXd A(nang * nring, 6);
    Eigen::VectorXd rhs(nang * nring);
    for (int m = 0; m < nring; ++m) {
      const double target = R * (m + 1) / nring;
      for (int j = 0; j < nang; ++j) {
        const double u = 2.0 * kPi * j / nang;
        const double v = height_at_radius(patch, p_plus, u, target);
        const double dx = patch.fx(u, v) - p_plus.x();
        const double dy = patch.fy(u, v) - p_plus.y();
        const double x1 = ct * dx + st * dy;
        const double x2 = -st * dx + ct * dy;
        const int row = m * nang + j;
        A.row(row) << 1.0, x1, x2, x1 * x1, x1 * x2, x2 * x2;
        rhs(row) = p_plus.z() - v;
      }
    }
    const Eigen::VectorXd beta = A.colPivHouseholderQr().solve(rhs);
    fit.per_radius[ri] = {beta(3), 0.5 * beta(4), beta(5)};
    if (ri == 2) fit.fit_rms = (A * beta - rhs).norm() / std::sqrt(double(nang * nring));
  }

  // Extrapolate the per-ring coefficients to ring radius zero.
  for (int c = 0; c < 3; ++c) {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) {
      double wgt = 1.0;
      for (int j = 0; j < 3; ++j)
        if (j != i) wgt *= (0.0 - fit.radii[j]) / (fit.radii[i] - fit.radii[j]);
      acc += wgt * fit.per_radius[i][c];
    }
    (c == 0 ? fit.c11 : c == 1 ? fit.c12 : fit.c22) = acc;
  }
  fit.strictly_convex =
      fit.c11 > 1e-8 && fit.c22 > 1e-8 && fit.c11 * fit.c22 - fit.c12 * fit.c12 > 1e-8;
  return fit;
}

Leaf quadratic_leaf(const BoundaryPatch& patch, const QuadraticFit& fit, const Vec3& b,
                    double s, double t, int Nr, int Nu) {
  require(Nr >= 8 && Nu >= 16, "IoError", "leaf grid too small");
  require(t > 0.0, "EmptyLeaf", "graph offset t must be positive");
  const double zp = fit.p_plus.z();
  const double q11 = fit.c11 * (b.x() * (1.0 + s) - 1.0);
  const double q12 = fit.c12 * (b.y() * (1.0 + s) - 1.0);
  const double q22 = fit.c22 * (b.z() * (1.0 + s) - 1.0);
  const double ct = std::cos(fit.theta), st = std::sin(fit.theta);

  Leaf leaf;
  leaf.kind = Leaf::Kind::Quadratic;
  leaf.patch = patch;
  leaf.center_on_axis = true;
  leaf.p_plus = fit.p_plus;
  leaf.Nr = Nr;
  leaf.Nu = Nu;
  leaf.w.resize(Nr, Nu);

  // Height of the quadratic graph above the chart node (r, u) when the node
  // itself sits at height v; leaf heights are the fixed points h(v) = v.
  auto graph_height = [&](double r, double u, double v) {
    const double dx = r * (patch.fx(u, v) - fit.p_plus.x());
    const double dy = r * (patch.fy(u, v) - fit.p_plus.y());
    const double x1 = ct * dx + st * dy;
    const double x2 = -st * dx + ct * dy;
    return zp + q11 * x1 * x1 + 2.0 * q12 * x1 * x2 + q22 * x2 * x2 - t * t;
  };

  std::atomic<int> bad{0};
  parallel_for(Nr, [&](int i) {
    const double r = leaf.rnode(i);
    for (int k = 0; k < Nu; ++k) {
      const double u = leaf.unode(k);
      auto h = [&](double v) { return graph_height(r, u, v) - v; };
      double hi = zp;  // keeps h < 0 (node below the graph would read h >= 0)
      if (h(hi) >= 0.0) {  // graph pokes through the cap at this node
        bad.fetch_add(1);
        return;
      }
      const int nscan = 400;
      const double step = (zp - patch.chart_vlo) / nscan;
      double lo = hi;
      bool found = false;
      for (int m = 1; m <= nscan; ++m) {
        lo = zp - m * step;
        if (h(lo) >= 0.0) {
          found = true;
          break;
        }
        hi = lo;
      }
      if (!found) {  // graph stays below the wall all the way down
        bad.fetch_add(1);
        return;
      }
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) >= 0.0 ? lo : hi) = mid;
      }
      leaf.w(i, k) = 0.5 * (lo + hi);
    }
  });
  require(bad.load() == 0, "EmptyLeaf", "clipped quadratic graph misses the container");
  return leaf;
}

}  // namespace caprig

#include "caprig/energy.hpp"

#include <cmath>

namespace caprig {

namespace {

// F = cos(rho_bar) * g-area element of the wall chart at (u, v), computed
// from a chart jet (works above the slicing window, where the grid has no
// rows).
double wall_density(const BoundaryPatch& patch, const MetricField& g, double u,
                    double v) {
  const ChartJet J = chart_jet(patch, u, v);
  const double s2 = J.xu * J.xu + J.yu * J.yu;
  const double det = J.xu * J.yv - J.xv * J.yu;
  const double q = std::sqrt(s2 + det * det);
  require(q > 1e-20, "DegenerateLevelCurve", "wall chart tangent vanishes");
  const double cos_rho = det / q;
  const Vec3 pu(J.xu, J.yu, 0.0), pv(J.xv, J.yv, 1.0);
  const Vec3 p(J.x, J.y, v);
  const Mat3 gm = metric_at(g, p);
  const double a = pu.dot(gm * pu);
  const double b = pu.dot(gm * pv);
  const double c = pv.dot(gm * pv);
  return cos_rho * std::sqrt(std::max(0.0, a * c - b * b));
}

}  // namespace

WettedWall build_wetted_wall(const PatchGrid& grid, const MetricField& g) {
  WettedWall wall;
  wall.patch = grid.patch;
  wall.Nu = grid.Nu;
  wall.Nv = grid.Nv;
  wall.v_minus = grid.patch.v_minus;
  wall.v_plus = grid.patch.v_plus;
  wall.dv = grid.dv;
  wall.F.resize(grid.Nv, grid.Nu);
  wall.C.resize(grid.Nv, grid.Nu);

  // fresh chart jets per node (the apex-regularized branch keeps them
  // accurate near smooth caps, where the stored grid jets lose digits)
  parallel_for(grid.Nv, [&](int j) {
    for (int k = 0; k < grid.Nu; ++k)
      wall.F(j, k) =
          wall_density(grid.patch, g, grid.uvals[k], grid.vvals[j]);
  });

  std::vector<double> col(grid.Nv);
  for (int k = 0; k < grid.Nu; ++k) {
    for (int j = 0; j < grid.Nv; ++j) col[j] = wall.F(j, k);
    const std::vector<double> cum = cumulative_from_right(col, grid.dv);
    for (int j = 0; j < grid.Nv; ++j) wall.C(j, k) = cum[j];
  }

  // constant piece above the window
  const BoundaryPatch& p = grid.patch;
  if (p.top_cap == BoundaryPatch::Cap::Flat) {
    // no wall above the window; the cap is the flat disk at v_top with
    // cos(rho_bar) = 1, so its contribution is its g-area
    Leaf capdisk = flat_leaf(grid, p.v_plus, 64);
    capdisk.w.setConstant(p.v_top);
    const LeafGeometry geo = leaf_geometry(capdisk, g);
    wall.above = geo.area;
  } else {
    // smooth cap: the wall itself continues to the apex; integrate in the
    // regular meridian parameter xi = sqrt(v_top - v)
    const double xi_max = std::sqrt(p.v_top - p.v_plus);
    std::vector<double> xs, ws;
    gauss_legendre(48, 0.0, xi_max, xs, ws);
    std::vector<double> contrib(grid.Nu, 0.0);
    parallel_for(grid.Nu, [&](int k) {
      const double u = grid.uvals[k];
      double acc = 0.0;
      for (size_t q = 0; q < xs.size(); ++q) {
        const double v = p.v_top - xs[q] * xs[q];
        acc += ws[q] * 2.0 * xs[q] * wall_density(p, g, u, v);
      }
      contrib[k] = acc;
    });
    double total = 0.0;
    for (double c : contrib) total += c;
    wall.above = total * (2.0 * kPi / grid.Nu);
  }
  return wall;
}

namespace {

// Hermite cell interpolation of the cumulative integral at height v, using
// C and its exact derivative -F at the bracketing rows.
double strip_eval(const WettedWall& wall, int k, double v, bool deriv) {
  require(v >= wall.v_minus - 1e-9 && v <= wall.v_plus + 1e-9, "StencilOutOfDomain",
          "contact height left the slicing window");
  int j = static_cast<int>(std::floor((v - wall.v_minus) / wall.dv));
  j = std::clamp(j, 0, wall.Nv - 2);
  const double v0 = wall.v_minus + j * wall.dv, v1 = v0 + wall.dv;
  if (deriv)
    return hermite_deriv(v, v0, v1, wall.C(j, k), wall.C(j + 1, k), -wall.F(j, k),
                         -wall.F(j + 1, k));
  return hermite(v, v0, v1, wall.C(j, k), wall.C(j + 1, k), -wall.F(j, k),
                 -wall.F(j + 1, k));
}

}  // namespace

double wetted_above(const WettedWall& wall, const VectorXd& wb) {
  require(static_cast<int>(wb.size()) == wall.Nu, "IoError",
          "contact heights do not match the wall grid");
  double acc = 0.0;
  for (int k = 0; k < wall.Nu; ++k) acc += strip_eval(wall, k, wb(k), false);
  return acc * (2.0 * kPi / wall.Nu) + wall.above;
}

VectorXd wetted_above_deriv(const WettedWall& wall, const VectorXd& wb) {
  require(static_cast<int>(wb.size()) == wall.Nu, "IoError",
          "contact heights do not match the wall grid");
  VectorXd d(wall.Nu);
  for (int k = 0; k < wall.Nu; ++k)
    d(k) = strip_eval(wall, k, wb(k), true) * (2.0 * kPi / wall.Nu);
  return d;
}

double capillary_energy(const Region& region, const WettedWall& wall,
                        const MetricField& g, DerivScheme scheme) {
  const Leaf& leaf = region.leaf;
  require(leaf.Nr > 0 && leaf.w.size() > 0, "EmptyLeaf", "region has no leaf");
  require(leaf.Nu == wall.Nu, "IoError", "leaf and wall grids disagree in Nu");
  const LeafGeometry geo = leaf_geometry(leaf, g, scheme);
  const VectorXd wb = leaf.w.row(leaf.Nr - 1).matrix().transpose();
  const double above = wetted_above(wall, wb);
  if (region.side == Region::Side::Above) return geo.area - above;
  // below: window-truncated wetted integral from v_minus up to the contact
  double c0 = 0.0;
  for (int k = 0; k < wall.Nu; ++k) c0 += wall.C(0, k);
  c0 *= 2.0 * kPi / wall.Nu;
  return geo.area - (c0 - (above - wall.above));
}

}  // namespace caprig

#pragma once
// Lateral boundary surfaces parametrized as psi(u, v) = (x(u,v), y(u,v), v)
// with u running once around each closed horizontal level curve (period 2pi)
// and v the height. Provides constant-speed reparametrization, Euclidean and
// metric frames, fundamental forms, level-curve curvature, and the cached
// grids used by the sweep audits and the leaf solvers.
#include "caprig/common.hpp"
#include "caprig/metric.hpp"
#include "caprig/numerics.hpp"

#include <functional>
#include <memory>
#include <string>

namespace caprig {

using ChartFn = std::function<double(double, double)>;  // (u, v)

struct BoundaryPatch {
  std::string name = "patch";
  ChartFn fx, fy;  // chart (x(u,v), y(u,v), v)

  // Slicing window used by leaves and sweeps; chart_vlo/chart_vhi is the
  // wider range where fx, fy may still be evaluated (stencil headroom and
  // the smooth closure of container walls).
  double v_minus = -1.0, v_plus = 1.0;
  double chart_vlo = -1.2, chart_vhi = 1.2;

  int Nu = 256, Nv = 128;     // default grid resolution
  bool resampled = false;     // chart wraps an arclength reparametrization
  bool constant_speed = false;

  // Closure of the container above v_plus, used by wetted-area terms:
  // Flat caps with a horizontal disk at v_plus; Smooth walls close by
  // themselves at v_top (level length -> 0), e.g. a spherical cap.
  enum class Cap { Flat, Smooth };
  Cap top_cap = Cap::Flat;
  double v_top = 1.0;

  Vec3 point(double u, double v) const { return Vec3(fx(u, v), fy(u, v), v); }
};

// Chart derivatives through second order at one point (one-sided stencils
// near the ends of the chart's v range).
struct ChartJet {
  double x = 0, y = 0;
  double xu = 0, yu = 0, xv = 0, yv = 0;
  double xuu = 0, yuu = 0, xuv = 0, yuv = 0, xvv = 0, yvv = 0;
};
ChartJet chart_jet(const BoundaryPatch& patch, double u, double v);

struct Frame {
  Vec3 p;                       // psi(u, v)
  Vec3 tau_bar, nu_bar;         // Euclidean-unit tangent frame on the wall
  Vec3 eta_bar;                 // horizontal outward unit vector
  Vec3 X_out;                   // Euclidean outward unit normal to the wall
  double cos_rho = 0, sin_rho = 1;  // X_out = cos_rho e_z + sin_rho eta_bar
  Vec3 tau_g, nu_g;             // g-unit frame, same span/orientation
  Vec3 X_g;                     // g-unit outward normal
};

// Euclidean frame, plus the g-unit companions when `metric` is non-null.
// tau_bar follows the level curve counterclockwise seen from +z; nu_bar
// points away from the top component (decreasing v side).
Frame frames_at(const BoundaryPatch& patch, const MetricField* metric,
                double u, double v);

// Second fundamental form of the wall in the g-unit (tau, nu) basis, with
// respect to the outward normal, and its trace H (unit sphere: H = +2).
struct WallShape {
  Mat2 II = Mat2::Zero();
  double H = 0;
};
WallShape second_fundamental_form(const BoundaryPatch& patch,
                                  const MetricField* metric, double u, double v);

// Planar curvature of the level curve through (u, v); +1 on a ccw unit circle.
double level_curve_curvature(const BoundaryPatch& patch, double u, double v);

// Reparametrizes each level curve by arclength scaled to [0, 2pi). Charts
// that are already constant-speed (relative variation < 1e-12) are returned
// unchanged. Throws DegenerateLevelCurve for levels shorter than 1e-10 or
// levels that self-intersect.
BoundaryPatch resample_constant_speed(const BoundaryPatch& patch);

// ---------------------------------------------------------------------------
// Cached node data over the slicing window. Arrays are Nv x Nu, row k at
// level v_k. u-derivatives are spectral per row; v-derivatives use 4th-order
// stencils on a grid extended by up to two ghost rows per side (chart
// headroom permitting), so reported rows are centered whenever possible.
struct PatchGrid {
  BoundaryPatch patch;  // copy: grids outlive the argument they were built from
  int Nu = 0, Nv = 0;
  double du = 0, dv = 0;
  std::vector<double> uvals, vvals;
  ArrayXXd X, Y, Xu, Yu, Xv, Yv, Xuu, Yuu, Xuv, Yuv, Xvv, Yvv;
  std::vector<double> level_len;  // Euclidean length per level
  CubicSpline centroid_x, centroid_y;  // level-curve centroid path over v
};

PatchGrid build_patch_grid(const BoundaryPatch& patch, int Nu, int Nv);

// Euclidean wall fields over the grid, including the residual of the slicing
// identity  H0 + (grad_nu cos rho)/sin rho - sin rho * kbar  (zero for walls
// sliced by horizontal planes) and of <grad_nu eta, nu> (also zero).
struct GridWallFields {
  ArrayXXd cos_rho, sin_rho;
  ArrayXXd H0;         // wall mean curvature, Euclidean, outward normal
  ArrayXXd kbar;       // level-curve planar curvature
  ArrayXXd det_shape;  // det of the shape operator (Gauss curvature of wall)
  ArrayXXd identity_residual;
  ArrayXXd eta_residual;
};
GridWallFields grid_wall_fields(const PatchGrid& grid);

}  // namespace caprig

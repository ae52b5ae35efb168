#pragma once
// Built-in container walls (cylinder, sphere, ellipsoid, prism profile,
// cone) and parametric walls from expression strings.
#include "caprig/expr.hpp"
#include "caprig/patch.hpp"

#include <string>

namespace caprig {

// name in {"cylinder", "sphere", "ellipsoid", "prism", "cone"}.
BoundaryPatch make_domain(const std::string& name);

// Wall from x(u,v), y(u,v) expressions; the slicing window is [vmin, vmax]
// and the chart is assumed evaluable slightly beyond it. Flat-capped.
BoundaryPatch make_parametric_domain(const Expr& ex, const Expr& ey,
                                     double vmin, double vmax,
                                     const std::string& name = "parametric");

}  // namespace caprig

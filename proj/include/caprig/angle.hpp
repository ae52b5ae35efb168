#pragma once
// The prescribed contact-angle field on a container wall: the angle rho(u, v)
// whose cosine is the vertical component of the outward wall normal, together
// with its first derivatives along the Euclidean level-curve frame. These are
// the "barred" quantities every boundary comparison is written in.
#include "caprig/common.hpp"
#include "caprig/patch.hpp"

namespace caprig {

// Pointwise sample, derivatives taken analytically from the chart jet.
// dtau / dnu differentiate along tau_bar (counterclockwise level direction)
// and nu_bar (down the wall, away from the top), both Euclidean-unit.
struct AngleSample {
  double rho = 0;
  double cos_rho = 0, sin_rho = 1;
  double dtau = 0, dnu = 0;          // derivatives of rho
  double dtau_cos = 0, dnu_cos = 0;  // derivatives of cos(rho)
};

// Throws DegenerateContactAngle when sin(rho) falls under 1e-8 (the wall is
// horizontal there and the angle frame degenerates).
AngleSample angle_at(const BoundaryPatch& patch, double u, double v);

// Field cached on a patch grid (arrays laid out Nv x Nu like PatchGrid).
struct AngleField {
  int Nu = 0, Nv = 0;
  ArrayXXd rho, cos_rho, sin_rho, dtau, dnu;
};

AngleField prescribed_angle(const PatchGrid& grid);

}  // namespace caprig

#pragma once

#include "texprint/mesh.hpp"

// Robust 2D predicates. A floating-point filter answers the common case; when
// the filter cannot certify the sign the determinant is re-evaluated exactly
// in rational arithmetic, so signs are always exact for double inputs.
namespace texprint::predicates {

// Twice the signed area of (a, b, c); positive when counter-clockwise.
double orient2d_fast(const Vec2& a, const Vec2& b, const Vec2& c);

// Exact sign of orient2d: +1 CCW, -1 CW, 0 collinear.
int orient2d(const Vec2& a, const Vec2& b, const Vec2& c);

// Exact sign of the incircle determinant: +1 when d lies strictly inside the
// circumcircle of the CCW triangle (a, b, c), 0 on it, -1 outside.
int incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

// Symbolic perturbation used by polygon clipping. The clip operand is
// displaced by s = (eps, eps^2) with eps -> 0+; this returns the sign of
// orient2d(a, b, p + k*s) for k in {-1, +1}, which is never zero unless a == b.
int orient2d_perturbed(const Vec2& a, const Vec2& b, const Vec2& p, int k);

// Number of exact fallbacks taken so far (diagnostics).
std::size_t exact_fallback_count();

}  // namespace texprint::predicates

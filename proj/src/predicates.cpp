#include "texprint/predicates.hpp"

#include <atomic>
#include <cmath>
#include <limits>

#include <boost/multiprecision/cpp_int.hpp>

namespace texprint::predicates {
namespace {

using Rational = boost::multiprecision::cpp_rational;

constexpr double kEps = std::numeric_limits<double>::epsilon() * 0.5;  // 2^-53
// Shewchuk's stage-A bounds.
constexpr double kCcwBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kIccBound = (10.0 + 96.0 * kEps) * kEps;

std::atomic<std::size_t> g_fallbacks{0};

int sign(const Rational& r) { return r > 0 ? 1 : (r < 0 ? -1 : 0); }

int orient_exact(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Rational ax(a.x()), ay(a.y()), bx(b.x()), by(b.y()), cx(c.x()), cy(c.y());
  return sign((ax - cx) * (by - cy) - (ay - cy) * (bx - cx));
}

int incircle_exact(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const Rational dx(d.x()), dy(d.y());
  const Rational adx = Rational(a.x()) - dx, ady = Rational(a.y()) - dy;
  const Rational bdx = Rational(b.x()) - dx, bdy = Rational(b.y()) - dy;
  const Rational cdx = Rational(c.x()) - dx, cdy = Rational(c.y()) - dy;
  const Rational alift = adx * adx + ady * ady;
  const Rational blift = bdx * bdx + bdy * bdy;
  const Rational clift = cdx * cdx + cdy * cdy;
  const Rational det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
                       clift * (adx * bdy - bdx * ady);
  return sign(det);
}

}  // namespace

double orient2d_fast(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (a.x() - c.x()) * (b.y() - c.y()) - (a.y() - c.y()) * (b.x() - c.x());
}

int orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double detleft = (a.x() - c.x()) * (b.y() - c.y());
  const double detright = (a.y() - c.y()) * (b.x() - c.x());
  const double det = detleft - detright;
  double detsum = 0.0;
  if (detleft > 0.0) {
    if (detright <= 0.0) return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
    detsum = detleft + detright;
  } else if (detleft < 0.0) {
    if (detright >= 0.0) return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
    detsum = -detleft - detright;
  } else {
    return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
  }
  const double bound = kCcwBound * detsum;
  if (det >= bound) return 1;
  if (-det >= bound) return -1;
  g_fallbacks.fetch_add(1, std::memory_order_relaxed);
  return orient_exact(a, b, c);
}

int incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double adx = a.x() - d.x(), ady = a.y() - d.y();
  const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double alift = adx * adx + ady * ady;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double blift = bdx * bdx + bdy * bdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double clift = cdx * cdx + cdy * cdy;
  const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
  const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                           (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                           (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  const double bound = kIccBound * permanent;
  if (det > bound) return 1;
  if (-det > bound) return -1;
  g_fallbacks.fetch_add(1, std::memory_order_relaxed);
  return incircle_exact(a, b, c, d);
}

int orient2d_perturbed(const Vec2& a, const Vec2& b, const Vec2& p, int k) {
  // orient(a, b, p + k s) = orient(a, b, p) + k (eps * cross(e, x^) + eps^2 * cross(e, y^))
  // with e = b - a, cross(e, x^) = -e.y, cross(e, y^) = e.x.
  const int o = orient2d(a, b, p);
  if (o != 0) return o;
  const double ey = b.y() - a.y();
  const double ex = b.x() - a.x();
  if (b.y() != a.y()) return (k * -(ey > 0.0 ? 1 : -1));
  if (b.x() != a.x()) return (k * (ex > 0.0 ? 1 : -1));
  return 0;
}

std::size_t exact_fallback_count() { return g_fallbacks.load(std::memory_order_relaxed); }

}  // namespace texprint::predicates

#pragma once

// Integer vectors in Z^2 and minimal resolutions of two-dimensional cones.

#include <array>
#include <cstdint>
#include <numeric>
#include <vector>

#include "stringy/error.hpp"
#include "stringy/exact/rational.hpp"

namespace stringy::lattice {

using Vec2 = std::array<std::int64_t, 2>;
using RVec2 = std::array<exact::Rational, 2>;

inline std::int64_t det(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }
inline Vec2 add(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 sub(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec2 mul(std::int64_t k, const Vec2& a) { return {k * a[0], k * a[1]}; }

inline std::int64_t content(const Vec2& v) { return std::gcd(v[0], v[1]); }
inline bool primitive(const Vec2& v) { return content(v) == 1; }

inline exact::Rational pair(const RVec2& m, const Vec2& v) {
    return m[0] * exact::Rational(static_cast<long>(v[0])) + m[1] * exact::Rational(static_cast<long>(v[1]));
}

/// c with det(a, c) = 1, for primitive a.
inline Vec2 complement(const Vec2& a) {
    // a0 c1 - a1 c0 = 1: extended Euclid on (a0, -a1).
    std::int64_t old_r = a[0], r = -a[1], old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        std::int64_t q = old_r / r;
        std::int64_t tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        tmp = old_s - q * s;
        old_s = s;
        s = tmp;
        tmp = old_t - q * t;
        old_t = t;
        t = tmp;
    }
    // old_s a0 + old_t (-a1) = old_r = +-1.
    if (old_r != 1 && old_r != -1) fail(ErrorKind::InvalidFan, "vector is not primitive");
    return {old_t * old_r, old_s * old_r};
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

/// Rays of the minimal resolution of cone(a, b), det(a, b) > 0, from a to b
/// inclusive (Hirzebruch-Jung).
inline std::vector<Vec2> resolve_cone(const Vec2& a, const Vec2& b) {
    if (!primitive(a) || !primitive(b)) fail(ErrorKind::InvalidFan, "cone rays must be primitive");
    std::int64_t n = det(a, b);
    if (n <= 0) fail(ErrorKind::InvalidFan, "cone rays must be in counterclockwise order");
    if (n == 1) return {a, b};
    Vec2 c = complement(a);
    std::int64_t t = det(b, c);
    std::int64_t s = -floor_div(-t, n); // ceil(t / n)
    std::int64_t q = n * s - t;
    c = add(c, mul(s, a));
    std::vector<Vec2> out{a, c};
    std::int64_t nn = n, qq = q;
    while (qq > 0) {
        std::int64_t bi = (nn + qq - 1) / qq;
        Vec2 next = sub(mul(bi, out.back()), out[out.size() - 2]);
        out.push_back(next);
        std::int64_t r = bi * qq - nn;
        nn = qq;
        qq = r;
    }
    if (out.back() != b) fail(ErrorKind::InvalidFan, "cone resolution did not terminate at the second ray");
    return out;
}

/// Self-intersection of the middle ray of three consecutive smooth rays:
/// prev + next = -self * mid.
inline std::int64_t self_intersection(const Vec2& prev, const Vec2& mid, const Vec2& next) {
    Vec2 s = add(prev, next);
    // s = c * mid with c = det(prev, next) when det(prev, mid) = 1.
    std::int64_t c = det(prev, next);
    if (s != mul(c, mid)) fail(ErrorKind::InvalidFan, "rays are not consecutive in a smooth fan");
    return -c;
}

} // namespace stringy::lattice

#pragma once

// Smooth complete toric surfaces: fans, toric divisors, Calabi-Yau pairs,
// blow-ups, the compactified local model of a -1 curve and fixed-point data.

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "stringy/dualgraph.hpp"
#include "stringy/lattice.hpp"
#include "stringy/models.hpp"
#include "stringy/orbifold.hpp"

namespace stringy::toric {

using exact::Rational;
using lattice::RVec2;
using lattice::Vec2;

namespace detail {

// Half-plane index for exact angular comparison: 0 for angles in [0, pi), 1 otherwise.
inline int half(const Vec2& v) { return (v[1] > 0 || (v[1] == 0 && v[0] > 0)) ? 0 : 1; }

inline bool angle_less(const Vec2& a, const Vec2& b) {
    int ha = half(a), hb = half(b);
    if (ha != hb) return ha < hb;
    return lattice::det(a, b) > 0;
}

} // namespace detail

/// Rays in counterclockwise cyclic order.
struct Fan2D {
    std::vector<Vec2> rays;

    std::size_t size() const { return rays.size(); }
    const Vec2& ray(std::size_t i) const { return rays[i % rays.size()]; }
    std::size_t next(std::size_t i) const { return (i + 1) % rays.size(); }
    std::size_t prev(std::size_t i) const { return (i + rays.size() - 1) % rays.size(); }

    void validate() const {
        if (rays.size() < 3) fail(ErrorKind::InvalidFan, "a complete fan needs at least three rays");
        for (const auto& v : rays)
            if (v == Vec2{0, 0} || !lattice::primitive(v)) fail(ErrorKind::InvalidFan, "ray is not primitive");
        int wraps = 0;
        for (std::size_t i = 0; i < rays.size(); ++i) {
            const Vec2 &a = rays[i], &b = ray(i + 1);
            if (lattice::det(a, b) != 1)
                fail(ErrorKind::InvalidFan, "cone " + std::to_string(i) + " is not smooth and counterclockwise");
            if (!detail::angle_less(a, b)) ++wraps;
        }
        if (wraps != 1) fail(ErrorKind::InvalidFan, "rays wind around the origin " + std::to_string(wraps) + " times");
    }
};

struct ToricPair {
    Fan2D fan;
    std::vector<Rational> coeffs;

    void validate() const {
        fan.validate();
        if (coeffs.size() != fan.size()) fail(ErrorKind::SchemaError, "one coefficient per ray is required");
    }
};

inline Fan2D p2() { return {{{1, 0}, {0, 1}, {-1, -1}}}; }
inline Fan2D p1xp1() { return {{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}}; }
/// Hirzebruch surface F_k; the ray (0, 1) is the section of self-intersection -k.
inline Fan2D hirzebruch(std::int64_t k) { return {{{1, 0}, {0, 1}, {-1, k}, {0, -1}}}; }

/// E_i^2 for each ray, from v_{i-1} + v_{i+1} = -(E_i^2) v_i.
inline std::vector<std::int64_t> self_intersections(const Fan2D& f) {
    f.validate();
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < f.size(); ++i) out.push_back(lattice::self_intersection(f.ray(f.prev(i)), f.rays[i], f.ray(i + 1)));
    return out;
}

/// The functional m with <m, v_i> = a_i + 1 on every ray, if it exists.
inline std::optional<RVec2> is_cy_pair(const ToricPair& p) {
    p.validate();
    const Vec2 &a = p.fan.rays[0], &b = p.fan.rays[1];
    Rational ca = p.coeffs[0] + Rational(1), cb = p.coeffs[1] + Rational(1);
    // [a; b] m = (ca, cb) with det(a, b) = 1.
    RVec2 m{ca * Rational(b[1]) - cb * Rational(a[1]), cb * Rational(a[0]) - ca * Rational(b[0])};
    for (std::size_t i = 0; i < p.fan.size(); ++i)
        if (lattice::pair(m, p.fan.rays[i]) != p.coeffs[i] + Rational(1)) return std::nullopt;
    return m;
}

/// Blow-up at the fixed point of cone (v_i, v_{i+1}); the new ray sits at index i + 1.
inline Fan2D blowup_fan(const Fan2D& f, std::size_t i) {
    f.validate();
    if (i >= f.size()) fail(ErrorKind::InvalidFan, "cone index " + std::to_string(i) + " out of range");
    Fan2D g = f;
    g.rays.insert(g.rays.begin() + static_cast<long>(i) + 1, lattice::add(f.rays[i], f.ray(i + 1)));
    return g;
}

/// Pair version: the new divisor gets 1 + a_E = (1 + a_i) + (1 + a_{i+1}).
inline ToricPair blowup_pair(const ToricPair& p, std::size_t i) {
    ToricPair q{blowup_fan(p.fan, i), p.coeffs};
    q.coeffs.insert(q.coeffs.begin() + static_cast<long>(i) + 1, p.coeffs[i] + p.coeffs[p.fan.next(i)] + Rational(1));
    return q;
}

struct LocalModel {
    ToricPair pair;
    std::size_t e_index = 0; // the -1 curve E
};

/// Compact model of a -1 curve with self-intersection -m_t whose neighbours
/// carry a1 and a2: P1 x P1 with coefficients (a1, a2, -a1-2, -a2-2), blown up
/// at D1 n D2 and then m_t - 1 more times at the point of E on its newest neighbour.
inline LocalModel local_model(std::int64_t m_t, const Rational& a1, const Rational& a2) {
    if (m_t < 1) fail(ErrorKind::SchemaError, "m_t must be positive");
    if (a1 == Rational(-1) || a2 == Rational(-1)) fail(ErrorKind::MinusOneCoefficient, "neighbour coefficient -1");
    if (a1 + a2 + Rational(2) != Rational(0)) fail(ErrorKind::AdjunctionViolated, "neighbour coefficients must sum to -2");
    ToricPair p{p1xp1(), {a1, a2, -a1 - Rational(2), -a2 - Rational(2)}};
    p = blowup_pair(p, 0); // E at index 1, between D1 (0) and D2 (2)
    LocalModel out{p, 1};
    for (std::int64_t k = 1; k < m_t; ++k) {
        out.pair = blowup_pair(out.pair, out.e_index); // new ray at e_index + 1, next to E
    }
    return out;
}

/// Tangent weights at the fixed point of cone (v_i, v_{i+1}): the dual basis
/// (u_i, u_{i+1}), where u_i is the weight normal to D_i.
struct FixedPointData {
    std::size_t cone = 0;
    std::array<Vec2, 2> weights;
    std::array<std::size_t, 2> rays; // (i, i + 1 mod n)
};

inline std::vector<FixedPointData> fixed_point_data(const Fan2D& f) {
    f.validate();
    std::vector<FixedPointData> out;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const Vec2 &a = f.rays[i], &b = f.ray(i + 1);
        out.push_back({i, {Vec2{b[1], -b[0]}, Vec2{-a[1], a[0]}}, {i, f.next(i)}});
    }
    return out;
}

inline std::string ray_name(std::size_t i) { return "D" + std::to_string(i); }

/// Resolution-graph view of a pair: curves with coefficient -1 become
/// exceptional genus-0 curves, the rest strict transforms.
inline dualgraph::ResolutionGraph to_graph(const ToricPair& p) {
    auto self = self_intersections(p.fan);
    dualgraph::ResolutionGraph g;
    for (std::size_t i = 0; i < p.fan.size(); ++i) {
        if (p.coeffs[i] == Rational(-1)) {
            auto c = models::exceptional(ray_name(i), 0, self[i]);
            c.coeff = p.coeffs[i];
            g.curves.push_back(c);
        } else {
            auto c = models::strict(ray_name(i), p.coeffs[i]);
            c.e_poly = exact::RatExpr(exact::QLaurent::w_pow(Rational(1)) + exact::QLaurent(1));
            g.curves.push_back(c);
        }
        g.nodes.emplace_back(ray_name(i), ray_name(p.fan.next(i)));
    }
    return g;
}

inline Rational frac(const Rational& x) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), x.num().get_mpz_t(), x.den().get_mpz_t());
    return x - Rational(f.get_si());
}

/// Finite subgroup of the torus N_R / N generated by rational vectors.
struct TorusGroup {
    std::vector<RVec2> generators;

    /// All elements reduced into [0, 1)^2, identity first, in generation order.
    std::vector<RVec2> elements() const {
        std::vector<RVec2> out{RVec2{Rational(0), Rational(0)}};
        for (std::size_t k = 0; k < out.size(); ++k) {
            for (const auto& g : generators) {
                RVec2 x{frac(out[k][0] + g[0]), frac(out[k][1] + g[1])};
                if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
                if (out.size() > 4096) fail(ErrorKind::SchemaError, "group has more than 4096 elements");
            }
        }
        return out;
    }
};

inline TorusGroup cyclic_group(const Vec2& v, std::int64_t n) {
    if (n < 1) fail(ErrorKind::SchemaError, "group order must be positive");
    return {{RVec2{Rational(v[0], n), Rational(v[1], n)}}};
}

/// Sectors of the global quotient of a pair by a torus subgroup, in the
/// form consumed by the orbifold E-function.
inline orbifold::OrbifoldDatum orbifold_datum(const ToricPair& p, const TorusGroup& group) {
    p.validate();
    orbifold::OrbifoldDatum d;
    d.graph = to_graph(p);
    const auto& rays = p.fan.rays;
    std::size_t n = rays.size();
    auto coords = [](const RVec2& x, const Vec2& b0, const Vec2& b1) {
        return std::make_pair(x[0] * Rational(b1[1]) - x[1] * Rational(b1[0]), Rational(b0[0]) * x[1] - Rational(b0[1]) * x[0]);
    };
    const exact::QLaurent cstar = exact::QLaurent::w_pow(Rational(1)) - exact::QLaurent(1);
    auto elems = group.elements();
    d.sectors.push_back({"0", orbifold::Identity{}});
    for (std::size_t k = 1; k < elems.size(); ++k) {
        const RVec2& x = elems[k];
        std::string cls = std::to_string(k);
        std::vector<bool> fixed(n);
        for (std::size_t i = 0; i < n; ++i) fixed[i] = (Rational(rays[i][0]) * x[1] - Rational(rays[i][1]) * x[0]).is_integer();
        for (std::size_t i = 0; i < n; ++i) {
            if (!fixed[i]) continue;
            orbifold::FixedCurve fc;
            fc.curve_id = ray_name(i);
            fc.divisor_weights[ray_name(i)] = frac(coords(x, rays[i], p.fan.ray(i + 1)).first);
            fc.quotient_open_e = cstar;
            fc.quotient_nodes = {ray_name(p.fan.prev(i)), ray_name(p.fan.next(i))};
            d.sectors.push_back({cls, fc});
        }
        std::vector<bool> done(n, false); // cone (i, i+1) covered by a rotation
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t a = p.fan.prev(i), b = p.fan.next(i);
            if (fixed[i] || fixed[a] || fixed[b] || p.coeffs[i] != Rational(-1)) continue;
            auto [c0, c1] = coords(x, rays[a], rays[i]);
            orbifold::RotationRecord rr;
            rr.class_id = cls;
            rr.curve_id = ray_name(i);
            rr.alpha = frac(c0);
            rr.gamma1 = frac(c1);
            rr.gamma2 = frac(coords(x, rays[i], rays[b]).first);
            rr.neighbours = std::make_pair(ray_name(a), ray_name(b));
            d.rotations.push_back(rr);
            done[a] = done[i] = true;
        }
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t j = p.fan.next(i);
            if (fixed[i] || fixed[j] || done[i]) continue;
            auto [c0, c1] = coords(x, rays[i], rays[j]);
            d.sectors.push_back({cls, orbifold::FixedPoint{{frac(c0), frac(c1)}, {ray_name(i), ray_name(j)}}});
        }
    }
    return d;
}

} // namespace stringy::toric

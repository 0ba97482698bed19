#pragma once

// Cyclic subgroups of the torus acting on toric surface germs. The cover is
// a smooth fan with strictly convex support; the quotient is the same fan in
// the finer lattice N + Z v, resolved. Both sides carry the pair given by a
// linear functional m (1 + a = <m, ray>). Produces matched pairs for the
// McKay comparison.

#include <string>
#include <utility>
#include <vector>

#include "stringy/lattice.hpp"
#include "stringy/orbifold.hpp"

namespace stringy::cover {

using exact::Rational;
using lattice::RVec2;
using lattice::Vec2;

/// Rays v_0, ..., v_{k+1} counterclockwise, consecutive determinants 1; the
/// first and last rays are non-compact (strict transforms).
struct ChainFan {
    std::vector<Vec2> rays;

    void validate() const {
        if (rays.size() < 2) fail(ErrorKind::InvalidFan, "a chain fan needs at least two rays");
        for (const auto& v : rays)
            if (!lattice::primitive(v)) fail(ErrorKind::InvalidFan, "ray is not primitive");
        for (std::size_t i = 0; i + 1 < rays.size(); ++i)
            if (lattice::det(rays[i], rays[i + 1]) != 1) fail(ErrorKind::InvalidFan, "adjacent rays do not span a smooth cone");
        if (lattice::det(rays.front(), rays.back()) <= 0 && rays.size() > 2)
            fail(ErrorKind::InvalidFan, "support is not strictly convex");
    }
};

/// Minimal resolution of the cyclic quotient singularity 1/n(1, q) as a chain fan.
inline ChainFan hj_chain(std::int64_t n, std::int64_t q) {
    if (n == 1) return {{{1, 0}, {0, 1}}};
    return {lattice::resolve_cone({1, 0}, {-q, n})};
}

inline std::string ray_id(std::size_t i) { return "R" + std::to_string(i); }

/// Resolution graph of the fan with the pair given by m.
inline dualgraph::ResolutionGraph chain_graph(const std::vector<Vec2>& rays, const RVec2& m,
                                              const std::vector<std::string>& ids) {
    dualgraph::ResolutionGraph g;
    for (std::size_t i = 0; i < rays.size(); ++i) {
        Rational a = lattice::pair(m, rays[i]) - Rational(1);
        if (i == 0 || i + 1 == rays.size()) {
            g.curves.push_back(models::strict(ids[i], a));
        } else {
            auto c = models::exceptional(ids[i], 0, lattice::self_intersection(rays[i - 1], rays[i], rays[i + 1]));
            c.coeff = a;
            g.curves.push_back(c);
        }
        if (i > 0) g.nodes.emplace_back(ids[i - 1], ids[i]);
    }
    return g;
}

struct CoverModel {
    orbifold::OrbifoldDatum cover;
    dualgraph::ResolutionGraph quotient;
    std::int64_t order = 1;
};

namespace detail {

inline Rational frac(const Rational& x) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), x.num().get_mpz_t(), x.den().get_mpz_t());
    return x - Rational(f.get_si());
}

/// Coordinates of x in the basis (b0, b1) of determinant 1.
inline std::pair<Rational, Rational> coords(const RVec2& x, const Vec2& b0, const Vec2& b1) {
    auto r = [](std::int64_t v) { return Rational(static_cast<long>(v)); };
    Rational c0 = x[0] * r(b1[1]) - x[1] * r(b1[0]);
    Rational c1 = r(b0[0]) * x[1] - r(b0[1]) * x[0];
    return {c0, c1};
}

/// Basis (columns) of the lattice Z^2 + Z (p, q)/r, scaled by r: integer
/// generators (r,0), (0,r), (p,q) reduced to a triangular basis.
inline std::array<Vec2, 2> fine_basis_scaled(std::int64_t p, std::int64_t q, std::int64_t r) {
    // Row-reduce [[r,0],[0,r],[p,q]] over Z to two rows.
    std::vector<Vec2> rows{{r, 0}, {0, r}, {p, q}};
    // Eliminate first column.
    for (;;) {
        std::size_t piv = rows.size();
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (rows[i][0] != 0 && (piv == rows.size() || std::llabs(rows[i][0]) < std::llabs(rows[piv][0]))) piv = i;
        bool done = true;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == piv || rows[i][0] == 0) continue;
            std::int64_t k = rows[i][0] / rows[piv][0];
            rows[i] = lattice::sub(rows[i], lattice::mul(k, rows[piv]));
            if (rows[i][0] != 0) done = false;
        }
        if (done) {
            Vec2 first = rows[piv];
            std::int64_t g = 0;
            for (std::size_t i = 0; i < rows.size(); ++i)
                if (i != piv) g = std::gcd(g, rows[i][1]);
            if (first[0] < 0) first = lattice::mul(-1, first);
            return {first, Vec2{0, g}};
        }
    }
}

} // namespace detail

/// Cover and quotient for the cyclic group generated by v = (p, q)/r acting
/// on the toric germ of `fan`, with the pair 1 + b = <m, ray>.
inline CoverModel cyclic_quotient_model(const ChainFan& fan, const RVec2& m, std::int64_t p, std::int64_t q,
                                        std::int64_t r) {
    using namespace lattice;
    fan.validate();
    if (r < 1) fail(ErrorKind::SchemaError, "group order must be positive");
    const auto& rays = fan.rays;
    std::size_t nr = rays.size();
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < nr; ++i) ids.push_back(ray_id(i));

    CoverModel out;
    auto& d = out.cover;
    d.graph = chain_graph(rays, m, ids);
    // Order of v modulo Z^2.
    std::int64_t order = r / std::gcd(r, std::gcd(p, q));
    out.order = order;
    d.sectors.push_back({"0", orbifold::Identity{}});
    auto rat = [](std::int64_t v) { return Rational(static_cast<long>(v)); };
    const exact::QLaurent cstar = exact::QLaurent::w_pow(Rational(1)) - exact::QLaurent(1);
    for (std::int64_t k = 1; k < order; ++k) {
        RVec2 x{rat(k * p) / rat(r), rat(k * q) / rat(r)};
        std::string cls = std::to_string(k);
        std::vector<bool> fixed(nr, false);
        for (std::size_t i = 0; i < nr; ++i) {
            // x in R v_i + Z^2 iff det(v_i, x) is an integer.
            Rational dv = rat(rays[i][0]) * x[1] - rat(rays[i][1]) * x[0];
            fixed[i] = dv.is_integer();
        }
        for (std::size_t i = 0; i < nr; ++i) {
            if (!fixed[i]) continue;
            orbifold::FixedCurve fc;
            fc.curve_id = ids[i];
            // Weight on O(D_i): coordinate of x along v_i in an adjacent cone.
            Rational wt = i + 1 < nr ? detail::coords(x, rays[i], rays[i + 1]).first
                                     : detail::coords(x, rays[i - 1], rays[i]).second;
            fc.divisor_weights[ids[i]] = detail::frac(wt);
            fc.quotient_open_e = cstar;
            if (i > 0) fc.quotient_nodes.push_back(ids[i - 1]);
            if (i + 1 < nr) fc.quotient_nodes.push_back(ids[i + 1]);
            d.sectors.push_back({cls, fc});
        }
        std::vector<bool> done(nr, false); // cone i = (v_i, v_{i+1}) handled by a rotation
        for (std::size_t i = 1; i + 1 < nr; ++i) {
            if (fixed[i] || fixed[i - 1] || fixed[i + 1] || d.graph.coeff(ids[i]) != Rational(-1)) continue;
            auto [c0, c1] = detail::coords(x, rays[i - 1], rays[i]);
            Rational e0 = detail::coords(x, rays[i], rays[i + 1]).first;
            orbifold::RotationRecord rr;
            rr.class_id = cls;
            rr.curve_id = ids[i];
            rr.alpha = detail::frac(c0);
            rr.gamma1 = detail::frac(c1);
            rr.gamma2 = detail::frac(e0);
            rr.neighbours = std::make_pair(ids[i - 1], ids[i + 1]);
            d.rotations.push_back(rr);
            done[i - 1] = done[i] = true;
        }
        for (std::size_t i = 0; i + 1 < nr; ++i) {
            if (fixed[i] || fixed[i + 1] || done[i]) continue;
            auto [c0, c1] = detail::coords(x, rays[i], rays[i + 1]);
            d.sectors.push_back({cls, orbifold::FixedPoint{{detail::frac(c0), detail::frac(c1)}, {ids[i], ids[i + 1]}}});
        }
    }

    // Quotient: coordinates in the fine lattice, basis columns B/r.
    auto basis = detail::fine_basis_scaled(p, q, r);
    const Vec2& b0 = basis[0];
    const Vec2& b1 = basis[1];
    std::int64_t db = det(b0, b1); // = r^2 / order
    auto to_fine = [&](const Vec2& v) {
        // Solve (b0 b1)/r * c = v: c = r * adj * v / db.
        std::int64_t c0 = r * (b1[1] * v[0] - b1[0] * v[1]);
        std::int64_t c1 = r * (-b0[1] * v[0] + b0[0] * v[1]);
        if (c0 % db != 0 || c1 % db != 0) fail(ErrorKind::InvalidFan, "ray not in the fine lattice");
        return Vec2{c0 / db, c1 / db};
    };
    // Functional on the fine lattice: <m, B c / r>.
    RVec2 mf{(m[0] * rat(b0[0]) + m[1] * rat(b0[1])) / rat(r), (m[0] * rat(b1[0]) + m[1] * rat(b1[1])) / rat(r)};
    std::vector<Vec2> qrays;
    std::vector<std::string> qids;
    orbifold::CoverDatum cd;
    std::size_t fresh = 0;
    for (std::size_t i = 0; i < nr; ++i) {
        Vec2 u = to_fine(rays[i]);
        std::int64_t ram = content(u);
        u = Vec2{u[0] / ram, u[1] / ram};
        cd.ramification[ids[i]] = ram;
        cd.image[ids[i]] = ids[i];
        if (i > 0) {
            auto seg = resolve_cone(qrays.back(), u);
            for (std::size_t j = 1; j + 1 < seg.size(); ++j) {
                qrays.push_back(seg[j]);
                qids.push_back("N" + std::to_string(++fresh));
            }
        }
        qrays.push_back(u);
        qids.push_back(ids[i]);
    }
    out.quotient = chain_graph(qrays, mf, qids);
    d.cover = cd;
    return out;
}

} // namespace stringy::cover

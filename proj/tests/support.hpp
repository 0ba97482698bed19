#pragma once

// Shared helpers for the test binaries: floating-point oracles and seeded
// random generators. Floating point lives only here, never in the library.

#include <cmath>
#include <numeric>
#include <random>

#include "stringy/cyclic_cover.hpp"
#include "stringy/exact/ratexpr.hpp"
#include "stringy/models.hpp"
#include "stringy/stringy.hpp"

namespace testsupport {

using namespace stringy::exact;

/// Point at which to evaluate: value per variable (positive reals).
using Point = std::array<long double, kVars>;

inline long double eval(const QLaurent& p, const Point& at) {
    long double s = 0;
    for (const auto& [e, c] : p.terms()) {
        RExps r = p.exponent_of(e);
        long double t = c.to_double();
        for (int i = 0; i < kVars; ++i)
            if (!r[i].is_zero()) t *= std::pow(at[i], static_cast<long double>(r[i].to_double()));
        s += t;
    }
    return s;
}

inline long double eval(const RatExpr& e, const Point& at) { return eval(e.num(), at) / eval(e.den(), at); }

inline Point point(long double u, long double v, long double s = 1, long double y = 1, long double t = 1) {
    return Point{u, v, s, y, t};
}

inline bool close(long double a, long double b, long double rel) {
    return std::fabs(a - b) <= rel * std::max<long double>(1, std::max(std::fabs(a), std::fabs(b)));
}

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }
    bool coin() { return integer(0, 1) == 1; }

    Rational rational(long max_num = 6, long max_den = 4) {
        return Rational(integer(-max_num, max_num), integer(1, max_den));
    }
    Rational rational_except(const Rational& bad, long max_num = 6, long max_den = 4) {
        for (;;) {
            Rational r = rational(max_num, max_den);
            if (r != bad) return r;
        }
    }

    /// Random polynomial in the given variables with small fractional exponents.
    QLaurent poly(std::initializer_list<Var> vars, int max_terms = 4, long max_den = 2) {
        QLaurent p;
        int n = static_cast<int>(integer(1, max_terms));
        for (int k = 0; k < n; ++k) {
            RExps e;
            for (Var v : vars) e[static_cast<int>(v)] = Rational(integer(-2, 3), integer(1, max_den));
            Rational c(integer(-5, 5), integer(1, 3));
            if (c.is_zero()) c = Rational(1);
            p += QLaurent::monomial(c, e);
        }
        return p;
    }
    QLaurent nonzero_poly(std::initializer_list<Var> vars, int max_terms = 4, long max_den = 2) {
        for (;;) {
            QLaurent p = poly(vars, max_terms, max_den);
            if (!p.is_zero()) return p;
        }
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

using stringy::dualgraph::ResolutionGraph;
using stringy::dualgraph::Site;

/// Random negative-definite tree of exceptional curves with optional strict
/// transforms, solved; some nodes are tuned so that blow-ups create -1 curves.
inline ResolutionGraph random_admissible_graph(Gen& g) {
    namespace m = stringy::models;
    for (;;) {
        ResolutionGraph r;
        long k = g.integer(1, 4);
        for (long i = 0; i < k; ++i) {
            std::string id = "E" + std::to_string(i);
            if (g.integer(0, 5) == 0) {
                long d = g.integer(4, 5); // cone-type curve with a = 2 - d
                r.curves.push_back(m::exceptional(id, (d - 1) * (d - 2) / 2, -d - g.integer(0, 1)));
            } else {
                r.curves.push_back(m::exceptional(id, 0, -g.integer(2, 5)));
            }
            if (i > 0) r.nodes.emplace_back("E" + std::to_string(g.integer(0, i - 1)), id);
        }
        long s = g.integer(0, 2);
        for (long i = 0; i < s; ++i) {
            std::string id = "S" + std::to_string(i);
            r.curves.push_back(m::strict(id, Rational(g.integer(-3, 2), g.integer(1, 3))));
            r.nodes.emplace_back("E" + std::to_string(g.integer(0, k - 1)), id);
        }
        // Tune the last strict transform so its node sums to -2.
        bool tuned = s > 0 && g.coin();
        std::string te = tuned ? r.nodes.back().first : "", ts = tuned ? r.nodes.back().second : "";
        if (tuned) {
            std::string e = r.nodes.back().first, sid = r.nodes.back().second;
            try {
                auto at = [&](const Rational& x) {
                    ResolutionGraph t = r;
                    t.curve(sid).coeff = x;
                    return stringy::dualgraph::solve_discrepancies(t).coeff(e);
                };
                Rational c0 = at(Rational(0)), c1 = at(Rational(1)) - c0;
                if (c1 + Rational(1) != Rational(0)) {
                    Rational as = (Rational(-2) - c0) / (c1 + Rational(1));
                    if (as != Rational(-1)) r.curve(sid).coeff = as;
                }
            } catch (const stringy::Error&) {
                continue;
            }
        }
        try {
            r = stringy::dualgraph::solve_discrepancies(r);
        } catch (const stringy::Error&) {
            continue;
        }
        if (!stringy::dualgraph::admissibility(r).divisor) continue;
        // Keep w exponents small so exact arithmetic stays cheap.
        bool small = true;
        for (const auto& c : r.curves) small &= c.coeff->den() <= 6;
        if (!small) continue;
        // Seed -1 curves: blow up a node whose coefficients sum to -2, or a
        // point on a coefficient -2 curve.
        if (tuned && r.coeff(te) + r.coeff(ts) == Rational(-2) && g.coin())
            r = stringy::dualgraph::blowup(r, Site::node(te, ts));
        for (const auto& c : std::vector<stringy::dualgraph::CurveRecord>(r.curves))
            if (*c.coeff == Rational(-2) && g.coin()) r = stringy::dualgraph::blowup(r, Site::point_on(c.id));
        return r;
    }
}

/// Random legal site: never a generic point of a -1 curve.
inline Site random_site(Gen& g, const ResolutionGraph& r) {
    for (;;) {
        long kind = g.integer(0, 5);
        if (kind == 0) return Site::free_point();
        if (kind <= 2) {
            const auto& c = r.curves[g.integer(0, static_cast<long>(r.curves.size()) - 1)];
            if (*c.coeff == Rational(-1)) continue;
            return Site::point_on(c.id);
        }
        if (r.nodes.empty()) continue;
        const auto& n = r.nodes[g.integer(0, static_cast<long>(r.nodes.size()) - 1)];
        return Site::node(n.first, n.second);
    }
}

/// Random chain fan: a cyclic quotient resolution followed by a few blow-ups.
inline stringy::cover::ChainFan random_chain_fan(Gen& g) {
    long n = g.integer(1, 4), q = 0;
    if (n > 1)
        do q = g.integer(1, n - 1);
        while (std::gcd(n, q) != 1);
    auto fan = stringy::cover::hj_chain(n, q);
    // At least one interior ray, so the cover germ has an exceptional curve.
    long blowups = g.integer(fan.rays.size() == 2 ? 1 : 0, 2);
    for (long k = 0; k < blowups; ++k) {
        auto i = static_cast<std::size_t>(g.integer(0, static_cast<long>(fan.rays.size()) - 2));
        fan.rays.insert(fan.rays.begin() + static_cast<long>(i) + 1, stringy::lattice::add(fan.rays[i], fan.rays[i + 1]));
    }
    return fan;
}

/// Random functional, nonzero on the end rays; half the time it vanishes on
/// an interior ray, producing a -1 curve.
inline stringy::lattice::RVec2 random_functional(Gen& g, const stringy::cover::ChainFan& fan) {
    using stringy::lattice::pair;
    for (;;) {
        stringy::lattice::RVec2 m;
        if (fan.rays.size() > 2 && g.coin()) {
            const auto& v = fan.rays[static_cast<std::size_t>(g.integer(1, static_cast<long>(fan.rays.size()) - 2))];
            Rational lam = g.rational_except(Rational(0), 3, 3);
            m = {lam * Rational(-v[1]), lam * Rational(v[0])};
        } else {
            m = {g.rational(4, 3), g.rational(4, 3)};
        }
        if (pair(m, fan.rays.front()).is_zero() || pair(m, fan.rays.back()).is_zero()) continue;
        return m;
    }
}

inline QLaurent w(const Rational& e) { return QLaurent::w_pow(e); }
inline QLaurent w(long e) { return QLaurent::w_pow(Rational(e)); }
inline QLaurent S(const Rational& e) { return QLaurent::var(Var::S, e); }
inline QLaurent one() { return QLaurent(1); }

} // namespace testsupport

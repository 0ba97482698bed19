#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stringy/dualgraph.hpp"

namespace stringy::efn {

using dualgraph::ResolutionGraph;
using exact::QLaurent;
using exact::Rational;
using exact::RatExpr;
using exact::Var;

/// Local: strata of the fibre over the singular point. Global: every stratum
/// plus the caller-supplied E-polynomial of the complement of the divisor.
struct Mode {
    enum class Kind { Local, Global } kind = Kind::Local;
    RatExpr ambient;

    static Mode local() { return {}; }
    static Mode global(RatExpr ambient) { return {Kind::Global, std::move(ambient)}; }
    bool is_global() const { return kind == Kind::Global; }
};

/// Perturbation coefficients b_i (absent means 0).
using Perturbation = std::map<std::string, Rational>;

inline QLaurent w_pow(const Rational& e) { return QLaurent::w_pow(e); }
inline QLaurent w_minus_one() { return w_pow(Rational(1)) - QLaurent(1); }

/// E-polynomial of a smooth projective curve of genus g.
inline QLaurent curve_e_poly(std::int64_t genus) {
    QLaurent g(Rational(static_cast<long>(genus)));
    return QLaurent(1) - QLaurent::var(Var::U) * g - QLaurent::var(Var::V) * g + w_pow(Rational(1));
}

/// E-polynomial of the open stratum of a curve.
inline QLaurent open_curve_e(const dualgraph::CurveRecord& c, std::int64_t removed) {
    QLaurent base;
    if (c.exceptional()) {
        base = curve_e_poly(c.genus);
    } else {
        if (!c.e_poly.is_polynomial())
            fail(ErrorKind::SchemaError, "E-polynomial of '" + c.id + "' must be a Laurent polynomial");
        base = c.e_poly.num() * QLaurent(Rational(1) / c.e_poly.den().constant_value());
    }
    return base - QLaurent(Rational(static_cast<long>(removed)));
}

inline bool is_minus_one(const ResolutionGraph& g, const std::string& id) { return g.coeff(id) == Rational(-1); }

/// Whether curve `id` contributes strata in the given mode.
inline bool included(const ResolutionGraph& g, const std::string& id, const Mode& mode) {
    if (mode.is_global()) return true;
    const auto& c = g.curve(id);
    return c.exceptional() && c.fiber;
}

/// (D_i . D_t) for curves i, t; self-intersection when equal.
inline Rational dot(const ResolutionGraph& g, const std::string& i, const std::string& t) {
    if (i == t) return Rational(static_cast<long>(g.curve(t).self_int));
    return Rational(static_cast<long>(g.multiplicity(i, t)));
}

/// Checks b_t != 0 and sum_i b_i (D_i . D_t) = 0 for every -1 curve D_t.
inline bool is_null_perturbation(const ResolutionGraph& g, const Perturbation& b) {
    auto get = [&b](const std::string& id) {
        auto it = b.find(id);
        return it == b.end() ? Rational(0) : it->second;
    };
    for (const auto& c : g.curves) {
        if (!is_minus_one(g, c.id)) continue;
        if (get(c.id).is_zero()) return false;
        Rational s = get(c.id) * dot(g, c.id, c.id);
        for (const auto& n : g.neighbours(c.id)) s += get(n) * dot(g, n, c.id);
        if (!s.is_zero()) return false;
    }
    return true;
}

/// Null-perturbation with b_t = scale on every -1 curve; neighbour
/// coefficients solve the restriction equations exactly, free choices 0.
inline Perturbation null_perturbation(const ResolutionGraph& g, const Rational& scale = Rational(1)) {
    std::vector<std::string> tees, unknowns;
    for (const auto& c : g.curves)
        if (is_minus_one(g, c.id)) tees.push_back(c.id);
    if (tees.empty()) return {};
    std::set<std::string> tset(tees.begin(), tees.end());
    for (const auto& t : tees)
        for (const auto& n : g.neighbours(t))
            if (!tset.count(n) && std::find(unknowns.begin(), unknowns.end(), n) == unknowns.end())
                unknowns.push_back(n);
    exact::Matrix a(tees.size(), exact::Vector(unknowns.size()));
    exact::Vector rhs(tees.size());
    for (std::size_t r = 0; r < tees.size(); ++r) {
        const auto& t = tees[r];
        for (std::size_t k = 0; k < unknowns.size(); ++k) a[r][k] = dot(g, unknowns[k], t);
        Rational fixed = scale * dot(g, t, t);
        for (const auto& n : g.neighbours(t))
            if (tset.count(n)) fixed += scale * dot(g, n, t);
        rhs[r] = -fixed;
    }
    Perturbation b;
    for (const auto& t : tees) b[t] = scale;
    if (auto x = exact::solve_linear(a, rhs, unknowns.size())) {
        for (std::size_t k = 0; k < unknowns.size(); ++k)
            if (!(*x)[k].is_zero()) b[unknowns[k]] = (*x)[k];
        return b;
    }
    // Chains of -1 curves may force unequal b_t: search the full null space.
    std::vector<std::string> all = tees;
    all.insert(all.end(), unknowns.begin(), unknowns.end());
    exact::Matrix full(tees.size(), exact::Vector(all.size()));
    for (std::size_t r = 0; r < tees.size(); ++r)
        for (std::size_t k = 0; k < all.size(); ++k) full[r][k] = dot(g, all[k], tees[r]);
    auto basis = exact::null_space(full, all.size());
    for (long trial = 0; trial < 64 && !basis.empty(); ++trial) {
        exact::Vector x(all.size(), Rational(0));
        long seed = trial + 1;
        for (const auto& v : basis) {
            seed = (seed * 7 + 3) % 11;
            for (std::size_t k = 0; k < all.size(); ++k) x[k] += Rational(seed + 1) * v[k];
        }
        bool ok = true;
        for (std::size_t k = 0; k < tees.size(); ++k) ok &= !x[k].is_zero();
        if (!ok) continue;
        Perturbation p;
        for (std::size_t k = 0; k < all.size(); ++k)
            if (!x[k].is_zero()) p[all[k]] = x[k] * scale;
        return p;
    }
    fail(ErrorKind::NotAdmissible, "no null-perturbation exists for this divisor");
}

namespace detail {

/// Connected clusters of -1 curves.
inline std::vector<std::vector<std::string>> minus_one_clusters(const ResolutionGraph& g) {
    std::vector<std::vector<std::string>> out;
    std::set<std::string> seen;
    for (const auto& c : g.curves) {
        if (!is_minus_one(g, c.id) || seen.count(c.id)) continue;
        std::vector<std::string> cluster, stack{c.id};
        seen.insert(c.id);
        while (!stack.empty()) {
            auto x = stack.back();
            stack.pop_back();
            cluster.push_back(x);
            for (const auto& n : g.neighbours(x))
                if (is_minus_one(g, n) && !seen.count(n)) {
                    seen.insert(n);
                    stack.push_back(n);
                }
        }
        out.push_back(std::move(cluster));
    }
    return out;
}

/// Sum over the given strata with perturbed factors (w-1)/(w^(a+1) S^b - 1),
/// as one fraction, followed by S -> 1.
inline RatExpr perturbed_limit(const ResolutionGraph& g, const Perturbation& b,
                               const std::vector<std::string>& open_parts,
                               const std::vector<dualgraph::Node>& nodes) {
    auto get = [&b](const std::string& id) {
        auto it = b.find(id);
        return it == b.end() ? Rational(0) : it->second;
    };
    std::vector<std::string> involved;
    auto note = [&involved](const std::string& id) {
        if (std::find(involved.begin(), involved.end(), id) == involved.end()) involved.push_back(id);
    };
    for (const auto& id : open_parts) note(id);
    for (const auto& [x, y] : nodes) {
        note(x);
        note(y);
    }
    std::map<std::string, QLaurent> den;
    for (const auto& id : involved) {
        Rational a = g.coeff(id), bb = get(id);
        if (a == Rational(-1) && bb.is_zero())
            fail(ErrorKind::NotAdmissible, "perturbation vanishes on -1 curve '" + id + "'");
        den[id] = w_pow(a + Rational(1)) * QLaurent::var(Var::S, bb) - QLaurent(1);
    }
    auto others = [&](const std::vector<std::string>& in_term) {
        QLaurent p(1);
        for (const auto& id : involved)
            if (std::find(in_term.begin(), in_term.end(), id) == in_term.end()) p *= den[id];
        return p;
    };
    QLaurent num, total_den(1);
    for (const auto& id : involved) total_den *= den[id];
    QLaurent wm1 = w_minus_one();
    for (const auto& id : open_parts) {
        const auto& c = g.curve(id);
        num += open_curve_e(c, g.node_count(id)) * wm1 * others({id});
    }
    for (const auto& [x, y] : nodes) num += wm1 * wm1 * others({x, y});
    return exact::limit_at_one(num, total_den, Var::S);
}

} // namespace detail

/// Stringy E-function of a solved graph with admissible divisor. Strata
/// touching -1 curves are evaluated through the null-perturbation limit.
inline RatExpr e_stringy(const ResolutionGraph& g0, const Mode& mode, const std::optional<Perturbation>& pert = {}) {
    ResolutionGraph g = dualgraph::ensure_solved(g0);
    auto adm = dualgraph::admissibility(g);
    if (!adm.divisor) fail(ErrorKind::NotAdmissible, adm.diagnostic);
    Perturbation b = pert ? *pert : null_perturbation(g);
    if (pert && !is_null_perturbation(g, b)) fail(ErrorKind::NotAdmissible, "supplied perturbation is not a null-perturbation");

    std::set<std::string> in_cluster;
    RatExpr total = mode.is_global() ? mode.ambient : RatExpr();
    for (const auto& cluster : detail::minus_one_clusters(g)) {
        std::vector<std::string> opens;
        std::vector<dualgraph::Node> nodes;
        for (const auto& t : cluster) {
            in_cluster.insert(t);
            if (included(g, t, mode)) opens.push_back(t);
        }
        std::set<std::string> cset(cluster.begin(), cluster.end());
        for (const auto& n : g.nodes) {
            bool touches = cset.count(n.first) || cset.count(n.second);
            bool inc = included(g, n.first, mode) || included(g, n.second, mode);
            if (touches && inc) nodes.push_back(n);
        }
        if (!opens.empty() || !nodes.empty()) total += detail::perturbed_limit(g, b, opens, nodes);
    }
    std::map<std::string, RatExpr> factor;
    auto f = [&](const std::string& id) -> const RatExpr& {
        auto it = factor.find(id);
        if (it == factor.end()) it = factor.emplace(id, exact::geometric_factor(g.coeff(id))).first;
        return it->second;
    };
    for (const auto& c : g.curves) {
        if (in_cluster.count(c.id) || !included(g, c.id, mode)) continue;
        total += RatExpr(open_curve_e(c, g.node_count(c.id))) * f(c.id);
    }
    for (const auto& [x, y] : g.nodes) {
        if (in_cluster.count(x) || in_cluster.count(y)) continue;
        if (!included(g, x, mode) && !included(g, y, mode)) continue;
        total += f(x) * f(y);
    }
    return total;
}

/// Contribution of a single -1 curve D_t (its open part and its nodes) by the limit engine.
inline RatExpr minus_one_contribution(const ResolutionGraph& g0, const std::string& t,
                                      const std::optional<Perturbation>& pert = {}) {
    ResolutionGraph g = dualgraph::ensure_solved(g0);
    if (!is_minus_one(g, t)) fail(ErrorKind::NotAdmissible, "curve '" + t + "' does not have coefficient -1");
    Perturbation b = pert ? *pert : null_perturbation(g);
    std::vector<dualgraph::Node> nodes;
    for (const auto& n : g.nodes)
        if (n.first == t || n.second == t) nodes.push_back(n);
    return detail::perturbed_limit(g, b, {t}, nodes);
}

/// Closed form of a -1 curve contribution: m(w-1)^2/((w^(a1+1)-1)(w^(a2+1)-1))
/// with two neighbours, -m*w with one (whose coefficient is then -2).
inline RatExpr veys_contribution_closed(long m, const Rational& a1, const std::optional<Rational>& a2) {
    if (a1 == Rational(-1)) fail(ErrorKind::MinusOneCoefficient, "neighbour coefficient -1");
    if (!a2) {
        if (a1 != Rational(-2)) fail(ErrorKind::AdjunctionViolated, "a lone neighbour must have coefficient -2");
        return RatExpr(w_pow(Rational(1)) * QLaurent(-m));
    }
    if (a1 + *a2 + Rational(2) != Rational(0))
        fail(ErrorKind::AdjunctionViolated, "neighbour coefficients " + a1.str() + ", " + a2->str() + " do not sum to -2");
    QLaurent wm1 = w_minus_one();
    return RatExpr(wm1 * wm1 * QLaurent(m), (w_pow(a1 + Rational(1)) - QLaurent(1)) * (w_pow(*a2 + Rational(1)) - QLaurent(1)));
}

struct FunctorialityReport {
    bool local = false;
    bool global = false;
    RatExpr local_before, local_after, global_before, global_after;
    bool ok() const { return local && global; }
};

/// Compares E-functions before and after a sequence of blow-ups, in both
/// modes. In Global mode every free-point blow-up removes a point from the
/// complement of the divisor, so the ambient term drops by 1.
inline FunctorialityReport verify_functoriality(const ResolutionGraph& g0, const std::vector<dualgraph::Site>& sites,
                                                const RatExpr& ambient = RatExpr(w_pow(Rational(2)))) {
    ResolutionGraph g = dualgraph::ensure_solved(g0);
    ResolutionGraph h = g;
    RatExpr amb_after = ambient;
    for (const auto& s : sites) {
        h = dualgraph::blowup(h, s);
        if (s.kind == dualgraph::Site::Kind::FreePoint) amb_after -= RatExpr(1);
    }
    FunctorialityReport r;
    r.local_before = e_stringy(g, Mode::local());
    r.local_after = e_stringy(h, Mode::local());
    r.global_before = e_stringy(g, Mode::global(ambient));
    r.global_after = e_stringy(h, Mode::global(amb_after));
    r.local = r.local_before == r.local_after;
    r.global = r.global_before == r.global_after;
    return r;
}

/// Batyrev's stringy Euler number of a log-terminal graph, term by term:
/// sum over strata of e(stratum) / prod (a_i + 1).
inline Rational euler_batyrev(const ResolutionGraph& g0, const Mode& mode) {
    ResolutionGraph g = dualgraph::ensure_solved(g0);
    Rational total = mode.is_global() ? exact::euler_specialize(mode.ambient) : Rational(0);
    for (const auto& c : g.curves) {
        if (!included(g, c.id, mode)) continue;
        Rational a = g.coeff(c.id);
        if (a == Rational(-1)) fail(ErrorKind::MinusOneCoefficient, "curve '" + c.id + "' has coefficient -1");
        Rational e;
        if (c.exceptional()) e = Rational(static_cast<long>(2 - 2 * c.genus));
        else e = exact::euler_specialize(c.e_poly);
        e -= Rational(static_cast<long>(g.node_count(c.id)));
        total += e / (a + Rational(1));
    }
    for (const auto& [x, y] : g.nodes) {
        if (!included(g, x, mode) && !included(g, y, mode)) continue;
        total += Rational(1) / ((g.coeff(x) + Rational(1)) * (g.coeff(y) + Rational(1)));
    }
    return total;
}

} // namespace stringy::efn

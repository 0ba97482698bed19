#pragma once

// Orbifold E-function of a G-normal admissible pair, given as sector data:
// per conjugacy class the fixed loci, their normal weights and the
// E-polynomials of the quotient strata.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stringy/models.hpp"
#include "stringy/stringy.hpp"

namespace stringy::orbifold {

using dualgraph::ResolutionGraph;
using efn::Mode;
using efn::Perturbation;
using exact::QLaurent;
using exact::Rational;
using exact::RatExpr;
using exact::Var;

/// Identity class: the strata of the graph itself. Entries of `open_e`
/// replace the default E-polynomial of an open curve stratum.
struct Identity {
    std::map<std::string, QLaurent> open_e;
};

/// g fixes a curve pointwise.
struct FixedCurve {
    std::string curve_id;
    Rational normal_weight;                         // weight on a normal direction not in D
    std::map<std::string, Rational> divisor_weights; // weights on O(D_k) for D_k containing the curve
    QLaurent quotient_open_e;                        // E(C^o / centralizer)
    std::vector<std::string> quotient_nodes;         // one neighbour per node orbit
};

/// g has an isolated fixed point. Weight k pairs with the normal line of
/// incident[k]; remaining weights are plain.
struct FixedPoint {
    std::array<Rational, 2> tangent_weights;
    std::vector<std::string> incident;
};

struct SectorRecord {
    std::string class_id;
    std::variant<Identity, FixedCurve, FixedPoint> kind;
};

/// g preserves a -1 curve and rotates it about its two nodes.
struct RotationRecord {
    std::string class_id;
    std::string curve_id;
    Rational alpha, gamma1, gamma2;
    // (t1, t2): alpha is the tangent weight at the node with t1.
    std::optional<std::pair<std::string, std::string>> neighbours;
};

/// Ramification of the cover over each quotient curve, and the image of
/// each cover curve.
struct CoverDatum {
    std::map<std::string, std::int64_t> ramification;
    std::map<std::string, std::string> image;
};

struct OrbifoldDatum {
    ResolutionGraph graph;
    std::vector<SectorRecord> sectors;
    std::vector<RotationRecord> rotations;
    std::optional<CoverDatum> cover;
};

/// One stratum of one sector: E-polynomial, the divisors J containing it, and
/// the fermionic shift as (weight, curve) pairs (empty curve = plain weight).
struct Term {
    std::string class_id;
    QLaurent e;
    std::vector<std::string> curves;
    std::vector<std::pair<Rational, std::string>> shift;
};

namespace detail {

inline bool unit_interval(const Rational& x) { return x >= Rational(0) && x < Rational(1); }

inline std::pair<std::string, std::string> rotation_neighbours(const ResolutionGraph& g, const RotationRecord& r) {
    if (g.find(r.curve_id) < 0) fail(ErrorKind::NotRotationEligible, "unknown curve '" + r.curve_id + "'");
    if (g.coeff(r.curve_id) != Rational(-1))
        fail(ErrorKind::NotRotationEligible, "curve '" + r.curve_id + "' does not have coefficient -1");
    auto nb = g.neighbours(r.curve_id);
    if (nb.size() != 2 || g.node_count(r.curve_id) != 2)
        fail(ErrorKind::NotRotationEligible, "curve '" + r.curve_id + "' must meet exactly two curves once each");
    if (r.neighbours) {
        auto [t1, t2] = *r.neighbours;
        bool ok = (t1 == nb[0] && t2 == nb[1]) || (t1 == nb[1] && t2 == nb[0]);
        if (!ok) fail(ErrorKind::NotRotationEligible, "listed neighbours of '" + r.curve_id + "' do not match the graph");
        return {t1, t2};
    }
    return {nb[0], nb[1]};
}

inline void check_rotation(const ResolutionGraph& g, const RotationRecord& r) {
    rotation_neighbours(g, r);
    if (!(r.alpha > Rational(0) && r.alpha < Rational(1)))
        fail(ErrorKind::NotRotationEligible, "rotation weight must lie in (0,1)");
    if (!unit_interval(r.gamma1) || !unit_interval(r.gamma2))
        fail(ErrorKind::NotRotationEligible, "normal weights must lie in [0,1)");
}

} // namespace detail

inline void validate(const OrbifoldDatum& d) {
    const auto& g = d.graph;
    auto known = [&g](const std::string& id, const std::string& where) {
        if (g.find(id) < 0) fail(ErrorKind::InvalidSector, where + ": unknown curve '" + id + "'");
    };
    bool identity = false;
    std::map<std::string, std::vector<std::string>> fixed_curves;
    for (const auto& s : d.sectors) {
        std::string where = "sector '" + s.class_id + "'";
        if (std::holds_alternative<Identity>(s.kind)) {
            if (identity) fail(ErrorKind::InvalidSector, "identity sector listed twice");
            identity = true;
            for (const auto& [id, e] : std::get<Identity>(s.kind).open_e) known(id, where);
        } else if (const auto* c = std::get_if<FixedCurve>(&s.kind)) {
            known(c->curve_id, where);
            if (!detail::unit_interval(c->normal_weight))
                fail(ErrorKind::InvalidSector, where + ": normal weight outside [0,1)");
            for (const auto& [id, wt] : c->divisor_weights) {
                known(id, where);
                if (!detail::unit_interval(wt)) fail(ErrorKind::InvalidSector, where + ": divisor weight outside [0,1)");
            }
            for (const auto& n : c->quotient_nodes) {
                known(n, where);
                if (g.multiplicity(c->curve_id, n) == 0)
                    fail(ErrorKind::InvalidSector, where + ": '" + n + "' does not meet '" + c->curve_id + "'");
            }
            auto& fc = fixed_curves[s.class_id];
            if (std::find(fc.begin(), fc.end(), c->curve_id) != fc.end())
                fail(ErrorKind::InvalidSector, where + ": curve '" + c->curve_id + "' listed twice");
            fc.push_back(c->curve_id);
        } else {
            const auto& p = std::get<FixedPoint>(s.kind);
            for (const auto& wt : p.tangent_weights)
                if (!detail::unit_interval(wt)) fail(ErrorKind::InvalidSector, where + ": tangent weight outside [0,1)");
            if (p.incident.size() > 2) fail(ErrorKind::InvalidSector, where + ": a point lies on at most two curves");
            for (const auto& id : p.incident) known(id, where);
            if (p.incident.size() == 2 && g.multiplicity(p.incident[0], p.incident[1]) == 0)
                fail(ErrorKind::InvalidSector, where + ": incident curves do not meet");
        }
    }
    if (!identity) fail(ErrorKind::InvalidSector, "identity sector missing");
    // Fixed points may not sit on a curve fixed by the same class.
    for (const auto& s : d.sectors)
        if (const auto* p = std::get_if<FixedPoint>(&s.kind)) {
            const auto& fc = fixed_curves[s.class_id];
            for (const auto& id : p->incident)
                if (std::find(fc.begin(), fc.end(), id) != fc.end())
                    fail(ErrorKind::InvalidSector, "sector '" + s.class_id + "': fixed point on the fixed curve '" + id + "'");
        }
    for (const auto& r : d.rotations) {
        detail::check_rotation(g, r);
        auto [t1, t2] = detail::rotation_neighbours(g, r);
        const auto& fc = fixed_curves[r.class_id];
        for (const auto& id : {r.curve_id, t1, t2})
            if (std::find(fc.begin(), fc.end(), id) != fc.end())
                fail(ErrorKind::InvalidSector, "rotation '" + r.class_id + "': fixed point on the fixed curve '" + id + "'");
    }
}

/// F(g, D) = sum_alpha alpha rk N_alpha + sum_k (1 + a_k) alpha_k.
inline Rational fermionic_shift(const SectorRecord& s, const ResolutionGraph& g) {
    if (std::holds_alternative<Identity>(s.kind)) return Rational(0);
    if (const auto* c = std::get_if<FixedCurve>(&s.kind)) {
        Rational f = c->normal_weight;
        for (const auto& [id, wt] : c->divisor_weights) f += wt * (g.coeff(id) + Rational(1));
        return f;
    }
    const auto& p = std::get<FixedPoint>(s.kind);
    Rational f;
    for (std::size_t k = 0; k < 2; ++k) {
        const Rational& wt = p.tangent_weights[k];
        f += k < p.incident.size() ? wt * (g.coeff(p.incident[k]) + Rational(1)) : wt;
    }
    return f;
}

/// Strata of every sector and rotation.
inline std::vector<Term> terms(const OrbifoldDatum& d) {
    const auto& g = d.graph;
    std::vector<Term> out;
    for (const auto& s : d.sectors) {
        if (const auto* id = std::get_if<Identity>(&s.kind)) {
            for (const auto& c : g.curves) {
                auto it = id->open_e.find(c.id);
                QLaurent e = it != id->open_e.end() ? it->second : efn::open_curve_e(c, g.node_count(c.id));
                out.push_back({s.class_id, e, {c.id}, {}});
            }
            for (const auto& [x, y] : g.nodes) out.push_back({s.class_id, QLaurent(1), {x, y}, {}});
        } else if (const auto* c = std::get_if<FixedCurve>(&s.kind)) {
            std::vector<std::pair<Rational, std::string>> shift;
            if (!c->normal_weight.is_zero()) shift.emplace_back(c->normal_weight, "");
            for (const auto& [k, wt] : c->divisor_weights) shift.emplace_back(wt, k);
            out.push_back({s.class_id, c->quotient_open_e, {c->curve_id}, shift});
            for (const auto& n : c->quotient_nodes) out.push_back({s.class_id, QLaurent(1), {c->curve_id, n}, shift});
        } else {
            const auto& p = std::get<FixedPoint>(s.kind);
            Term t{s.class_id, QLaurent(1), p.incident, {}};
            for (std::size_t k = 0; k < 2; ++k)
                t.shift.emplace_back(p.tangent_weights[k], k < p.incident.size() ? p.incident[k] : "");
            out.push_back(std::move(t));
        }
    }
    for (const auto& r : d.rotations) {
        auto [t1, t2] = detail::rotation_neighbours(g, r);
        out.push_back({r.class_id, QLaurent(1), {r.curve_id, t1}, {{r.alpha, t1}, {r.gamma1, r.curve_id}}});
        out.push_back(
            {r.class_id, QLaurent(1), {r.curve_id, t2}, {{Rational(1) - r.alpha, t2}, {r.gamma2, r.curve_id}}});
    }
    return out;
}

inline bool included(const ResolutionGraph& g, const Term& t, const Mode& mode) {
    if (mode.is_global()) return true;
    for (const auto& id : t.curves)
        if (efn::included(g, id, mode)) return true;
    return false;
}

namespace detail {

inline Rational get(const Perturbation& b, const std::string& id) {
    auto it = b.find(id);
    return it == b.end() ? Rational(0) : it->second;
}

/// Groups terms by (class, cluster of -1 curves); terms away from -1 curves
/// get key "".
inline std::map<std::string, std::vector<const Term*>> group_terms(const ResolutionGraph& g,
                                                                    const std::vector<Term>& ts) {
    std::map<std::string, std::size_t> cluster_of;
    auto clusters = efn::detail::minus_one_clusters(g);
    for (std::size_t k = 0; k < clusters.size(); ++k)
        for (const auto& id : clusters[k]) cluster_of[id] = k;
    std::map<std::string, std::vector<const Term*>> out;
    for (const auto& t : ts) {
        std::string key;
        for (const auto& id : t.curves) {
            auto it = cluster_of.find(id);
            if (it == cluster_of.end()) continue;
            std::string k = t.class_id + "#" + std::to_string(it->second);
            if (!key.empty() && key != k) fail(ErrorKind::NotAdmissible, "stratum meets two clusters of -1 curves");
            key = k;
        }
        out[key].push_back(&t);
    }
    return out;
}

inline Rational unperturbed_shift(const ResolutionGraph& g, const Term& t) {
    Rational f;
    for (const auto& [wt, id] : t.shift) f += id.empty() ? wt : wt * (g.coeff(id) + Rational(1));
    return f;
}

/// Perturbed sum of a group as one fraction, then S -> 1.
inline RatExpr group_limit(const ResolutionGraph& g, const Perturbation& b, const std::vector<const Term*>& group) {
    std::vector<std::string> involved;
    for (const auto* t : group)
        for (const auto& id : t->curves)
            if (std::find(involved.begin(), involved.end(), id) == involved.end()) involved.push_back(id);
    std::map<std::string, QLaurent> den;
    QLaurent total_den(1);
    for (const auto& id : involved) {
        Rational a = g.coeff(id), bb = get(b, id);
        if (a == Rational(-1) && bb.is_zero())
            fail(ErrorKind::NotAdmissible, "perturbation vanishes on -1 curve '" + id + "'");
        den[id] = QLaurent::w_pow(a + Rational(1)) * QLaurent::var(Var::S, bb) - QLaurent(1);
        total_den *= den[id];
    }
    QLaurent wm1 = efn::w_minus_one(), num;
    for (const auto* t : group) {
        Rational eps;
        for (const auto& [wt, id] : t->shift)
            if (!id.empty()) eps += wt * get(b, id);
        QLaurent term = QLaurent::w_pow(unperturbed_shift(g, *t)) * QLaurent::var(Var::S, eps) * t->e;
        for (const auto& id : involved) {
            if (std::find(t->curves.begin(), t->curves.end(), id) != t->curves.end()) term *= wm1;
            else term *= den[id];
        }
        num += term;
    }
    return exact::limit_at_one(num, total_den, Var::S);
}

} // namespace detail

/// Orbifold E-function. Strata near -1 curves are summed per class with a
/// null-perturbation and sent to the limit.
inline RatExpr e_orb(const OrbifoldDatum& d0, const Mode& mode, const std::optional<Perturbation>& pert = {}) {
    OrbifoldDatum d = d0;
    d.graph = dualgraph::ensure_solved(d0.graph);
    validate(d);
    const auto& g = d.graph;
    auto adm = dualgraph::admissibility(g);
    if (!adm.divisor) fail(ErrorKind::NotAdmissible, adm.diagnostic);
    Perturbation b = pert ? *pert : efn::null_perturbation(g);
    if (pert && !efn::is_null_perturbation(g, b))
        fail(ErrorKind::NotAdmissible, "supplied perturbation is not a null-perturbation");

    auto all = terms(d);
    std::vector<Term> ts;
    for (auto& t : all)
        if (included(g, t, mode)) ts.push_back(std::move(t));
    RatExpr total = mode.is_global() ? mode.ambient : RatExpr();
    for (const auto& [key, group] : detail::group_terms(g, ts)) {
        if (!key.empty()) {
            total += detail::group_limit(g, b, group);
            continue;
        }
        for (const auto* t : group) {
            RatExpr v(QLaurent::w_pow(detail::unperturbed_shift(g, *t)) * t->e);
            for (const auto& id : t->curves) v *= exact::geometric_factor(g.coeff(id));
            total += v;
        }
    }
    return total;
}

/// Euler number of the orbifold datum, computed at w = 1 first and then
/// eps -> 0 on each -1 group (the opposite order of limits to e_orb).
inline Rational euler_orb_termwise(const OrbifoldDatum& d0, const Mode& mode, const std::optional<Perturbation>& pert = {}) {
    OrbifoldDatum d = d0;
    d.graph = dualgraph::ensure_solved(d0.graph);
    validate(d);
    const auto& g = d.graph;
    Perturbation b = pert ? *pert : efn::null_perturbation(g);
    auto all = terms(d);
    std::vector<Term> ts;
    for (auto& t : all)
        if (included(g, t, mode)) ts.push_back(std::move(t));
    Rational total = mode.is_global() ? exact::euler_specialize(mode.ambient) : Rational(0);
    auto euler = [](const QLaurent& e) { return exact::euler_specialize(RatExpr(e)); };
    for (const auto& [key, group] : detail::group_terms(g, ts)) {
        if (key.empty()) {
            for (const auto* t : group) {
                Rational v = euler(t->e);
                for (const auto& id : t->curves) {
                    Rational a1 = g.coeff(id) + Rational(1);
                    if (a1.is_zero()) fail(ErrorKind::MinusOneCoefficient, "curve '" + id + "' has coefficient -1");
                    v /= a1;
                }
                total += v;
            }
            continue;
        }
        // a + 1 + eps b with eps = S - 1.
        std::vector<std::string> involved;
        for (const auto* t : group)
            for (const auto& id : t->curves)
                if (std::find(involved.begin(), involved.end(), id) == involved.end()) involved.push_back(id);
        std::map<std::string, QLaurent> lin;
        QLaurent den(1), num;
        for (const auto& id : involved) {
            Rational a1 = g.coeff(id) + Rational(1), bb = detail::get(b, id);
            lin[id] = QLaurent(a1 - bb) + QLaurent::var(Var::S) * QLaurent(bb);
            den *= lin[id];
        }
        for (const auto* t : group) {
            QLaurent v(euler(t->e));
            for (const auto& id : involved)
                if (std::find(t->curves.begin(), t->curves.end(), id) == t->curves.end()) v *= lin[id];
            num += v;
        }
        RatExpr lim = exact::limit_at_one(num, den, Var::S);
        total += lim.num().constant_value() / lim.den().constant_value();
    }
    return total;
}

/// H(t, g) by the limit engine: the two fixed points of a rotation of a -1 curve.
inline RatExpr h_rotation(const RotationRecord& r, const ResolutionGraph& g0, const std::optional<Perturbation>& pert = {}) {
    ResolutionGraph g = dualgraph::ensure_solved(g0);
    detail::check_rotation(g, r);
    Perturbation b = pert ? *pert : efn::null_perturbation(g);
    OrbifoldDatum d;
    d.graph = g;
    d.rotations = {r};
    auto ts = terms(d);
    return detail::group_limit(g, b, {&ts[0], &ts[1]});
}

/// Closed form -w^(alpha a)[alpha m + g1 - g2 + w^a((1-alpha) m + g2 - g1)](w-1)^2/(w^a-1)^2.
inline RatExpr h_rotation_closed(const Rational& alpha, const Rational& gamma1, const Rational& gamma2, std::int64_t m,
                                 const Rational& a) {
    if (a.is_zero()) fail(ErrorKind::MinusOneCoefficient, "neighbour coefficient -1");
    Rational mt(static_cast<long>(m));
    QLaurent wa = QLaurent::w_pow(a);
    QLaurent bracket = QLaurent(alpha * mt + gamma1 - gamma2) + wa * QLaurent((Rational(1) - alpha) * mt + gamma2 - gamma1);
    QLaurent wm1 = efn::w_minus_one();
    return RatExpr(-(QLaurent::w_pow(alpha * a) * bracket * wm1 * wm1), (wa - QLaurent(1)) * (wa - QLaurent(1)));
}

/// b_i = -1 + r_i (a_i + 1) for every quotient curve (r defaults to 1).
inline std::map<std::string, Rational> cover_coefficients(const CoverDatum& c, const ResolutionGraph& quotient0) {
    ResolutionGraph q = dualgraph::ensure_solved(quotient0);
    std::map<std::string, Rational> out;
    for (const auto& [id, r] : c.ramification)
        if (r < 1) fail(ErrorKind::SchemaError, "ramification of '" + id + "' must be positive");
    for (const auto& curve : q.curves) {
        auto it = c.ramification.find(curve.id);
        Rational r(static_cast<long>(it == c.ramification.end() ? 1 : it->second));
        out[curve.id] = Rational(-1) + r * (q.coeff(curve.id) + Rational(1));
    }
    return out;
}

/// Exact comparison of e_orb(cover) with e_stringy(quotient). The modes must
/// be of the same kind; their ambient terms differ in general.
inline bool mckay_verify(const OrbifoldDatum& cover, const ResolutionGraph& quotient0, const Mode& cover_mode,
                         const Mode& quotient_mode) {
    if (cover_mode.is_global() != quotient_mode.is_global())
        fail(ErrorKind::SchemaError, "McKay comparison needs matching modes");
    ResolutionGraph quotient = dualgraph::ensure_solved(quotient0);
    if (cover.cover) {
        ResolutionGraph g = dualgraph::ensure_solved(cover.graph);
        auto expect = cover_coefficients(*cover.cover, quotient);
        for (const auto& [cid, qid] : cover.cover->image) {
            if (g.find(cid) < 0 || quotient.find(qid) < 0)
                fail(ErrorKind::InconsistentCover, "unknown curve in cover map: '" + cid + "' -> '" + qid + "'");
            if (g.coeff(cid) != expect.at(qid))
                fail(ErrorKind::InconsistentCover, "coefficient of '" + cid + "' is " + g.coeff(cid).str() +
                                                       ", the cover formula gives " + expect.at(qid).str());
        }
    }
    return e_orb(cover, cover_mode) == efn::e_stringy(quotient, quotient_mode);
}

/// e_str(V_f/G) = (|G|+1) e(C/G)/(3-d) - d, with the Riemann-Hurwitz route
/// e(C/G, Delta) = e(C/G) + B, B = |G| e(C/G) - e(C), as a cross-check.
inline Rational euler_cone_quotient(std::int64_t d, std::int64_t order, std::int64_t e_quotient) {
    if (d == 3) fail(ErrorKind::DegreeThree, "degree 3 gives a strictly log-canonical cone");
    if (d < 1 || order < 1) fail(ErrorKind::SchemaError, "degree and group order must be positive");
    Rational dd(static_cast<long>(d)), n(static_cast<long>(order)), e(static_cast<long>(e_quotient));
    Rational value = (n + Rational(1)) * e / (Rational(3) - dd) - dd;
    Rational e_curve = dd * (Rational(3) - dd);
    Rational branch = n * e - e_curve;
    if (branch < Rational(0)) fail(ErrorKind::SchemaError, "negative branch degree: e(C/G) is inconsistent with |G|");
    Rational via_branch = (e + branch) / (Rational(3) - dd);
    if (via_branch != value)
        fail(ErrorKind::SchemaError, "Riemann-Hurwitz cross-check failed");
    return value;
}

/// Z_n acting diagonally on the cone over a smooth plane curve of degree d:
/// every element fixes the exceptional curve, with normal weight k/n.
inline std::pair<OrbifoldDatum, ResolutionGraph> zn_cone(std::int64_t d, std::int64_t n) {
    OrbifoldDatum cover;
    cover.graph = dualgraph::solve_discrepancies(models::cone(d));
    cover.sectors.push_back({"0", Identity{}});
    QLaurent ec = efn::curve_e_poly((d - 1) * (d - 2) / 2);
    for (std::int64_t k = 1; k < n; ++k) {
        FixedCurve fc;
        fc.curve_id = "C";
        fc.divisor_weights["C"] = Rational(static_cast<long>(k), static_cast<long>(n));
        fc.quotient_open_e = ec;
        cover.sectors.push_back({std::to_string(k), fc});
    }
    cover.cover = CoverDatum{{{"C", n}}, {{"C", "C"}}};
    return {cover, dualgraph::solve_discrepancies(models::cone_quotient(d, n))};
}

/// C^2 with Z_2 acting by -1: the identity and the fixed origin.
inline OrbifoldDatum a1_cover() {
    OrbifoldDatum d;
    d.sectors.push_back({"e", Identity{}});
    d.sectors.push_back({"g", FixedPoint{{Rational(1, 2), Rational(1, 2)}, {}}});
    return d;
}

} // namespace stringy::orbifold

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "stringy/exact/linalg.hpp"
#include "stringy/exact/ratexpr.hpp"

namespace stringy::dualgraph {

using exact::Rational;
using exact::RatExpr;

enum class Role { Exceptional, StrictTransform };

struct CurveRecord {
    std::string id;
    Role role = Role::Exceptional;
    std::int64_t genus = 0;
    std::int64_t self_int = 0;         // exceptional curves only
    std::optional<Rational> coeff;     // always set for strict transforms
    bool fiber = true;                 // exceptional curve lying over the singular point
    RatExpr e_poly = RatExpr(exact::QLaurent::w_pow(Rational(1))); // strict transforms: E of the closed curve

    bool exceptional() const { return role == Role::Exceptional; }
};

using Node = std::pair<std::string, std::string>;

/// Weighted dual graph of a log resolution. Each entry of `nodes` is one
/// transversal intersection point; repeated pairs mean repeated points.
struct ResolutionGraph {
    std::vector<CurveRecord> curves;
    std::vector<Node> nodes;

    std::optional<std::size_t> find(const std::string& id) const {
        for (std::size_t i = 0; i < curves.size(); ++i)
            if (curves[i].id == id) return i;
        return std::nullopt;
    }
    const CurveRecord& curve(const std::string& id) const {
        auto i = find(id);
        if (!i) fail(ErrorKind::UnknownSite, "no curve named '" + id + "'");
        return curves[*i];
    }
    CurveRecord& curve(const std::string& id) {
        auto i = find(id);
        if (!i) fail(ErrorKind::UnknownSite, "no curve named '" + id + "'");
        return curves[*i];
    }

    std::vector<std::size_t> exceptional_indices() const {
        std::vector<std::size_t> r;
        for (std::size_t i = 0; i < curves.size(); ++i)
            if (curves[i].exceptional()) r.push_back(i);
        return r;
    }

    /// Number of nodes on curve `id`.
    std::int64_t node_count(const std::string& id) const {
        std::int64_t n = 0;
        for (const auto& [a, b] : nodes) n += (a == id) + (b == id);
        return n;
    }
    /// Number of nodes between two distinct curves.
    std::int64_t multiplicity(const std::string& x, const std::string& y) const {
        std::int64_t n = 0;
        for (const auto& [a, b] : nodes)
            if ((a == x && b == y) || (a == y && b == x)) ++n;
        return n;
    }
    /// Distinct neighbours of `id`, in order of first appearance.
    std::vector<std::string> neighbours(const std::string& id) const {
        std::vector<std::string> r;
        for (const auto& [a, b] : nodes) {
            const std::string* other = a == id ? &b : (b == id ? &a : nullptr);
            if (other && std::find(r.begin(), r.end(), *other) == r.end()) r.push_back(*other);
        }
        return r;
    }

    bool solved() const {
        for (const auto& c : curves)
            if (!c.coeff) return false;
        return true;
    }
    const Rational& coeff(const std::string& id) const {
        const auto& c = curve(id);
        if (!c.coeff) fail(ErrorKind::SchemaError, "coefficient of '" + id + "' is not solved");
        return *c.coeff;
    }

    /// Structural checks; throws SchemaError.
    void validate() const {
        std::set<std::string> ids;
        for (const auto& c : curves) {
            if (c.id.empty()) fail(ErrorKind::SchemaError, "curve with empty id");
            if (!ids.insert(c.id).second) fail(ErrorKind::SchemaError, "duplicate curve id '" + c.id + "'");
            if (c.genus < 0) fail(ErrorKind::SchemaError, "negative genus on '" + c.id + "'");
            if (!c.exceptional() && !c.coeff)
                fail(ErrorKind::SchemaError, "strict transform '" + c.id + "' needs a coefficient");
        }
        for (const auto& [a, b] : nodes) {
            if (a == b) fail(ErrorKind::SchemaError, "self-node on '" + a + "'");
            if (!ids.count(a) || !ids.count(b))
                fail(ErrorKind::SchemaError, "node references unknown curve '" + (ids.count(a) ? b : a) + "'");
        }
    }
};

using IntMatrix = std::vector<std::vector<std::int64_t>>;

/// Intersection matrix over the exceptional curves, in graph order.
inline IntMatrix intersection_matrix_unchecked(const ResolutionGraph& g) {
    auto ex = g.exceptional_indices();
    IntMatrix m(ex.size(), std::vector<std::int64_t>(ex.size(), 0));
    for (std::size_t i = 0; i < ex.size(); ++i)
        for (std::size_t j = 0; j < ex.size(); ++j)
            m[i][j] = i == j ? g.curves[ex[i]].self_int
                             : g.multiplicity(g.curves[ex[i]].id, g.curves[ex[j]].id);
    return m;
}

inline std::vector<Rational> intersection_minors(const IntMatrix& m) {
    exact::Matrix q(m.size(), exact::Vector(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) q[i][j] = Rational(static_cast<long>(m[i][j]));
    return exact::leading_minors(q);
}

/// Intersection matrix, verified negative definite via the signs of its
/// leading principal minors.
inline IntMatrix intersection_matrix(const ResolutionGraph& g) {
    g.validate();
    IntMatrix m = intersection_matrix_unchecked(g);
    auto minors = intersection_minors(m);
    for (std::size_t k = 0; k < minors.size(); ++k) {
        int want = (k % 2 == 0) ? -1 : 1;
        if (minors[k].sign() != want)
            fail(ErrorKind::NotNegativeDefinite,
                 "leading minor " + std::to_string(k + 1) + " is " + minors[k].str());
    }
    return m;
}

/// K_X . E by adjunction.
inline std::int64_t canonical_degree(const CurveRecord& c) { return 2 * c.genus - 2 - c.self_int; }

/// (K_X - D) . E_j for every exceptional curve; all zero for a solved graph.
inline std::vector<Rational> pullback_residuals(const ResolutionGraph& g) {
    std::vector<Rational> r;
    for (auto j : g.exceptional_indices()) {
        const auto& e = g.curves[j];
        Rational v(static_cast<long>(canonical_degree(e)));
        v -= g.coeff(e.id) * Rational(static_cast<long>(e.self_int));
        for (const auto& [a, b] : g.nodes) {
            if (a == e.id) v -= g.coeff(b);
            if (b == e.id) v -= g.coeff(a);
        }
        r.push_back(v);
    }
    return r;
}

/// Solves K.E_j - D~.E_j = sum_i a_i E_i.E_j for the exceptional coefficients.
/// Coefficients already present on exceptional curves must agree with the solution.
inline ResolutionGraph solve_discrepancies(const ResolutionGraph& g) {
    IntMatrix m = intersection_matrix(g);
    auto ex = g.exceptional_indices();
    std::size_t n = ex.size();
    exact::Matrix a(n, exact::Vector(n));
    exact::Vector rhs(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& e = g.curves[ex[j]];
        for (std::size_t i = 0; i < n; ++i) a[j][i] = Rational(static_cast<long>(m[j][i]));
        Rational v(static_cast<long>(canonical_degree(e)));
        for (const auto& [p, q] : g.nodes) {
            const std::string* other = p == e.id ? &q : (q == e.id ? &p : nullptr);
            if (!other) continue;
            const auto& o = g.curve(*other);
            if (!o.exceptional()) v -= *o.coeff;
        }
        rhs[j] = v;
    }
    auto sol = exact::solve_linear(a, rhs, n);
    ResolutionGraph out = g;
    for (std::size_t j = 0; j < n; ++j) {
        auto& c = out.curves[ex[j]];
        if (c.coeff && *c.coeff != (*sol)[j])
            fail(ErrorKind::SchemaError, "coefficient of '" + c.id + "' is " + c.coeff->str() +
                                             " but the discrepancy equations give " + (*sol)[j].str());
        c.coeff = (*sol)[j];
    }
    return out;
}

inline ResolutionGraph ensure_solved(const ResolutionGraph& g) { return g.solved() ? g : solve_discrepancies(g); }

enum class Singularity { LogTerminal, StrictlyLogCanonical, NotLogCanonical };

inline const char* to_string(Singularity s) {
    switch (s) {
    case Singularity::LogTerminal: return "log-terminal";
    case Singularity::StrictlyLogCanonical: return "strictly log-canonical";
    case Singularity::NotLogCanonical: return "not log-canonical";
    }
    return "?";
}

inline Singularity classify(const ResolutionGraph& g) {
    bool minus_one = false;
    for (auto i : g.exceptional_indices()) {
        const Rational& a = g.coeff(g.curves[i].id);
        if (a < Rational(-1)) return Singularity::NotLogCanonical;
        if (a == Rational(-1)) minus_one = true;
    }
    return minus_one ? Singularity::StrictlyLogCanonical : Singularity::LogTerminal;
}

/// Divisor admissibility (every -1 component is a rational curve meeting at
/// most two others, once each) and the pair criterion (coefficient-0
/// exceptional curves have self-intersection <= -2), reported separately.
struct Admissibility {
    bool divisor = true;
    bool pair = true;
    std::string diagnostic;
    bool ok() const { return divisor && pair; }
};

inline Admissibility admissibility(const ResolutionGraph& g) {
    Admissibility r;
    for (const auto& c : g.curves) {
        const Rational& a = g.coeff(c.id);
        if (a == Rational(-1)) {
            if (!c.exceptional()) {
                r.divisor = false;
                r.diagnostic = "strict transform '" + c.id + "' has coefficient -1";
                return r;
            }
            if (c.genus != 0) {
                r.divisor = false;
                r.diagnostic = "curve '" + c.id + "' has coefficient -1 and genus " + std::to_string(c.genus);
                return r;
            }
            auto nb = g.neighbours(c.id);
            if (nb.size() > 2) {
                r.divisor = false;
                r.diagnostic = "curve '" + c.id + "' has coefficient -1 and meets " + std::to_string(nb.size()) +
                               " curves";
                return r;
            }
            for (const auto& o : nb)
                if (g.multiplicity(c.id, o) != 1) {
                    r.divisor = false;
                    r.diagnostic = "curve '" + c.id + "' has coefficient -1 and meets '" + o + "' in " +
                                   std::to_string(g.multiplicity(c.id, o)) + " points";
                    return r;
                }
        }
    }
    for (auto i : g.exceptional_indices()) {
        const auto& c = g.curves[i];
        if (g.coeff(c.id).is_zero() && c.self_int > -2) {
            r.pair = false;
            r.diagnostic = "curve '" + c.id + "' has coefficient 0 and self-intersection " + std::to_string(c.self_int);
            return r;
        }
    }
    return r;
}

inline bool is_admissible(const ResolutionGraph& g, std::string* diagnostic = nullptr) {
    auto r = admissibility(g);
    if (diagnostic) *diagnostic = r.diagnostic;
    return r.ok();
}

struct Site {
    enum class Kind { FreePoint, PointOn, Node } kind = Kind::FreePoint;
    std::string first, second;

    static Site free_point() { return {Kind::FreePoint, {}, {}}; }
    static Site point_on(std::string id) { return {Kind::PointOn, std::move(id), {}}; }
    static Site node(std::string a, std::string b) { return {Kind::Node, std::move(a), std::move(b)}; }

    std::string str() const {
        switch (kind) {
        case Kind::FreePoint: return "free-point";
        case Kind::PointOn: return "point-on:" + first;
        case Kind::Node: return "node:" + first + "," + second;
        }
        return "?";
    }
};

inline std::string fresh_id(const ResolutionGraph& g) {
    for (int k = 1;; ++k) {
        std::string id = "B" + std::to_string(k);
        if (!g.find(id)) return id;
    }
}

/// Blow-up at a point. The new curve is rational with self-intersection -1
/// and coefficient 1 + sum of the coefficients of the curves through the site.
inline ResolutionGraph blowup(const ResolutionGraph& g0, const Site& site) {
    ResolutionGraph g = ensure_solved(g0);
    CurveRecord e;
    e.id = fresh_id(g);
    e.genus = 0;
    e.self_int = -1;
    Rational a(1);
    auto touch = [&](const std::string& id) {
        auto& c = g.curve(id);
        a += *c.coeff;
        if (c.exceptional()) c.self_int -= 1;
        return c.exceptional() && c.fiber;
    };
    switch (site.kind) {
    case Site::Kind::FreePoint:
        e.fiber = false;
        break;
    case Site::Kind::PointOn: {
        if (!g.find(site.first)) fail(ErrorKind::UnknownSite, "no curve named '" + site.first + "'");
        if (g.coeff(site.first) == Rational(-1))
            fail(ErrorKind::BlowupAtMinusOneCurve, "blow-up at a generic point of '" + site.first + "'");
        e.fiber = touch(site.first);
        g.nodes.emplace_back(site.first, e.id);
        break;
    }
    case Site::Kind::Node: {
        auto it = std::find_if(g.nodes.begin(), g.nodes.end(), [&](const Node& n) {
            return (n.first == site.first && n.second == site.second) ||
                   (n.first == site.second && n.second == site.first);
        });
        if (it == g.nodes.end())
            fail(ErrorKind::UnknownSite, "no node between '" + site.first + "' and '" + site.second + "'");
        g.nodes.erase(it);
        bool f1 = touch(site.first), f2 = touch(site.second);
        e.fiber = f1 || f2;
        g.nodes.emplace_back(site.first, e.id);
        g.nodes.emplace_back(site.second, e.id);
        break;
    }
    }
    e.coeff = a;
    g.curves.push_back(std::move(e));
    return g;
}

/// Open strata of the divisor: each curve minus its nodes, and the nodes.
struct Strata {
    std::vector<std::pair<std::string, std::int64_t>> open_curves; // id, removed points
    std::vector<Node> nodes;
};

inline Strata strata(const ResolutionGraph& g) {
    Strata s;
    for (const auto& c : g.curves) s.open_curves.emplace_back(c.id, g.node_count(c.id));
    s.nodes = g.nodes;
    return s;
}

} // namespace stringy::dualgraph

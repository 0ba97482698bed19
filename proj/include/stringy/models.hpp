#pragma once

// Resolution graphs of standard singularity germs.

#include <string>

#include "stringy/dualgraph.hpp"

namespace stringy::models {

using dualgraph::CurveRecord;
using dualgraph::ResolutionGraph;
using exact::Rational;

inline CurveRecord exceptional(std::string id, std::int64_t genus, std::int64_t self_int) {
    CurveRecord c;
    c.id = std::move(id);
    c.genus = genus;
    c.self_int = self_int;
    return c;
}

inline CurveRecord strict(std::string id, Rational coeff) {
    CurveRecord c;
    c.id = std::move(id);
    c.role = dualgraph::Role::StrictTransform;
    c.coeff = coeff;
    return c;
}

/// Cone over a smooth plane curve of degree d: one curve of genus
/// (d-1)(d-2)/2 and self-intersection -d.
inline ResolutionGraph cone(std::int64_t d) {
    ResolutionGraph g;
    g.curves.push_back(exceptional("C", (d - 1) * (d - 2) / 2, -d));
    return g;
}

/// Quotient of the cone by Z_n acting diagonally: the curve is unchanged and
/// its self-intersection is multiplied by n.
inline ResolutionGraph cone_quotient(std::int64_t d, std::int64_t n) {
    ResolutionGraph g;
    g.curves.push_back(exceptional("C", (d - 1) * (d - 2) / 2, -d * n));
    return g;
}

/// A_n: chain of n rational (-2)-curves.
inline ResolutionGraph a_chain(std::int64_t n) {
    ResolutionGraph g;
    for (std::int64_t i = 1; i <= n; ++i) {
        g.curves.push_back(exceptional("E" + std::to_string(i), 0, -2));
        if (i > 1) g.nodes.emplace_back("E" + std::to_string(i - 1), "E" + std::to_string(i));
    }
    return g;
}

/// Hirzebruch-Jung continued fraction n/q = b1 - 1/(b2 - ...).
inline std::vector<std::int64_t> hirzebruch_jung(std::int64_t n, std::int64_t q) {
    std::vector<std::int64_t> b;
    while (q > 0) {
        std::int64_t bi = (n + q - 1) / q;
        b.push_back(bi);
        std::int64_t r = bi * q - n;
        n = q;
        q = r;
    }
    return b;
}

/// Minimal resolution of the cyclic quotient singularity 1/n(1, q).
inline ResolutionGraph cyclic_quotient(std::int64_t n, std::int64_t q) {
    ResolutionGraph g;
    auto b = hirzebruch_jung(n, q);
    for (std::size_t i = 0; i < b.size(); ++i) {
        g.curves.push_back(exceptional("E" + std::to_string(i + 1), 0, -b[i]));
        if (i > 0) g.nodes.emplace_back("E" + std::to_string(i), "E" + std::to_string(i + 1));
    }
    return g;
}

/// A rational curve T of self-intersection -m meeting two strict transforms
/// with coefficients a1 and a2 = -2 - a1; adjunction forces a_T = -1.
inline ResolutionGraph veys_two(std::int64_t m, const Rational& a1) {
    ResolutionGraph g;
    g.curves.push_back(exceptional("T", 0, -m));
    g.curves.push_back(strict("S1", a1));
    g.curves.push_back(strict("S2", Rational(-2) - a1));
    g.nodes.emplace_back("T", "S1");
    g.nodes.emplace_back("T", "S2");
    return g;
}

/// A rational curve T of self-intersection -m meeting one curve of coefficient -2.
inline ResolutionGraph veys_one(std::int64_t m) {
    ResolutionGraph g;
    g.curves.push_back(exceptional("T", 0, -m));
    g.curves.push_back(strict("S", Rational(-2)));
    g.nodes.emplace_back("T", "S");
    return g;
}

} // namespace stringy::models

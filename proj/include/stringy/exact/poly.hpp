#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stringy/exact/cyclotomic.hpp"
#include "stringy/exact/rational.hpp"

namespace stringy::exact {

/// Formal variables. U and V are the Hodge variables (w = uv), S the
/// null-perturbation variable, Y the elliptic variable (y = e^{2 pi i z}) and
/// Z the equivariant torus character.
enum class Var : int { U = 0, V = 1, S = 2, Y = 3, Z = 4 };
inline constexpr int kVars = 5;

inline const char* var_name(Var v) {
    switch (v) {
    case Var::U: return "u";
    case Var::V: return "v";
    case Var::S: return "s";
    case Var::Y: return "y";
    case Var::Z: return "t";
    }
    return "?";
}

using Exps = std::array<std::int64_t, kVars>;
using Scales = std::array<std::int64_t, kVars>;
using RExps = std::array<Rational, kVars>;

inline constexpr Scales kUnitScales{1, 1, 1, 1, 1};

namespace detail {

template <class K>
using Terms = std::map<Exps, K, std::greater<Exps>>;

inline int idx(Var v) { return static_cast<int>(v); }

template <class K>
void add_term(Terms<K>& t, const Exps& e, const K& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = t.try_emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) t.erase(it);
    }
}

template <class K>
Terms<K> mul_terms(const Terms<K>& a, const Terms<K>& b) {
    Terms<K> r;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) {
            Exps e;
            for (int i = 0; i < kVars; ++i) e[i] = checked_add(ea[i], eb[i]);
            add_term(r, e, ca * cb);
        }
    return r;
}

template <class K>
Terms<K> add_terms(Terms<K> a, const Terms<K>& b, bool subtract = false) {
    for (const auto& [e, c] : b) add_term(a, e, subtract ? K(-c) : c);
    return a;
}

template <class K>
Terms<K> scale_terms(const Terms<K>& a, const K& c) {
    Terms<K> r;
    if (c.is_zero()) return r;
    for (const auto& [e, x] : a) r.emplace(e, x * c);
    return r;
}

inline bool divides(const Exps& d, const Exps& e) {
    for (int i = 0; i < kVars; ++i)
        if (d[i] > e[i]) return false;
    return true;
}

/// Exact division in lex order; returns nullopt when b does not divide a.
/// Exponents are assumed nonnegative on both sides.
template <class K>
std::optional<Terms<K>> exact_div(Terms<K> a, const Terms<K>& b) {
    Terms<K> q;
    const auto& [lb, cb] = *b.begin();
    K inv = K(1) / cb;
    while (!a.empty()) {
        const auto [la, ca] = *a.begin();
        if (!divides(lb, la)) return std::nullopt;
        Exps m;
        for (int i = 0; i < kVars; ++i) m[i] = la[i] - lb[i];
        K c = ca * inv;
        add_term(q, m, c);
        for (const auto& [e, x] : b) {
            Exps s;
            for (int i = 0; i < kVars; ++i) s[i] = e[i] + m[i];
            add_term(a, s, K(-(c * x)));
        }
        if (!a.empty() && a.begin()->first == la) return std::nullopt;
    }
    return q;
}

template <class K>
std::uint32_t var_mask(const Terms<K>& t) {
    std::uint32_t m = 0;
    for (const auto& [e, c] : t)
        for (int i = 0; i < kVars; ++i)
            if (e[i] != 0) m |= 1u << i;
    return m;
}

template <class K>
std::int64_t degree_in(const Terms<K>& t, int v) {
    std::int64_t d = 0;
    for (const auto& [e, c] : t) d = std::max(d, e[v]);
    return d;
}

/// Coefficients of t regarded as a univariate polynomial in variable v.
template <class K>
std::map<std::int64_t, Terms<K>> coeffs_in(const Terms<K>& t, int v) {
    std::map<std::int64_t, Terms<K>> r;
    for (const auto& [e, c] : t) {
        Exps f = e;
        f[v] = 0;
        r[e[v]].emplace(f, c);
    }
    return r;
}

template <class K>
Terms<K> make_monic(const Terms<K>& t) {
    if (t.empty()) return t;
    return scale_terms(t, K(1) / t.begin()->second);
}

template <class K>
Terms<K> constant_terms(const K& c) {
    Terms<K> t;
    add_term(t, Exps{}, c);
    return t;
}

template <class K>
Terms<K> shift_terms(const Terms<K>& t, int v, std::int64_t by) {
    Terms<K> r;
    for (const auto& [e, c] : t) {
        Exps f = e;
        f[v] += by;
        r.emplace(f, c);
    }
    return r;
}

template <class K>
Terms<K> gcd_terms(const Terms<K>& a, const Terms<K>& b);

/// Univariate Euclid over the coefficient field.
template <class K>
Terms<K> gcd_univariate(Terms<K> a, Terms<K> b, int v) {
    auto deg = [v](const Terms<K>& t) { return t.begin()->first[v]; };
    if (deg(a) < deg(b)) std::swap(a, b);
    while (!b.empty()) {
        // a mod b
        K inv = K(1) / b.begin()->second;
        std::int64_t db = deg(b);
        while (!a.empty() && deg(a) >= db) {
            std::int64_t shift = deg(a) - db;
            K c = a.begin()->second * inv;
            for (const auto& [e, x] : b) {
                Exps f = e;
                f[v] += shift;
                add_term(a, f, K(-(c * x)));
            }
        }
        a = make_monic(a);
        std::swap(a, b);
    }
    return make_monic(a);
}

template <class K>
Terms<K> content_in(const Terms<K>& t, int v) {
    Terms<K> g;
    for (const auto& [d, c] : coeffs_in(t, v)) {
        g = g.empty() ? make_monic(c) : gcd_terms(g, c);
        if (g.size() == 1 && g.begin()->first == Exps{}) break;
    }
    return g;
}

/// Pseudo-remainder lc(b)^(deg a - deg b + 1) * a mod b with respect to v.
template <class K>
Terms<K> prem(Terms<K> a, const Terms<K>& b, int v) {
    std::int64_t db = degree_in(b, v);
    auto cb = coeffs_in(b, v);
    const Terms<K>& lcb = cb.rbegin()->second;
    std::int64_t e = degree_in(a, v) - db + 1;
    while (!a.empty()) {
        std::int64_t da = degree_in(a, v);
        if (da < db) break;
        auto ca = coeffs_in(a, v);
        const Terms<K>& lca = ca.rbegin()->second;
        a = add_terms(mul_terms(a, lcb), mul_terms(shift_terms(b, v, da - db), lca), true);
        --e;
    }
    for (; e > 0 && !a.empty(); --e) a = mul_terms(a, lcb);
    return a;
}

template <class K>
Terms<K> leading_coeff_in(const Terms<K>& t, int v) {
    return coeffs_in(t, v).rbegin()->second;
}

template <class K>
Terms<K> power_terms(const Terms<K>& t, std::int64_t n) {
    Terms<K> r = constant_terms(K(1));
    for (std::int64_t i = 0; i < n; ++i) r = mul_terms(r, t);
    return r;
}

/// Image of t in K[x] after substituting small integers for the other variables.
template <class K>
Terms<K> univariate_image(const Terms<K>& t, int x, std::uint64_t salt) {
    static constexpr long kPoints[] = {3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
    Terms<K> r;
    for (const auto& [e, c] : t) {
        mpz_class m = 1;
        for (int i = 0; i < kVars; ++i) {
            if (i == x || e[i] == 0) continue;
            mpz_class p;
            mpz_ui_pow_ui(p.get_mpz_t(), kPoints[(i + 5 * salt) % 12], static_cast<unsigned long>(e[i]));
            m *= p;
        }
        Exps f{};
        f[x] = e[x];
        add_term(r, f, K(c * K(Rational(m, mpz_class(1)))));
    }
    return r;
}

/// True when the gcd of a and b certainly has degree 0 in x.
template <class K>
bool coprime_in(const Terms<K>& a, const Terms<K>& b, int x) {
    std::int64_t da = degree_in(a, x), db = degree_in(b, x);
    for (std::uint64_t salt = 0; salt < 2; ++salt) {
        Terms<K> ia = univariate_image(a, x, salt), ib = univariate_image(b, x, salt);
        if (ia.empty() || ib.empty() || ia.begin()->first[x] != da || ib.begin()->first[x] != db) continue;
        Terms<K> g = gcd_univariate(ia, ib, x);
        if (g.begin()->first[x] == 0) return true;
    }
    return false;
}

template <class K>
bool is_diagonal_uv(const Terms<K>& t) {
    for (const auto& [e, c] : t)
        if (e[0] != e[1]) return false;
    return true;
}

template <class K>
Terms<K> diag_to_u(const Terms<K>& t) {
    Terms<K> r;
    for (const auto& [e, c] : t) {
        Exps f = e;
        f[1] = 0;
        r.emplace(f, c);
    }
    return r;
}

template <class K>
Terms<K> u_to_diag(const Terms<K>& t) {
    Terms<K> r;
    for (const auto& [e, c] : t) {
        Exps f = e;
        f[1] = f[0];
        r.emplace(f, c);
    }
    return r;
}

/// Splits t = sum_d m_d * P_d(uv) by the grading d = deg_u - deg_v.
template <class K>
std::vector<Terms<K>> uv_graded_parts(const Terms<K>& t) {
    std::map<std::int64_t, Terms<K>> parts;
    for (const auto& [e, c] : t) {
        std::int64_t d = e[0] - e[1];
        std::int64_t lo = std::min(e[0], e[1]);
        Exps f = e;
        f[0] = lo;
        f[1] = lo;
        parts[d].emplace(f, c);
    }
    std::vector<Terms<K>> r;
    for (auto& [d, p] : parts) r.push_back(std::move(p));
    return r;
}

/// gcd of polynomials with nonnegative exponents, normalised monic in lex order.
template <class K>
Terms<K> gcd_terms(const Terms<K>& a, const Terms<K>& b) {
    if (a.empty()) return make_monic(b);
    if (b.empty()) return make_monic(a);
    // Monomial part.
    Exps lo;
    lo.fill(INT64_MAX);
    for (const auto* t : {&a, &b})
        for (const auto& [e, c] : *t)
            for (int i = 0; i < kVars; ++i) lo[i] = std::min(lo[i], e[i]);
    bool has_mono = false;
    for (auto x : lo) has_mono |= x != 0;
    if (has_mono) {
        auto strip = [&lo](const Terms<K>& t) {
            Terms<K> r;
            for (const auto& [e, c] : t) {
                Exps f;
                for (int i = 0; i < kVars; ++i) f[i] = e[i] - lo[i];
                r.emplace(f, c);
            }
            return r;
        };
        Terms<K> g = gcd_terms(strip(a), strip(b));
        Terms<K> r;
        for (const auto& [e, c] : g) {
            Exps f;
            for (int i = 0; i < kVars; ++i) f[i] = e[i] + lo[i];
            r.emplace(f, c);
        }
        return r;
    }
    if (a.size() == 1 || b.size() == 1) {
        // a monomial-free polynomial and a monomial share only constants
        return constant_terms(K(1));
    }
    std::uint32_t ma = var_mask(a), mb = var_mask(b);
    std::uint32_t mask = ma | mb;
    if (ma == 0 || mb == 0) return constant_terms(K(1));
    if ((mask & (mask - 1)) == 0) {
        int v = __builtin_ctz(mask);
        return gcd_univariate(a, b, v);
    }
    constexpr std::uint32_t kUV = 0b11;
    if ((mask & ~kUV) == 0) {
        bool da = is_diagonal_uv(a), db = is_diagonal_uv(b);
        if (da && db) return u_to_diag(gcd_univariate(diag_to_u(a), diag_to_u(b), 0));
        if (da || db) {
            const Terms<K>& diag = da ? a : b;
            const Terms<K>& other = da ? b : a;
            Terms<K> g = diag_to_u(diag);
            for (const auto& part : uv_graded_parts(other)) {
                g = gcd_univariate(g, diag_to_u(part), 0);
                if (g.size() == 1 && g.begin()->first == Exps{}) break;
            }
            return u_to_diag(g);
        }
    }
    // A trivial univariate image in some variable x forces gcd(a, b) to be
    // free of x, hence equal to the gcd of the contents.
    for (int x = 0; x < kVars; ++x) {
        if (!(mask >> x & 1u)) continue;
        if (!(ma >> x & 1u)) return gcd_terms(a, content_in(b, x));
        if (!(mb >> x & 1u)) return gcd_terms(content_in(a, x), b);
        if (coprime_in(a, b, x)) return gcd_terms(content_in(a, x), content_in(b, x));
    }
    // Subresultant PRS in the highest-index variable.
    int v = 31 - __builtin_clz(mask);
    Terms<K> ca = content_in(a, v), cb = content_in(b, v);
    Terms<K> c = gcd_terms(ca, cb);
    Terms<K> pa = *exact_div(a, ca), pb = *exact_div(b, cb);
    if (degree_in(pa, v) < degree_in(pb, v)) std::swap(pa, pb);
    Terms<K> g = constant_terms(K(1)), h = constant_terms(K(1));
    for (;;) {
        std::int64_t delta = degree_in(pa, v) - degree_in(pb, v);
        Terms<K> r = prem(pa, pb, v);
        if (r.empty()) break;
        if (degree_in(r, v) == 0) return make_monic(c);
        pa = std::move(pb);
        pb = *exact_div(r, mul_terms(g, power_terms(h, delta)));
        g = leading_coeff_in(pa, v);
        if (delta > 0) h = *exact_div(power_terms(g, delta), power_terms(h, delta - 1));
    }
    pb = *exact_div(pb, content_in(pb, v));
    return make_monic(mul_terms(c, pb));
}

} // namespace detail

/// Multivariate Laurent polynomial with fractional exponents. Variable X is
/// stored through x^(1/N) with N = scale[X]; the representation is kept with
/// the smallest scale that makes every exponent integral, so structurally
/// equal polynomials compare equal.
template <class K>
class LaurentPoly {
public:
    using Coeff = K;
    using Terms = detail::Terms<K>;

    LaurentPoly() { scale_.fill(1); }
    LaurentPoly(const K& c) : LaurentPoly() { detail::add_term(terms_, Exps{}, c); }
    LaurentPoly(long c) : LaurentPoly(K(c)) {}

    static LaurentPoly monomial(const K& c, const RExps& e) {
        LaurentPoly p;
        if (c.is_zero()) return p;
        Exps ex;
        for (int i = 0; i < kVars; ++i) {
            p.scale_[i] = e[i].den().get_si();
            ex[i] = e[i].num().get_si();
            if (!e[i].num().fits_slong_p() || !e[i].den().fits_slong_p())
                fail(ErrorKind::ExponentOverflow, "exponent too large");
        }
        p.terms_.emplace(ex, c);
        return p;
    }
    static LaurentPoly var(Var v, const Rational& exponent = Rational(1)) {
        RExps e;
        e[detail::idx(v)] = exponent;
        return monomial(K(1), e);
    }
    /// uv raised to a rational power.
    static LaurentPoly w_pow(const Rational& exponent) {
        RExps e;
        e[0] = exponent;
        e[1] = exponent;
        return monomial(K(1), e);
    }
    static LaurentPoly from_terms(Terms t, const Scales& s) {
        LaurentPoly p;
        p.terms_ = std::move(t);
        p.scale_ = s;
        p.normalize_scale();
        return p;
    }

    const Terms& terms() const { return terms_; }
    const Scales& scales() const { return scale_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Exps{}); }
    K constant_value() const {
        auto it = terms_.find(Exps{});
        return it == terms_.end() ? K(0) : it->second;
    }
    std::size_t size() const { return terms_.size(); }
    bool uses(Var v) const {
        for (const auto& [e, c] : terms_)
            if (e[detail::idx(v)] != 0) return true;
        return false;
    }
    const K& leading_coeff() const { return terms_.begin()->second; }

    RExps exponent_of(const Exps& e) const {
        RExps r;
        for (int i = 0; i < kVars; ++i) r[i] = Rational(e[i], scale_[i]);
        return r;
    }

    /// Same polynomial expressed over finer scales (each target a multiple).
    Terms rescaled_terms(const Scales& target) const {
        Terms r;
        for (const auto& [e, c] : terms_) {
            Exps f;
            for (int i = 0; i < kVars; ++i) f[i] = checked_mul(e[i], target[i] / scale_[i]);
            r.emplace(f, c);
        }
        return r;
    }

    static Scales common_scales(const LaurentPoly& a, const LaurentPoly& b) {
        Scales s;
        for (int i = 0; i < kVars; ++i) s[i] = lcm64(a.scale_[i], b.scale_[i]);
        return s;
    }

    friend LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) {
        Scales s = common_scales(a, b);
        return from_terms(detail::add_terms(a.rescaled_terms(s), b.rescaled_terms(s)), s);
    }
    friend LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) {
        Scales s = common_scales(a, b);
        return from_terms(detail::add_terms(a.rescaled_terms(s), b.rescaled_terms(s), true), s);
    }
    LaurentPoly operator-() const {
        LaurentPoly r = *this;
        for (auto& [e, c] : r.terms_) c = -c;
        return r;
    }
    friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
        if (a.is_zero() || b.is_zero()) return LaurentPoly();
        Scales s = common_scales(a, b);
        return from_terms(detail::mul_terms(a.rescaled_terms(s), b.rescaled_terms(s)), s);
    }
    friend LaurentPoly operator*(const LaurentPoly& a, const K& c) {
        LaurentPoly r = a;
        r.terms_ = detail::scale_terms(a.terms_, c);
        return r;
    }
    LaurentPoly& operator+=(const LaurentPoly& o) { return *this = *this + o; }
    LaurentPoly& operator-=(const LaurentPoly& o) { return *this = *this - o; }
    LaurentPoly& operator*=(const LaurentPoly& o) { return *this = *this * o; }

    LaurentPoly pow(unsigned n) const {
        LaurentPoly r(K(1)), b = *this;
        while (n) {
            if (n & 1u) r *= b;
            n >>= 1u;
            if (n) b *= b;
        }
        return r;
    }

    friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) {
        return a.scale_ == b.scale_ && a.terms_.size() == b.terms_.size() &&
               std::equal(a.terms_.begin(), a.terms_.end(), b.terms_.begin(),
                          [](const auto& x, const auto& y) { return x.first == y.first && x.second == y.second; });
    }
    friend bool operator!=(const LaurentPoly& a, const LaurentPoly& b) { return !(a == b); }

    /// Substitutes v = 1.
    LaurentPoly at_one(Var v) const {
        Terms r;
        int i = detail::idx(v);
        for (const auto& [e, c] : terms_) {
            Exps f = e;
            f[i] = 0;
            detail::add_term(r, f, c);
        }
        return from_terms(std::move(r), scale_);
    }

    /// Substitutes `from` := `to` (exponents add), e.g. v -> u for u = v = T.
    LaurentPoly merge_var(Var from, Var to) const {
        int a = detail::idx(from), b = detail::idx(to);
        std::int64_t s = lcm64(scale_[a], scale_[b]);
        Terms r;
        for (const auto& [e, c] : terms_) {
            Exps f = e;
            f[b] = checked_add(checked_mul(e[b], s / scale_[b]), checked_mul(e[a], s / scale_[a]));
            f[a] = 0;
            detail::add_term(r, f, c);
        }
        Scales sc = scale_;
        sc[b] = s;
        sc[a] = 1;
        return from_terms(std::move(r), sc);
    }

    /// Renames variable `from` to `to` (target must be unused).
    LaurentPoly rename(Var from, Var to) const {
        int a = detail::idx(from), b = detail::idx(to);
        Terms r;
        for (const auto& [e, c] : terms_) {
            Exps f = e;
            f[b] = e[a];
            f[a] = 0;
            r.emplace(f, c);
        }
        Scales sc = scale_;
        sc[b] = scale_[a];
        sc[a] = 1;
        return from_terms(std::move(r), sc);
    }

    /// Applies v^(k/N) -> c^k * v^(k/N) for a per-unit-exponent factor, i.e.
    /// evaluates at v scaled by a root: `unit` is the factor for v^(1/N) at N = scale.
    template <class F>
    LaurentPoly map_coeffs(F f) const {
        Terms r;
        for (const auto& [e, c] : terms_) detail::add_term(r, e, f(e, c));
        return from_terms(std::move(r), scale_);
    }

    std::int64_t min_exp(Var v) const {
        std::int64_t m = INT64_MAX;
        for (const auto& [e, c] : terms_) m = std::min(m, e[detail::idx(v)]);
        return terms_.empty() ? 0 : m;
    }

    void normalize_scale() {
        for (int i = 0; i < kVars; ++i) {
            std::int64_t g = scale_[i];
            for (const auto& [e, c] : terms_) {
                if (g == 1) break;
                g = std::gcd(g, e[i]);
            }
            if (g <= 1) continue;
            Terms r;
            for (const auto& [e, c] : terms_) {
                Exps f = e;
                f[i] /= g;
                r.emplace(f, c);
            }
            terms_ = std::move(r);
            scale_[i] /= g;
        }
        for (int i = 0; i < kVars; ++i) {
            bool used = false;
            for (const auto& [e, c] : terms_) used |= e[i] != 0;
            if (!used) scale_[i] = 1;
        }
    }

private:
    Terms terms_;
    Scales scale_;
};

using QLaurent = LaurentPoly<Rational>;
using CycLaurent = LaurentPoly<Cyclotomic>;

/// Embeds a rational polynomial into the cyclotomic coefficient ring.
inline CycLaurent to_cyclotomic(const QLaurent& p) {
    detail::Terms<Cyclotomic> t;
    for (const auto& [e, c] : p.terms()) t.emplace(e, Cyclotomic(c));
    return CycLaurent::from_terms(std::move(t), p.scales());
}

/// Projects back to Q; nullopt when some coefficient is irrational.
inline std::optional<QLaurent> to_rational(const CycLaurent& p) {
    detail::Terms<Rational> t;
    for (const auto& [e, c] : p.terms()) {
        if (!c.is_rational()) return std::nullopt;
        t.emplace(e, c.rational_part());
    }
    return QLaurent::from_terms(std::move(t), p.scales());
}

} // namespace stringy::exact

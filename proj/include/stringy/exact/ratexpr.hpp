#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <utility>

#include "stringy/exact/poly.hpp"

namespace stringy::exact {

namespace detail {

inline std::string coeff_str(const Rational& c) { return c.str(); }
inline std::string coeff_str(const Cyclotomic& c) {
    return c.is_rational() ? c.rational_part().str() : "[" + c.str() + "]";
}
inline bool coeff_negative(const Rational& c) { return c.sign() < 0; }
inline bool coeff_negative(const Cyclotomic& c) { return c.is_rational() && c.rational_part().sign() < 0; }

inline std::string exponent_str(const Rational& e) {
    if (e.is_one()) return "";
    if (e.is_integer() && e.sign() > 0) return "^" + e.str();
    return "^(" + e.str() + ")";
}

template <class K>
Exps min_exps(const Terms<K>& t) {
    Exps lo;
    lo.fill(INT64_MAX);
    for (const auto& [e, c] : t)
        for (int i = 0; i < kVars; ++i) lo[i] = std::min(lo[i], e[i]);
    if (t.empty()) lo.fill(0);
    return lo;
}

template <class K>
Terms<K> shift_by(const Terms<K>& t, const Exps& by, int sign) {
    Terms<K> r;
    for (const auto& [e, c] : t) {
        Exps f;
        for (int i = 0; i < kVars; ++i) f[i] = checked_add(e[i], sign * by[i]);
        r.emplace(f, c);
    }
    return r;
}

} // namespace detail

/// Renders a polynomial with terms in descending exponent order. Equal u and
/// v exponents print as a power of w = uv.
template <class K>
std::string render(const LaurentPoly<K>& p) {
    if (p.is_zero()) return "0";
    std::string out;
    for (const auto& [e, c] : p.terms()) {
        RExps r = p.exponent_of(e);
        std::string factors;
        auto add = [&factors](const char* name, const Rational& x) {
            if (x.is_zero()) return;
            if (!factors.empty()) factors += "*";
            factors += name + detail::exponent_str(x);
        };
        if (r[0] == r[1]) {
            add("w", r[0]);
        } else {
            add("u", r[0]);
            add("v", r[1]);
        }
        add("s", r[2]);
        add("y", r[3]);
        add("t", r[4]);
        bool neg = detail::coeff_negative(c);
        K mag = neg ? K(-c) : c;
        std::string term;
        if (factors.empty()) term = detail::coeff_str(mag);
        else if (mag == K(1)) term = factors;
        else term = detail::coeff_str(mag) + "*" + factors;
        if (out.empty()) out = neg ? "-" + term : term;
        else out += (neg ? " - " : " + ") + term;
    }
    return out;
}

/// Rational function num/den in canonical form: the denominator is a genuine
/// polynomial with no monomial factor, coprime to the numerator, and its
/// lexicographically greatest term has coefficient 1. Canonical forms are
/// unique, so equality is structural.
template <class K>
class RatFunc {
public:
    using Poly = LaurentPoly<K>;

    RatFunc() : num_(), den_(K(1)) {}
    RatFunc(const K& c) : num_(c), den_(K(1)) {}
    RatFunc(long c) : RatFunc(K(c)) {}
    RatFunc(Poly num) : num_(std::move(num)), den_(K(1)) { canonicalize_in_place(); }
    RatFunc(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) { canonicalize_in_place(); }

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.is_constant(); }
    bool uses(Var v) const { return num_.uses(v) || den_.uses(v); }

    friend RatFunc operator+(const RatFunc& a, const RatFunc& b) { return combine(a, b, false); }
    friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return combine(a, b, true); }
    RatFunc operator-() const {
        RatFunc r = *this;
        r.num_ = -r.num_;
        return r;
    }
    friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
        if (a.is_zero() || b.is_zero()) return RatFunc();
        return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
        if (b.is_zero()) fail(ErrorKind::ZeroDenominator, "division by the zero rational function");
        return RatFunc(a.num_ * b.den_, a.den_ * b.num_);
    }
    RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
    RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
    RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }
    RatFunc& operator/=(const RatFunc& o) { return *this = *this / o; }

    RatFunc pow(long n) const {
        if (n < 0) return RatFunc(K(1)) / pow(-n);
        RatFunc r(K(1)), b = *this;
        while (n) {
            if (n & 1) r *= b;
            n >>= 1;
            if (n) b *= b;
        }
        return r;
    }

    friend bool operator==(const RatFunc& a, const RatFunc& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend bool operator!=(const RatFunc& a, const RatFunc& b) { return !(a == b); }

    std::string str() const {
        if (den_.is_constant()) return render(num_);
        std::string n = render(num_), d = render(den_);
        if (num_.size() > 1) n = "(" + n + ")";
        return n + "/(" + d + ")";
    }

    /// Builds without reduction; only for callers that canonicalize later.
    static RatFunc unreduced(Poly num, Poly den) {
        RatFunc r;
        r.num_ = std::move(num);
        r.den_ = std::move(den);
        return r;
    }

private:
    static RatFunc combine(const RatFunc& a, const RatFunc& b, bool subtract) {
        if (b.is_zero()) return a;
        if (a.is_zero()) return subtract ? -b : b;
        if (a.den_ == b.den_) return RatFunc(subtract ? a.num_ - b.num_ : a.num_ + b.num_, a.den_);
        // Dens are canonical polynomials, so their gcd gives the lcm cheaply.
        Scales s = Poly::common_scales(a.den_, b.den_);
        auto da = a.den_.rescaled_terms(s), db = b.den_.rescaled_terms(s);
        auto g = detail::gcd_terms(da, db);
        Poly fa = Poly::from_terms(*detail::exact_div(db, g), s); // b.den / g
        Poly fb = Poly::from_terms(*detail::exact_div(da, g), s); // a.den / g
        Poly n = subtract ? a.num_ * fa - b.num_ * fb : a.num_ * fa + b.num_ * fb;
        return RatFunc(n, a.den_ * fa);
    }

    void canonicalize_in_place() {
        if (den_.is_zero()) fail(ErrorKind::ZeroDenominator, "rational function with zero denominator");
        if (num_.is_zero()) {
            den_ = Poly(K(1));
            return;
        }
        Scales s = Poly::common_scales(num_, den_);
        auto n = num_.rescaled_terms(s), d = den_.rescaled_terms(s);
        Exps ln = detail::min_exps(n), ld = detail::min_exps(d);
        n = detail::shift_by(n, ln, -1);
        d = detail::shift_by(d, ld, -1);
        if (d.size() > 1) {
            auto g = detail::gcd_terms(n, d);
            if (!(g.size() == 1 && g.begin()->first == Exps{})) {
                n = *detail::exact_div(n, g);
                d = *detail::exact_div(d, g);
            }
        }
        K inv = K(1) / d.begin()->second;
        n = detail::scale_terms(n, inv);
        d = detail::scale_terms(d, inv);
        Exps shift;
        for (int i = 0; i < kVars; ++i) shift[i] = checked_add(ln[i], -ld[i]);
        num_ = Poly::from_terms(detail::shift_by(n, shift, 1), s);
        den_ = Poly::from_terms(std::move(d), s);
    }

    Poly num_;
    Poly den_;
};

using RatExpr = RatFunc<Rational>;
using CycRatExpr = RatFunc<Cyclotomic>;

/// (w - 1)/(w^(a+1) - 1).
inline RatExpr geometric_factor(const Rational& a) {
    if (a == Rational(-1)) fail(ErrorKind::MinusOneCoefficient, "geometric factor at coefficient -1");
    return RatExpr(QLaurent::w_pow(Rational(1)) - QLaurent(1), QLaurent::w_pow(a + Rational(1)) - QLaurent(1));
}

namespace detail {

/// Divides p by (x - 1), x = var^(1/N) at p's own scale; p must vanish at x = 1.
template <class K>
Terms<K> divide_by_root_minus_one(const Terms<K>& p, int v) {
    std::map<Exps, std::map<std::int64_t, K>> groups; // other exponents -> x-degree -> coeff
    for (const auto& [e, c] : p) {
        Exps f = e;
        f[v] = 0;
        groups[f][e[v]] = c;
    }
    Terms<K> q;
    for (auto& [f, uni] : groups) {
        // Synthetic division from the top degree down: q_{k-1} = sum_{j >= k} c_j.
        K acc(0);
        std::int64_t lo = uni.begin()->first;
        for (auto it = uni.rbegin(); it != uni.rend(); ++it) {
            auto next = std::next(it);
            acc += it->second;
            std::int64_t top = it->first;
            std::int64_t bottom = next == uni.rend() ? lo : next->first;
            if (acc.is_zero()) continue;
            for (std::int64_t k = top - 1; k >= bottom; --k) {
                Exps g = f;
                g[v] = k;
                add_term(q, g, acc);
            }
        }
        if (!acc.is_zero()) fail(ErrorKind::PoleAtOne, "internal: polynomial does not vanish at one");
    }
    return q;
}

} // namespace detail

/// lim_{var -> 1} num/den as an unreduced pair, computed by cancelling
/// (var^(1/N) - 1) factors. Neither input needs to be reduced.
template <class K>
std::pair<LaurentPoly<K>, LaurentPoly<K>> limit_at_one_raw(const LaurentPoly<K>& num, const LaurentPoly<K>& den,
                                                           Var var) {
    using Poly = LaurentPoly<K>;
    if (den.is_zero()) fail(ErrorKind::ZeroDenominator, "limit of a fraction with zero denominator");
    int v = detail::idx(var);
    Scales s = Poly::common_scales(num, den);
    auto n = num.rescaled_terms(s), d = den.rescaled_terms(s);
    auto span = [v](const detail::Terms<K>& t) {
        std::int64_t lo = INT64_MAX, hi = INT64_MIN;
        for (const auto& [e, c] : t) {
            lo = std::min(lo, e[v]);
            hi = std::max(hi, e[v]);
        }
        return t.empty() ? std::int64_t(0) : hi - lo;
    };
    std::int64_t bound = std::max(span(n), span(d)) + 1;
    for (std::int64_t depth = 0; depth <= bound; ++depth) {
        Poly n1 = Poly::from_terms(n, s).at_one(var);
        Poly d1 = Poly::from_terms(d, s).at_one(var);
        if (!d1.is_zero()) return {n1, d1};
        if (!n1.is_zero()) fail(ErrorKind::PoleAtOne, std::string("limit at ") + var_name(var) + " = 1 is infinite");
        n = detail::divide_by_root_minus_one(n, v);
        d = detail::divide_by_root_minus_one(d, v);
    }
    fail(ErrorKind::CancellationDepthExceeded, "cancellation did not terminate within the degree bound");
}

/// lim_{var -> 1} num/den in canonical form.
template <class K>
RatFunc<K> limit_at_one(const LaurentPoly<K>& num, const LaurentPoly<K>& den, Var var) {
    auto [n, d] = limit_at_one_raw(num, den, var);
    return RatFunc<K>(n, d);
}

template <class K>
RatFunc<K> limit_at_one(const RatFunc<K>& e, Var var) {
    if (!e.uses(var)) return e;
    return limit_at_one(e.num(), e.den(), var);
}

/// Stringy Euler number: u = v = T, T -> 1.
inline Rational euler_specialize(const RatExpr& e) {
    RatExpr r = limit_at_one(e.num().merge_var(Var::V, Var::U), e.den().merge_var(Var::V, Var::U), Var::U);
    if (!r.num().is_constant() || !r.den().is_constant())
        fail(ErrorKind::PoleAtOne, "euler specialization left free variables");
    return r.num().constant_value() / r.den().constant_value();
}

/// Hodge-style chi_y: v = 1, then u renamed to y.
inline RatExpr chi_y_specialize(const RatExpr& e) {
    RatExpr r = limit_at_one(e, Var::V);
    return RatExpr(r.num().rename(Var::U, Var::Y), r.den().rename(Var::U, Var::Y));
}

/// Parser for the text produced by RatFunc::str over rational coefficients.
class RatExprParser {
public:
    explicit RatExprParser(std::string_view text) : s_(text) {}

    static RatExpr parse(std::string_view text) {
        RatExprParser p(text);
        RatExpr r = p.expr();
        p.skip();
        if (p.i_ != p.s_.size()) p.error("trailing input");
        return r;
    }

private:
    [[noreturn]] void error(const std::string& what) const {
        fail(ErrorKind::ParseError, what + " at offset " + std::to_string(i_) + " in '" + std::string(s_) + "'");
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    mpz_class integer() {
        skip();
        std::size_t start = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (start == i_) error("expected integer");
        return mpz_class(std::string(s_.substr(start, i_ - start)));
    }
    RatExpr expr() {
        RatExpr r = term();
        for (;;) {
            if (eat('+')) r += term();
            else if (eat('-')) r -= term();
            else return r;
        }
    }
    RatExpr term() {
        RatExpr r = unary();
        for (;;) {
            if (eat('*')) r *= unary();
            else if (eat('/')) r /= unary();
            else return r;
        }
    }
    RatExpr unary() {
        if (eat('-')) return -unary();
        return power();
    }
    Rational exponent() {
        if (eat('(')) {
            bool neg = eat('-');
            mpz_class n = integer(), d = 1;
            if (eat('/')) d = integer();
            if (!eat(')')) error("expected ')' after exponent");
            Rational r(n, d);
            return neg ? -r : r;
        }
        bool neg = eat('-');
        Rational r(integer(), mpz_class(1));
        return neg ? -r : r;
    }
    RatExpr power() {
        skip();
        std::size_t start = i_;
        RatExpr base = primary();
        if (!eat('^')) return base;
        Rational e = exponent();
        if (e.is_integer()) {
            if (!e.num().fits_slong_p()) error("exponent too large");
            return base.pow(e.num().get_si());
        }
        // Fractional powers only of single monomials.
        if (base.num().size() != 1 || !base.den().is_constant()) {
            i_ = start;
            error("fractional power of a non-monomial");
        }
        const auto& [ex, c] = *base.num().terms().begin();
        if (!c.is_one()) error("fractional power of a non-monic monomial");
        RExps r = base.num().exponent_of(ex);
        for (auto& x : r) x *= e;
        return RatExpr(QLaurent::monomial(Rational(1), r));
    }
    RatExpr primary() {
        skip();
        if (i_ >= s_.size()) error("unexpected end of input");
        char c = s_[i_];
        if (c == '(') {
            ++i_;
            RatExpr r = expr();
            if (!eat(')')) error("expected ')'");
            return r;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return RatExpr(Rational(integer(), mpz_class(1)));
        ++i_;
        switch (c) {
        case 'u': return RatExpr(QLaurent::var(Var::U));
        case 'v': return RatExpr(QLaurent::var(Var::V));
        case 'w': return RatExpr(QLaurent::w_pow(Rational(1)));
        case 's': return RatExpr(QLaurent::var(Var::S));
        case 'y': return RatExpr(QLaurent::var(Var::Y));
        case 't': return RatExpr(QLaurent::var(Var::Z));
        default: --i_; error(std::string("unexpected character '") + c + "'");
        }
    }

    std::string_view s_;
    std::size_t i_ = 0;
};

inline RatExpr parse_ratexpr(std::string_view text) { return RatExprParser::parse(text); }

} // namespace stringy::exact

#pragma once

// Truncated Jacobi theta q-series, divisor factors, elliptic genera of
// smooth toric pairs and equivariant orbifold elliptic genera by fixed-point
// localization.
//
// theta(x) = (xi^(1/2) - xi^(-1/2)) prod_{n>=1} (1 - q^n xi)(1 - q^n / xi),
// xi = e^(2 pi i x). The prefactor q^(1/8) prod (1 - q^n) is dropped: every
// formula below is a balanced ratio.

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stringy/exact/ratexpr.hpp"
#include "stringy/orbifold.hpp"
#include "stringy/stringy.hpp"
#include "stringy/toric.hpp"

namespace stringy::elliptic {

using exact::Cyclotomic;
using exact::LaurentPoly;
using exact::QLaurent;
using exact::Rational;
using exact::RatExpr;
using exact::RatFunc;
using exact::RExps;
using exact::Var;

inline Rational rat(std::int64_t v) { return Rational(static_cast<long>(v)); }

/// exp(2 pi i r) in the coefficient field.
template <class K>
K unit_root(const Rational& r);

template <>
inline Rational unit_root<Rational>(const Rational& r) {
    if (r.is_integer()) return Rational(1);
    if ((r * Rational(2)).is_integer()) return Rational(-1);
    fail(ErrorKind::SchemaError, "internal: root of unity " + r.str() + " is not rational");
}

template <>
inline Cyclotomic unit_root<Cyclotomic>(const Rational& r) {
    Rational f = toric::frac(r);
    return Cyclotomic::root_of_unity(f.den().get_si(), f.num().get_si());
}

/// Theta argument x with e^(2 pi i x) = e^(2 pi i phase) y^y s^s t^z q^(-qshift).
/// The variable s stands for y^epsilon in perturbed coefficients.
struct Arg {
    Rational phase, y, s, z, qshift;
};

inline Arg operator+(const Arg& a, const Arg& b) {
    return {a.phase + b.phase, a.y + b.y, a.s + b.s, a.z + b.z, a.qshift + b.qshift};
}

/// c z + b epsilon z.
inline Arg zarg(const Rational& c, const Rational& b = Rational(0)) { return {Rational(0), c, b, Rational(0), Rational(0)}; }

/// The class or equivariant variable: x = m lambda.
inline Arg targ(const Rational& m) { return {Rational(0), Rational(0), Rational(0), m, Rational(0)}; }

template <class K>
LaurentPoly<K> character(const Arg& x, const Rational& power) {
    RExps e;
    e[exact::detail::idx(Var::S)] = x.s * power;
    e[exact::detail::idx(Var::Y)] = x.y * power;
    e[exact::detail::idx(Var::Z)] = x.z * power;
    return LaurentPoly<K>::monomial(unit_root<K>(x.phase * power), e);
}

template <class K>
LaurentPoly<K> monomial(const Rational& y, const Rational& s) {
    return character<K>({Rational(0), y, s, Rational(0), Rational(0)}, Rational(1));
}

/// Truncated power series in q^(1/den) with polynomial coefficients.
template <class K>
struct PolySeries {
    std::int64_t den = 1;
    std::vector<LaurentPoly<K>> c;

    PolySeries(std::int64_t order, std::int64_t den_) : den(den_), c(static_cast<std::size_t>(order * den_ + 1)) {
        c[0] = LaurentPoly<K>(K(1));
    }

    /// Multiplies by (1 - q^e m), or by its inverse as a geometric series.
    void mul_factor(const Rational& e, const LaurentPoly<K>& m, bool inverse) {
        Rational st = e * rat(den);
        if (!st.is_integer() || st.sign() <= 0) fail(ErrorKind::SchemaError, "internal: q-step off the grid");
        auto step = static_cast<std::size_t>(st.to_int64());
        if (step >= c.size()) return;
        if (!inverse) {
            for (std::size_t k = c.size() - 1; k >= step; --k) {
                if (!c[k - step].is_zero()) c[k] -= m * c[k - step];
                if (k == step) break;
            }
        } else {
            for (std::size_t k = step; k < c.size(); ++k)
                if (!c[k - step].is_zero()) c[k] += m * c[k - step];
        }
    }
};

/// Product of theta functions and their inverses. Leading binomials are kept
/// as separate factors so denominators stay products of binomials.
template <class K>
class ThetaProduct {
public:
    ThetaProduct(std::int64_t order, std::int64_t qden) : series_(order, qden), order_(order) {}

    /// Multiplies by theta(x)^sign. Without the binomial, theta(x) / (xi^(1/2) - xi^(-1/2))
    /// is used instead (unshifted arguments only).
    void mul(const Arg& x, int sign, bool with_binomial = true) {
        if (x.qshift.sign() < 0 || x.qshift >= Rational(1)) fail(ErrorKind::SchemaError, "internal: q-shift outside [0, 1)");
        bool inv = sign < 0;
        auto c = character<K>(x, Rational(1)), ci = character<K>(x, Rational(-1));
        const Rational& s = x.qshift;
        if (s.is_zero()) {
            if (with_binomial) {
                auto b = character<K>(x, Rational(1, 2)) - character<K>(x, Rational(-1, 2));
                if (inv) {
                    if (b.is_zero()) fail(ErrorKind::ZeroDenominator, "theta factor in a denominator vanishes identically");
                    den_b_.push_back(b);
                } else {
                    num_b_.push_back(b);
                }
            }
        } else {
            // theta(x) = c^(1/2) q^(-s/2) (1 - q^s / c) prod (1 - q^(n-s) c)(1 - q^(n+s) / c).
            mono_ *= character<K>(x, inv ? Rational(-1, 2) : Rational(1, 2));
            qpow_ -= rat(sign) * s / Rational(2);
            series_.mul_factor(s, ci, inv);
        }
        for (std::int64_t n = 1; n <= order_; ++n) {
            series_.mul_factor(rat(n) - s, c, inv);
            series_.mul_factor(rat(n) + s, ci, inv);
        }
    }

    void mul_monomial(const LaurentPoly<K>& m) { mono_ *= m; }

    std::size_t size() const { return series_.c.size(); }
    std::int64_t qden() const { return series_.den; }
    std::int64_t order() const { return order_; }

    /// Everything except the q-series part and the denominator binomials.
    LaurentPoly<K> prefix() const {
        if (!qpow_.is_zero()) fail(ErrorKind::SchemaError, "internal: unbalanced theta product");
        LaurentPoly<K> p = mono_;
        for (const auto& b : num_b_) p *= b;
        return p;
    }
    const LaurentPoly<K>& series(std::size_t k) const { return series_.c[k]; }
    const std::vector<LaurentPoly<K>>& denominator_factors() const { return den_b_; }
    LaurentPoly<K> denominator() const {
        LaurentPoly<K> d(K(1));
        for (const auto& b : den_b_) d *= b;
        return d;
    }

private:
    PolySeries<K> series_;
    std::int64_t order_;
    LaurentPoly<K> mono_{K(1)};
    std::vector<LaurentPoly<K>> num_b_, den_b_;
    Rational qpow_;
};

/// Truncated series sum_k c_k q^(k/qden), k/qden <= order.
class QSeries {
public:
    QSeries() : QSeries(0) {}
    explicit QSeries(std::int64_t order, std::int64_t qden = 1) : order_(order), den_(qden) {
        if (order < 0) fail(ErrorKind::SchemaError, "q-order must be nonnegative");
        c_.resize(static_cast<std::size_t>(order * qden + 1));
    }
    static QSeries constant(const RatExpr& v, std::int64_t order) {
        QSeries s(order);
        s.c_[0] = v;
        return s;
    }

    std::int64_t order() const { return order_; }
    std::int64_t qden() const { return den_; }
    std::size_t size() const { return c_.size(); }
    const RatExpr& operator[](std::size_t k) const { return c_[k]; }
    RatExpr& operator[](std::size_t k) { return c_[k]; }
    const RatExpr& q0() const { return c_[0]; }

    /// Coefficient of q^n (zero off the grid).
    RatExpr coefficient(const Rational& n) const {
        Rational k = n * rat(den_);
        if (!k.is_integer() || k.sign() < 0 || k.to_int64() >= static_cast<std::int64_t>(c_.size())) return RatExpr();
        return c_[static_cast<std::size_t>(k.to_int64())];
    }

    bool is_zero() const {
        return std::all_of(c_.begin(), c_.end(), [](const RatExpr& x) { return x.is_zero(); });
    }

    QSeries refined(std::int64_t qden) const {
        if (qden % den_ != 0) fail(ErrorKind::SchemaError, "internal: incompatible q-grids");
        QSeries r(order_, qden);
        std::int64_t f = qden / den_;
        for (std::size_t k = 0; k < c_.size(); ++k) r.c_[k * static_cast<std::size_t>(f)] = c_[k];
        return r;
    }

    /// Coarsest grid carrying every nonzero coefficient.
    void normalize() {
        std::int64_t g = den_;
        for (std::size_t k = 0; k < c_.size() && g > 1; ++k)
            if (!c_[k].is_zero()) g = std::gcd(g, static_cast<std::int64_t>(k));
        if (g <= 1) return;
        QSeries r(order_, den_ / g);
        for (std::size_t k = 0; k < r.c_.size(); ++k) r.c_[k] = c_[k * static_cast<std::size_t>(g)];
        *this = std::move(r);
    }

    template <class F>
    QSeries map(F f) const {
        QSeries r = *this;
        for (auto& x : r.c_) x = f(x);
        r.normalize();
        return r;
    }

    friend QSeries operator+(const QSeries& a, const QSeries& b) { return combine(a, b, false); }
    friend QSeries operator-(const QSeries& a, const QSeries& b) { return combine(a, b, true); }
    friend QSeries operator*(const QSeries& a, const QSeries& b) {
        auto [x, y] = common(a, b);
        QSeries r(x.order_, x.den_);
        for (std::size_t i = 0; i < x.c_.size(); ++i) {
            if (x.c_[i].is_zero()) continue;
            for (std::size_t j = 0; i + j < r.c_.size(); ++j)
                if (!y.c_[j].is_zero()) r.c_[i + j] += x.c_[i] * y.c_[j];
        }
        r.normalize();
        return r;
    }
    friend QSeries operator*(const QSeries& a, const RatExpr& v) {
        return a.map([&v](const RatExpr& x) { return x * v; });
    }
    QSeries& operator+=(const QSeries& o) { return *this = *this + o; }
    QSeries& operator*=(const QSeries& o) { return *this = *this * o; }

    friend bool operator==(const QSeries& a, const QSeries& b) {
        auto [x, y] = common(a, b);
        return x.c_ == y.c_;
    }
    friend bool operator!=(const QSeries& a, const QSeries& b) { return !(a == b); }

    /// (n, c_n) for every integral n and every nonzero fractional n.
    std::vector<std::pair<Rational, RatExpr>> entries() const {
        std::vector<std::pair<Rational, RatExpr>> out;
        for (std::size_t k = 0; k < c_.size(); ++k) {
            auto kk = static_cast<std::int64_t>(k);
            if (kk % den_ == 0 || !c_[k].is_zero()) out.emplace_back(Rational(kk, den_), c_[k]);
        }
        return out;
    }

    std::string str() const {
        std::string s = "[";
        bool first = true;
        for (const auto& [n, c] : entries()) {
            s += (first ? "[" : ", [") + n.str() + ", \"" + c.str() + "\"]";
            first = false;
        }
        return s + "]";
    }

private:
    static std::pair<QSeries, QSeries> common(const QSeries& a, const QSeries& b) {
        if (a.order_ != b.order_) fail(ErrorKind::SchemaError, "q-series of different orders");
        std::int64_t d = std::lcm(a.den_, b.den_);
        return {a.refined(d), b.refined(d)};
    }
    static QSeries combine(const QSeries& a, const QSeries& b, bool subtract) {
        auto [x, y] = common(a, b);
        for (std::size_t k = 0; k < x.c_.size(); ++k) x.c_[k] = subtract ? x.c_[k] - y.c_[k] : x.c_[k] + y.c_[k];
        x.normalize();
        return x;
    }

    std::int64_t order_;
    std::int64_t den_;
    std::vector<RatExpr> c_;
};

namespace detail {

template <class K>
LaurentPoly<K> euler_derivative(const LaurentPoly<K>& p, Var v) {
    int i = exact::detail::idx(v);
    std::int64_t scale = p.scales()[i];
    return p.map_coeffs([&](const exact::Exps& e, const K& c) { return c * K(Rational(e[i], scale)); });
}

inline RatExpr project(const RatExpr& r) { return r; }
inline RatExpr project(const exact::CycRatExpr& r) {
    auto n = exact::to_rational(r.num());
    auto d = exact::to_rational(r.den());
    if (!n || !d) fail(ErrorKind::SchemaError, "internal: orbifold genus coefficient is not rational");
    return RatExpr(*n, *d);
}

/// s -> 1, then t -> 1 when the fraction is constant in t, then canonical form.
template <class K>
RatExpr finish(LaurentPoly<K> n, LaurentPoly<K> d) {
    if (n.is_zero()) return RatExpr();
    if (n.uses(Var::S) || d.uses(Var::S)) std::tie(n, d) = exact::limit_at_one_raw(n, d, Var::S);
    if (n.is_zero()) return RatExpr();
    if ((n.uses(Var::Z) || d.uses(Var::Z)) && n * euler_derivative(d, Var::Z) == d * euler_derivative(n, Var::Z))
        std::tie(n, d) = exact::limit_at_one_raw(n, d, Var::Z);
    return project(RatFunc<K>(n, d));
}

/// Sum of theta products over a common denominator built from distinct
/// normalized binomials, so no gcd is taken while accumulating.
template <class K>
class LocalizationSum {
public:
    LocalizationSum(std::int64_t order, std::int64_t qden) : order_(order), qden_(qden) {}

    void add(const ThetaProduct<K>& t, const K& weight) {
        if (t.qden() != qden_ || t.order() != order_) fail(ErrorKind::SchemaError, "internal: mismatched q-grids");
        Term term;
        K scalar = weight;
        for (const auto& b : t.denominator_factors()) {
            K lc = b.leading_coeff();
            auto key = b * (K(1) / lc);
            scalar = scalar / lc;
            std::size_t i = 0;
            while (i < keys_.size() && keys_[i] != key) ++i;
            if (i == keys_.size()) keys_.push_back(key);
            if (term.mult.size() < keys_.size()) term.mult.resize(keys_.size(), 0);
            ++term.mult[i];
        }
        auto pre = t.prefix() * scalar;
        for (std::size_t k = 0; k < t.size(); ++k) term.num.push_back(t.series(k).is_zero() ? LaurentPoly<K>() : pre * t.series(k));
        terms_.push_back(std::move(term));
    }

    QSeries finish() const {
        std::vector<int> top(keys_.size(), 0);
        for (const auto& t : terms_)
            for (std::size_t i = 0; i < t.mult.size(); ++i) top[i] = std::max(top[i], t.mult[i]);
        LaurentPoly<K> den(K(1));
        for (std::size_t i = 0; i < keys_.size(); ++i) den *= keys_[i].pow(static_cast<unsigned>(top[i]));
        QSeries out(order_, qden_);
        std::vector<LaurentPoly<K>> num(out.size());
        for (const auto& t : terms_) {
            LaurentPoly<K> extra(K(1));
            for (std::size_t i = 0; i < keys_.size(); ++i) {
                int m = top[i] - (i < t.mult.size() ? t.mult[i] : 0);
                if (m > 0) extra *= keys_[i].pow(static_cast<unsigned>(m));
            }
            for (std::size_t k = 0; k < num.size(); ++k)
                if (!t.num[k].is_zero()) num[k] += t.num[k] * extra;
        }
        for (std::size_t k = 0; k < num.size(); ++k) out[k] = detail::finish(num[k], den);
        out.normalize();
        return out;
    }

private:
    struct Term {
        std::vector<LaurentPoly<K>> num;
        std::vector<int> mult;
    };
    std::int64_t order_, qden_;
    std::vector<LaurentPoly<K>> keys_;
    std::vector<Term> terms_;
};

} // namespace detail

/// theta(alpha z + m lambda) as a q-series in y and t.
inline QSeries theta_q(const Rational& alpha, const Rational& m, std::int64_t order) {
    if (order < 0) fail(ErrorKind::SchemaError, "q-order must be nonnegative");
    ThetaProduct<Rational> t(order, 1);
    t.mul(zarg(alpha) + targ(m), 1);
    QSeries s(order);
    for (std::size_t k = 0; k < s.size(); ++k) s[k] = RatExpr(t.prefix() * t.series(k));
    return s;
}

/// theta(x + (a+1) z) theta(z) / (theta(x + z) theta((a+1) z)); b perturbs a by b epsilon.
template <class K>
void mul_divisor_factor(ThetaProduct<K>& t, const Rational& a, const Rational& b, const Arg& x, bool with_binomial = true) {
    Rational c = a + Rational(1);
    if (c.is_zero() && b.is_zero()) fail(ErrorKind::MinusOneCoefficient, "divisor factor at coefficient -1");
    if (a.is_zero() && b.is_zero()) return;
    t.mul(x + zarg(c, b), 1, with_binomial);
    t.mul(zarg(Rational(1)), 1);
    t.mul(x + zarg(Rational(1)), -1, with_binomial);
    t.mul(zarg(c, b), -1);
}

/// Divisor factor evaluated on the character t^m.
inline QSeries divisor_factor(const Rational& a, const Rational& m, std::int64_t order) {
    if (order < 0) fail(ErrorKind::SchemaError, "q-order must be nonnegative");
    ThetaProduct<Rational> t(order, 1);
    mul_divisor_factor(t, a, Rational(0), targ(m));
    detail::LocalizationSum<Rational> sum(order, 1);
    sum.add(t, Rational(1));
    return sum.finish();
}

/// Taylor coefficients f_0, f_1, f_2 of a series-valued function of a class x.
using Jet = std::array<QSeries, 3>;

namespace detail {

/// Jets at x = 0 of a theta product in the variable t = e^x.
inline Jet jets(const ThetaProduct<Rational>& t) {
    auto split = [](const QLaurent& p) {
        auto d1 = euler_derivative(p, Var::Z);
        auto d2 = euler_derivative(d1, Var::Z);
        return std::array<RatExpr, 3>{RatExpr(p.at_one(Var::Z)), RatExpr(d1.at_one(Var::Z)),
                                      RatExpr(d2.at_one(Var::Z) * Rational(1, 2))};
    };
    auto d = split(t.denominator());
    if (d[0].is_zero()) fail(ErrorKind::ZeroDenominator, "internal: jet of a singular theta product");
    Jet j{QSeries(t.order()), QSeries(t.order()), QSeries(t.order())};
    auto pre = t.prefix();
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t.series(k).is_zero()) continue;
        auto n = split(pre * t.series(k));
        RatExpr q0 = n[0] / d[0];
        RatExpr q1 = (n[1] - q0 * d[1]) / d[0];
        RatExpr q2 = (n[2] - q0 * d[2] - q1 * d[1]) / d[0];
        j[0][k] = q0;
        j[1][k] = q1;
        j[2][k] = q2;
    }
    return j;
}

} // namespace detail

/// Jets of x theta(x + z) / theta(x); x / (e^(x/2) - e^(-x/2)) = 1 - x^2/24 + ...
inline Jet tangent_jet(std::int64_t order) {
    ThetaProduct<Rational> t(order, 1);
    t.mul(targ(Rational(1)) + zarg(Rational(1)), 1);
    t.mul(targ(Rational(1)), -1, false);
    Jet g = detail::jets(t);
    QSeries c = QSeries::constant(RatExpr(Rational(-1, 24)), order);
    return {g[0], g[1], g[2] + g[0] * c};
}

/// Jets of the divisor factor of coefficient a + b epsilon.
inline Jet divisor_jet(const Rational& a, const Rational& b, std::int64_t order) {
    ThetaProduct<Rational> t(order, 1);
    mul_divisor_factor(t, a, b, targ(Rational(1)));
    return detail::jets(t);
}

/// Intersection data on the spanning classes of H^2.
struct SurfaceData {
    std::vector<std::vector<Rational>> intersection;
    std::vector<Rational> c1;
    Rational c2;

    std::size_t classes() const { return intersection.size(); }
    Rational dot(const std::vector<Rational>& a, const std::vector<Rational>& b) const {
        Rational s;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i].is_zero()) continue;
            for (std::size_t j = 0; j < b.size(); ++j)
                if (!b[j].is_zero()) s += a[i] * intersection[i][j] * b[j];
        }
        return s;
    }
};

/// Toric divisors D_i span H^2; c1 = sum D_i, c2 = number of rays.
inline SurfaceData surface_data(const toric::Fan2D& f) {
    auto self = toric::self_intersections(f);
    std::size_t n = f.size();
    SurfaceData s;
    s.intersection.assign(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i) {
        s.intersection[i][i] = rat(self[i]);
        s.intersection[i][f.next(i)] = Rational(1);
        s.intersection[f.next(i)][i] = Rational(1);
    }
    s.c1.assign(n, Rational(1));
    s.c2 = rat(static_cast<std::int64_t>(n));
    return s;
}

/// Cohomology-valued series a0 + sum a1_i [D_i] + a2 [pt].
class ClassExpr {
public:
    ClassExpr(const SurfaceData& s, std::int64_t order) : s_(&s), a0_(order), a1_(s.classes(), QSeries(order)), a2_(order) {}

    /// f(x) for a class x given by its coordinates.
    static ClassExpr of_class(const SurfaceData& s, const Jet& f, const std::vector<Rational>& x) {
        ClassExpr r(s, f[0].order());
        r.a0_ = f[0];
        for (std::size_t i = 0; i < x.size(); ++i)
            if (!x[i].is_zero()) r.a1_[i] = f[1] * RatExpr(x[i]);
        r.a2_ = f[2] * RatExpr(s.dot(x, x));
        return r;
    }

    /// prod over both Chern roots of f.
    static ClassExpr of_tangent(const SurfaceData& s, const Jet& f) {
        ClassExpr r(s, f[0].order());
        r.a0_ = f[0] * f[0];
        QSeries lin = f[0] * f[1];
        for (std::size_t i = 0; i < s.classes(); ++i)
            if (!s.c1[i].is_zero()) r.a1_[i] = lin * RatExpr(s.c1[i]);
        r.a2_ = (f[1] * f[1] - f[0] * f[2] * RatExpr(Rational(2))) * RatExpr(s.c2) + f[0] * f[2] * RatExpr(s.dot(s.c1, s.c1));
        return r;
    }

    friend ClassExpr operator*(const ClassExpr& a, const ClassExpr& b) {
        ClassExpr r(*a.s_, a.a0_.order());
        r.a0_ = a.a0_ * b.a0_;
        for (std::size_t i = 0; i < r.a1_.size(); ++i) {
            QSeries x(a.a0_.order());
            if (!b.a1_[i].is_zero()) x += a.a0_ * b.a1_[i];
            if (!a.a1_[i].is_zero()) x += a.a1_[i] * b.a0_;
            r.a1_[i] = x;
        }
        r.a2_ = a.a0_ * b.a2_ + a.a2_ * b.a0_;
        const auto& m = a.s_->intersection;
        for (std::size_t i = 0; i < a.a1_.size(); ++i) {
            if (a.a1_[i].is_zero()) continue;
            for (std::size_t j = 0; j < b.a1_.size(); ++j)
                if (!m[i][j].is_zero() && !b.a1_[j].is_zero()) r.a2_ += a.a1_[i] * b.a1_[j] * RatExpr(m[i][j]);
        }
        return r;
    }

    const QSeries& degree0() const { return a0_; }
    QSeries integrate() const { return a2_; }

private:
    const SurfaceData* s_;
    QSeries a0_;
    std::vector<QSeries> a1_;
    QSeries a2_;
};

namespace detail {

inline void require_order(std::int64_t order) {
    if (order < 0) fail(ErrorKind::SchemaError, "q-order must be nonnegative");
}

inline void require_admissible(const toric::ToricPair& p) {
    p.validate();
    auto adm = dualgraph::admissibility(toric::to_graph(p));
    if (!adm.ok()) fail(ErrorKind::NotAdmissible, adm.diagnostic);
}

/// Null-perturbation on the rays (zero when there is no -1 curve).
inline std::vector<Rational> default_perturbation(const toric::ToricPair& p) {
    auto b = efn::null_perturbation(toric::to_graph(p));
    std::vector<Rational> out;
    for (std::size_t i = 0; i < p.fan.size(); ++i) out.push_back(orbifold::detail::get(b, toric::ray_name(i)));
    return out;
}

inline std::vector<Rational> checked_perturbation(const toric::ToricPair& p, const std::optional<std::vector<Rational>>& pert) {
    if (!pert) return default_perturbation(p);
    if (pert->size() != p.fan.size()) fail(ErrorKind::SchemaError, "one perturbation coefficient per ray is required");
    efn::Perturbation b;
    for (std::size_t i = 0; i < pert->size(); ++i)
        if (!(*pert)[i].is_zero()) b[toric::ray_name(i)] = (*pert)[i];
    if (!efn::is_null_perturbation(toric::to_graph(p), b))
        fail(ErrorKind::SchemaError, "perturbation is not a null-perturbation");
    return *pert;
}

} // namespace detail

/// Elliptic genus of a compact toric pair by Chern-root integration. Curves
/// with coefficient -1 are handled by a null-perturbation a + b epsilon and
/// the limit epsilon -> 0 of every q-coefficient.
inline QSeries ell_smooth_pair(const toric::ToricPair& p, std::int64_t order,
                               const std::optional<std::vector<Rational>>& pert = {}) {
    detail::require_order(order);
    detail::require_admissible(p);
    auto b = detail::checked_perturbation(p, pert);
    SurfaceData s = surface_data(p.fan);
    ClassExpr total = ClassExpr::of_tangent(s, tangent_jet(order));
    for (std::size_t i = 0; i < p.fan.size(); ++i) {
        if (p.coeffs[i].is_zero() && b[i].is_zero()) continue;
        std::vector<Rational> x(s.classes());
        x[i] = Rational(1);
        total = total * ClassExpr::of_class(s, divisor_jet(p.coeffs[i], b[i], order), x);
    }
    return total.integrate().map([](const RatExpr& c) { return exact::limit_at_one(c, Var::S); });
}

/// theta(a z) theta((a+2) z) / theta((a+1) z)^2.
inline QSeries minus_one_addend(const Rational& a, std::int64_t order) {
    detail::require_order(order);
    if (a == Rational(-1)) fail(ErrorKind::MinusOneCoefficient, "neighbour coefficient -1");
    ThetaProduct<Rational> t(order, 1);
    t.mul(zarg(a), 1);
    t.mul(zarg(a + Rational(2)), 1);
    t.mul(zarg(a + Rational(1)), -1);
    t.mul(zarg(a + Rational(1)), -1);
    detail::LocalizationSum<Rational> sum(order, 1);
    sum.add(t, Rational(1));
    return sum.finish();
}

/// Closed admissible form: every -1 curve D_t enters through the factor
/// theta(D_t + 2z) theta(z) / (theta(D_t + z) theta(2z)), plus the addend
/// m_t theta(a z) theta((a+2) z) / theta((a+1) z)^2 with a the coefficient
/// of the neighbour preceding D_t in the fan.
inline QSeries ell_admissible_closed(const toric::ToricPair& p, std::int64_t order) {
    detail::require_order(order);
    detail::require_admissible(p);
    SurfaceData s = surface_data(p.fan);
    auto self = toric::self_intersections(p.fan);
    ClassExpr total = ClassExpr::of_tangent(s, tangent_jet(order));
    QSeries addend(order);
    for (std::size_t i = 0; i < p.fan.size(); ++i) {
        const Rational& a = p.coeffs[i];
        if (a.is_zero()) continue;
        std::vector<Rational> x(s.classes());
        x[i] = Rational(1);
        bool minus_one = a == Rational(-1);
        total = total * ClassExpr::of_class(s, divisor_jet(minus_one ? Rational(1) : a, Rational(0), order), x);
        if (!minus_one) continue;
        addend += minus_one_addend(p.coeffs[p.fan.prev(i)], order) * RatExpr(rat(-self[i]));
    }
    return total.integrate() + addend;
}

struct EquivariantOptions {
    std::optional<lattice::Vec2> cocharacter;          // generic one-parameter subgroup t^<u, zeta>
    std::optional<std::vector<Rational>> perturbation; // null-perturbation on the rays
};

/// A cocharacter pairing nonzero with every tangent weight of the fan.
inline lattice::Vec2 generic_cocharacter(const toric::Fan2D& f) {
    auto fps = toric::fixed_point_data(f);
    for (std::int64_t r = 1;; ++r) {
        for (std::int64_t q = 1; q <= r; ++q) {
            for (lattice::Vec2 z : {lattice::Vec2{r, q}, lattice::Vec2{q, r}, lattice::Vec2{r, -q}, lattice::Vec2{q, -r}}) {
                bool ok = true;
                for (const auto& fp : fps)
                    for (const auto& u : fp.weights) ok &= u[0] * z[0] + u[1] * z[1] != 0;
                if (ok) return z;
            }
        }
    }
}

namespace detail {

template <class K>
QSeries localize(const toric::ToricPair& p, const std::vector<lattice::RVec2>& elems, std::int64_t order,
                 const lattice::Vec2& zeta, const std::vector<Rational>& b) {
    std::int64_t qden = 1;
    for (const auto& h : elems) qden = std::lcm(qden, std::lcm(h[0].den().get_si(), h[1].den().get_si()));
    LocalizationSum<K> sum(order, qden);
    K weight = K(Rational(1) / rat(static_cast<std::int64_t>(elems.size())));
    auto fps = toric::fixed_point_data(p.fan);
    auto pairing = [](const lattice::Vec2& u, const lattice::RVec2& x) { return rat(u[0]) * x[0] + rat(u[1]) * x[1]; };
    for (const auto& g : elems) {
        for (const auto& h : elems) {
            for (const auto& fp : fps) {
                ThetaProduct<K> t(order, qden);
                for (std::size_t j = 0; j < 2; ++j) {
                    const auto& u = fp.weights[j];
                    std::size_t r = fp.rays[j];
                    Rational s = toric::frac(pairing(u, h));
                    Arg x{toric::frac(pairing(u, g)), Rational(0), Rational(0), rat(u[0] * zeta[0] + u[1] * zeta[1]), s};
                    const Rational& a = p.coeffs[r];
                    Rational c = a + Rational(1);
                    // Tangent and divisor factors share theta(x + z):
                    // theta(x + c z) theta(z) / (theta(x) theta(c z)) y^(-c s).
                    t.mul(x + zarg(c, b[r]), 1);
                    t.mul(x, -1);
                    if (!c.is_one() || !b[r].is_zero()) {
                        t.mul(zarg(Rational(1)), 1);
                        t.mul(zarg(c, b[r]), -1);
                    }
                    t.mul_monomial(monomial<K>(-c * s, -b[r] * s));
                }
                sum.add(t, weight);
            }
        }
    }
    return sum.finish();
}

} // namespace detail

/// Equivariant orbifold elliptic genus of (X, D) / G for G inside the torus,
/// by localization at the torus fixed points over all sector pairs (g, h).
/// Coefficients constant in the equivariant variable are returned without it.
inline QSeries ell_toric_equivariant(const toric::ToricPair& p, const toric::TorusGroup& group, std::int64_t order,
                                     const EquivariantOptions& opts = {}) {
    detail::require_order(order);
    p.validate();
    auto b = detail::checked_perturbation(p, opts.perturbation);
    for (std::size_t i = 0; i < p.fan.size(); ++i)
        if (p.coeffs[i] == Rational(-1) && b[i].is_zero()) fail(ErrorKind::MinusOneCoefficient, "unperturbed coefficient -1");
    lattice::Vec2 zeta = opts.cocharacter ? *opts.cocharacter : generic_cocharacter(p.fan);
    for (const auto& fp : toric::fixed_point_data(p.fan))
        for (const auto& u : fp.weights)
            if (u[0] * zeta[0] + u[1] * zeta[1] == 0) fail(ErrorKind::SchemaError, "cocharacter is not generic");
    auto elems = group.elements();
    if (elems.size() == 1) return detail::localize<Rational>(p, elems, order, zeta, b);
    return detail::localize<Cyclotomic>(p, elems, order, zeta, b);
}

/// True when every coefficient is free of the equivariant variable.
inline bool z_independent(const QSeries& s) {
    for (std::size_t k = 0; k < s.size(); ++k)
        if (s[k].uses(Var::Z)) return false;
    return true;
}

struct RigidityReport {
    bool vanishes = false;    // every coefficient through the order
    bool q0_vanishes = false; // the chi_y level
    QSeries series;
};

inline RigidityReport rigidity_check(const toric::ToricPair& p, const toric::TorusGroup& group, std::int64_t order) {
    if (!toric::is_cy_pair(p)) fail(ErrorKind::NotCalabiYau, "pair is not Calabi-Yau");
    RigidityReport r;
    r.series = ell_toric_equivariant(p, group, order);
    r.vanishes = r.series.is_zero();
    r.q0_vanishes = r.series.q0().is_zero();
    return r;
}

inline RatExpr q0_chi_y(const QSeries& s) { return s.q0(); }

/// Substitutes y -> -y; exponents of y must be integral.
inline RatExpr flip_y(const RatExpr& e) {
    auto flip = [](const QLaurent& p) {
        if (p.scales()[exact::detail::idx(Var::Y)] != 1) fail(ErrorKind::SchemaError, "y -> -y needs integral exponents");
        return p.map_coeffs([](const exact::Exps& x, const Rational& c) {
            return x[exact::detail::idx(Var::Y)] % 2 == 0 ? c : -c;
        });
    };
    return RatExpr(flip(e.num()), flip(e.den()));
}

/// y^(n/2) c_0 at y = -1.
inline Rational signature(const QSeries& s, std::int64_t dim) {
    RatExpr v = flip_y(s.q0() * RatExpr(QLaurent::var(Var::Y, Rational(dim, 2))));
    auto n = v.num().at_one(Var::Y), d = v.den().at_one(Var::Y);
    if (d.is_zero()) fail(ErrorKind::PoleAtOne, "pole at y = -1");
    if (!n.is_constant() || !d.is_constant()) fail(ErrorKind::SchemaError, "signature needs a function of y alone");
    return n.constant_value() / d.constant_value();
}

} // namespace stringy::elliptic

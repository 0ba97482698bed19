#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>
#include <vector>

#include "stringy/exact/rational.hpp"

namespace stringy::exact {

namespace detail {

using QPoly = std::vector<Rational>; // ascending coefficients

inline void trim(QPoly& p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
}

inline QPoly qpoly_mul(const QPoly& a, const QPoly& b) {
    if (a.empty() || b.empty()) return {};
    QPoly r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_zero()) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    trim(r);
    return r;
}

/// Quotient and remainder of a by a nonzero b.
inline std::pair<QPoly, QPoly> qpoly_divmod(QPoly a, const QPoly& b) {
    trim(a);
    QPoly q;
    if (a.size() < b.size()) return {q, a};
    q.assign(a.size() - b.size() + 1, Rational(0));
    const Rational& lead = b.back();
    for (std::size_t k = a.size() - 1;; --k) {
        Rational c = a[k] / lead;
        std::size_t shift = k - (b.size() - 1);
        q[shift] = c;
        if (!c.is_zero())
            for (std::size_t j = 0; j < b.size(); ++j) a[shift + j] -= c * b[j];
        if (k == b.size() - 1) break;
    }
    trim(a);
    trim(q);
    return {q, a};
}

inline QPoly compute_cyclotomic(long m) {
    // x^m - 1 divided by every Phi_d, d | m, d < m.
    QPoly p(m + 1, Rational(0));
    p[0] = Rational(-1);
    p[m] = Rational(1);
    for (long d = 1; d < m; ++d) {
        if (m % d != 0) continue;
        QPoly pd = compute_cyclotomic(d);
        p = qpoly_divmod(p, pd).first;
    }
    return p;
}

/// Phi_m, memoised; the cache is an invisible implementation detail.
inline const QPoly& cyclotomic_poly(long m) {
    static std::mutex mu;
    static std::map<long, std::shared_ptr<const QPoly>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(m);
    if (it == cache.end())
        it = cache.emplace(m, std::make_shared<const QPoly>(compute_cyclotomic(m))).first;
    return *it->second;
}

} // namespace detail

/// Element of the cyclotomic field Q(zeta_m), zeta_m = exp(2 pi i / m),
/// stored as its coordinates in the power basis 1, zeta, ..., zeta^(phi(m)-1).
/// Values with different m interoperate through the common field Q(zeta_lcm).
class Cyclotomic {
public:
    Cyclotomic() : m_(1), c_() {}
    Cyclotomic(long v) : Cyclotomic(Rational(v)) {}
    Cyclotomic(const Rational& r) : m_(1) {
        if (!r.is_zero()) c_.push_back(r);
    }

    /// zeta_m^k.
    static Cyclotomic root_of_unity(long m, long k) {
        k %= m;
        if (k < 0) k += m;
        detail::QPoly p(k + 1, Rational(0));
        p[k] = Rational(1);
        return Cyclotomic(m, std::move(p));
    }

    long order() const { return m_; }
    bool is_zero() const { return c_.empty(); }
    bool is_rational() const { return c_.size() <= 1; }
    Rational rational_part() const { return c_.empty() ? Rational(0) : c_[0]; }

    Cyclotomic lifted(long m) const {
        if (m == m_) return *this;
        long step = m / m_;
        detail::QPoly p;
        for (std::size_t k = 0; k < c_.size(); ++k) {
            if (c_[k].is_zero()) continue;
            std::size_t e = k * static_cast<std::size_t>(step);
            if (p.size() <= e) p.resize(e + 1, Rational(0));
            p[e] += c_[k];
        }
        return Cyclotomic(m, std::move(p));
    }

    Cyclotomic operator-() const {
        Cyclotomic r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }
    friend Cyclotomic operator+(const Cyclotomic& a, const Cyclotomic& b) {
        long m = std::lcm(a.m_, b.m_);
        Cyclotomic x = a.lifted(m), y = b.lifted(m);
        detail::QPoly p(std::max(x.c_.size(), y.c_.size()), Rational(0));
        for (std::size_t i = 0; i < x.c_.size(); ++i) p[i] += x.c_[i];
        for (std::size_t i = 0; i < y.c_.size(); ++i) p[i] += y.c_[i];
        detail::trim(p);
        Cyclotomic r;
        r.m_ = m;
        r.c_ = std::move(p);
        return r.shrunk();
    }
    friend Cyclotomic operator-(const Cyclotomic& a, const Cyclotomic& b) { return a + (-b); }
    friend Cyclotomic operator*(const Cyclotomic& a, const Cyclotomic& b) {
        if (a.is_zero() || b.is_zero()) return Cyclotomic();
        if (a.m_ == 1 && b.m_ == 1) return Cyclotomic(a.c_[0] * b.c_[0]);
        long m = std::lcm(a.m_, b.m_);
        Cyclotomic x = a.lifted(m), y = b.lifted(m);
        return Cyclotomic(m, detail::qpoly_mul(x.c_, y.c_)).shrunk();
    }
    Cyclotomic inverse() const {
        if (is_zero()) fail(ErrorKind::ZeroDenominator, "inverse of zero in cyclotomic field");
        if (m_ == 1) return Cyclotomic(Rational(1) / c_[0]);
        // Extended Euclid: s*a + t*Phi = 1.
        const auto& phi = detail::cyclotomic_poly(m_);
        detail::QPoly r0 = phi, r1 = c_, s0, s1{Rational(1)};
        while (!(r1.size() == 1)) {
            auto [q, r] = detail::qpoly_divmod(r0, r1);
            detail::QPoly s = s0;
            detail::QPoly qs = detail::qpoly_mul(q, s1);
            if (s.size() < qs.size()) s.resize(qs.size(), Rational(0));
            for (std::size_t i = 0; i < qs.size(); ++i) s[i] -= qs[i];
            detail::trim(s);
            r0 = std::move(r1);
            r1 = std::move(r);
            s0 = std::move(s1);
            s1 = std::move(s);
            if (r1.empty()) fail(ErrorKind::ZeroDenominator, "non-invertible cyclotomic element");
        }
        Rational inv = Rational(1) / r1[0];
        for (auto& x : s1) x *= inv;
        return Cyclotomic(m_, std::move(s1)).shrunk();
    }
    friend Cyclotomic operator/(const Cyclotomic& a, const Cyclotomic& b) { return a * b.inverse(); }
    Cyclotomic& operator+=(const Cyclotomic& o) { return *this = *this + o; }
    Cyclotomic& operator-=(const Cyclotomic& o) { return *this = *this - o; }
    Cyclotomic& operator*=(const Cyclotomic& o) { return *this = *this * o; }
    Cyclotomic& operator/=(const Cyclotomic& o) { return *this = *this / o; }

    friend bool operator==(const Cyclotomic& a, const Cyclotomic& b) { return (a - b).is_zero(); }
    friend bool operator!=(const Cyclotomic& a, const Cyclotomic& b) { return !(a == b); }

    std::string str() const {
        if (c_.empty()) return "0";
        if (m_ == 1) return c_[0].str();
        std::string s;
        for (std::size_t k = 0; k < c_.size(); ++k) {
            if (c_[k].is_zero()) continue;
            if (!s.empty()) s += " + ";
            s += "(" + c_[k].str() + ")";
            if (k > 0) s += "*zeta" + std::to_string(m_) + "^" + std::to_string(k);
        }
        return s;
    }

private:
    Cyclotomic(long m, detail::QPoly p) : m_(m) {
        if (m_ > 1) p = detail::qpoly_divmod(std::move(p), detail::cyclotomic_poly(m_)).second;
        detail::trim(p);
        c_ = std::move(p);
    }

    // Rational values are kept in Q so that equality stays cheap.
    Cyclotomic shrunk() const {
        if (m_ != 1 && c_.size() <= 1) return Cyclotomic(rational_part());
        return *this;
    }

    long m_;
    detail::QPoly c_;
};

} // namespace stringy::exact

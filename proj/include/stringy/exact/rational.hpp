#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "stringy/error.hpp"

namespace stringy::exact {

/// Exact rational number, always stored in lowest terms with a positive
/// denominator. Thin value wrapper around GMP's mpq_class.
class Rational {
public:
    Rational() = default;
    Rational(long v) : q_(v) {}
    Rational(int v) : q_(v) {}
    Rational(long num, long den) {
        if (den == 0) fail(ErrorKind::ZeroDenominator, "rational with zero denominator");
        q_ = mpq_class(mpz_class(num), mpz_class(den));
        q_.canonicalize();
    }
    explicit Rational(const mpq_class& q) : q_(q) { q_.canonicalize(); }
    Rational(const mpz_class& num, const mpz_class& den) {
        if (den == 0) fail(ErrorKind::ZeroDenominator, "rational with zero denominator");
        q_ = mpq_class(num, den);
        q_.canonicalize();
    }

    /// Parses "-3/2", "7", " 1/3 ".
    static Rational parse(std::string_view text) {
        std::string s;
        for (char c : text)
            if (c != ' ' && c != '\t') s.push_back(c);
        if (s.empty()) fail(ErrorKind::ParseError, "empty rational");
        auto slash = s.find('/');
        auto valid_int = [](const std::string& t) {
            if (t.empty()) return false;
            std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
            if (i == t.size()) return false;
            for (; i < t.size(); ++i)
                if (t[i] < '0' || t[i] > '9') return false;
            return true;
        };
        std::string num = s.substr(0, slash);
        std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
        if (!num.empty() && num[0] == '+') num.erase(0, 1);
        if (!valid_int(num) || !valid_int(den) || den[0] == '-')
            fail(ErrorKind::ParseError, "malformed rational '" + std::string(text) + "'");
        return Rational(mpz_class(num), mpz_class(den));
    }

    const mpq_class& raw() const { return q_; }
    mpz_class num() const { return q_.get_num(); }
    mpz_class den() const { return q_.get_den(); }

    bool is_zero() const { return sgn(q_) == 0; }
    bool is_one() const { return q_ == 1; }
    bool is_integer() const { return q_.get_den() == 1; }
    int sign() const { return sgn(q_); }

    /// Only valid when the value fits; callers check first.
    std::int64_t to_int64() const {
        mpz_class n = q_.get_num();
        if (!is_integer() || !n.fits_slong_p())
            fail(ErrorKind::ExponentOverflow, "rational " + str() + " is not a machine integer");
        return n.get_si();
    }
    double to_double() const { return q_.get_d(); }

    std::string str() const { return q_.get_str(); }

    Rational operator-() const { return Rational(mpq_class(-q_)); }
    Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
    Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
    Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) fail(ErrorKind::ZeroDenominator, "division by zero");
        q_ /= o.q_;
        return *this;
    }
    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.q_ != b.q_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.q_ < b.q_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.q_ <= b.q_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.q_ > b.q_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.q_ >= b.q_; }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

    /// Floor and fractional part, used for weights in [0,1).
    mpz_class floor() const {
        mpz_class f;
        mpz_fdiv_q(f.get_mpz_t(), q_.get_num_mpz_t(), q_.get_den_mpz_t());
        return f;
    }
    Rational frac() const { return *this - Rational(floor(), mpz_class(1)); }

private:
    mpq_class q_{0};
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) fail(ErrorKind::ExponentOverflow, "exponent product overflows");
    return r;
}
inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) fail(ErrorKind::ExponentOverflow, "exponent sum overflows");
    return r;
}
inline std::int64_t lcm64(std::int64_t a, std::int64_t b) {
    return checked_mul(a / std::gcd(a, b), b);
}

} // namespace stringy::exact

template <>
struct std::hash<stringy::exact::Rational> {
    std::size_t operator()(const stringy::exact::Rational& r) const {
        return std::hash<std::string>{}(r.str());
    }
};

#pragma once

// Exact rational arithmetic on unbounded integers, plus the half-step degree
// counter shared by every other header. Values are always kept in canonical
// reduced form: denominator > 0, gcd(|num|, den) = 1, zero is 0/1.

#include <orbigw/errors.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <ostream>
#include <string>
#include <utility>

namespace orbigw {

using BigInt = boost::multiprecision::cpp_int;

class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(int v) : num_(v), den_(1) {}
    Rational(long long v) : num_(v), den_(1) {}
    Rational(BigInt v) : num_(std::move(v)), den_(1) {}

    Rational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
        if (den_ == 0) throw config_error("Rational: zero denominator");
        canonicalize();
    }
    Rational(long long num, long long den) : Rational(BigInt(num), BigInt(den)) {}

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    int sign() const { return num_ == 0 ? 0 : (num_ > 0 ? 1 : -1); }

    friend Rational operator-(const Rational& a) {
        Rational r;
        r.num_ = -a.num_;
        r.den_ = a.den_;
        return r;
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.is_zero()) throw config_error("Rational: division by zero");
        return Rational(a.num_ * b.den_, a.den_ * b.num_);
    }

    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    Rational& operator-=(const Rational& b) { return *this = *this - b; }
    Rational& operator*=(const Rational& b) { return *this = *this * b; }
    Rational& operator/=(const Rational& b) { return *this = *this / b; }

    Rational inverse() const {
        if (is_zero()) throw config_error("Rational: inverse of zero");
        return Rational(den_, num_);
    }

    // Canonical forms make equality structural.
    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return a.num_ * b.den_ < b.num_ * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    // Serialized form used in all JSON and text output: "num/den", the
    // denominator omitted when 1.
    std::string str() const {
        std::string s = num_.str();
        if (den_ != 1) s += "/" + den_.str();
        return s;
    }

    static Rational parse(const std::string& text) {
        const auto slash = text.find('/');
        try {
            if (slash == std::string::npos) return Rational(BigInt(text));
            return Rational(BigInt(text.substr(0, slash)), BigInt(text.substr(slash + 1)));
        } catch (const std::runtime_error& e) {
            throw config_error("Rational: cannot parse \"" + text + "\": " + e.what());
        }
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
        return os << r.str();
    }

private:
    void canonicalize() {
        if (num_ == 0) {
            den_ = 1;
            return;
        }
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        BigInt g = boost::multiprecision::gcd(num_ < 0 ? BigInt(-num_) : num_, den_);
        if (g != 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    BigInt num_;
    BigInt den_; // > 0
};

// Integer power; negative exponents go through the inverse.
inline Rational pow(const Rational& base, long long exp) {
    if (exp < 0) return pow(base.inverse(), -exp);
    Rational acc(1);
    Rational b = base;
    unsigned long long e = static_cast<unsigned long long>(exp);
    while (e > 0) {
        if (e & 1ULL) acc *= b;
        b *= b;
        e >>= 1ULL;
    }
    return acc;
}

inline BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt acc = 1;
    for (int i = 1; i <= k; ++i) {
        acc *= n - k + i;
        acc /= i; // exact at every step: acc is binom(n-k+i, i)
    }
    return acc;
}

// Count of minimal effective degree units; the actual curve degree is
// steps * degree_step of the target. Stored as an integer so memo keys
// compare exactly.
struct DegreeSteps {
    int steps = 0;

    friend auto operator<=>(const DegreeSteps&, const DegreeSteps&) = default;
};

} // namespace orbigw

#pragma once

// Exact rational arithmetic on 64-bit numerator/denominator.
//
// All probability masses handled by this library are ratios of subset sums of
// the initial belief's numerators, and all value-function entries are belief-
// weighted sums of instantaneous costs, so reduced fractions stay small in
// every computation the library performs. Intermediates are evaluated in
// 128-bit arithmetic and any reduced result that still does not fit 64 bits
// raises ArithmeticOverflow instead of wrapping.

#include <cstdint>
#include <functional>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "detpomdp/errors.hpp"

namespace detpomdp {

class Rational {
  public:
    constexpr Rational() : num_(0), den_(1) {}
    constexpr Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design
    Rational(std::int64_t n, std::int64_t d) { assign(n, d); }

    static Rational zero() { return Rational(); }
    static Rational one() { return Rational(1); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_negative() const { return num_ < 0; }
    bool is_integer() const { return den_ == 1; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        __int128 n = i128(a.num_) * b.den_ + i128(b.num_) * a.den_;
        __int128 d = i128(a.den_) * b.den_;
        return from_i128(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        __int128 n = i128(a.num_) * b.den_ - i128(b.num_) * a.den_;
        __int128 d = i128(a.den_) * b.den_;
        return from_i128(n, d);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from_i128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw ArithmeticOverflow("rational division by zero");
        return from_i128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    }
    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    // Canonical text form: "n" for integers, "p/q" otherwise.
    std::string str() const {
        std::string s = std::to_string(num_);
        if (den_ != 1) s += "/" + std::to_string(den_);
        return s;
    }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    // Accepts "p/q", "p", optional leading '-'. Whitespace is not accepted.
    static Rational parse(std::string_view text) {
        auto slash = text.find('/');
        if (slash == std::string_view::npos) {
            return Rational(parse_int(text, text), 1);
        }
        std::int64_t n = parse_int(text.substr(0, slash), text);
        std::int64_t d = parse_int(text.substr(slash + 1), text);
        return Rational(n, d);
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

    std::size_t hash() const {
        std::size_t h = std::hash<std::int64_t>()(num_);
        return h ^ (std::hash<std::int64_t>()(den_) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
    }

  private:
    static __int128 i128(std::int64_t v) { return static_cast<__int128>(v); }

    void assign(std::int64_t n, std::int64_t d) {
        if (d == 0) throw ArithmeticOverflow("rational with zero denominator");
        if (d < 0) {
            if (n == INT64_MIN || d == INT64_MIN)
                throw ArithmeticOverflow("rational out of 64-bit range");
            n = -n;
            d = -d;
        }
        std::int64_t g = std::gcd(n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        num_ = n;
        den_ = d;
    }

    static Rational from_i128(__int128 n, __int128 d) {
        if (d == 0) throw ArithmeticOverflow("rational with zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
            throw ArithmeticOverflow("rational out of 64-bit range");
        Rational r;
        r.num_ = static_cast<std::int64_t>(n);
        r.den_ = static_cast<std::int64_t>(d);
        return r;
    }

    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    static std::int64_t parse_int(std::string_view part, std::string_view whole) {
        if (part.empty()) throw ParseError("empty rational component in '" + std::string(whole) + "'");
        bool neg = part.front() == '-';
        std::size_t i = neg ? 1 : 0;
        if (i == part.size()) throw ParseError("malformed rational '" + std::string(whole) + "'");
        __int128 acc = 0;
        for (; i < part.size(); ++i) {
            char c = part[i];
            if (c < '0' || c > '9')
                throw ParseError("malformed rational '" + std::string(whole) + "'");
            acc = acc * 10 + (c - '0');
            if (acc > static_cast<__int128>(INT64_MAX) + 1)
                throw ArithmeticOverflow("rational literal out of 64-bit range");
        }
        if (neg) acc = -acc;
        if (acc > INT64_MAX || acc < INT64_MIN)
            throw ArithmeticOverflow("rational literal out of 64-bit range");
        return static_cast<std::int64_t>(acc);
    }

    std::int64_t num_;
    std::int64_t den_;
};

struct RationalHash {
    std::size_t operator()(const Rational& r) const { return r.hash(); }
};

}  // namespace detpomdp

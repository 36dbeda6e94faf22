#pragma once

// Values in ℝ ∪ {+∞}: instantaneous/final costs and Bellman values.
// +∞ encodes constraints; −∞ never occurs.

#include <string>

#include "detpomdp/errors.hpp"
#include "detpomdp/rational.hpp"

namespace detpomdp {

struct ExtendedValue {
    bool infinite = false;
    Rational value;  // meaningful only when finite

    ExtendedValue() = default;
    ExtendedValue(Rational v) : infinite(false), value(v) {}  // NOLINT: implicit by design

    static ExtendedValue infinity() {
        ExtendedValue e;
        e.infinite = true;
        return e;
    }
    static ExtendedValue zero() { return ExtendedValue(Rational::zero()); }

    bool is_finite() const { return !infinite; }

    friend ExtendedValue operator+(const ExtendedValue& a, const ExtendedValue& b) {
        if (a.infinite || b.infinite) return infinity();
        return ExtendedValue(a.value + b.value);
    }
    ExtendedValue& operator+=(const ExtendedValue& o) { return *this = *this + o; }

    // Scaling by a nonnegative rational; 0 · (+∞) never arises because the
    // Bellman sum skips zero-probability terms.
    friend ExtendedValue operator*(const Rational& c, const ExtendedValue& v) {
        if (c.is_negative()) throw ContractViolation("extended value scaled by negative factor");
        if (v.infinite) {
            if (c.is_zero()) throw ContractViolation("0 * infinity is undefined");
            return infinity();
        }
        return ExtendedValue(c * v.value);
    }

    friend bool operator==(const ExtendedValue& a, const ExtendedValue& b) {
        if (a.infinite != b.infinite) return false;
        return a.infinite || a.value == b.value;
    }
    friend bool operator!=(const ExtendedValue& a, const ExtendedValue& b) { return !(a == b); }
    friend bool operator<(const ExtendedValue& a, const ExtendedValue& b) {
        if (a.infinite) return false;
        if (b.infinite) return true;
        return a.value < b.value;
    }
    friend bool operator<=(const ExtendedValue& a, const ExtendedValue& b) { return !(b < a); }

    std::string str() const { return infinite ? "inf" : value.str(); }
};

}  // namespace detpomdp

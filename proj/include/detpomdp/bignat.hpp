#pragma once

// Arbitrary-precision unsigned integers for the theoretical bounds, which
// overflow native words even on modest instances ((1+301)^301 for the tank).
// Only the operations the bound formulas need are provided.

#include <cstdint>
#include <string>
#include <vector>

#include "detpomdp/errors.hpp"

namespace detpomdp {

class BigNat {
  public:
    BigNat() = default;
    BigNat(std::uint64_t v) {  // NOLINT: implicit by design
        while (v != 0) {
            limbs_.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
            v >>= 32;
        }
    }

    bool is_zero() const { return limbs_.empty(); }

    friend BigNat operator+(const BigNat& a, const BigNat& b) {
        BigNat r;
        const std::size_t n = std::max(a.limbs_.size(), b.limbs_.size());
        r.limbs_.reserve(n + 1);
        std::uint64_t carry = 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t s = carry;
            if (i < a.limbs_.size()) s += a.limbs_[i];
            if (i < b.limbs_.size()) s += b.limbs_[i];
            r.limbs_.push_back(static_cast<std::uint32_t>(s & 0xffffffffu));
            carry = s >> 32;
        }
        if (carry != 0) r.limbs_.push_back(static_cast<std::uint32_t>(carry));
        return r;
    }

    friend BigNat operator*(const BigNat& a, const BigNat& b) {
        BigNat r;
        if (a.is_zero() || b.is_zero()) return r;
        r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
        for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
            std::uint64_t carry = 0;
            for (std::size_t j = 0; j < b.limbs_.size(); ++j) {
                std::uint64_t cur = r.limbs_[i + j] +
                                    static_cast<std::uint64_t>(a.limbs_[i]) * b.limbs_[j] + carry;
                r.limbs_[i + j] = static_cast<std::uint32_t>(cur & 0xffffffffu);
                carry = cur >> 32;
            }
            std::size_t k = i + b.limbs_.size();
            while (carry != 0) {
                std::uint64_t cur = r.limbs_[k] + carry;
                r.limbs_[k] = static_cast<std::uint32_t>(cur & 0xffffffffu);
                carry = cur >> 32;
                ++k;
            }
        }
        r.trim();
        return r;
    }

    // a - b, requires a >= b.
    friend BigNat operator-(const BigNat& a, const BigNat& b) {
        if (compare(a, b) < 0) throw InternalError("BigNat subtraction underflow");
        BigNat r;
        r.limbs_.reserve(a.limbs_.size());
        std::int64_t borrow = 0;
        for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
            std::int64_t cur = static_cast<std::int64_t>(a.limbs_[i]) - borrow -
                               (i < b.limbs_.size() ? static_cast<std::int64_t>(b.limbs_[i]) : 0);
            if (cur < 0) {
                cur += (std::int64_t{1} << 32);
                borrow = 1;
            } else {
                borrow = 0;
            }
            r.limbs_.push_back(static_cast<std::uint32_t>(cur));
        }
        r.trim();
        return r;
    }

    static BigNat pow(std::uint64_t base, std::uint64_t exp) {
        BigNat r{1};
        BigNat b{base};
        while (exp != 0) {
            if (exp & 1u) r = r * b;
            b = b * b;
            exp >>= 1;
        }
        return r;
    }

    static int compare(const BigNat& a, const BigNat& b) {
        if (a.limbs_.size() != b.limbs_.size())
            return a.limbs_.size() < b.limbs_.size() ? -1 : 1;
        for (std::size_t i = a.limbs_.size(); i-- > 0;) {
            if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] < b.limbs_[i] ? -1 : 1;
        }
        return 0;
    }

    friend bool operator==(const BigNat& a, const BigNat& b) { return compare(a, b) == 0; }
    friend bool operator!=(const BigNat& a, const BigNat& b) { return compare(a, b) != 0; }
    friend bool operator<(const BigNat& a, const BigNat& b) { return compare(a, b) < 0; }
    friend bool operator<=(const BigNat& a, const BigNat& b) { return compare(a, b) <= 0; }

    std::string str() const {
        if (limbs_.empty()) return "0";
        std::vector<std::uint32_t> work(limbs_);
        std::string digits;
        while (!work.empty()) {
            std::uint64_t rem = 0;
            for (std::size_t i = work.size(); i-- > 0;) {
                std::uint64_t cur = (rem << 32) | work[i];
                work[i] = static_cast<std::uint32_t>(cur / 1000000000u);
                rem = cur % 1000000000u;
            }
            while (!work.empty() && work.back() == 0) work.pop_back();
            std::string chunk = std::to_string(rem);
            if (work.empty()) {
                digits.insert(0, chunk);
            } else {
                digits.insert(0, std::string(9 - chunk.size(), '0') + chunk);
            }
        }
        return digits;
    }

    // "3.02e+745"-style display form for astronomically large bounds.
    std::string approx_str() const {
        std::string d = str();
        if (d.size() <= 6) return d;
        std::string mant = d.substr(0, 1) + "." + d.substr(1, 2);
        return mant + "e+" + std::to_string(d.size() - 1);
    }

  private:
    void trim() {
        while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    }

    std::vector<std::uint32_t> limbs_;  // little-endian, no leading zero limb
};

}  // namespace detpomdp

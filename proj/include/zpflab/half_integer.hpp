#pragma once

#include <cmath>
#include <compare>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace zpflab {

/// Exact half-integer arithmetic. Stores the doubled value, so parity
/// questions (integer vs half-odd-integer, even vs odd) never touch
/// floating point.
class HalfInteger {
  public:
    constexpr HalfInteger() = default;

    static constexpr HalfInteger from_half_units(int h) { return HalfInteger(h); }
    static constexpr HalfInteger from_integer(int n) { return HalfInteger(2 * n); }

    constexpr int half_units() const { return half_units_; }
    constexpr double value() const { return 0.5 * static_cast<double>(half_units_); }

    constexpr bool is_integer() const { return half_units_ % 2 == 0; }
    constexpr bool is_half_odd() const { return !is_integer(); }
    constexpr bool is_negative() const { return half_units_ < 0; }

    /// Integer value; only defined when is_integer().
    constexpr int as_integer() const {
        if (!is_integer())
            throw std::domain_error("HalfInteger: " + to_string() + " is not an integer");
        return half_units_ / 2;
    }

    /// Parity of the integer value; only defined when is_integer().
    constexpr bool is_odd_integer() const { return as_integer() % 2 != 0; }

    constexpr HalfInteger abs() const { return HalfInteger(half_units_ < 0 ? -half_units_ : half_units_); }

    std::string to_string() const {
        if (is_integer()) return std::to_string(half_units_ / 2);
        return std::to_string(half_units_) + "/2";
    }

    friend constexpr HalfInteger operator+(HalfInteger a, HalfInteger b) {
        return HalfInteger(a.half_units_ + b.half_units_);
    }
    friend constexpr HalfInteger operator-(HalfInteger a, HalfInteger b) {
        return HalfInteger(a.half_units_ - b.half_units_);
    }
    friend constexpr HalfInteger operator-(HalfInteger a) { return HalfInteger(-a.half_units_); }

    friend constexpr bool operator==(HalfInteger, HalfInteger) = default;
    friend constexpr auto operator<=>(HalfInteger a, HalfInteger b) {
        return a.half_units_ <=> b.half_units_;
    }

  private:
    constexpr explicit HalfInteger(int h) : half_units_(h) {}
    int half_units_ = 0;
};

/// (-1)^v for integer-valued v, computed by exact parity.
constexpr int parity_sign(HalfInteger v) { return v.is_odd_integer() ? -1 : 1; }

/// sin(pi * v), exact for half-unit arguments: 0 for integers, +/-1 for
/// half-odd values.
constexpr double sin_pi(HalfInteger v) {
    const int h = v.half_units();
    if (h % 2 == 0) return 0.0;
    const int r = ((h % 4) + 4) % 4;  // h odd: r is 1 or 3
    return r == 1 ? 1.0 : -1.0;
}

}  // namespace zpflab

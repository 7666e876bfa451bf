#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

namespace dima {

// Exact time constant in milliseconds. Kept rational so conversion to the
// configured quantum either succeeds exactly or is rejected; no floating
// point anywhere in the timing path.
struct TimeVal {
  std::int64_t num = 0;
  std::int64_t den = 1;  // > 0, gcd(num, den) == 1

  constexpr TimeVal() = default;
  constexpr TimeVal(std::int64_t n) : num(n), den(1) {}
  TimeVal(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::invalid_argument("TimeVal: zero denominator");
    if (den < 0) { num = -num; den = -den; }
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
  }

  friend bool operator==(const TimeVal&, const TimeVal&) = default;
  friend bool operator<(const TimeVal& a, const TimeVal& b) {
    return a.num * b.den < b.num * a.den;
  }
  friend TimeVal operator+(const TimeVal& a, const TimeVal& b) {
    return TimeVal(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend TimeVal operator-(const TimeVal& a, const TimeVal& b) {
    return TimeVal(a.num * b.den - b.num * a.den, a.den * b.den);
  }

  // Value in quanta at `den_per_ms` quanta per millisecond, if integral.
  std::optional<std::int64_t> quanta(std::int64_t den_per_ms) const {
    std::int64_t n = num * den_per_ms;
    if (n % den != 0) return std::nullopt;
    return n / den;
  }

  // Renders "5", "2.5" or, for non-decimal denominators, "5/3".
  std::string str() const;
};

// Parses "5", "2.5", "-1.25" or "5/3". Returns nullopt on malformed input.
std::optional<TimeVal> parse_timeval(const std::string& text);

}  // namespace dima

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace inertia {

// Exact fraction with a positive denominator. Arithmetic that would overflow
// int64 reports failure through the checked_* helpers instead of wrapping.
class Rational {
public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n), den_(1) {}
  Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    normalize();
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
  }

  static std::optional<Rational> checked_add(const Rational& a, const Rational& b) {
    __int128 n = static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_;
    __int128 d = static_cast<__int128>(a.den_) * b.den_;
    return from_wide(n, d);
  }
  static std::optional<Rational> checked_mul(const Rational& a, const Rational& b) {
    __int128 n = static_cast<__int128>(a.num_) * b.num_;
    __int128 d = static_cast<__int128>(a.den_) * b.den_;
    return from_wide(n, d);
  }
  static std::optional<Rational> checked_inv(const Rational& a) {
    if (a.num_ == 0) return std::nullopt;
    return from_wide(a.den_, a.num_);
  }
  // a^k for integer k, exact when it fits
  static std::optional<Rational> checked_pow(const Rational& a, std::int64_t k) {
    if (k < 0) {
      auto inv = checked_inv(a);
      if (!inv) return std::nullopt;
      return checked_pow(*inv, -k);
    }
    Rational r(1);
    for (std::int64_t i = 0; i < k; ++i) {
      auto next = checked_mul(r, a);
      if (!next) return std::nullopt;
      r = *next;
    }
    return r;
  }

  Rational operator-() const { return Rational(-num_, den_); }
  friend Rational operator+(const Rational& a, const Rational& b) { return must(checked_add(a, b)); }
  friend Rational operator-(const Rational& a, const Rational& b) { return must(checked_add(a, -b)); }
  friend Rational operator*(const Rational& a, const Rational& b) { return must(checked_mul(a, b)); }
  friend Rational operator/(const Rational& a, const Rational& b) {
    auto inv = checked_inv(b);
    if (!inv) throw std::domain_error("rational division by zero");
    return must(checked_mul(a, *inv));
  }

  // Continued-fraction recovery of a double, accepted only when the
  // approximation is within rel_tol and the denominator stays small.
  static std::optional<Rational> from_double(double x, double rel_tol = 1e-12,
                                             std::int64_t max_den = 1000000) {
    if (!std::isfinite(x)) return std::nullopt;
    if (x == std::floor(x) && std::fabs(x) < 9.0e15) return Rational(static_cast<std::int64_t>(x));
    double v = x;
    std::int64_t h0 = 1, h1 = 0, k0 = 0, k1 = 1;
    for (int it = 0; it < 64; ++it) {
      double a = std::floor(v);
      if (std::fabs(a) > 9.0e15) break;
      auto ai = static_cast<std::int64_t>(a);
      __int128 h2 = static_cast<__int128>(ai) * h0 + h1;
      __int128 k2 = static_cast<__int128>(ai) * k0 + k1;
      if (k2 > max_den || h2 > INT64_MAX || h2 < INT64_MIN) break;
      h1 = h0; k1 = k0;
      h0 = static_cast<std::int64_t>(h2); k0 = static_cast<std::int64_t>(k2);
      double approx = static_cast<double>(h0) / static_cast<double>(k0);
      if (std::fabs(approx - x) <= rel_tol * std::max(1.0, std::fabs(x))) return Rational(h0, k0);
      double frac = v - a;
      if (frac == 0.0) break;
      v = 1.0 / frac;
    }
    return std::nullopt;
  }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }
  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
  static Rational must(std::optional<Rational> r) {
    if (!r) throw std::overflow_error("rational overflow");
    return *r;
  }
  static std::optional<Rational> from_wide(__int128 n, __int128 d) {
    if (d < 0) { n = -n; d = -d; }
    __int128 a = n < 0 ? -n : n, b = d;
    while (b != 0) { __int128 t = a % b; a = b; b = t; }
    if (a > 1) { n /= a; d /= a; }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX) return std::nullopt;
    return Rational(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
  }
  void normalize() {
    if (den_ < 0) { num_ = -num_; den_ = -den_; }
    std::int64_t g = std::gcd(num_, den_);
    if (g > 1) { num_ /= g; den_ /= g; }
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace inertia

#pragma once

#include <cmath>

namespace inertia {

// Forward-mode dual number, used to differentiate reduced right-hand sides
// along a trajectory.
struct Dual {
  double v = 0.0;
  double d = 0.0;

  Dual() = default;
  Dual(double value) : v(value) {}
  Dual(double value, double deriv) : v(value), d(deriv) {}

  Dual& operator+=(const Dual& o) { return *this = *this + o; }
  Dual& operator-=(const Dual& o) { return *this = *this - o; }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }

  friend Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
  friend Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
  friend Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
  friend Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
  friend Dual operator/(const Dual& a, const Dual& b) {
    return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
  }
};

inline Dual pow(const Dual& a, double p) {
  double f = std::pow(a.v, p);
  return {f, p * std::pow(a.v, p - 1.0) * a.d};
}
inline Dual sqrt(const Dual& a) {
  double f = std::sqrt(a.v);
  return {f, 0.5 * a.d / f};
}
inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.v; }

// Second-order Taylor jet in two variables (t, r).
struct Jet2 {
  double v = 0.0, t = 0.0, r = 0.0, tt = 0.0, tr = 0.0, rr = 0.0;

  Jet2() = default;
  Jet2(double c) : v(c) {}

  static Jet2 var_t(double value) {
    Jet2 j(value);
    j.t = 1.0;
    return j;
  }
  static Jet2 var_r(double value) {
    Jet2 j(value);
    j.r = 1.0;
    return j;
  }

  friend Jet2 operator+(const Jet2& a, const Jet2& b) {
    Jet2 c;
    c.v = a.v + b.v;
    c.t = a.t + b.t;
    c.r = a.r + b.r;
    c.tt = a.tt + b.tt;
    c.tr = a.tr + b.tr;
    c.rr = a.rr + b.rr;
    return c;
  }
  friend Jet2 operator-(const Jet2& a) {
    Jet2 c;
    c.v = -a.v;
    c.t = -a.t;
    c.r = -a.r;
    c.tt = -a.tt;
    c.tr = -a.tr;
    c.rr = -a.rr;
    return c;
  }
  friend Jet2 operator-(const Jet2& a, const Jet2& b) { return a + (-b); }
  friend Jet2 operator*(const Jet2& a, const Jet2& b) {
    Jet2 c;
    c.v = a.v * b.v;
    c.t = a.t * b.v + a.v * b.t;
    c.r = a.r * b.v + a.v * b.r;
    c.tt = a.tt * b.v + 2.0 * a.t * b.t + a.v * b.tt;
    c.tr = a.tr * b.v + a.t * b.r + a.r * b.t + a.v * b.tr;
    c.rr = a.rr * b.v + 2.0 * a.r * b.r + a.v * b.rr;
    return c;
  }
  friend Jet2 operator/(const Jet2& a, const Jet2& b);
};

// f applied to a jet, given f, f', f'' at a.v.
inline Jet2 chain(const Jet2& a, double f0, double f1, double f2) {
  Jet2 c;
  c.v = f0;
  c.t = f1 * a.t;
  c.r = f1 * a.r;
  c.tt = f2 * a.t * a.t + f1 * a.tt;
  c.tr = f2 * a.t * a.r + f1 * a.tr;
  c.rr = f2 * a.r * a.r + f1 * a.rr;
  return c;
}

inline Jet2 pow(const Jet2& a, double p) {
  return chain(a, std::pow(a.v, p), p * std::pow(a.v, p - 1.0),
               p * (p - 1.0) * std::pow(a.v, p - 2.0));
}
inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * pow(b, -1.0); }
inline Jet2 sqrt(const Jet2& a) { return pow(a, 0.5); }
inline Jet2 exp(const Jet2& a) {
  double e = std::exp(a.v);
  return chain(a, e, e, e);
}
inline Jet2 log(const Jet2& a) { return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
inline Jet2 atan(const Jet2& a) {
  double q = 1.0 + a.v * a.v;
  return chain(a, std::atan(a.v), 1.0 / q, -2.0 * a.v / (q * q));
}

}  // namespace inertia

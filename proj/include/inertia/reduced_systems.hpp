#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "inertia/jet.hpp"

namespace inertia {

// Reduced ODE systems of the singular vortex with
// W = -q0 rhodot^2 rho^(-5/3) + beta rho^(5/3).
enum class Branch {
  GammaPlus,     // X1+X2+gamma X0, gamma = mu^2 + 1/4
  GammaMinus,    // gamma = -mu^2 + 1/4
  GammaQuarter,  // gamma = 1/4
  X3_2X1,
  X1,
  X2pX0,
  X3,  // stands in for X2-X0
  GammaV0,
  X2pX0V0,
  X3V0,
};

inline const std::vector<Branch>& all_branches() {
  static const std::vector<Branch> b = {Branch::GammaPlus, Branch::GammaMinus, Branch::GammaQuarter,
                                        Branch::X3_2X1,    Branch::X1,         Branch::X2pX0,
                                        Branch::X3,        Branch::GammaV0,    Branch::X2pX0V0,
                                        Branch::X3V0};
  return b;
}

inline std::string branch_name(Branch b) {
  switch (b) {
    case Branch::GammaPlus: return "gamma_plus";
    case Branch::GammaMinus: return "gamma_minus";
    case Branch::GammaQuarter: return "gamma_quarter";
    case Branch::X3_2X1: return "X3_2X1";
    case Branch::X1: return "X1";
    case Branch::X2pX0: return "X2pX0";
    case Branch::X3: return "X3";
    case Branch::GammaV0: return "gamma_V0";
    case Branch::X2pX0V0: return "X2pX0_V0";
    case Branch::X3V0: return "X3_V0";
  }
  return "?";
}

inline std::optional<Branch> branch_from_name(std::string s) {
  if (s.rfind("S_", 0) == 0) s = s.substr(2);
  for (Branch b : all_branches())
    if (branch_name(b) == s) return b;
  return std::nullopt;
}

inline bool is_degenerate(Branch b) {
  return b == Branch::GammaV0 || b == Branch::X2pX0V0 || b == Branch::X3V0;
}

inline std::size_t state_size(Branch b) {
  if (is_degenerate(b)) return 1;
  if (b == Branch::X3_2X1) return 4;
  return 6;
}

// Names of the native state components.
inline std::vector<std::string> state_layout(Branch b) {
  if (is_degenerate(b)) return {"R"};
  if (b == Branch::X3_2X1) return {"V", "Lambda", "R", "h"};
  return {"V", "h", "Lambda", "R", "Rp", "Rpp"};
}

struct ReducedODE {
  Branch id = Branch::X1;
  double q0 = 1.0;
  double beta = 0.0;
  double mu = 0.0;

  double gamma() const {
    if (id == Branch::GammaPlus) return mu * mu + 0.25;
    if (id == Branch::GammaMinus) return -mu * mu + 0.25;
    return 0.25;
  }

  // Throws std::invalid_argument on a violated side condition.
  void check() const {
    if (!std::isfinite(q0) || q0 == 0.0) throw std::invalid_argument("q0 must be nonzero");
    if (!std::isfinite(beta) || !std::isfinite(mu)) throw std::invalid_argument("parameters must be finite");
    bool l4_only = id == Branch::GammaPlus || id == Branch::GammaMinus || id == Branch::GammaQuarter ||
                   id == Branch::X3_2X1 || id == Branch::X1 || id == Branch::GammaV0;
    if (l4_only && beta != 0.0)
      throw std::invalid_argument(branch_name(id) + " exists only for beta = 0");
    if ((id == Branch::GammaPlus || id == Branch::GammaMinus) && !(mu > 0.0))
      throw std::invalid_argument(branch_name(id) + " needs mu > 0");
  }
};

namespace detail {

template <class T>
T R3_gamma_plus(const T& y, const T& V, const T& h, const T& L, const T& R, const T& Rp,
                const T& Rpp, double q0, double mu) {
  using std::pow;
  T R23 = pow(R, 2.0 / 3.0);
  T m = T(4.0 * mu * mu + 1.0);
  T inner = (T(3.0) * (T(4.0) * (T(44.0) * V + T(5.0) * y) * y - T(19.0) * L * h) * R +
             T(308.0) * Rp * V * y * y) * Rp * Rp -
            T(3.0) * (T(88.0) * Rp * V * y * y - T(9.0) * L * h * R + T(12.0) * (T(6.0) * V + y) * R * y) *
                Rpp * R;
  T first = T(8.0) * inner * V * T(q0) * y -
            T(9.0) * R23 *
                (T(4.0) * (T(4.0) * (T(2.0) * V + y) * V - m * y * y) * y * y + (L - T(4.0) * h * V * y) * L) *
                R * R * R;
  T second = T(8.0) * (R23 * V * y * y * y + T(4.0) * L * h * T(q0)) * V * y -
             (T(2.0) * h * h + T(1.0)) * L * L * T(q0) -
             T(4.0) * (T(8.0) * (T(5.0) * V + y) * V - m * y * y) * T(q0) * y * y;
  T num = -(first * y - T(18.0) * second * Rp * R * R);
  return num / (T(288.0) * R * R * V * V * T(q0) * y * y * y * y);
}

// Shared by gamma_minus (m2 = mu^2) and gamma_quarter (m2 = 0).
template <class T>
T R3_gamma_minus(const T& y, const T& V, const T& h, const T& L, const T& R, const T& Rp,
                 const T& Rpp, double q0, double m2) {
  using std::pow;
  T R23 = pow(R, 2.0 / 3.0);
  T q(q0), y2 = y * y, y3 = y2 * y, y4 = y2 * y2;
  T num = T(528.0) * Rpp * Rp * R * V * V * q * y4 +
          T(72.0) * Rpp * R * R * V * q * y2 * (T(-3.0) * L * h + T(6.0) * V * y + y2) -
          T(616.0) * Rp * Rp * Rp * V * V * q * y4 +
          T(24.0) * Rp * Rp * R * V * q * y2 * (T(19.0) * L * h - T(44.0) * V * y - T(5.0) * y2) +
          T(18.0) * Rp * R * R *
              (T(2.0) * R23 * V * V * y4 - T(8.0) * L * L * h * h * q - T(4.0) * L * L * q +
               T(32.0) * L * h * V * q * y - T(40.0) * V * V * q * y2 - T(8.0) * V * q * y3 -
               T(4.0 * m2) * q * y4 + q * y4) +
          T(9.0) * R23 * R * R * R * y *
              (T(4.0) * L * L - T(4.0) * L * h * V * y + T(8.0) * V * V * y2 + T(4.0) * V * y3 +
               T(4.0 * m2) * y4 - y4);
  return num / (T(72.0) * R * R * V * V * q * y4);
}

template <class T>
T R3_x1(const T& y, const T& V, const T& h, const T& L, const T& R, const T& Rp, const T& Rpp,
        double q0) {
  using std::pow;
  T R23 = pow(R, 2.0 / 3.0);
  T q(q0), y2 = y * y, y3 = y2 * y, y4 = y2 * y2;
  T num = T(132.0) * Rpp * Rp * R * V * V * q * y4 +
          T(18.0) * Rpp * R * R * V * q * y2 * (T(-3.0) * L * h + T(6.0) * V * y + y2) -
          T(154.0) * Rp * Rp * Rp * V * V * q * y4 +
          T(6.0) * Rp * Rp * R * V * q * y2 * (T(19.0) * L * h - T(44.0) * V * y - T(5.0) * y2) +
          T(9.0) * Rp * R * R *
              (R23 * V * V * y4 - T(4.0) * L * L * h * h * q - T(2.0) * L * L * q +
               T(16.0) * L * h * V * q * y - T(20.0) * V * V * q * y2 - T(4.0) * V * q * y3) +
          T(9.0) * R23 * R * R * R * y * (L * L - L * h * V * y + T(2.0) * V * V * y2 + V * y3);
  return num / (T(18.0) * R * R * V * V * q * y4);
}

template <class T>
T R3_x2px0(const T& y, const T& V, const T& h, const T& L, const T& R, const T& Rp, const T& Rpp,
           double q0, double beta) {
  using std::pow;
  T R23 = pow(R, 2.0 / 3.0), R13 = pow(R, 1.0 / 3.0);
  T q(q0), y2 = y * y, y4 = y2 * y2;
  T num = T(132.0) * Rpp * Rp * R * V * V * q * y4 +
          T(54.0) * Rpp * R * R * V * q * y2 * (-L * h + T(2.0) * V * y) -
          T(154.0) * Rp * Rp * Rp * V * V * q * y4 +
          T(6.0) * Rp * Rp * R * V * q * y2 * (T(19.0) * L * h - T(44.0) * V * y) -
          T(10.0) * R13 * Rp * R * R * R * T(beta) * y4 +
          T(9.0) * Rp * R * R *
              (R23 * V * V * y4 - T(4.0) * L * L * h * h * q - T(2.0) * L * L * q +
               T(16.0) * L * h * V * q * y - T(20.0) * V * V * q * y2 + T(2.0) * q * y4) +
          T(9.0) * R23 * R * R * R * y * (L * L - L * h * V * y + T(2.0) * V * V * y2 - y4);
  return num / (T(18.0) * R * R * V * V * q * y4);
}

template <class T>
T R3_x3(const T& y, const T& V, const T& h, const T& L, const T& R, const T& Rp, const T& Rpp,
        double q0, double beta) {
  using std::pow;
  T R23 = pow(R, 2.0 / 3.0), R53 = pow(R, 5.0 / 3.0), R103 = pow(R, 10.0 / 3.0),
    R113 = pow(R, 11.0 / 3.0);
  T q(q0), w = y - T(2.0) * V, y2 = y * y, y3 = y2 * y, y4 = y2 * y2;
  T num = T(2.0) * w * w * q * y3 *
              (T(66.0) * Rpp * Rp * R * y + T(54.0) * Rpp * R * R - T(77.0) * Rp * Rp * Rp * y -
               T(132.0) * Rp * Rp * R) +
          T(9.0) * w * w * y2 * R * R * (Rp * R23 * y2 - T(20.0) * Rp * q + T(2.0) * R53 * y) -
          T(18.0) * Rp * R * R * y4 * q +
          T(6.0) * w * L * h * y *
              (T(18.0) * Rpp * R * R * q * y - T(38.0) * Rp * Rp * R * q * y - T(48.0) * Rp * R * R * q +
               T(3.0) * R23 * R * R * R * y) -
          T(72.0) * Rp * L * L * R * R * q * (T(2.0) * h * h + T(1.0)) -
          T(40.0) * R103 * Rp * T(beta) * y4 + T(36.0) * R23 * L * L * R * R * R * y +
          T(9.0) * R113 * y4 * y;
  return num / (T(18.0) * R * R * q * y4 * w * w);
}

}  // namespace detail

// Right-hand side of a reduced system in its native state layout.
template <class T>
std::vector<T> rhs(const ReducedODE& ode, const T& y, const std::vector<T>& x) {
  using std::pow;
  const double q0 = ode.q0, beta = ode.beta;
  if (is_degenerate(ode.id)) {
    const T& R = x[0];
    T R53 = pow(R, 5.0 / 3.0);
    switch (ode.id) {
      case Branch::GammaV0: return {y * R53 / T(2.0 * q0)};
      case Branch::X2pX0V0:
        return {T(-9.0) * y * R53 / (T(2.0) * (T(5.0 * beta) * pow(R, 4.0 / 3.0) - T(9.0 * q0)))};
      default:
        return {T(9.0) * y * R53 / (T(2.0) * (T(20.0 * beta) * pow(R, 4.0 / 3.0) + T(9.0 * q0)))};
    }
  }
  if (ode.id == Branch::X3_2X1) {
    const T &V = x[0], &L = x[1], &R = x[2], &h = x[3];
    T k = T(3.0) * (pow(R, 2.0 / 3.0) + T(6.0 * q0));
    T dV = L * L * (T(4.0 * q0) * (h * h - T(3.0)) + k) / k - V * V;
    return {dV, T(-2.0) * L * V, L * h * R, L * (h * h + T(1.0))};
  }
  const T &V = x[0], &h = x[1], &L = x[2], &R = x[3], &Rp = x[4], &Rpp = x[5];
  T y2 = y * y, dV, dh, dL, R3;
  switch (ode.id) {
    case Branch::GammaPlus:
      dV = -Rp / R * V + (L * h - T(8.0) * V * y) / (T(4.0) * y2);
      dh = L / V * (h * h + T(1.0)) / (T(4.0) * y2);
      dL = L / V;
      R3 = detail::R3_gamma_plus(y, V, h, L, R, Rp, Rpp, q0, ode.mu);
      break;
    case Branch::GammaMinus:
    case Branch::GammaQuarter:
      dV = -V * Rp / R + (L * h - T(2.0) * V * y) / y2;
      dh = L * (h * h + T(1.0)) / (V * y2);
      dL = L / V;
      R3 = detail::R3_gamma_minus(y, V, h, L, R, Rp, Rpp, q0,
                                  ode.id == Branch::GammaMinus ? ode.mu * ode.mu : 0.0);
      break;
    case Branch::X1:
      dV = -V * Rp / R + (L * h - T(2.0) * V * y) / y2;
      dh = L / V * (h * h + T(1.0)) / y2;
      dL = L / V;
      R3 = detail::R3_x1(y, V, h, L, R, Rp, Rpp, q0);
      break;
    case Branch::X2pX0:
      dV = -V * Rp / R + (L * h - T(2.0) * V * y) / y2;
      dh = L / V * (h * h + T(1.0)) / y2;
      dL = T(0.0);
      R3 = detail::R3_x2px0(y, V, h, L, R, Rp, Rpp, q0, beta);
      break;
    default:  // X3
      dV = (y / T(2.0) - V) * Rp / R + (T(2.0) * L * h - (T(4.0) * V - T(3.0) * y) * y) / (T(2.0) * y2);
      dh = L / (V - y / T(2.0)) * (h * h + T(1.0)) / y2;
      dL = T(0.0);
      R3 = detail::R3_x3(y, V, h, L, R, Rp, Rpp, q0, beta);
      break;
  }
  return {dV, dh, dL, Rp, Rpp, R3};
}

inline std::vector<double> rhs(const ReducedODE& ode, double y, const std::vector<double>& x) {
  return rhs<double>(ode, y, x);
}

// Second derivative of the state along a solution, by forward-mode
// differentiation of the right-hand side.
inline std::vector<double> second_derivative(const ReducedODE& ode, double y, const std::vector<double>& x,
                                             const std::vector<double>& dx) {
  std::vector<Dual> xd(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xd[i] = Dual(x[i], dx[i]);
  auto f = rhs<Dual>(ode, Dual(y, 1.0), xd);
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].d;
  return out;
}

// Distance to the nearest singular denominator of the branch, relative to the
// state scale; integration stops when this falls below a threshold.
inline std::optional<std::string> singular_reason(const ReducedODE& ode, double y,
                                                  const std::vector<double>& x, double threshold = 1e-10) {
  double scale = 1.0;
  for (double v : x) {
    if (!std::isfinite(v)) return "non-finite state";
    scale = std::max(scale, std::fabs(v));
  }
  double eps = threshold * scale;
  if (std::fabs(y) < threshold * std::max(1.0, std::fabs(y))) return "abscissa reached zero";
  double R = ode.id == Branch::X3_2X1 ? x[2] : (is_degenerate(ode.id) ? x[0] : x[3]);
  if (R < eps) return "R reached zero";
  switch (ode.id) {
    case Branch::GammaPlus:
    case Branch::GammaMinus:
    case Branch::GammaQuarter:
    case Branch::X1:
    case Branch::X2pX0:
      if (std::fabs(x[0]) < eps) return "V reached zero";
      break;
    case Branch::X3:
      if (std::fabs(x[0] - y / 2.0) < eps) return "V - y/2 reached zero";
      break;
    default:
      break;
  }
  return std::nullopt;
}

// Full (V, h, Lambda, R, R', R'') view of any native state.
struct NamedState {
  double V = 0, h = 0, Lambda = 0, R = 0, Rp = 0, Rpp = 0;
};

inline NamedState to_named(const ReducedODE& ode, double y, const std::vector<double>& x) {
  NamedState n;
  if (state_size(ode.id) == 6) return {x[0], x[1], x[2], x[3], x[4], x[5]};
  auto dx = rhs(ode, y, x);
  auto ddx = second_derivative(ode, y, x, dx);
  if (ode.id == Branch::X3_2X1) return {x[0], x[3], x[1], x[2], dx[2], ddx[2]};
  n.V = ode.id == Branch::X3V0 ? y / 2.0 : 0.0;
  n.R = x[0];
  n.Rp = dx[0];
  n.Rpp = ddx[0];
  return n;
}

inline std::vector<double> from_named(const ReducedODE& ode, const NamedState& n) {
  if (state_size(ode.id) == 6) return {n.V, n.h, n.Lambda, n.R, n.Rp, n.Rpp};
  if (ode.id == Branch::X3_2X1) return {n.V, n.Lambda, n.R, n.h};
  return {n.R};
}

namespace detail {

// Root of a u^2 + b u + c = 0 on the same branch as u_ref. The branches of
// the implicit relation are separated at u_crit where its u-derivative
// vanishes (NaN when there is no such point).
inline double quadratic_branch(double a, double b, double c, double u_ref, double u_crit) {
  if (a == 0.0) return -c / b;
  double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) throw std::domain_error("closed form has no real solution at this abscissa");
  double sq = std::sqrt(disc);
  double q = -0.5 * (b + (b >= 0 ? sq : -sq));
  double u1 = q / a, u2 = c / q;
  if (std::isnan(u_crit)) {
    if ((u1 > 0) != (u2 > 0)) return u1 > 0 ? u1 : u2;
    return std::fabs(u1 - u_ref) <= std::fabs(u2 - u_ref) ? u1 : u2;
  }
  bool side = u_ref > u_crit;
  if ((u1 > u_crit) == side && (u2 > u_crit) != side) return u1;
  if ((u2 > u_crit) == side && (u1 > u_crit) != side) return u2;
  return std::fabs(u1 - u_ref) <= std::fabs(u2 - u_ref) ? u1 : u2;
}

inline double critical_point(double a_coeff, double c_coeff) {
  // d/du (A u + C / u) = 0
  double v = c_coeff / a_coeff;
  return (a_coeff != 0.0 && v > 0.0) ? std::sqrt(v) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

// Closed-form R(y) of the separable V = 0 (or V = y/2) branches through
// (y0, R0).
inline double degenerate_closed_form(const ReducedODE& ode, double y0, double R0, double y) {
  const double q0 = ode.q0, beta = ode.beta;
  const double u0 = std::pow(R0, 2.0 / 3.0);
  double u = 0.0;
  switch (ode.id) {
    case Branch::GammaV0: {
      double v = 1.0 / u0 - (y * y - y0 * y0) / (6.0 * q0);
      if (v <= 0.0) throw std::domain_error("closed form blows up before this abscissa");
      return std::pow(v, -1.5);
    }
    case Branch::X2pX0V0: {
      // 15 beta u + 27 q0 / u = K - 9 y^2 / 2 with u = R^(2/3)
      double K = 15.0 * beta * u0 + 27.0 * q0 / u0 + 4.5 * y0 * y0;
      u = detail::quadratic_branch(15.0 * beta, -(K - 4.5 * y * y), 27.0 * q0, u0,
                                   detail::critical_point(15.0 * beta, 27.0 * q0));
      break;
    }
    case Branch::X3V0: {
      // 60 beta u - 27 q0 / u = 9 y^2 / 2 + K
      double K = 60.0 * beta * u0 - 27.0 * q0 / u0 - 4.5 * y0 * y0;
      u = detail::quadratic_branch(60.0 * beta, -(4.5 * y * y + K), -27.0 * q0, u0,
                                   detail::critical_point(60.0 * beta, -27.0 * q0));
      break;
    }
    default:
      throw std::invalid_argument("no closed form for branch " + branch_name(ode.id));
  }
  if (!(u > 0.0)) throw std::domain_error("closed form leaves R > 0");
  return std::pow(u, 1.5);
}

}  // namespace inertia

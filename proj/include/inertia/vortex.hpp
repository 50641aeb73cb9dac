#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <memory>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "inertia/expr.hpp"
#include "inertia/jet.hpp"
#include "inertia/ode.hpp"
#include "inertia/parse.hpp"
#include "inertia/potentials.hpp"
#include "inertia/reduced_systems.hpp"

namespace inertia {

// ---------------------------------------------------------------------------
// pressure closure

class PressureModel {
public:
  explicit PressureModel(PotentialSpec spec)
      : spec_(std::move(spec)),
        Wr_(differentiate(spec_.W, Var::Rho)),
        Wd_(differentiate(spec_.W, Var::RhoDot)),
        Wrd_(differentiate(spec_.W, {Var::Rho, Var::RhoDot})),
        Wdd_(differentiate(spec_.W, Var::RhoDot, 2)) {}

  double operator()(double rho, double rhodot, double D0rhodot) const {
    const auto& env = spec_.env;
    double W = evaluate(spec_.W, env, rho, rhodot);
    double Wr = evaluate(Wr_, env, rho, rhodot);
    double Wd = evaluate(Wd_, env, rho, rhodot);
    double Wrd = evaluate(Wrd_, env, rho, rhodot);
    double Wdd = evaluate(Wdd_, env, rho, rhodot);
    return rho * (Wr - rhodot * Wrd - Wdd * D0rhodot) + Wd * rhodot - W;
  }

  // Partial derivatives of p with respect to (rho, rhodot, D0 rhodot).
  std::array<double, 3> partials(double rho, double rhodot, double D0rhodot) const {
    if (!third_)
      third_ = std::array<Expr, 4>{differentiate(spec_.W, Var::Rho, 2),
                                   differentiate(spec_.W, {Var::Rho, Var::Rho, Var::RhoDot}),
                                   differentiate(spec_.W, {Var::Rho, Var::RhoDot, Var::RhoDot}),
                                   differentiate(spec_.W, Var::RhoDot, 3)};
    const auto& env = spec_.env;
    const auto& t = *third_;
    double Wdd = evaluate(Wdd_, env, rho, rhodot);
    double Wrr = evaluate(t[0], env, rho, rhodot), Wrrd = evaluate(t[1], env, rho, rhodot);
    double Wrdd = evaluate(t[2], env, rho, rhodot), Wddd = evaluate(t[3], env, rho, rhodot);
    return {rho * (Wrr - rhodot * Wrrd - Wrdd * D0rhodot) - Wdd * D0rhodot,
            rhodot * Wdd - rho * (rhodot * Wrdd + Wddd * D0rhodot), -rho * Wdd};
  }

  const PotentialSpec& spec() const { return spec_; }

private:
  PotentialSpec spec_;
  Expr Wr_, Wd_, Wrd_, Wdd_;
  mutable std::optional<std::array<Expr, 4>> third_;
};

inline double pressure(const PotentialSpec& spec, double rho, double rhodot, double D0rhodot) {
  return PressureModel(spec)(rho, rhodot, D0rhodot);
}

// W = -q0 rhodot^2 rho^(-5/3) + beta rho^(5/3), the family behind the L3/L4
// reductions.
inline PotentialSpec vortex_potential(double q0, double beta) {
  PotentialSpec s;
  s.W = parse("-q0*rhodot^2*rho^(-5/3) + beta*rho^(5/3)");
  s.env = {{"q0", q0}, {"beta", beta}};
  s.label = "vortex family";
  return s;
}

// ---------------------------------------------------------------------------
// reduced trajectories

class ExtrapolationError : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

struct ReducedTrajectory {
  ReducedODE ode;
  double tol = 1e-10;
  std::vector<double> y;
  std::vector<State> x;
  IntegratorStats stats;
  std::optional<OdeEventInfo> event;

  double y_lo() const { return std::min(y.front(), y.back()); }
  double y_hi() const { return std::max(y.front(), y.back()); }
  bool contains(double yq) const { return yq >= y_lo() && yq <= y_hi(); }

  // State at an arbitrary abscissa inside the span: one Dormand-Prince step
  // from the closest preceding accepted point.
  State state_at(double yq) const {
    if (y.empty() || !contains(yq))
      throw ExtrapolationError("abscissa " + std::to_string(yq) + " is outside the trajectory span");
    const bool up = y.back() >= y.front();
    std::size_t i;
    if (up) {
      auto it = std::upper_bound(y.begin(), y.end(), yq);
      i = static_cast<std::size_t>(it - y.begin()) - 1;
    } else {
      auto it = std::upper_bound(y.begin(), y.end(), yq, [](double a, double b) { return a > b; });
      i = static_cast<std::size_t>(it - y.begin()) - 1;
    }
    if (y[i] == yq) return x[i];
    ReducedODE o = ode;
    return dopri5_advance([o](double s, const State& v) { return rhs(o, s, v); }, y[i], x[i], yq);
  }

  std::vector<State> sample(const std::vector<double>& ys) const {
    std::vector<State> out;
    out.reserve(ys.size());
    for (double v : ys) out.push_back(state_at(v));
    return out;
  }
};

inline ReducedTrajectory integrate(const ReducedODE& ode, double y0, const State& x0, double y1,
                                   double tol = 1e-10) {
  ode.check();
  if (x0.size() != state_size(ode.id))
    throw std::invalid_argument(branch_name(ode.id) + " expects a state of size " +
                                std::to_string(state_size(ode.id)));
  if (!(tol >= 1e-13 && tol <= 1e-3)) throw std::invalid_argument("tol must lie in [1e-13, 1e-3]");
  if (auto why = singular_reason(ode, y0, x0))
    throw std::invalid_argument("initial state is singular: " + *why);
  Dopri5Options opt;
  opt.rtol = opt.atol = tol;
  ReducedODE o = ode;
  auto sol = integrate_dopri5([o](double s, const State& v) { return rhs(o, s, v); }, y0, x0, y1, opt,
                              [o](double s, const State& v) { return singular_reason(o, s, v); });
  ReducedTrajectory t;
  t.ode = ode;
  t.tol = tol;
  t.y = std::move(sol.ys);
  t.x = std::move(sol.states);
  t.stats = sol.stats;
  t.event = sol.event;
  return t;
}

// ---------------------------------------------------------------------------
// reconstruction on (t, r)

struct FieldPoint {
  double U = 0, rho = 0, alpha = 0, h = 0, H = 0, rhodot = 0, D0rhodot = 0, p = 0;
};

namespace detail {

struct BranchJets {
  Jet2 U, rho, alpha, h;
};

inline BranchJets branch_jets(const ReducedTrajectory& traj, double t, double r) {
  const ReducedODE& ode = traj.ode;
  if (is_degenerate(ode.id))
    throw std::invalid_argument("degenerate branch " + branch_name(ode.id) +
                                " has H = 0 and is not a singular vortex");
  Jet2 T = Jet2::var_t(t), Rj = Jet2::var_r(r);
  Jet2 Y, s, A;
  const double mu = ode.mu;
  switch (ode.id) {
    case Branch::GammaPlus: {
      Jet2 th = T + Jet2(0.5);
      Jet2 TT = th * th + Jet2(mu * mu);
      A = atan((Jet2(2.0) * T + Jet2(1.0)) / Jet2(2.0 * mu));
      s = pow(TT, -0.5) * exp(A / Jet2(2.0 * mu));
      Y = Rj * s;
      break;
    }
    case Branch::GammaMinus: {
      Jet2 P = T + Jet2(0.5 - mu), Q = T + Jet2(0.5 + mu);
      double a1 = (2.0 * mu - 1.0) / (4.0 * mu), a2 = (2.0 * mu + 1.0) / (4.0 * mu);
      s = pow(P, -a1) * pow(Q, -a2);
      Y = Rj * s;
      break;
    }
    case Branch::GammaQuarter: {
      Jet2 th = T + Jet2(0.5);
      s = exp(Jet2(-1.0) / (Jet2(2.0) * T + Jet2(1.0))) / th;
      Y = Rj * s;
      break;
    }
    case Branch::X3_2X1: Y = T; break;
    case Branch::X1: Y = Rj; break;
    case Branch::X2pX0:
      s = sqrt(T * T + Jet2(1.0));
      Y = Rj / s;
      break;
    default:  // X3
      Y = Rj / sqrt(T);
      break;
  }

  State x = traj.state_at(Y.v);
  State dx = rhs(ode, Y.v, x);
  State ddx = second_derivative(ode, Y.v, x, dx);
  auto comp = [&](std::size_t i) { return chain(Y, x[i], dx[i], ddx[i]); };
  Jet2 V, L, R, h;
  if (ode.id == Branch::X3_2X1) {
    V = comp(0), L = comp(1), R = comp(2), h = comp(3);
  } else {
    V = comp(0), h = comp(1), L = comp(2), R = comp(3);
  }

  BranchJets out;
  out.h = h;
  switch (ode.id) {
    case Branch::GammaPlus: {
      Jet2 th = T + Jet2(0.5);
      Jet2 TT = th * th + Jet2(mu * mu);
      out.U = (V / s + Rj * T) / TT;
      out.rho = s * s * s * R;
      out.alpha = Jet2(0.25) * L * exp(-A / Jet2(mu));
      break;
    }
    case Branch::GammaMinus: {
      Jet2 P = T + Jet2(0.5 - mu), Q = T + Jet2(0.5 + mu);
      out.U = (V / s + Rj * T) / (P * Q);
      out.rho = s * s * s * R;
      out.alpha = L * pow(P, -1.0 / (2.0 * mu)) * pow(Q, 1.0 / (2.0 * mu));
      break;
    }
    case Branch::GammaQuarter: {
      Jet2 th = T + Jet2(0.5);
      out.U = (V / s + Rj * T) / (th * th);
      out.rho = s * s * s * R;
      out.alpha = exp(Jet2(2.0) / (Jet2(2.0) * T + Jet2(1.0))) * L;
      break;
    }
    case Branch::X3_2X1:
      out.U = Rj * V;
      out.rho = pow(Rj, -3.0) * R;
      out.alpha = Rj * Rj * L;
      break;
    case Branch::X1:
      out.U = V / T;
      out.rho = R;
      out.alpha = L / T;
      break;
    case Branch::X2pX0:
      out.U = (V + Rj * T / s) / s;
      out.rho = pow(s, -3.0) * R;
      out.alpha = L;
      break;
    default:
      out.U = V / sqrt(T);
      out.rho = pow(T, -1.5) * R;
      out.alpha = L;
      break;
  }
  return out;
}

}  // namespace detail

// Pointwise field from the similarity representation. rhodot = D0 rho and
// D0 rhodot come from exact second-order jets in (t, r).
inline FieldPoint field_point(const ReducedTrajectory& traj, const PressureModel& model, double t, double r) {
  auto j = detail::branch_jets(traj, t, r);
  const Jet2 &U = j.U, &rho = j.rho;
  FieldPoint f;
  f.U = U.v;
  f.rho = rho.v;
  f.alpha = j.alpha.v;
  f.h = j.h.v;
  f.H = f.alpha / r;
  f.rhodot = rho.t + U.v * rho.r;
  double rhodot_t = rho.tt + U.t * rho.r + U.v * rho.tr;
  double rhodot_r = rho.tr + U.r * rho.r + U.v * rho.rr;
  f.D0rhodot = rhodot_t + U.v * rhodot_r;
  f.p = model(f.rho, f.rhodot, f.D0rhodot);
  return f;
}

// Largest |alpha_t + U alpha_r| over a grid, with exact jets instead of
// finite differences.
inline double material_alpha_defect(const ReducedTrajectory& traj, const std::vector<double>& t_grid,
                                    const std::vector<double>& r_grid) {
  double worst = 0.0;
  for (double t : t_grid)
    for (double r : r_grid) {
      auto j = detail::branch_jets(traj, t, r);
      worst = std::max(worst, std::fabs(j.alpha.t + j.U.v * j.alpha.r));
    }
  return worst;
}

// Value of the similarity variable y at (t, r).
inline double similarity_abscissa(const ReducedODE& ode, double t, double r) {
  const double mu = ode.mu;
  switch (ode.id) {
    case Branch::GammaPlus: {
      double T = (t + 0.5) * (t + 0.5) + mu * mu;
      return r * std::exp(std::atan((2.0 * t + 1.0) / (2.0 * mu)) / (2.0 * mu)) / std::sqrt(T);
    }
    case Branch::GammaMinus: {
      double a1 = (2.0 * mu - 1.0) / (4.0 * mu), a2 = (2.0 * mu + 1.0) / (4.0 * mu);
      return r * std::pow(t + 0.5 - mu, -a1) * std::pow(t + 0.5 + mu, -a2);
    }
    case Branch::GammaQuarter: return r * std::exp(-1.0 / (2.0 * t + 1.0)) / (t + 0.5);
    case Branch::X3_2X1: return t;
    case Branch::X1: return r;
    case Branch::X2pX0: return r / std::sqrt(t * t + 1.0);
    case Branch::X3: return r / std::sqrt(t);
    default: throw std::invalid_argument("degenerate branches have no (t, r) representation");
  }
}

struct Patch {
  double t0 = 1.0, t1 = 1.1, r0 = 1.0, r1 = 1.1;
};

// A (t, r) rectangle whose image in y stays inside the middle 80% of the
// trajectory span.
inline Patch default_patch(const ReducedTrajectory& traj, double t0 = 1.0, double t1 = 1.1, double width = 0.1) {
  double lo = traj.y_lo(), hi = traj.y_hi(), span = hi - lo;
  double ylo = lo + 0.1 * span, yhi = hi - 0.1 * span;
  Patch P;
  if (traj.ode.id == Branch::X3_2X1) {
    P.t0 = ylo;
    P.t1 = std::min(ylo + (t1 - t0), yhi);
    P.r0 = 1.0;
    P.r1 = 1.0 + width;
    return P;
  }
  P.t0 = t0;
  P.t1 = t1;
  double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0;
  for (int k = 0; k <= 20; ++k) {
    double g = similarity_abscissa(traj.ode, t0 + (t1 - t0) * k / 20.0, 1.0);
    gmin = std::min(gmin, g);
    gmax = std::max(gmax, g);
  }
  P.r0 = ylo / gmin;
  P.r1 = std::min(P.r0 + width, yhi / gmax);
  if (!(P.r1 > P.r0)) throw std::invalid_argument("trajectory span too short for a reconstruction patch");
  return P;
}

struct VortexField {
  std::vector<double> t, r;
  std::vector<double> U, H, rho, h, alpha, p, rhodot;  // row-major, index i * r.size() + j
  PotentialSpec potential;

  std::size_t idx(std::size_t i, std::size_t j) const { return i * r.size() + j; }
};

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  if (n < 2) throw std::invalid_argument("a grid needs at least two points");
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

inline VortexField reconstruct(const ReducedTrajectory& traj, const std::vector<double>& t_grid,
                               const std::vector<double>& r_grid, std::optional<PotentialSpec> spec = std::nullopt) {
  PotentialSpec pot = spec ? *spec : vortex_potential(traj.ode.q0, traj.ode.beta);
  PressureModel model(pot);
  VortexField F;
  F.t = t_grid;
  F.r = r_grid;
  F.potential = pot;
  const std::size_t n = t_grid.size() * r_grid.size();
  for (auto* a : {&F.U, &F.H, &F.rho, &F.h, &F.alpha, &F.p, &F.rhodot}) a->resize(n);
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    for (std::size_t j = 0; j < r_grid.size(); ++j) {
      FieldPoint f = field_point(traj, model, t_grid[i], r_grid[j]);
      if (f.H == 0.0) throw std::invalid_argument("H vanishes on the grid");
      if (!(f.rho > 0.0)) throw std::invalid_argument("rho is not positive on the grid");
      std::size_t k = F.idx(i, j);
      F.U[k] = f.U;
      F.H[k] = f.H;
      F.rho[k] = f.rho;
      F.h[k] = f.h;
      F.alpha[k] = f.alpha;
      F.p[k] = f.p;
      F.rhodot[k] = f.rhodot;
    }
  return F;
}

struct SpvortResidual {
  double continuity = 0, momentum = 0, h_eq = 0, alpha_eq = 0;

  double max() const { return std::max({continuity, momentum, h_eq, alpha_eq}); }
  std::array<double, 4> values() const { return {continuity, momentum, h_eq, alpha_eq}; }
  static std::array<const char*, 4> names() { return {"continuity", "momentum", "h_eq", "alpha_eq"}; }
};

namespace detail {

inline double uniform_step(const std::vector<double>& g, const char* what) {
  if (g.size() < 5) throw std::invalid_argument(std::string(what) + " grid needs at least 5 points");
  double d = (g.back() - g.front()) / static_cast<double>(g.size() - 1);
  if (!(d > 0.0)) throw std::invalid_argument(std::string(what) + " grid must be increasing");
  for (std::size_t i = 1; i < g.size(); ++i)
    if (std::fabs((g[i] - g[i - 1]) - d) > 1e-9 * std::max(std::fabs(d), 1e-300) + 1e-12 * std::fabs(g[i]))
      throw std::invalid_argument(std::string(what) + " grid is not uniform");
  return d;
}

}  // namespace detail

// Max-abs residuals of the four reduced PDEs over interior points, with
// second-order central differences.
inline SpvortResidual residual_spvort(const VortexField& F) {
  const double dt = detail::uniform_step(F.t, "t"), dr = detail::uniform_step(F.r, "r");
  const std::size_t nt = F.t.size(), nr = F.r.size();
  SpvortResidual res;
  auto Dt = [&](const std::vector<double>& a, std::size_t i, std::size_t j) {
    return (a[F.idx(i + 1, j)] - a[F.idx(i - 1, j)]) / (2.0 * dt);
  };
  auto Dr = [&](const std::vector<double>& a, std::size_t i, std::size_t j) {
    return (a[F.idx(i, j + 1)] - a[F.idx(i, j - 1)]) / (2.0 * dr);
  };
  for (std::size_t i = 1; i + 1 < nt; ++i)
    for (std::size_t j = 1; j + 1 < nr; ++j) {
      std::size_t k = F.idx(i, j);
      double r = F.r[j], U = F.U[k], rho = F.rho[k], a = F.alpha[k], h = F.h[k];
      auto D0 = [&](const std::vector<double>& f) { return Dt(f, i, j) + U * Dr(f, i, j); };
      double r2U_r = ((F.r[j + 1] * F.r[j + 1]) * F.U[F.idx(i, j + 1)] -
                      (F.r[j - 1] * F.r[j - 1]) * F.U[F.idx(i, j - 1)]) /
                     (2.0 * dr);
      double c = r * r * D0(F.rho) + rho * r2U_r - rho * a * h;
      double m = D0(F.U) + Dr(F.p, i, j) / rho - a * a / (r * r * r);
      double he = D0(F.h) - a * (h * h + 1.0) / (r * r);
      double ae = D0(F.alpha);
      res.continuity = std::max(res.continuity, std::fabs(c));
      res.momentum = std::max(res.momentum, std::fabs(m));
      res.h_eq = std::max(res.h_eq, std::fabs(he));
      res.alpha_eq = std::max(res.alpha_eq, std::fabs(ae));
    }
  return res;
}

// ---------------------------------------------------------------------------
// steady closure

class ClosureDegenerate : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

template <class T>
struct BasicSteadyState {
  T rho{}, U{}, Up{}, rhop{}, rhopp{}, rhodot{}, D0rhodot{};
};
using SteadyState = BasicSteadyState<double>;

// rho = R0 h'/sqrt(h^2+1) and U = alpha0 (h^2+1)/(r^2 h'), the form that
// satisfies r^2 U rho' + rho (r^2 U)' = rho alpha h identically.
template <class T>
BasicSteadyState<T> steady_state(double alpha0, double R0, const T& r, const T& h, const T& h1, const T& h2,
                                 const T& h3) {
  using std::sqrt;
  BasicSteadyState<T> s;
  T q = h * h + T(1.0), sq = sqrt(q), r2 = r * r;
  s.rho = T(R0) * h1 / sq;
  s.U = T(alpha0) * q / (r2 * h1);
  s.rhop = T(R0) * (h2 / sq - h * h1 * h1 / (q * sq));
  s.rhopp = T(R0) * (h3 / sq - h * h1 * h2 / (q * sq) - (h1 * h1 * h1 + T(2.0) * h * h1 * h2) / (q * sq) +
                     T(3.0) * h * h * h1 * h1 * h1 / (q * q * sq));
  s.Up = T(alpha0) * (T(2.0) * h * h1 / (r2 * h1) - T(2.0) * q / (r2 * r * h1) - q * h2 / (r2 * h1 * h1));
  s.rhodot = s.U * s.rhop;
  T rhodot_p = s.Up * s.rhop + s.U * s.rhopp;
  s.D0rhodot = s.U * rhodot_p;
  return s;
}

inline double steady_pressure(const PressureModel& model, double alpha0, double R0, double r, double h, double h1,
                              double h2, double h3) {
  SteadyState s = steady_state(alpha0, R0, r, h, h1, h2, h3);
  return model(s.rho, s.rhodot, s.D0rhodot);
}

// Solves the steady momentum equation U U' + p'/rho = alpha0^2 / r^3 for h''''.
// p' is affine in h'''', so it is evaluated exactly at h'''' = 0 and 1.
inline double steady_rhs(const PressureModel& model, double alpha0, double R0, double r, double h, double h1,
                         double h2, double h3) {
  if (h1 == 0.0) throw std::invalid_argument("steady closure needs h' != 0");
  if (alpha0 == 0.0) throw std::invalid_argument("steady closure needs alpha0 != 0");
  auto along = [&](double h4) {
    return steady_state<Dual>(alpha0, R0, Dual(r, 1.0), Dual(h, h1), Dual(h1, h2), Dual(h2, h3), Dual(h3, h4));
  };
  BasicSteadyState<Dual> s0 = along(0.0), s1 = along(1.0);
  auto [Pr, Pd, PD] = model.partials(s0.rho.v, s0.rhodot.v, s0.D0rhodot.v);
  double c0 = Pr * s0.rho.d + Pd * s0.rhodot.d + PD * s0.D0rhodot.d;
  double c1 = PD * (s1.D0rhodot.d - s0.D0rhodot.d);
  double scale = std::max({1.0, std::fabs(c0), std::fabs(Pr * s0.rho.v), std::fabs(Pd * s0.rhodot.v)});
  if (!std::isfinite(c1) || std::fabs(c1) < 1e-12 * scale) throw ClosureDegenerate("coefficient of h'''' vanishes");
  double target = s0.rho.v * (alpha0 * alpha0 / (r * r * r) - s0.U.v * s0.Up.v);
  return (target - c0) / c1;
}

inline double steady_rhs(const PotentialSpec& spec, double alpha0, double R0, double r, double h, double h1,
                         double h2, double h3) {
  return steady_rhs(PressureModel(spec), alpha0, R0, r, h, h1, h2, h3);
}

struct SteadyTrajectory {
  std::shared_ptr<const PressureModel> model;
  double alpha0 = 1.0, R0 = 1.0;
  std::vector<double> r;
  std::vector<State> h;  // (h, h', h'', h''')
  IntegratorStats stats;
  std::optional<OdeEventInfo> event;

  State rhs_at(double rr, const State& v) const {
    return {v[1], v[2], v[3], steady_rhs(*model, alpha0, R0, rr, v[0], v[1], v[2], v[3])};
  }

  State state_at(double rq) const {
    double lo = std::min(r.front(), r.back()), hi = std::max(r.front(), r.back());
    if (!(rq >= lo && rq <= hi))
      throw ExtrapolationError("radius " + std::to_string(rq) + " is outside the steady trajectory span");
    std::size_t i = 0;
    const bool up = r.back() >= r.front();
    for (std::size_t k = 0; k < r.size(); ++k)
      if (up ? r[k] <= rq : r[k] >= rq) i = k;
    if (r[i] == rq) return h[i];
    return dopri5_advance([this](double s, const State& v) { return rhs_at(s, v); }, r[i], h[i], rq);
  }
};

inline SteadyTrajectory integrate_steady(const PotentialSpec& spec, double alpha0, double R0, double r0,
                                         const State& h0, double r1, double tol = 1e-8) {
  if (h0.size() != 4) throw std::invalid_argument("steady state needs (h, h', h'', h''')");
  if (!(r0 > 0.0) || !(r1 > 0.0)) throw std::invalid_argument("steady integration needs r > 0");
  if (alpha0 == 0.0) throw std::invalid_argument("steady closure needs alpha0 != 0");
  SteadyTrajectory out;
  out.model = std::make_shared<PressureModel>(spec);
  out.alpha0 = alpha0;
  out.R0 = R0;
  auto model = out.model;
  auto safe = [model, alpha0, R0](double r, const State& v) -> State {
    try {
      return {v[1], v[2], v[3], steady_rhs(*model, alpha0, R0, r, v[0], v[1], v[2], v[3])};
    } catch (const std::exception&) {
      double nan = std::numeric_limits<double>::quiet_NaN();
      return {nan, nan, nan, nan};
    }
  };
  auto ev = [](double, const State& v) -> std::optional<std::string> {
    for (double x : v)
      if (!std::isfinite(x)) return std::string("non-finite state");
    if (std::fabs(v[1]) < 1e-10 * std::max(1.0, std::fabs(v[0]))) return std::string("h' reached zero");
    return std::nullopt;
  };
  Dopri5Options opt;
  opt.rtol = opt.atol = tol;
  auto sol = integrate_dopri5(safe, r0, h0, r1, opt, ev);
  out.r = std::move(sol.ys);
  out.h = std::move(sol.states);
  out.stats = sol.stats;
  out.event = sol.event;
  return out;
}

// Time-independent field built from a steady profile h(r).
inline VortexField reconstruct_steady(const SteadyTrajectory& traj, const std::vector<double>& t_grid,
                                      const std::vector<double>& r_grid) {
  VortexField F;
  F.t = t_grid;
  F.r = r_grid;
  F.potential = traj.model->spec();
  const std::size_t n = t_grid.size() * r_grid.size();
  for (auto* a : {&F.U, &F.H, &F.rho, &F.h, &F.alpha, &F.p, &F.rhodot}) a->resize(n);
  for (std::size_t j = 0; j < r_grid.size(); ++j) {
    double r = r_grid[j];
    State v = traj.state_at(r);
    SteadyState s = steady_state(traj.alpha0, traj.R0, r, v[0], v[1], v[2], v[3]);
    double p = (*traj.model)(s.rho, s.rhodot, s.D0rhodot);
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
      std::size_t k = F.idx(i, j);
      F.U[k] = s.U;
      F.rho[k] = s.rho;
      F.h[k] = v[0];
      F.alpha[k] = traj.alpha0;
      F.H[k] = traj.alpha0 / r;
      F.p[k] = p;
      F.rhodot[k] = s.rhodot;
    }
  }
  return F;
}

// ---------------------------------------------------------------------------
// spherical decomposition

struct Vec3 {
  double x = 0, y = 0, z = 0;
};

// (U, U2, U3) are the components along e_r, e_theta, e_phi.
inline Vec3 spherical_to_cartesian(double U, double U2, double U3, double theta, double phi) {
  double st = std::sin(theta), ct = std::cos(theta), sp = std::sin(phi), cp = std::cos(phi);
  return {U * st * cp + U2 * ct * cp - U3 * sp, U * st * sp + U2 * ct * sp + U3 * cp, U * ct - U2 * st};
}

inline std::array<double, 3> cartesian_to_spherical(const Vec3& v, double theta, double phi) {
  double st = std::sin(theta), ct = std::cos(theta), sp = std::sin(phi), cp = std::cos(phi);
  return {v.x * st * cp + v.y * st * sp + v.z * ct, v.x * ct * cp + v.y * ct * sp - v.z * st,
          -v.x * sp + v.y * cp};
}

struct VelocitySample {
  double t, r, theta, phi;
  Vec3 velocity;
};

using PhaseFunction = std::function<double(double t, double r, double theta, double phi)>;

// Cartesian velocity on a (t, r, theta, phi) grid; the phase omega is supplied
// by the caller.
inline std::vector<VelocitySample> reconstruct3d(const VortexField& F, const PhaseFunction& omega,
                                                 const std::vector<double>& thetas, const std::vector<double>& phis) {
  for (double th : thetas)
    if (std::fabs(std::sin(th)) < 1e-12) throw std::invalid_argument("theta grid must exclude the poles");
  std::vector<VelocitySample> out;
  out.reserve(F.t.size() * F.r.size() * thetas.size() * phis.size());
  for (std::size_t i = 0; i < F.t.size(); ++i)
    for (std::size_t j = 0; j < F.r.size(); ++j) {
      std::size_t k = F.idx(i, j);
      for (double th : thetas)
        for (double ph : phis) {
          double w = omega(F.t[i], F.r[j], th, ph);
          out.push_back({F.t[i], F.r[j], th, ph,
                         spherical_to_cartesian(F.U[k], F.H[k] * std::cos(w), F.H[k] * std::sin(w), th, ph)});
        }
    }
  return out;
}

// ---------------------------------------------------------------------------
// trajectory CSV

inline void write_trajectory_csv(std::ostream& os, const ReducedTrajectory& traj,
                                 const std::vector<double>& ys = {}) {
  os << std::setprecision(17);
  os << "# subalgebra=" << branch_name(traj.ode.id) << " q0=" << traj.ode.q0 << " beta=" << traj.ode.beta
     << " mu=" << traj.ode.mu << " tol=" << traj.tol << " steps=" << traj.stats.steps
     << " rejected=" << traj.stats.rejected << " min_step=" << traj.stats.min_step;
  if (traj.event) os << " event_y=" << traj.event->y << " event=\"" << traj.event->reason << "\"";
  os << "\n";
  os << "y,V,h,Lambda,R,Rp,Rpp\n";
  auto row = [&](double y, const State& x) {
    NamedState n = to_named(traj.ode, y, x);
    os << y << "," << n.V << "," << n.h << "," << n.Lambda << "," << n.R << "," << n.Rp << "," << n.Rpp << "\n";
  };
  if (ys.empty()) {
    for (std::size_t i = 0; i < traj.y.size(); ++i) row(traj.y[i], traj.x[i]);
  } else {
    for (double y : ys) row(y, traj.state_at(y));
  }
}

struct TrajectoryFile {
  ReducedODE ode;
  double tol = 1e-10;
  std::vector<double> y;
  std::vector<NamedState> rows;
};

inline TrajectoryFile read_trajectory_csv(std::istream& in) {
  TrajectoryFile f;
  std::string line;
  std::map<std::string, std::string> meta;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string tok;
      while (ss >> tok) {
        auto eq = tok.find('=');
        if (eq != std::string::npos) meta[tok.substr(0, eq)] = tok.substr(eq + 1);
      }
      continue;
    }
    if (!header) {
      if (line.rfind("y,V,h,Lambda,R,Rp,Rpp", 0) != 0) throw std::invalid_argument("unexpected CSV header");
      header = true;
      continue;
    }
    std::istringstream ss(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    if (v.size() != 7) throw std::invalid_argument("trajectory rows need 7 columns");
    f.y.push_back(v[0]);
    f.rows.push_back({v[1], v[2], v[3], v[4], v[5], v[6]});
  }
  if (!meta.count("subalgebra")) throw std::invalid_argument("trajectory file lacks the subalgebra metadata");
  auto b = branch_from_name(meta["subalgebra"]);
  if (!b) throw std::invalid_argument("unknown subalgebra '" + meta["subalgebra"] + "'");
  f.ode.id = *b;
  if (meta.count("q0")) f.ode.q0 = std::stod(meta["q0"]);
  if (meta.count("beta")) f.ode.beta = std::stod(meta["beta"]);
  if (meta.count("mu")) f.ode.mu = std::stod(meta["mu"]);
  if (meta.count("tol")) f.tol = std::stod(meta["tol"]);
  if (f.y.size() < 2) throw std::invalid_argument("trajectory file needs at least two rows");
  return f;
}

// Re-integrates from the first row over the file's span.
inline ReducedTrajectory trajectory_from_file(const TrajectoryFile& f) {
  return integrate(f.ode, f.y.front(), from_named(f.ode, f.rows.front()), f.y.back(), f.tol);
}

}  // namespace inertia

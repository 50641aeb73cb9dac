#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace inertia {

using State = std::vector<double>;
using OdeRhs = std::function<State(double, const State&)>;
// Returns a reason when integration must stop at this accepted point.
using OdeEvent = std::function<std::optional<std::string>(double, const State&)>;

struct IntegratorStats {
  std::size_t steps = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
  double min_step = std::numeric_limits<double>::infinity();
};

struct OdeEventInfo {
  double y = 0.0;
  std::string reason;
};

struct OdeSolution {
  std::vector<double> ys;
  std::vector<State> states;
  IntegratorStats stats;
  std::optional<OdeEventInfo> event;
  bool reached_end() const { return !event.has_value(); }
};

struct Dopri5Options {
  double rtol = 1e-10;
  double atol = 1e-10;
  double initial_step = 0.0;  // 0 picks one automatically
  double max_step = 0.0;      // 0 means unlimited
  std::size_t max_steps = 2000000;
};

namespace dopri {

inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

struct StepResult {
  State y;    // fifth-order solution
  State err;  // embedded error estimate
  State f7;   // rhs at the new point (first stage of the next step)
};

inline StepResult step(const OdeRhs& f, double x, const State& y, const State& k1, double h) {
  const std::size_t n = y.size();
  State tmp(n);
  auto stage = [&](std::initializer_list<std::pair<double, const State*>> terms) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (const auto& [c, k] : terms) s += c * (*k)[i];
      tmp[i] = y[i] + h * s;
    }
    return tmp;
  };
  State k2 = f(x + c2 * h, stage({{a21, &k1}}));
  State k3 = f(x + c3 * h, stage({{a31, &k1}, {a32, &k2}}));
  State k4 = f(x + c4 * h, stage({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
  State k5 = f(x + c5 * h, stage({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
  State k6 = f(x + h, stage({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
  StepResult r;
  r.y = stage({{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
  r.f7 = f(x + h, r.y);
  r.err.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    r.err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * r.f7[i]);
  return r;
}

inline bool all_finite(const State& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline double error_norm(const State& err, const State& y0, const State& y1, double atol,
                         double rtol) {
  double s = 0.0;
  for (std::size_t i = 0; i < err.size(); ++i) {
    double sc = atol + rtol * std::max(std::fabs(y0[i]), std::fabs(y1[i]));
    double e = err[i] / sc;
    s += e * e;
  }
  return std::sqrt(s / static_cast<double>(err.size()));
}

// Starting step heuristic from Hairer, Norsett and Wanner.
inline double initial_step(const OdeRhs& f, double x, const State& y, const State& f0, double dir,
                           const Dopri5Options& o) {
  const std::size_t n = y.size();
  double d0 = 0, d1 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double sc = o.atol + o.rtol * std::fabs(y[i]);
    d0 += (y[i] / sc) * (y[i] / sc);
    d1 += (f0[i] / sc) * (f0[i] / sc);
  }
  d0 = std::sqrt(d0 / n);
  d1 = std::sqrt(d1 / n);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  State y1(n);
  for (std::size_t i = 0; i < n; ++i) y1[i] = y[i] + dir * h0 * f0[i];
  State f1 = f(x + dir * h0, y1);
  double d2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double sc = o.atol + o.rtol * std::fabs(y[i]);
    d2 += ((f1[i] - f0[i]) / sc) * ((f1[i] - f0[i]) / sc);
  }
  d2 = std::sqrt(d2 / n) / h0;
  if (!std::isfinite(d2)) return h0 * 1e-3;
  double m = std::max(d1, d2);
  double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 1.0 / 5.0);
  return std::min(100.0 * h0, h1);
}

}  // namespace dopri

// Adaptive Dormand-Prince 5(4) from x0 to x1 (either direction).
inline OdeSolution integrate_dopri5(const OdeRhs& f, double x0, const State& y0, double x1,
                                    const Dopri5Options& opt = {}, const OdeEvent& event = {}) {
  if (!(opt.rtol > 0) || !(opt.atol > 0)) throw std::invalid_argument("tolerances must be positive");
  OdeSolution sol;
  sol.ys.push_back(x0);
  sol.states.push_back(y0);
  if (!dopri::all_finite(y0)) throw std::invalid_argument("initial state is not finite");
  if (event) {
    if (auto why = event(x0, y0)) {
      sol.event = OdeEventInfo{x0, *why};
      return sol;
    }
  }
  if (x1 == x0) return sol;
  const double dir = x1 > x0 ? 1.0 : -1.0;
  double x = x0;
  State y = y0;
  State k1 = f(x, y);
  sol.stats.rhs_evals = 1;
  if (!dopri::all_finite(k1)) {
    sol.event = OdeEventInfo{x0, "non-finite right-hand side"};
    return sol;
  }
  double h = opt.initial_step > 0 ? opt.initial_step : dopri::initial_step(f, x, y, k1, dir, opt);
  sol.stats.rhs_evals += 1;
  bool last_rejected = false;

  while (dir * (x1 - x) > 0) {
    if (sol.stats.steps + sol.stats.rejected >= opt.max_steps) {
      sol.event = OdeEventInfo{x, "maximum number of steps reached"};
      return sol;
    }
    if (opt.max_step > 0) h = std::min(h, opt.max_step);
    bool final_step = false;
    if (h >= dir * (x1 - x)) {
      h = dir * (x1 - x);
      final_step = true;
    }
    if (h < 1e-14 * std::max(1.0, std::fabs(x))) {
      sol.event = OdeEventInfo{x, "step size underflow"};
      return sol;
    }
    auto r = dopri::step(f, x, y, k1, dir * h);
    sol.stats.rhs_evals += 6;
    double err = std::numeric_limits<double>::infinity();
    if (dopri::all_finite(r.y) && dopri::all_finite(r.f7))
      err = dopri::error_norm(r.err, y, r.y, opt.atol, opt.rtol);
    if (!std::isfinite(err)) {
      h *= 0.2;
      ++sol.stats.rejected;
      last_rejected = true;
      continue;
    }
    double fac = err == 0.0 ? 10.0 : 0.9 * std::pow(err, -0.2);
    fac = std::clamp(fac, 0.2, 10.0);
    if (err <= 1.0) {
      x = final_step ? x1 : x + dir * h;
      y = std::move(r.y);
      k1 = std::move(r.f7);
      ++sol.stats.steps;
      sol.stats.min_step = std::min(sol.stats.min_step, h);
      sol.ys.push_back(x);
      sol.states.push_back(y);
      if (event) {
        if (auto why = event(x, y)) {
          sol.ys.pop_back();
          sol.states.pop_back();
          sol.event = OdeEventInfo{x, *why};
          return sol;
        }
      }
      if (last_rejected) fac = std::min(fac, 1.0);
      last_rejected = false;
      h *= fac;
    } else {
      ++sol.stats.rejected;
      last_rejected = true;
      h *= std::min(fac, 1.0);
    }
  }
  return sol;
}

// One fifth-order step of length x - xa from a known point; used to sample a
// trajectory between accepted points.
inline State dopri5_advance(const OdeRhs& f, double xa, const State& ya, double x) {
  if (x == xa) return ya;
  State k1 = f(xa, ya);
  return dopri::step(f, xa, ya, k1, x - xa).y;
}

}  // namespace inertia

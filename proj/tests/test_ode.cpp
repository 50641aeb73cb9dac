#include <gtest/gtest.h>

#include <cmath>

#include "inertia/ode.hpp"

using namespace inertia;

TEST(Dopri5, Exponential) {
  auto sol = integrate_dopri5([](double, const State& y) { return State{y[0]}; }, 0.0, {1.0}, 1.0);
  ASSERT_TRUE(sol.reached_end());
  EXPECT_DOUBLE_EQ(sol.ys.back(), 1.0);
  EXPECT_NEAR(sol.states.back()[0], std::exp(1.0), 1e-9);
}

TEST(Dopri5, HarmonicOscillatorBackwards) {
  auto f = [](double, const State& y) { return State{y[1], -y[0]}; };
  auto sol = integrate_dopri5(f, 2.0, {std::sin(2.0), std::cos(2.0)}, -1.0);
  ASSERT_TRUE(sol.reached_end());
  EXPECT_NEAR(sol.states.back()[0], std::sin(-1.0), 1e-9);
  EXPECT_NEAR(sol.states.back()[1], std::cos(-1.0), 1e-9);
  for (std::size_t i = 1; i < sol.ys.size(); ++i) EXPECT_LT(sol.ys[i], sol.ys[i - 1]);
}

TEST(Dopri5, TighterToleranceIsMoreAccurate) {
  auto f = [](double x, const State& y) { return State{-2.0 * x * y[0]}; };
  double prev = 1.0;
  for (double tol : {1e-4, 1e-7, 1e-10}) {
    Dopri5Options opt;
    opt.rtol = opt.atol = tol;
    auto sol = integrate_dopri5(f, 0.0, {1.0}, 2.0, opt);
    double err = std::fabs(sol.states.back()[0] - std::exp(-4.0));
    EXPECT_LT(err, 100 * tol);
    EXPECT_LE(err, prev);
    prev = err;
  }
}

TEST(Dopri5, EventStopsBeforeSingularity) {
  // y' = y^2, y(0) = 1 blows up at x = 1
  auto f = [](double, const State& y) { return State{y[0] * y[0]}; };
  auto ev = [](double, const State& y) -> std::optional<std::string> {
    if (y[0] > 1e3) return std::string("too large");
    return std::nullopt;
  };
  auto sol = integrate_dopri5(f, 0.0, {1.0}, 2.0, {}, ev);
  ASSERT_TRUE(sol.event);
  EXPECT_EQ(sol.event->reason, "too large");
  EXPECT_LT(sol.event->y, 1.0);
  EXPECT_GT(sol.event->y, 0.99);
  for (const auto& s : sol.states) EXPECT_LE(s[0], 1e3);
}

TEST(Dopri5, NonFiniteRhsEndsWithEvent) {
  auto f = [](double, const State& y) { return State{-0.5 / std::sqrt(y[0])}; };
  // y' = -1/(2 sqrt y), y(0) = 1 reaches 0 at x = 4/3
  auto sol = integrate_dopri5(f, 0.0, {1.0}, 3.0);
  ASSERT_TRUE(sol.event);
  EXPECT_NEAR(sol.event->y, 4.0 / 3.0, 1e-3);
  for (const auto& s : sol.states) EXPECT_TRUE(std::isfinite(s[0]));
}

TEST(Dopri5, MaxSteps) {
  Dopri5Options opt;
  opt.max_steps = 3;
  auto sol = integrate_dopri5([](double, const State& y) { return State{std::cos(50 * y[0])}; }, 0.0, {0.0}, 10.0, opt);
  ASSERT_TRUE(sol.event);
  EXPECT_LE(sol.stats.steps, 3u);
}

TEST(Dopri5, RejectsBadInput) {
  auto f = [](double, const State& y) { return y; };
  Dopri5Options bad;
  bad.rtol = 0;
  EXPECT_THROW(integrate_dopri5(f, 0, {1}, 1, bad), std::invalid_argument);
  EXPECT_THROW(integrate_dopri5(f, 0, {NAN}, 1), std::invalid_argument);
}

TEST(Dopri5, AdvanceIsFifthOrder) {
  auto f = [](double, const State& y) { return State{y[0]}; };
  double e1 = std::fabs(dopri5_advance(f, 0.0, {1.0}, 0.2)[0] - std::exp(0.2));
  double e2 = std::fabs(dopri5_advance(f, 0.0, {1.0}, 0.1)[0] - std::exp(0.1));
  EXPECT_GT(e1 / e2, 40.0);  // local error ~ h^6
}

TEST(Dopri5, StatsAreCounted) {
  auto sol = integrate_dopri5([](double, const State& y) { return State{-y[0]}; }, 0.0, {1.0}, 5.0);
  EXPECT_EQ(sol.stats.steps + 1, sol.ys.size());
  EXPECT_GT(sol.stats.rhs_evals, 6 * sol.stats.steps);
  EXPECT_GT(sol.stats.min_step, 0.0);
}

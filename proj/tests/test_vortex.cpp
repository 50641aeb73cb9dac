#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "inertia/vortex.hpp"
#include "oracles.hpp"
#include "vortex_cases.hpp"

using namespace inertia;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::max({1.0, std::fabs(a), std::fabs(b)}); }

}  // namespace

// ---------------------------------------------------------------------------
// double-entry check of the reduced right-hand sides

TEST(ReducedRhs, MatchesSecondTranscription) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> Y(0.5, 3.0), P(0.2, 2.0), S(-1.5, 1.5), Q(0.3, 2.0), M(0.2, 1.5);
  for (Branch b : {Branch::GammaPlus, Branch::GammaMinus, Branch::GammaQuarter, Branch::X1, Branch::X2pX0,
                   Branch::X3}) {
    for (int n = 0; n < 1000; ++n) {
      ReducedODE ode;
      ode.id = b;
      ode.q0 = Q(rng);
      ode.mu = M(rng);
      if (b == Branch::X2pX0 || b == Branch::X3) ode.beta = S(rng);
      double y = Y(rng), V = P(rng) * (n % 2 ? 1 : -1), h = S(rng), L = S(rng), R = P(rng), Rp = S(rng),
             Rpp = S(rng);
      if (b == Branch::X3 && std::fabs(V - y / 2) < 0.05) V += 0.2;
      auto got = rhs(ode, y, State{V, h, L, R, Rp, Rpp});
      oracle::Out want;
      switch (b) {
        case Branch::GammaPlus: want = oracle::gamma_plus(y, V, h, L, R, Rp, Rpp, ode.q0, ode.mu); break;
        case Branch::GammaMinus: want = oracle::gamma_minus(y, V, h, L, R, Rp, Rpp, ode.q0, ode.mu * ode.mu); break;
        case Branch::GammaQuarter: want = oracle::gamma_minus(y, V, h, L, R, Rp, Rpp, ode.q0, 0.0); break;
        case Branch::X1: want = oracle::x1(y, V, h, L, R, Rp, Rpp, ode.q0); break;
        case Branch::X2pX0: want = oracle::x2px0(y, V, h, L, R, Rp, Rpp, ode.q0, ode.beta); break;
        default: want = oracle::x3(y, V, h, L, R, Rp, Rpp, ode.q0, ode.beta); break;
      }
      ASSERT_LT(rel(got[0], want[0]), 1e-12) << branch_name(b);
      ASSERT_LT(rel(got[1], want[1]), 1e-12) << branch_name(b);
      ASSERT_LT(rel(got[2], want[2]), 1e-12) << branch_name(b);
      ASSERT_EQ(got[3], Rp);
      ASSERT_EQ(got[4], Rpp);
      ASSERT_LT(rel(got[5], want[3]), 1e-10) << branch_name(b);
    }
  }
}

TEST(ReducedRhs, X3_2X1MatchesSecondTranscription) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> S(-2, 2), P(0.1, 3), Q(0.2, 2);
  ReducedODE ode;
  ode.id = Branch::X3_2X1;
  for (int n = 0; n < 1000; ++n) {
    ode.q0 = Q(rng);
    double V = S(rng), L = S(rng), R = P(rng), h = S(rng);
    auto got = rhs(ode, 1.0, State{V, L, R, h});
    auto want = oracle::x3_2x1(V, L, R, h, ode.q0);
    for (int k = 0; k < 4; ++k) ASSERT_LT(rel(got[k], want[k]), 1e-13);
  }
}

TEST(ReducedRhs, LambdaZeroFreezesHAndLambda) {
  ReducedODE a;
  a.id = Branch::X3_2X1;
  auto d = rhs(a, 1.3, State{0.7, 0.0, 2.0, -0.4});
  EXPECT_DOUBLE_EQ(d[0], -0.49);
  EXPECT_EQ(d[1], 0.0);
  EXPECT_EQ(d[2], 0.0);
  EXPECT_EQ(d[3], 0.0);
  ReducedODE g = cases::reduced(Branch::GammaPlus);
  auto e = rhs(g, 1.1, State{0.5, 0.3, 0.0, 1.0, 0.1, 0.0});
  EXPECT_EQ(e[1], 0.0);
  EXPECT_EQ(e[2], 0.0);
}

TEST(ReducedRhs, ParameterChecks) {
  ReducedODE o;
  o.id = Branch::X1;
  o.beta = 0.2;
  EXPECT_THROW(o.check(), std::invalid_argument);
  o.id = Branch::GammaPlus;
  o.beta = 0;
  o.mu = 0;
  EXPECT_THROW(o.check(), std::invalid_argument);
  o.mu = 0.3;
  o.q0 = 0;
  EXPECT_THROW(o.check(), std::invalid_argument);
  EXPECT_EQ(branch_from_name("S_X3_2X1"), Branch::X3_2X1);
  EXPECT_FALSE(branch_from_name("X7"));
}

TEST(ReducedRhs, SecondDerivativeMatchesFiniteDifference) {
  ReducedODE ode = cases::reduced(Branch::X1);
  State x{0.5, 0.3, 0.2, 1.0, 0.1, 0.0};
  double y = 1.2, e = 1e-5;
  auto dx = rhs(ode, y, x);
  auto dd = second_derivative(ode, y, x, dx);
  State xp = x, xm = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp[i] += e * dx[i];
    xm[i] -= e * dx[i];
  }
  auto fp = rhs(ode, y + e, xp), fm = rhs(ode, y - e, xm);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(dd[i], (fp[i] - fm[i]) / (2 * e), 1e-6);
}

// ---------------------------------------------------------------------------
// integration

TEST(Integrate, X3_2X1ConstantState) {
  ReducedODE ode;
  ode.id = Branch::X3_2X1;
  auto tr = integrate(ode, 1.0, {0.0, 0.0, 1.0, 0.0}, 2.0);
  ASSERT_FALSE(tr.event);
  for (const auto& s : tr.x) {
    EXPECT_EQ(s[0], 0.0);
    EXPECT_EQ(s[1], 0.0);
    EXPECT_EQ(s[2], 1.0);
    EXPECT_EQ(s[3], 0.0);
  }
}

TEST(Integrate, GammaV0ClosedForm) {
  ReducedODE ode;
  ode.id = Branch::GammaV0;
  EXPECT_NEAR(degenerate_closed_form(ode, 1.0, 1.0, 2.0), 2.0 * std::sqrt(2.0), 1e-14);
  auto tr = integrate(ode, 1.0, {1.0}, 2.0);
  ASSERT_FALSE(tr.event);
  EXPECT_NEAR(tr.x.back()[0], 2.8284271247461903, 1e-8);
  for (std::size_t i = 0; i < tr.y.size(); ++i)
    EXPECT_NEAR(tr.x[i][0], degenerate_closed_form(ode, 1.0, 1.0, tr.y[i]), 1e-8 * tr.x[i][0]);
}

TEST(Integrate, DegenerateBranchesAgainstClosedForms) {
  struct Case {
    Branch b;
    double q0, beta, R0;
  };
  for (Case c : {Case{Branch::GammaV0, 0.7, 0.0, 0.5}, Case{Branch::X2pX0V0, 1.0, 0.0, 1.0},
                 Case{Branch::X2pX0V0, 1.0, 0.05, 1.0}, Case{Branch::X2pX0V0, 1.0, -0.3, 1.0},
                 Case{Branch::X2pX0V0, -1.0, 0.4, 0.8},
                 Case{Branch::X3V0, 1.0, 0.0, 1.0}, Case{Branch::X3V0, 1.0, 0.25, 1.5}}) {
    ReducedODE ode;
    ode.id = c.b;
    ode.q0 = c.q0;
    ode.beta = c.beta;
    auto tr = integrate(ode, 1.0, {c.R0}, 2.0);
    ASSERT_FALSE(tr.event) << branch_name(c.b) << " " << tr.event->reason;
    for (double y : linspace(1.0, 2.0, 21))
      EXPECT_NEAR(tr.state_at(y)[0], degenerate_closed_form(ode, 1.0, c.R0, y), 1e-8)
          << branch_name(c.b) << " beta=" << c.beta << " y=" << y;
  }
}

TEST(Integrate, DegenerateFoldIsFlagged) {
  // 5 beta R^{4/3} = 9 q0 is reached near y = 1.76 for beta = 0.3
  ReducedODE ode;
  ode.id = Branch::X2pX0V0;
  ode.beta = 0.3;
  auto tr = integrate(ode, 1.0, {1.0}, 2.0);
  ASSERT_TRUE(tr.event);
  EXPECT_NEAR(tr.event->y, std::sqrt(3.1), 5e-3);
}

TEST(Integrate, StopsAtSingularity) {
  ReducedODE ode;
  ode.id = Branch::GammaV0;
  auto tr = integrate(ode, 1.0, {1.0}, 3.0);  // R^{-2/3} = (7 - y^2)/6 blows up at y = sqrt(7)
  ASSERT_TRUE(tr.event);
  EXPECT_LT(tr.event->y, std::sqrt(7.0) + 1e-6);
  EXPECT_GT(tr.event->y, 2.5);
}

TEST(Integrate, RejectsBadStart) {
  ReducedODE ode = cases::reduced(Branch::X1);
  EXPECT_THROW(integrate(ode, 1.0, {0.0, 0.3, 0.2, 1.0, 0.1, 0.0}, 2.0), std::invalid_argument);  // V = 0
  EXPECT_THROW(integrate(ode, 1.0, {0.5, 0.3}, 2.0), std::invalid_argument);
  EXPECT_THROW(integrate(ode, 1.0, {0.5, 0.3, 0.2, 1.0, 0.1, 0.0}, 2.0, 1e-20), std::invalid_argument);
}

TEST(Integrate, StateAtHitsStoredPoints) {
  auto tr = integrate(cases::reduced(Branch::X1), 1.0, default_initial_state(Branch::X1), 2.0);
  for (std::size_t i = 0; i < tr.y.size(); i += 7) {
    auto s = tr.state_at(tr.y[i]);
    for (std::size_t k = 0; k < s.size(); ++k) EXPECT_EQ(s[k], tr.x[i][k]);
  }
  EXPECT_THROW(tr.state_at(2.5), ExtrapolationError);
}

// ---------------------------------------------------------------------------
// pressure

TEST(Pressure, ClosureExamples) {
  PotentialSpec w;
  w.W = parse("-q0*rhodot^2");
  w.env = {{"q0", 1.0}};
  EXPECT_NEAR(pressure(w, 1.0, 1.0, 1.0), 1.0, 1e-14);
  PotentialSpec gn = preset("green_naghdi");
  EXPECT_NEAR(pressure(gn, 1.0, 0.0, 0.0), 0.5, 1e-14);
}

TEST(Pressure, StaticLimitAndFiniteDifferences) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(0.6, 1.8);
  for (PotentialClass c : all_classes()) {
    PotentialSpec s = make_class(c);
    for (int n = 0; n < 10; ++n) {
      double r = U(rng), d = U(rng), D = U(rng) - 1.0, e = 1e-5;
      // p = rho (W_rho - rhodot W_{rho rhodot} - W_{rhodot rhodot} D0 rhodot) + rhodot W_rhodot - W
      auto Wf = [&](double a, double b) { return s(a, b); };
      double Wr = (Wf(r + e, d) - Wf(r - e, d)) / (2 * e), Wd = (Wf(r, d + e) - Wf(r, d - e)) / (2 * e);
      double Wdd = (Wf(r, d + e) - 2 * Wf(r, d) + Wf(r, d - e)) / (e * e);
      double Wrd = (Wf(r + e, d + e) - Wf(r + e, d - e) - Wf(r - e, d + e) + Wf(r - e, d - e)) / (4 * e * e);
      double want = r * (Wr - d * Wrd - Wdd * D) + d * Wd - Wf(r, d);
      EXPECT_NEAR(pressure(s, r, d, D), want, 1e-4 * std::max(1.0, std::fabs(want))) << class_name(c);
      // classes with ln rhodot or negative rhodot powers have no static limit
      double Wr0 = NAN, W0 = NAN;
      try {
        Wr0 = (Wf(r + e, 0) - Wf(r - e, 0)) / (2 * e);
        W0 = Wf(r, 0);
      } catch (const DomainError&) {
      }
      if (!std::isfinite(Wr0) || !std::isfinite(W0)) continue;
      EXPECT_NEAR(pressure(s, r, 0.0, 0.0), r * Wr0 - Wf(r, 0), 1e-6 * std::max(1.0, std::fabs(r * Wr0))) << class_name(c);
    }
  }
}

TEST(Pressure, PartialsMatchFiniteDifferences) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(0.6, 1.8);
  for (PotentialClass c : all_classes()) {
    PressureModel m(make_class(c));
    for (int n = 0; n < 5; ++n) {
      double r = U(rng), d = U(rng), D = U(rng) - 1.0, e = 1e-4;
      auto P = m.partials(r, d, D);
      double fr = (m(r + e, d, D) - m(r - e, d, D)) / (2 * e);
      double fd = (m(r, d + e, D) - m(r, d - e, D)) / (2 * e);
      double fD = (m(r, d, D + e) - m(r, d, D - e)) / (2 * e);
      EXPECT_NEAR(P[0], fr, 1e-5 * std::max(1.0, std::fabs(fr))) << class_name(c);
      EXPECT_NEAR(P[1], fd, 1e-5 * std::max(1.0, std::fabs(fd))) << class_name(c);
      EXPECT_NEAR(P[2], fD, 1e-5 * std::max(1.0, std::fabs(fD))) << class_name(c);
    }
  }
}

// ---------------------------------------------------------------------------
// reconstruction

TEST(Reconstruct, X3OnTheLineTEqualsOne) {
  auto tr = integrate(cases::reduced(Branch::X3), 1.0, default_initial_state(Branch::X3), 2.0);
  PressureModel m(vortex_potential(1.0, 0.5));
  for (double r : {1.2, 1.5, 1.8}) {
    FieldPoint f = field_point(tr, m, 1.0, r);
    State s = tr.state_at(r);
    EXPECT_NEAR(f.U, s[0], 1e-13);
    EXPECT_NEAR(f.rho, s[3], 1e-13);
  }
}

TEST(Reconstruct, X1UTimesTIsConstant) {
  auto tr = integrate(cases::reduced(Branch::X1), 1.0, default_initial_state(Branch::X1), 2.0);
  PressureModel m(vortex_potential(1.0, 0.0));
  double r = 1.4;
  double ref = field_point(tr, m, 1.0, r).U;
  for (double t : {0.5, 2.0, 7.0}) EXPECT_NEAR(field_point(tr, m, t, r).U * t, ref, 1e-13);
}

TEST(Reconstruct, AlphaIsRTimesH) {
  auto tr = integrate(cases::reduced(Branch::GammaQuarter), 1.0, default_initial_state(Branch::GammaQuarter), 2.0);
  Patch P = default_patch(tr);
  VortexField F = reconstruct(tr, linspace(P.t0, P.t1, 7), linspace(P.r0, P.r1, 7));
  for (std::size_t i = 0; i < F.t.size(); ++i)
    for (std::size_t j = 0; j < F.r.size(); ++j) {
      auto k = F.idx(i, j);
      EXPECT_NEAR(F.alpha[k], F.r[j] * F.H[k], 1e-12 * std::max(1.0, std::fabs(F.alpha[k])));
      EXPECT_GT(F.rho[k], 0.0);
      EXPECT_NE(F.H[k], 0.0);
    }
}

TEST(Reconstruct, DegenerateBranchesHaveNoField) {
  ReducedODE ode;
  ode.id = Branch::GammaV0;
  auto tr = integrate(ode, 1.0, {1.0}, 1.5);
  EXPECT_THROW(reconstruct(tr, linspace(1, 1.1, 5), linspace(1, 1.1, 5)), std::invalid_argument);
}

class BackSubstitution : public ::testing::TestWithParam<Branch> {};

TEST_P(BackSubstitution, ResidualsSmallAndSecondOrder) {
  auto bs = cases::back_substitute(GetParam());
  ASSERT_FALSE(bs.traj.event) << bs.traj.event->reason;
  EXPECT_NEAR(bs.h_coarse, 1e-3, 1e-12);
  EXPECT_LT(bs.coarse.max(), 1e-4);
  EXPECT_LT(bs.alpha_defect, 1e-6);
  EXPECT_LT(bs.coarse.alpha_eq, 1e-4);
  EXPECT_TRUE(bs.converges()) << "worst ratio " << bs.worst_ratio();
}

INSTANTIATE_TEST_SUITE_P(AllBranches, BackSubstitution, ::testing::ValuesIn(cases::non_degenerate()),
                         [](const auto& info) { return branch_name(info.param); });

TEST(Residual, GridChecks) {
  VortexField F;
  F.t = linspace(0, 1, 4);
  F.r = linspace(1, 2, 6);
  EXPECT_THROW(residual_spvort(F), std::invalid_argument);
  F.t = {0, 0.1, 0.2, 0.35, 0.4};
  EXPECT_THROW(residual_spvort(F), std::invalid_argument);
}

TEST(Residual, StaticFieldViolatesHEquation) {
  VortexField F;
  F.t = linspace(0, 1, 6);
  F.r = linspace(1, 2, 6);
  std::size_t n = 36;
  F.U.assign(n, 0.0);
  F.rho.assign(n, 1.0);
  F.h.assign(n, 0.0);
  F.p.assign(n, 0.0);
  F.rhodot.assign(n, 0.0);
  F.H.resize(n);
  F.alpha.assign(n, 0.5);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) F.H[F.idx(i, j)] = 0.5 / F.r[j];
  SpvortResidual r = residual_spvort(F);
  EXPECT_GT(r.h_eq, 0.1);
  EXPECT_EQ(r.alpha_eq, 0.0);
}

// ---------------------------------------------------------------------------
// steady closure

TEST(Steady, DensityAndScaling) {
  SteadyState s = steady_state(1.0, 2.5, 1.0, 0.0, 1.0, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(s.rho, 2.5);
  SteadyState a = steady_state(1.0, 1.0, 1.3, 0.4, 0.8, 0.1, -0.2);
  SteadyState b = steady_state(3.0, 1.0, 1.3, 0.4, 0.8, 0.1, -0.2);
  EXPECT_DOUBLE_EQ(b.rho, a.rho);
  EXPECT_NEAR(b.U, 3.0 * a.U, 1e-14);
}

TEST(Steady, ContinuityHoldsIdentically) {
  // r^2 U rho' + rho (r^2 U)' = rho alpha0 h
  double a0 = 1.2, R0 = 0.9, r = 1.4, h = 0.3, h1 = 0.7, h2 = -0.2, h3 = 0.5;
  SteadyState s = steady_state(a0, R0, r, h, h1, h2, h3);
  double lhs = r * r * s.U * s.rhop + s.rho * (2 * r * s.U + r * r * s.Up);
  EXPECT_NEAR(lhs, s.rho * a0 * h, 1e-13);
}

TEST(Steady, ClosureDrivesMomentumResidualDown) {
  auto c = cases::steady_closure_check(100, 17);
  EXPECT_EQ(c.states, 100);
  EXPECT_LT(c.worst, 1e-8);
}

TEST(Steady, InputErrors) {
  PotentialSpec s = make_class(PotentialClass::M14);
  EXPECT_THROW(steady_rhs(s, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(steady_rhs(s, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(integrate_steady(s, 1.0, 1.0, 1.0, {0.0, 1.0}, 1.5), std::invalid_argument);
}

TEST(Steady, IntegratedProfileSatisfiesReducedEquations) {
  auto st = integrate_steady(vortex_potential(1.0, 0.0), 1.0, 1.0, 1.0, {0.0, 1.0, 0.0, 0.0}, 1.5);
  ASSERT_FALSE(st.event);
  auto res = [&](std::size_t n) {
    return residual_spvort(reconstruct_steady(st, linspace(0.0, 0.1, 5), linspace(1.1, 1.2, n)));
  };
  SpvortResidual a = res(51), b = res(101);
  EXPECT_LT(a.max(), 1e-4);
  EXPECT_GT(a.momentum / b.momentum, 3.5);
  EXPECT_GT(a.continuity / b.continuity, 3.5);
  EXPECT_EQ(b.alpha_eq, 0.0);
}

// ---------------------------------------------------------------------------
// spherical decomposition

TEST(Spherical, RoundTrip) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-2, 2), T(0.1, 3.0), P(0, 6.28);
  for (int n = 0; n < 200; ++n) {
    double u = U(rng), v = U(rng), w = U(rng), th = T(rng), ph = P(rng);
    Vec3 c = spherical_to_cartesian(u, v, w, th, ph);
    auto back = cartesian_to_spherical(c, th, ph);
    EXPECT_NEAR(back[0], u, 1e-12);
    EXPECT_NEAR(back[1], v, 1e-12);
    EXPECT_NEAR(back[2], w, 1e-12);
    EXPECT_NEAR(c.x * c.x + c.y * c.y + c.z * c.z, u * u + v * v + w * w, 1e-12);
  }
}

TEST(Spherical, Reconstruct3d) {
  auto tr = integrate(cases::reduced(Branch::X1), 1.0, default_initial_state(Branch::X1), 2.0);
  Patch P = default_patch(tr);
  VortexField F = reconstruct(tr, linspace(P.t0, P.t1, 5), linspace(P.r0, P.r1, 5));
  auto omega = [](double t, double r, double th, double ph) { return t + r * th - ph; };
  auto samples = reconstruct3d(F, omega, {0.4, 1.2, 2.5}, {0.0, 1.0, 4.0});
  ASSERT_EQ(samples.size(), 25u * 9u);
  for (const auto& s : samples) {
    std::size_t i = std::find(F.t.begin(), F.t.end(), s.t) - F.t.begin();
    std::size_t j = std::find(F.r.begin(), F.r.end(), s.r) - F.r.begin();
    auto k = F.idx(i, j);
    const Vec3& v = s.velocity;
    EXPECT_NEAR(v.x * v.x + v.y * v.y + v.z * v.z, F.U[k] * F.U[k] + F.H[k] * F.H[k], 1e-12);
  }
  // H = 0 gives a purely radial field
  VortexField G = F;
  std::fill(G.H.begin(), G.H.end(), 0.0);
  for (const auto& s : reconstruct3d(G, omega, {0.7}, {2.0})) {
    auto k = G.idx(std::find(G.t.begin(), G.t.end(), s.t) - G.t.begin(),
                   std::find(G.r.begin(), G.r.end(), s.r) - G.r.begin());
    EXPECT_NEAR(s.velocity.x, G.U[k] * std::sin(0.7) * std::cos(2.0), 1e-14);
    EXPECT_NEAR(s.velocity.z, G.U[k] * std::cos(0.7), 1e-14);
  }
  EXPECT_THROW(reconstruct3d(F, omega, {0.0}, {1.0}), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// CSV

TEST(TrajectoryCsv, RoundTrip) {
  for (Branch b : {Branch::GammaMinus, Branch::X3_2X1}) {
    auto tr = integrate(cases::reduced(b), 1.0, default_initial_state(b), 2.0);
    std::stringstream ss;
    write_trajectory_csv(ss, tr);
    TrajectoryFile f = read_trajectory_csv(ss);
    EXPECT_EQ(f.ode.id, b);
    EXPECT_EQ(f.ode.mu, tr.ode.mu);
    ASSERT_EQ(f.y.size(), tr.y.size());
    ReducedTrajectory again = trajectory_from_file(f);
    State a = again.state_at(1.5), c = tr.state_at(1.5);
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], c[k], 1e-12);
  }
}

TEST(TrajectoryCsv, RejectsMalformed) {
  std::istringstream bad1("y,V\n1,2\n");
  EXPECT_THROW(read_trajectory_csv(bad1), std::invalid_argument);
  std::istringstream bad2("y,V,h,Lambda,R,Rp,Rpp\n1,0.5,0,0,1,0,0\n2,0.5,0,0,1,0,0\n");
  EXPECT_THROW(read_trajectory_csv(bad2), std::invalid_argument);
}

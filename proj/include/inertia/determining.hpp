#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <limits>
#include <random>
#include <vector>

#include "inertia/potentials.hpp"

namespace inertia {

enum class Equation { E4, E5, E6, E8 };

inline const std::array<Equation, 4>& all_equations() {
  static const std::array<Equation, 4> e = {Equation::E4, Equation::E5, Equation::E6, Equation::E8};
  return e;
}

inline std::string equation_name(Equation e) {
  static const char* n[] = {"E4", "E5", "E6", "E8"};
  return n[static_cast<int>(e)];
}

class ClassificationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// The derivatives of W that enter the four determining equations. Built once
// per potential; the Expr cache makes repeated construction cheap anyway.
struct WDerivatives {
  Expr Wdd, Wddd, Wdddd, Wdddr, Wddr, Wddrr, Wdrr, Wdrrr, Wrr, Wrrr;

  explicit WDerivatives(const Expr& W) {
    const Var r = Var::Rho, d = Var::RhoDot;
    Wdd = differentiate(W, {d, d});
    Wddd = differentiate(Wdd, {d});
    Wdddd = differentiate(Wddd, {d});
    Wdddr = differentiate(Wddd, {r});
    Wddr = differentiate(Wdd, {r});
    Wddrr = differentiate(Wddr, {r});
    Wdrr = differentiate(W, {d, r, r});
    Wdrrr = differentiate(Wdrr, {r});
    Wrr = differentiate(W, {r, r});
    Wrrr = differentiate(Wrr, {r});
  }
};

struct WValues {
  double dd, ddd, dddd, dddr, ddr, ddrr, drr, drrr, rr, rrr;
};

inline WValues evaluate_derivatives(const WDerivatives& D, const ParamEnv& env, double r, double d) {
  auto ev = [&](const Expr& e) { return evaluate(e, env, r, d); };
  return {ev(D.Wdd), ev(D.Wddd), ev(D.Wdddd), ev(D.Wdddr), ev(D.Wddr),
          ev(D.Wddrr), ev(D.Wdrr), ev(D.Wdrrr), ev(D.Wrr), ev(D.Wrrr)};
}

// Left-hand sides of the determining equations, written term by term in the
// order they are printed. r = rho, d = rhodot.
inline double determining_lhs(Equation eq, const WValues& w, const GeneratorCoeffs& c, double r,
                              double d) {
  const double c1 = c.c1, c6 = c.c6, c7 = c.c7, c15 = c.c15;
  const double r2 = r * r, r3 = r2 * r, d2 = d * d, d3 = d2 * d, d4 = d3 * d;
  switch (eq) {
    case Equation::E4:
      return 27 * c6 * r3 * (3 * w.drrr * d * r + w.drr * d - 3 * w.rrr * r - w.rr) +
             600 * w.dd * c6 * d2 * r +
             25 * d3 *
                 (5 * w.dddd * d2 * (c15 - c7) + 5 * w.dddr * d * r * c15 + 18 * w.ddr * r * c15 +
                  w.ddd * d * (28 * c15 - 33 * c7 - 10 * c1) + 18 * w.dd * (c15 - 2 * c7 - 2 * c1));
    case Equation::E5:
      return w.ddd * d * (c7 - c15) - c15 * r * w.ddr + (2 * c1 - c15 + 2 * c7) * w.dd +
             3 * c6 * w.ddd * r;
    case Equation::E6:
      return 9 * w.drrr * d * r3 * c15 + 40 * w.dddd * d4 * (c7 - c15) +
             w.dddr * d3 * r * (9 * c7 - 49 * c15) - 9 * w.ddrr * d2 * r2 * c7 +
             8 * w.ddd * d3 * (10 * c1 - 17 * c15 + 22 * c7) +
             2 * w.ddr * d2 * r * (9 * c1 - 37 * c15 + 9 * c7) - 9 * w.rrr * r3 * c15 +
             9 * w.drr * d * r2 * (c15 - 2 * c1) + 56 * w.dd * d2 * (2 * c1 - c15 + 2 * c7) +
             9 * w.rr * r2 * (2 * c1 - c15);
    case Equation::E8:
      return c6 * (5 * w.ddd * d + 3 * w.ddr * r + 5 * w.dd);
  }
  return 0.0;
}

// Largest single W-derivative term magnitude of an equation at a point, with
// unit coefficients. Used to scale rows and residual tolerances.
inline double term_scale(Equation eq, const WValues& w, double r, double d) {
  const double r2 = r * r, r3 = r2 * r, d2 = d * d, d3 = d2 * d, d4 = d3 * d;
  std::vector<double> t;
  switch (eq) {
    case Equation::E4:
      t = {27 * r3 * 3 * w.drrr * d * r, 27 * r3 * w.drr * d, 27 * r3 * 3 * w.rrr * r,
           27 * r3 * w.rr, 600 * w.dd * d2 * r, 125 * d3 * w.dddd * d2,
           125 * d3 * w.dddr * d * r, 450 * d3 * w.ddr * r, 25 * 33 * d3 * w.ddd * d,
           25 * 36 * d3 * w.dd};
      break;
    case Equation::E5:
      t = {w.ddd * d, r * w.ddr, 2 * w.dd, 3 * w.ddd * r};
      break;
    case Equation::E6:
      t = {9 * w.drrr * d * r3, 40 * w.dddd * d4, 49 * w.dddr * d3 * r, 9 * w.ddrr * d2 * r2,
           176 * w.ddd * d3, 74 * w.ddr * d2 * r, 9 * w.rrr * r3, 18 * w.drr * d * r2,
           112 * w.dd * d2, 18 * w.rr * r2};
      break;
    case Equation::E8:
      t = {5 * w.ddd * d, 3 * w.ddr * r, 5 * w.dd};
      break;
  }
  double m = 0.0;
  for (double x : t) m = std::max(m, std::fabs(x));
  return m;
}

struct ResidualRow {
  Equation eq;
  double rho, rhodot;
  std::array<double, 4> coeffs;  // d residual / d (c1, c6, c7, c15)
  double scale;                  // term magnitude scale at this point
};

inline ResidualRow residual_row(const WDerivatives& D, const ParamEnv& env, Equation eq, double r,
                                double d) {
  WValues w = evaluate_derivatives(D, env, r, d);
  ResidualRow row{eq, r, d, {}, term_scale(eq, w, r, d)};
  // the equations are linear in c, so unit vectors give the coefficients exactly
  for (int i = 0; i < 4; ++i) {
    std::array<double, 4> e{};
    e[i] = 1.0;
    row.coeffs[i] = determining_lhs(eq, w, GeneratorCoeffs::from(e), r, d);
  }
  return row;
}

inline double residual(const PotentialSpec& spec, const GeneratorCoeffs& c, Equation eq, double r,
                       double d) {
  WDerivatives D(spec.W);
  return determining_lhs(eq, evaluate_derivatives(D, spec.env, r, d), c, r, d);
}

struct SamplingPlan {
  double lo = 0.5, hi = 2.5;
  int points = 25;
  std::uint64_t seed = 42;
  double rel_tol = 1e-9;
  double min_gap = 1e3;
  bool check_stability = true;
};

struct Classification {
  std::vector<GeneratorCoeffs> basis;
  int dim = 0;
  double conditioning = 0.0;
  std::vector<double> singular_values;
};

namespace detail {

inline Classification classify_once(const WDerivatives& D, const ParamEnv& env,
                                    const SamplingPlan& plan, std::uint64_t seed) {
  if (plan.points < 12) throw ClassificationError("sampling plan needs at least 12 points");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(plan.lo, plan.hi);
  std::vector<std::array<double, 4>> rows;
  int attempts = 0;
  while (static_cast<int>(rows.size()) < 4 * plan.points) {
    if (++attempts > 20 * plan.points)
      throw ClassificationError("too many sample points outside the potential's domain");
    double r = U(rng), d = U(rng);
    std::vector<std::array<double, 4>> pending;
    try {
      for (Equation eq : all_equations()) {
        ResidualRow row = residual_row(D, env, eq, r, d);
        auto v = row.coeffs;
        if (row.scale > 0.0)
          for (double& x : v) x /= row.scale;
        pending.push_back(v);
      }
    } catch (const DomainError&) {
      continue;
    }
    rows.insert(rows.end(), pending.begin(), pending.end());
  }
  Eigen::MatrixXd A(rows.size(), 4);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < 4; ++j) A(static_cast<Eigen::Index>(i), j) = rows[i][j];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  Eigen::VectorXd s = svd.singularValues();
  Classification out;
  for (int i = 0; i < s.size(); ++i) out.singular_values.push_back(s(i));
  double smax = s(0);
  if (smax == 0.0) {
    out.dim = 4;
    out.conditioning = std::numeric_limits<double>::infinity();
  } else {
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
      if (s(i) > plan.rel_tol * smax) ++rank;
    out.dim = 4 - rank;
    if (rank == 4)
      out.conditioning = s(3) / (plan.rel_tol * smax);
    else
      out.conditioning = s(rank) > 0.0 ? s(rank - 1) / s(rank) : std::numeric_limits<double>::infinity();
  }
  const Eigen::MatrixXd& V = svd.matrixV();
  for (int k = 4 - out.dim; k < 4; ++k) {
    std::array<double, 4> v{};
    for (int j = 0; j < 4; ++j) v[j] = V(j, k);
    out.basis.push_back(GeneratorCoeffs::from(v));
  }
  return out;
}

}  // namespace detail

// Numerical nullspace of the stacked residual rows. Throws when the singular
// value gap is too small to call a dimension, or when an independent point
// set disagrees.
inline Classification classify(const PotentialSpec& spec, const SamplingPlan& plan = {}) {
  WDerivatives D(spec.W);
  Classification c = detail::classify_once(D, spec.env, plan, plan.seed);
  if (c.conditioning <= plan.min_gap)
    throw ClassificationError("singular value gap " + std::to_string(c.conditioning) +
                              " too small to decide the extension dimension");
  if (plan.check_stability) {
    Classification c2 = detail::classify_once(D, spec.env, plan, plan.seed ^ 0x9e3779b97f4a7c15ULL);
    if (c2.dim != c.dim)
      throw ClassificationError("degenerate sampling: dimension " + std::to_string(c.dim) +
                                " changed to " + std::to_string(c2.dim) + " under resampling");
  }
  return c;
}

namespace detail {

// Orthonormal basis (Gram-Schmidt via SVD) for the span of a list.
inline Eigen::MatrixXd orthonormal_span(const std::vector<GeneratorCoeffs>& a, double tol) {
  if (a.empty()) return Eigen::MatrixXd(4, 0);
  Eigen::MatrixXd M(4, a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    auto v = a[j].vec();
    for (int i = 0; i < 4; ++i) M(i, static_cast<Eigen::Index>(j)) = v[i];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU);
  auto s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > tol * std::max(1.0, s(0))) ++rank;
  return svd.matrixU().leftCols(rank);
}

inline bool contained(const std::vector<GeneratorCoeffs>& a, const Eigen::MatrixXd& Q, double tol) {
  for (const auto& g : a) {
    auto v = g.vec();
    Eigen::Vector4d x(v[0], v[1], v[2], v[3]);
    double n = x.norm();
    if (n == 0.0) continue;
    x /= n;
    Eigen::Vector4d res = Q.cols() ? Eigen::Vector4d(x - Q * (Q.transpose() * x)) : x;
    if (res.norm() > tol) return false;
  }
  return true;
}

}  // namespace detail

// True when the two lists span the same subspace; vectors are normalised
// before their distance to the other span is measured.
inline bool span_equal(const std::vector<GeneratorCoeffs>& a, const std::vector<GeneratorCoeffs>& b,
                       double tol = 1e-6) {
  Eigen::MatrixXd Qa = detail::orthonormal_span(a, tol), Qb = detail::orthonormal_span(b, tol);
  if (Qa.cols() != Qb.cols()) return false;
  return detail::contained(a, Qb, tol) && detail::contained(b, Qa, tol);
}

}  // namespace inertia

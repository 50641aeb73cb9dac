#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "inertia/determining.hpp"
#include "inertia/lie_algebra.hpp"
#include "inertia/orbit_oracle.hpp"
#include "inertia/potentials.hpp"
#include "inertia/vortex.hpp"

namespace inertia {

// ---------------------------------------------------------------------------
// classification table

struct Table1Options {
  std::uint64_t seed = 42;
  std::map<PotentialClass, ParamEnv> overrides;  // applied on top of the defaults
  int residual_points = 50;
  double span_tol = 1e-6;
  double residual_tol = 1e-8;
};

struct Table1Row {
  PotentialClass cls = PotentialClass::M1;
  std::string W;
  int expected_dim = 0;
  int dim = -1;
  double conditioning = 0.0;
  bool span_ok = false;
  double max_scaled_residual = 0.0;
  bool residual_ok = false;
  std::vector<GeneratorCoeffs> basis;
  std::vector<GeneratorCoeffs> expected;
  std::string error;

  bool pass() const { return error.empty() && dim == expected_dim && span_ok && residual_ok; }
};

struct Table1Report {
  std::vector<Table1Row> rows;
  double seconds = 0.0;

  int passed() const {
    int n = 0;
    for (const auto& r : rows) n += r.pass() ? 1 : 0;
    return n;
  }
  bool all_pass() const { return passed() == static_cast<int>(rows.size()); }

  std::string text() const {
    std::ostringstream os;
    os << std::left << std::setw(6) << "class" << std::setw(10) << "expected" << std::setw(6) << "dim"
       << std::setw(14) << "conditioning" << std::setw(8) << "span" << std::setw(14) << "max_resid"
       << "result\n";
    for (const auto& r : rows) {
      std::ostringstream cond, res;
      cond << std::setprecision(3) << std::scientific << r.conditioning;
      res << std::setprecision(2) << std::scientific << r.max_scaled_residual;
      os << std::left << std::setw(6) << class_name(r.cls) << std::setw(10) << r.expected_dim << std::setw(6)
         << r.dim << std::setw(14) << cond.str() << std::setw(8) << (r.span_ok ? "ok" : "differ") << std::setw(14)
         << res.str() << (r.pass() ? "PASS" : "FAIL") << "\n";
      if (!r.pass()) {
        if (!r.error.empty()) os << "    error: " << r.error << "\n";
        os << "    W = " << r.W << "\n    basis:";
        for (const auto& b : r.basis) os << " " << b.str();
        os << "\n    expected:";
        for (const auto& b : r.expected) os << " " << b.str();
        os << "\n";
      }
    }
    os << passed() << "/" << rows.size() << " classes pass\n";
    os << "\n[summary]\npassed=" << passed() << "\ntotal=" << rows.size() << "\nseconds=" << seconds << "\n";
    for (const auto& r : rows) os << class_name(r.cls) << "=" << (r.pass() ? "PASS" : "FAIL") << "\n";
    return os.str();
  }
};

// Largest |residual| / term scale of the expected generators over random
// points in [lo, hi]^2.
inline double expected_generator_residual(const PotentialSpec& spec, const std::vector<GeneratorCoeffs>& gens,
                                          int points, std::uint64_t seed, double lo = 0.5, double hi = 2.5) {
  WDerivatives D(spec.W);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(lo, hi);
  double worst = 0.0;
  int used = 0, attempts = 0;
  while (used < points && attempts < 20 * points) {
    ++attempts;
    double r = U(rng), d = U(rng);
    WValues w;
    try {
      w = evaluate_derivatives(D, spec.env, r, d);
    } catch (const DomainError&) {
      continue;
    }
    ++used;
    for (Equation eq : all_equations()) {
      double scale = std::max(term_scale(eq, w, r, d), 1e-300);
      for (const auto& g : gens) worst = std::max(worst, std::fabs(determining_lhs(eq, w, g, r, d)) / scale);
    }
  }
  return worst;
}

inline Table1Report verify_table1(const Table1Options& opt = {}) {
  auto start = std::chrono::steady_clock::now();
  Table1Report rep;
  for (PotentialClass c : all_classes()) {
    Table1Row row;
    row.cls = c;
    try {
      PotentialSpec spec;
      auto ov = opt.overrides.find(c);
      if (ov == opt.overrides.end()) {
        spec = make_class(c);
      } else {
        ParamEnv p = default_params(c);
        for (const auto& [k, v] : ov->second) p[k] = v;
        ClassOptions co;
        co.check_side_conditions = false;
        spec = make_class(c, p, co);
      }
      row.W = to_string(spec.W);
      row.expected = *spec.expected_extension;
      row.expected_dim = static_cast<int>(row.expected.size());
      SamplingPlan plan;
      plan.seed = opt.seed;
      Classification cl = classify(spec, plan);
      row.dim = cl.dim;
      row.conditioning = cl.conditioning;
      row.basis = cl.basis;
      row.span_ok = span_equal(cl.basis, row.expected, opt.span_tol);
      row.max_scaled_residual = expected_generator_residual(spec, row.expected, opt.residual_points, opt.seed + 1);
      row.residual_ok = row.max_scaled_residual < opt.residual_tol;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rep.rows.push_back(row);
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

// ---------------------------------------------------------------------------
// optimal systems

inline std::vector<std::string> optimal_system_names(Algebra a) {
  if (a == Algebra::L3) return {"X2+X0", "X2-X0", "X0"};
  return {"X2+X0", "X2-X0", "X0", "X1+X2+gammaX0", "X3-2X1", "X1"};
}

struct OptimalSystemReport {
  Algebra algebra = Algebra::L4;
  int trials = 0;
  std::map<std::string, int> histogram;
  int in_list = 0;
  int replay_ok = 0;
  int oracle_checked = 0;
  int oracle_confirmed = 0;
  std::vector<std::string> failures;

  bool pass() const {
    return in_list == trials && replay_ok == trials && oracle_confirmed == oracle_checked;
  }
  double oracle_rate() const { return oracle_checked ? double(oracle_confirmed) / oracle_checked : 1.0; }

  std::string text() const {
    std::ostringstream os;
    os << "algebra " << (algebra == Algebra::L3 ? "L3" : "L4") << ", " << trials << " random elements\n";
    for (const auto& name : optimal_system_names(algebra)) {
      auto it = histogram.find(name);
      os << "  " << std::left << std::setw(16) << name << (it == histogram.end() ? 0 : it->second) << "\n";
    }
    os << "in list: " << in_list << "/" << trials << "\n";
    os << "certificate replay: " << replay_ok << "/" << trials << "\n";
    os << "orbit oracle: " << oracle_confirmed << "/" << oracle_checked << "\n";
    for (const auto& f : failures) os << "  failure: " << f << "\n";
    os << "\n[summary]\nalgebra=" << (algebra == Algebra::L3 ? "L3" : "L4") << "\ntrials=" << trials
       << "\nin_list=" << in_list << "\nreplay_ok=" << replay_ok << "\noracle_rate=" << oracle_rate()
       << "\nresult=" << (pass() ? "PASS" : "FAIL") << "\n";
    return os.str();
  }
};

// Random nonzero element: even draws use integer coordinates in {-2..2} so
// that the non-generic representatives occur, odd draws are uniform in [-1, 1].
inline AlgebraElement random_element(std::mt19937_64& rng, Algebra a, bool integer) {
  std::uniform_int_distribution<int> I(-2, 2);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  AlgebraElement X;
  do {
    for (int i = 0; i < 4; ++i) X.x[i] = integer ? I(rng) : U(rng);
    if (a == Algebra::L3) X.x[1] = 0.0;
  } while (X.max_abs() == 0.0);
  return X;
}

inline OptimalSystemReport optimal_system(int trials, std::uint64_t seed, Algebra algebra, bool use_oracle = true) {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  OptimalSystemReport rep;
  rep.algebra = algebra;
  rep.trials = trials;
  auto names = optimal_system_names(algebra);
  std::mt19937_64 rng(seed);
  for (int k = 0; k < trials; ++k) {
    AlgebraElement X = random_element(rng, algebra, k % 2 == 0);
    CanonicalRep c = normalize(X, algebra);
    std::string name = representative_name(c.rep);
    rep.histogram[name]++;
    bool listed = std::find(names.begin(), names.end(), name) != names.end();
    if (listed) ++rep.in_list;
    AlgebraElement Y = replay(X, c.certificate);
    bool replay_ok = (Y - c.coords()).max_abs() <= 1e-9 * std::max(1.0, c.coords().max_abs());
    if (replay_ok) ++rep.replay_ok;
    bool oracle_ok = true;
    if (use_oracle) {
      ++rep.oracle_checked;
      oracle_ok = orbit_contains(X, c.coords()).found;
      if (oracle_ok) ++rep.oracle_confirmed;
    }
    if (!listed || !replay_ok || !oracle_ok)
      rep.failures.push_back(X.str() + " -> " + c.name() + (listed ? "" : " (not listed)") +
                             (replay_ok ? "" : " (replay mismatch)") + (oracle_ok ? "" : " (oracle failed)"));
  }
  return rep;
}

inline std::string certificate_text(const CanonicalRep& c) {
  std::ostringstream os;
  for (std::size_t i = 0; i < c.certificate.size(); ++i) os << (i ? " ; " : "") << c.certificate[i].str();
  return os.str();
}

// ---------------------------------------------------------------------------
// pipeline

class PipelineError : public std::runtime_error {
public:
  PipelineError(std::string stage, const std::string& msg)
      : std::runtime_error("[" + stage + "] " + msg), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

private:
  std::string stage_;
};

struct FamilyFit {
  bool matches = false;
  double q0 = 0.0, beta = 0.0;
};

// Checks by evaluation whether W = -q0 rhodot^2 rho^(-5/3) + beta rho^(5/3).
inline FamilyFit fit_vortex_family(const PotentialSpec& spec) {
  FamilyFit f;
  try {
    double r = 1.3;
    double w0 = spec(r, 0.0), w1 = spec(r, 1.0);
    f.beta = w0 / std::pow(r, 5.0 / 3.0);
    f.q0 = -(w1 - w0) * std::pow(r, 5.0 / 3.0);
    if (f.q0 == 0.0) return f;
    const double pts[][2] = {{0.6, 0.7}, {1.1, 2.3}, {2.4, 0.9}, {0.8, 1.9}, {1.7, 1.4}, {2.2, 2.1}};
    for (const auto& p : pts) {
      double expect = -f.q0 * p[1] * p[1] * std::pow(p[0], -5.0 / 3.0) + f.beta * std::pow(p[0], 5.0 / 3.0);
      double got = spec(p[0], p[1]);
      if (std::fabs(got - expect) > 1e-9 * std::max(1.0, std::fabs(expect))) return f;
    }
    if (std::fabs(f.beta) < 1e-12 * std::fabs(f.q0)) f.beta = 0.0;
    f.matches = true;
  } catch (const std::exception&) {
  }
  return f;
}

struct ReductionOption {
  std::string representative;  // optimal-system member
  std::string reduction;       // name accepted by reduction=
};

inline std::vector<ReductionOption> available_reductions(bool beta_zero) {
  std::vector<ReductionOption> v = {{"X2+X0", "X2pX0"}, {"X2-X0", "X3"}, {"X0", "steady"}};
  if (beta_zero) {
    v.push_back({"X1+X2+gammaX0", "gamma"});
    v.push_back({"X3-2X1", "X3_2X1"});
    v.push_back({"X1", "X1"});
  }
  return v;
}

// Branch for X1+X2+gamma X0 and its mu.
inline ReducedODE gamma_branch(double gamma, double q0) {
  ReducedODE o;
  o.q0 = q0;
  if (std::fabs(gamma - 0.25) < 1e-14) {
    o.id = Branch::GammaQuarter;
  } else if (gamma > 0.25) {
    o.id = Branch::GammaPlus;
    o.mu = std::sqrt(gamma - 0.25);
  } else {
    o.id = Branch::GammaMinus;
    o.mu = std::sqrt(0.25 - gamma);
  }
  return o;
}

// Documented default initial data, at y0 = 1.
inline State default_initial_state(Branch b) {
  switch (b) {
    case Branch::X3_2X1: return {0.2, 0.5, 1.0, 0.3};
    case Branch::X3: return {1.0, 0.3, 0.2, 1.0, 0.1, 0.0};
    case Branch::GammaV0:
    case Branch::X2pX0V0:
    case Branch::X3V0: return {1.0};
    default: return {0.5, 0.3, 0.2, 1.0, 0.1, 0.0};
  }
}

struct PipelineConfig {
  PotentialSpec potential;
  std::optional<std::string> reduction;
  double gamma = 0.74;
  double y0 = 1.0, y1 = 2.0;
  std::optional<State> state;
  double tol = 1e-10;
  int grid = 101;
  std::uint64_t seed = 42;
  // steady reduction
  double alpha0 = 1.0, R0 = 1.0, r0 = 1.0, r1 = 1.5;
  State h0 = {0.0, 1.0, 0.0, 0.0};
};

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) v.push_back(parse_number_expr(trim(cell), "list entry"));
  return v;
}

inline PipelineConfig pipeline_config_from_map(const std::map<std::string, std::string>& kv) {
  PipelineConfig c;
  c.potential = potential_from_map(kv);
  auto num = [&](const char* k, double& out) {
    if (kv.count(k)) out = parse_number_expr(kv.at(k), k);
  };
  if (kv.count("reduction")) c.reduction = kv.at("reduction");
  num("gamma", c.gamma);
  num("y0", c.y0);
  num("y1", c.y1);
  num("tol", c.tol);
  num("alpha0", c.alpha0);
  num("R0", c.R0);
  num("r0", c.r0);
  num("r1", c.r1);
  if (kv.count("state")) c.state = parse_list(kv.at("state"));
  if (kv.count("h0")) c.h0 = parse_list(kv.at("h0"));
  if (kv.count("grid")) c.grid = static_cast<int>(parse_number_expr(kv.at("grid"), "grid"));
  if (c.grid < 5) throw InvalidPotential("grid must be at least 5");
  return c;
}

struct PipelineResult {
  Classification classification;
  FamilyFit family;
  std::vector<ReductionOption> available;
  std::optional<std::string> chosen;
  std::optional<SpvortResidual> residual;
  std::string report;
};

inline PipelineResult run_pipeline(const PipelineConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  PipelineResult res;
  std::ostringstream rep;
  rep << std::setprecision(10);
  try {
    fs::create_directories(out_dir);
  } catch (const std::exception& e) {
    throw PipelineError("setup", e.what());
  }

  try {
    SamplingPlan plan;
    plan.seed = cfg.seed;
    res.classification = classify(cfg.potential, plan);
  } catch (const std::exception& e) {
    throw PipelineError("classify", e.what());
  }
  rep << "potential: W = " << to_string(cfg.potential.W) << "\n";
  rep << "extension dimension: " << res.classification.dim << " (conditioning " << res.classification.conditioning
      << ")\n";
  for (const auto& b : res.classification.basis) rep << "  generator " << b.str() << "\n";

  auto finish = [&](const std::string& msg) {
    rep << msg << "\n";
    res.report = rep.str();
    std::ofstream(fs::path(out_dir) / "report.txt") << res.report;
    return res;
  };
  if (res.classification.dim == 0) return finish("no reduction available");

  res.family = fit_vortex_family(cfg.potential);
  if (!res.family.matches) return finish("no reduction available: the potential is not of the form -q0 rhodot^2 rho^(-5/3) + beta rho^(5/3)");
  rep << "vortex family: q0 = " << res.family.q0 << ", beta = " << res.family.beta << "\n";
  res.available = available_reductions(res.family.beta == 0.0);
  rep << "available reductions (" << (res.family.beta == 0.0 ? "L4" : "L3") << "):\n";
  for (const auto& o : res.available) rep << "  " << o.representative << " -> reduction=" << o.reduction << "\n";

  std::string chosen = cfg.reduction ? *cfg.reduction : res.available.front().reduction;
  bool ok = false;
  for (const auto& o : res.available) ok = ok || o.reduction == chosen;
  if (!ok) throw PipelineError("select", "reduction '" + chosen + "' is not available for this potential");
  res.chosen = chosen;
  rep << "selected reduction: " << chosen << "\n";

  const std::size_t n = static_cast<std::size_t>(cfg.grid);
  VortexField F;
  if (chosen == "steady") {
    SteadyTrajectory st;
    try {
      st = integrate_steady(cfg.potential, cfg.alpha0, cfg.R0, cfg.r0, cfg.h0, cfg.r1, std::max(cfg.tol, 1e-12));
    } catch (const std::exception& e) {
      throw PipelineError("integrate", e.what());
    }
    {
      std::ofstream csv(fs::path(out_dir) / "trajectory.csv");
      csv << std::setprecision(17) << "# reduction=steady alpha0=" << cfg.alpha0 << " R0=" << cfg.R0 << "\n";
      csv << "r,h,hp,hpp,hppp\n";
      for (std::size_t i = 0; i < st.r.size(); ++i)
        csv << st.r[i] << "," << st.h[i][0] << "," << st.h[i][1] << "," << st.h[i][2] << "," << st.h[i][3] << "\n";
    }
    rep << "integration: " << st.stats.steps << " steps, " << st.stats.rejected << " rejected";
    if (st.event) rep << ", stopped at r = " << st.event->y << " (" << st.event->reason << ")";
    rep << "\n";
    try {
      double lo = std::min(st.r.front(), st.r.back()), hi = std::max(st.r.front(), st.r.back());
      double a = lo + 0.1 * (hi - lo), b = std::min(hi - 0.1 * (hi - lo), a + 0.1);
      F = reconstruct_steady(st, linspace(0.0, 0.1, 5), linspace(a, b, n));
    } catch (const std::exception& e) {
      throw PipelineError("reconstruct", e.what());
    }
  } else {
    ReducedODE ode;
    ode.q0 = res.family.q0;
    ode.beta = res.family.beta;
    if (chosen == "gamma") {
      ode = gamma_branch(cfg.gamma, res.family.q0);
    } else {
      ode.id = *branch_from_name(chosen);
    }
    State x0 = cfg.state ? *cfg.state : default_initial_state(ode.id);
    ReducedTrajectory traj;
    try {
      if (cfg.state && x0.size() == 6 && ode.id == Branch::X3_2X1) x0 = from_named(ode, {x0[0], x0[1], x0[2], x0[3]});
      traj = integrate(ode, cfg.y0, x0, cfg.y1, cfg.tol);
    } catch (const std::exception& e) {
      throw PipelineError("integrate", e.what());
    }
    rep << "branch " << branch_name(ode.id);
    if (ode.id == Branch::GammaPlus || ode.id == Branch::GammaMinus) rep << " (mu = " << ode.mu << ")";
    rep << ": " << traj.stats.steps << " steps, " << traj.stats.rejected << " rejected, min step "
        << traj.stats.min_step;
    if (traj.event) rep << ", stopped at y = " << traj.event->y << " (" << traj.event->reason << ")";
    rep << "\n";
    {
      std::ofstream csv(fs::path(out_dir) / "trajectory.csv");
      write_trajectory_csv(csv, traj);
    }
    try {
      Patch P = default_patch(traj);
      rep << "reconstruction patch: t in [" << P.t0 << ", " << P.t1 << "], r in [" << P.r0 << ", " << P.r1
          << "]\n";
      F = reconstruct(traj, linspace(P.t0, P.t1, n), linspace(P.r0, P.r1, n), cfg.potential);
    } catch (const std::exception& e) {
      throw PipelineError("reconstruct", e.what());
    }
  }

  try {
    res.residual = residual_spvort(F);
  } catch (const std::exception& e) {
    throw PipelineError("residual", e.what());
  }
  {
    std::ofstream rt(fs::path(out_dir) / "residuals.txt");
    rt << std::setprecision(6) << std::scientific;
    auto names = SpvortResidual::names();
    auto vals = res.residual->values();
    for (int k = 0; k < 4; ++k) rt << names[k] << "=" << vals[k] << "\n";
  }
  rep << "residuals:";
  auto names = SpvortResidual::names();
  auto vals = res.residual->values();
  for (int k = 0; k < 4; ++k) rep << " " << names[k] << "=" << vals[k];
  rep << "\n";
  return finish("done");
}

}  // namespace inertia

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "inertia/inertia.hpp"

using namespace inertia;

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFail = 1;
constexpr int kInputError = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_csv_numbers(const std::string& s, std::size_t expected, const std::string& what) {
  std::vector<double> v;
  try {
    v = parse_list(s);
  } catch (const std::exception& e) {
    throw InputError(what + ": " + e.what());
  }
  if (expected && v.size() != expected)
    throw InputError(what + " needs " + std::to_string(expected) + " comma-separated numbers");
  return v;
}

AlgebraElement parse_element(const std::string& s) {
  auto v = parse_csv_numbers(s, 4, "algebra element");
  return {{v[0], v[1], v[2], v[3]}};
}

// "a:b:n" -> n evenly spaced points
std::vector<double> parse_grid(const std::string& s, const std::string& what) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string p;
  while (std::getline(ss, p, ':')) parts.push_back(p);
  if (parts.size() != 3) throw InputError(what + " must look like a:b:n");
  double a = parse_number_expr(parts[0], what), b = parse_number_expr(parts[1], what);
  double n = parse_number_expr(parts[2], what);
  if (n < 5 || n != std::floor(n)) throw InputError(what + " needs an integer point count of at least 5");
  if (!(b > a)) throw InputError(what + " needs a < b");
  return linspace(a, b, static_cast<std::size_t>(n));
}

std::pair<double, double> parse_span(const std::string& s, char sep, const std::string& what) {
  auto k = s.find(sep);
  if (k == std::string::npos) throw InputError(what + " must look like a" + sep + "b");
  return {parse_number_expr(s.substr(0, k), what), parse_number_expr(s.substr(k + 1), what)};
}

std::map<std::string, double> parse_params(const std::string& s) {
  std::map<std::string, double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw InputError("parameter '" + item + "' must be key=value");
    out[trim(item.substr(0, eq))] = parse_number_expr(trim(item.substr(eq + 1)), item);
  }
  return out;
}

PotentialSpec load_potential(const std::string& path) {
  if (path.empty()) throw InputError("--potential <file> is required");
  return read_potential_file(path);
}

std::ostream& output_stream(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw InputError("cannot write '" + path + "'");
  return file;
}

// -- classify -----------------------------------------------------------------

int cmd_classify(const std::string& potential, std::uint64_t seed, const std::string& box, int points, bool kv) {
  PotentialSpec spec = load_potential(potential);
  SamplingPlan plan;
  plan.seed = seed;
  if (!box.empty()) {
    auto [lo, hi] = parse_span(box, ',', "--box");
    if (!(lo > 0 && hi > lo)) throw InputError("--box needs 0 < lo < hi");
    plan.lo = lo;
    plan.hi = hi;
  }
  if (points > 0) plan.points = points;
  Classification c = classify(spec, plan);
  std::cout << "W = " << to_string(spec.W) << "\n";
  std::cout << "dim " << c.dim << "\n";
  std::cout << "conditioning " << std::scientific << std::setprecision(3) << c.conditioning << std::defaultfloat
            << "\n";
  for (const auto& b : c.basis) std::cout << "generator (c1, c6, c7, c15) = " << b.str() << "\n";
  if (spec.expected_extension) {
    bool ok = span_equal(c.basis, *spec.expected_extension, 1e-6);
    std::cout << "expected span " << (ok ? "matches" : "differs") << "\n";
  }
  if (kv) {
    std::cout << "\n[summary]\ndim=" << c.dim << "\nconditioning=" << c.conditioning << "\n";
    for (std::size_t i = 0; i < c.basis.size(); ++i) std::cout << "basis" << i << "=" << c.basis[i].str() << "\n";
  }
  return kOk;
}

// -- verify-table1 -------------------------------------------------------------

int cmd_verify_table1(std::uint64_t seed, const std::vector<std::string>& sets) {
  Table1Options opt;
  opt.seed = seed;
  for (const auto& s : sets) {
    auto eq = s.find('='), dot = s.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw InputError("--set expects CLASS.param=value, got '" + s + "'");
    auto c = class_from_name(s.substr(0, dot));
    if (!c) throw InputError("unknown class in '" + s + "'");
    opt.overrides[*c][s.substr(dot + 1, eq - dot - 1)] = parse_number_expr(s.substr(eq + 1), s);
  }
  Table1Report rep = verify_table1(opt);
  std::cout << rep.text();
  return rep.all_pass() ? kOk : kVerifyFail;
}

// -- algebra ---------------------------------------------------------------------

Algebra parse_algebra(const std::string& s) {
  if (s == "L4" || s == "l4") return Algebra::L4;
  if (s == "L3" || s == "l3") return Algebra::L3;
  throw InputError("--algebra must be L3 or L4");
}

int cmd_bracket(const std::string& a, const std::string& b) {
  AlgebraElement X = parse_element(a), Y = parse_element(b);
  AlgebraElement Z = bracket(X, Y);
  std::cout << Z.x[0] << "," << Z.x[1] << "," << Z.x[2] << "," << Z.x[3] << "\n";
  return kOk;
}

int cmd_normalize(const std::string& a, const std::string& alg) {
  AlgebraElement X = parse_element(a);
  Algebra A = parse_algebra(alg);
  if (A == Algebra::L3 && X.x[1] != 0.0) throw InputError("L3 elements have x1 = 0");
  if (X.max_abs() == 0.0) throw InputError("the zero element has no representative");
  CanonicalRep c = normalize(X, A);
  std::cout << "representative " << representative_name(c.rep) << "\n";
  if (c.rep == Representative::X1_X2_gammaX0) std::cout << "gamma " << std::setprecision(12) << c.gamma << "\n";
  std::cout << "certificate " << (c.certificate.empty() ? "(identity)" : certificate_text(c)) << "\n";
  return kOk;
}

// -- optimal-system --------------------------------------------------------------

int cmd_optimal_system(int trials, std::uint64_t seed, const std::string& alg, bool oracle,
                       const std::string& element) {
  Algebra A = parse_algebra(alg);
  if (!element.empty()) {
    AlgebraElement X = parse_element(element);
    if (X.max_abs() == 0.0) throw InputError("the zero element has no representative");
    if (A == Algebra::L3 && X.x[1] != 0.0) throw InputError("L3 elements have x1 = 0");
    CanonicalRep c = normalize(X, A);
    bool ok = !oracle || orbit_contains(X, c.coords()).found;
    std::cout << X.str() << " -> " << c.name() << "\norbit oracle: " << (ok ? "confirmed" : "not confirmed")
              << "\n";
    return ok ? kOk : kVerifyFail;
  }
  if (trials < 1) throw InputError("--trials must be at least 1");
  OptimalSystemReport rep = optimal_system(trials, seed, A, oracle);
  std::cout << rep.text();
  return rep.pass() ? kOk : kVerifyFail;
}

// -- vortex ---------------------------------------------------------------------

int cmd_vortex_integrate(const std::string& sub, const std::string& params, double y0, double y1,
                         const std::string& state, double tol, const std::string& out) {
  auto b = branch_from_name(sub);
  if (!b) throw InputError("unknown subalgebra '" + sub + "'");
  ReducedODE ode;
  ode.id = *b;
  for (const auto& [k, v] : parse_params(params)) {
    if (k == "q0") ode.q0 = v;
    else if (k == "beta") ode.beta = v;
    else if (k == "mu") ode.mu = v;
    else throw InputError("unknown parameter '" + k + "' (expected q0, beta, mu)");
  }
  if ((ode.id == Branch::GammaPlus || ode.id == Branch::GammaMinus) && ode.mu == 0.0) ode.mu = 0.7;
  State x0;
  if (state.empty()) {
    x0 = default_initial_state(ode.id);
  } else {
    auto v = parse_csv_numbers(state, 0, "--state");
    if (v.size() == 6) {
      x0 = from_named(ode, {v[0], v[1], v[2], v[3], v[4], v[5]});
    } else if (v.size() == state_size(ode.id)) {
      x0 = v;
    } else {
      throw InputError("--state needs 6 values (V,h,Lambda,R,Rp,Rpp) or the branch's own " +
                       std::to_string(state_size(ode.id)));
    }
  }
  ReducedTrajectory traj;
  try {
    traj = integrate(ode, y0, x0, y1, tol);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  std::ofstream file;
  write_trajectory_csv(output_stream(out, file), traj);
  std::cerr << branch_name(ode.id) << ": " << traj.stats.steps << " steps, " << traj.stats.rejected << " rejected";
  if (traj.event) std::cerr << ", stopped at y = " << traj.event->y << " (" << traj.event->reason << ")";
  std::cerr << "\n";
  return kOk;
}

int cmd_vortex_residual(const std::string& traj_path, const std::string& potential, const std::string& tgrid,
                        const std::string& rgrid, double threshold) {
  std::ifstream in(traj_path);
  if (!in) throw InputError("cannot open trajectory '" + traj_path + "'");
  TrajectoryFile f;
  try {
    f = read_trajectory_csv(in);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  std::optional<PotentialSpec> spec;
  if (!potential.empty()) spec = load_potential(potential);
  ReducedTrajectory traj = trajectory_from_file(f);
  std::vector<double> tg, rg;
  if (tgrid.empty() || rgrid.empty()) {
    Patch P = default_patch(traj);
    tg = linspace(P.t0, P.t1, 101);
    rg = linspace(P.r0, P.r1, 101);
  }
  if (!tgrid.empty()) tg = parse_grid(tgrid, "--tgrid");
  if (!rgrid.empty()) rg = parse_grid(rgrid, "--rgrid");
  SpvortResidual r = residual_spvort(reconstruct(traj, tg, rg, spec));
  auto names = SpvortResidual::names();
  auto vals = r.values();
  std::cout << std::scientific << std::setprecision(6);
  for (int k = 0; k < 4; ++k) std::cout << names[k] << "=" << vals[k] << "\n";
  if (threshold > 0 && r.max() >= threshold) return kVerifyFail;
  return kOk;
}

int cmd_steady(const std::string& potential, const std::string& params, double alpha0, double R0,
               const std::string& h0s, const std::string& rspan, double tol, const std::string& out) {
  PotentialSpec spec;
  if (!potential.empty()) {
    spec = load_potential(potential);
  } else {
    double q0 = 1.0, beta = 0.0;
    for (const auto& [k, v] : parse_params(params)) {
      if (k == "q0") q0 = v;
      else if (k == "beta") beta = v;
      else throw InputError("unknown parameter '" + k + "' (expected q0, beta)");
    }
    spec = vortex_potential(q0, beta);
  }
  auto h0 = parse_csv_numbers(h0s, 4, "--h0");
  auto [r0, r1] = parse_span(rspan, ':', "--rspan");
  SteadyTrajectory st;
  try {
    st = integrate_steady(spec, alpha0, R0, r0, h0, r1, tol);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  std::ofstream file;
  std::ostream& os = output_stream(out, file);
  os << std::setprecision(17) << "# alpha0=" << alpha0 << " R0=" << R0 << " steps=" << st.stats.steps
     << " rejected=" << st.stats.rejected;
  if (st.event) os << " event_r=" << st.event->y << " event=\"" << st.event->reason << "\"";
  os << "\nr,h,hp,hpp,hppp\n";
  for (std::size_t i = 0; i < st.r.size(); ++i)
    os << st.r[i] << "," << st.h[i][0] << "," << st.h[i][1] << "," << st.h[i][2] << "," << st.h[i][3] << "\n";
  return kOk;
}

// -- pipeline -------------------------------------------------------------------

int cmd_pipeline(const std::string& config, const std::string& reduction, const std::string& out,
                 std::uint64_t seed) {
  if (config.empty()) throw InputError("pipeline needs --config <file> or --potential <file>");
  std::ifstream in(config);
  if (!in) throw InputError("cannot open config '" + config + "'");
  PipelineConfig cfg = pipeline_config_from_map(read_key_values(in));
  cfg.seed = seed;
  if (!reduction.empty()) cfg.reduction = reduction;
  PipelineResult res = run_pipeline(cfg, out.empty() ? "inertia_out" : out);
  std::cout << res.report;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group classification and invariant solutions for fluids with internal inertia"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 42;
  std::string out, potential;
  app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--out", out, "output file or directory");
  app.add_option("--potential", potential, "potential spec file (key=value lines)");

  int rc = kOk;
  std::function<int()> action;

  auto* classify_cmd = app.add_subcommand("classify", "classify a potential");
  std::string box;
  int points = 0;
  bool kv = false;
  classify_cmd->add_option("--box", box, "sampling box lo,hi");
  classify_cmd->add_option("--points", points, "number of sample points");
  classify_cmd->add_flag("--kv", kv, "append a key=value block");
  classify_cmd->callback([&] { action = [&] { return cmd_classify(potential, seed, box, points, kv); }; });

  auto* t1 = app.add_subcommand("verify-table1", "reproduce the classification table");
  std::vector<std::string> sets;
  t1->add_option("--set", sets, "override a parameter, e.g. M1.C2=0");
  t1->callback([&] { action = [&] { return cmd_verify_table1(seed, sets); }; });

  auto* alg = app.add_subcommand("algebra", "L3/L4 algebra operations");
  alg->require_subcommand(1);
  auto* br = alg->add_subcommand("bracket", "commutator of two elements");
  std::string ea, eb, algebra_name = "L4";
  br->add_option("x", ea, "x0,x1,x2,x3")->required();
  br->add_option("y", eb, "y0,y1,y2,y3")->required();
  br->callback([&] { action = [&] { return cmd_bracket(ea, eb); }; });
  auto* nz = alg->add_subcommand("normalize", "representative in the optimal system");
  nz->add_option("x", ea, "x0,x1,x2,x3")->required();
  nz->add_option("--algebra", algebra_name, "L3 or L4")->capture_default_str();
  nz->callback([&] { action = [&] { return cmd_normalize(ea, algebra_name); }; });

  auto* opt = app.add_subcommand("optimal-system", "normalize random elements and check them");
  int trials = 1000;
  bool no_oracle = false;
  std::string element;
  opt->add_option("--trials", trials, "number of random elements")->capture_default_str();
  opt->add_option("--algebra", algebra_name, "L3 or L4")->capture_default_str();
  opt->add_option("--element", element, "normalize one element x0,x1,x2,x3 instead");
  opt->add_flag("--no-oracle", no_oracle, "skip the orbit search");
  opt->callback([&] {
    action = [&] { return cmd_optimal_system(trials, seed, algebra_name, !no_oracle, element); };
  });

  auto* vortex = app.add_subcommand("vortex", "reduced systems of the singular vortex");
  vortex->require_subcommand(1);
  auto* vi = vortex->add_subcommand("integrate", "integrate a reduced system");
  std::string sub, params, state, traj_path, tgrid, rgrid;
  double y0 = 1.0, y1 = 2.0, tol = 1e-10, threshold = 0.0;
  vi->add_option("--subalgebra", sub, "branch id, e.g. X3_2X1 or gamma_plus")->required();
  vi->add_option("--params", params, "q0=..,mu=..,beta=..");
  vi->add_option("--y0", y0)->capture_default_str();
  vi->add_option("--y1", y1)->capture_default_str();
  vi->add_option("--state", state, "V,h,Lambda,R,Rp,Rpp");
  vi->add_option("--tol", tol)->capture_default_str();
  vi->callback([&] { action = [&] { return cmd_vortex_integrate(sub, params, y0, y1, state, tol, out); }; });

  auto* vr = vortex->add_subcommand("residual", "reconstruct a field and report residuals");
  vr->add_option("--traj", traj_path, "trajectory CSV")->required();
  vr->add_option("--tgrid", tgrid, "a:b:n");
  vr->add_option("--rgrid", rgrid, "a:b:n");
  vr->add_option("--max", threshold, "exit 1 when a residual reaches this value");
  vr->callback([&] {
    action = [&] { return cmd_vortex_residual(traj_path, potential, tgrid, rgrid, threshold); };
  });

  std::string h0 = "0,1,0,0", rspan = "1:1.5";
  double alpha0 = 1.0, R0 = 1.0, steady_tol = 1e-8;
  auto add_steady = [&](CLI::App* cmd) {
    cmd->add_option("--params", params, "q0=..,beta=.. when no potential file is given");
    cmd->add_option("--alpha0", alpha0)->capture_default_str();
    cmd->add_option("--R0", R0)->capture_default_str();
    cmd->add_option("--h0", h0, "h,hp,hpp,hppp")->capture_default_str();
    cmd->add_option("--rspan", rspan, "a:b")->capture_default_str();
    cmd->add_option("--tol", steady_tol)->capture_default_str();
    cmd->callback([&] {
      action = [&] { return cmd_steady(potential, params, alpha0, R0, h0, rspan, steady_tol, out); };
    });
  };
  add_steady(vortex->add_subcommand("steady", "integrate the steady closure"));
  add_steady(app.add_subcommand("steady", "integrate the steady closure"));

  auto* pipe = app.add_subcommand("pipeline", "classify, reduce, integrate and verify");
  std::string config, reduction;
  pipe->add_option("--config", config, "config file (potential keys plus pipeline settings)");
  pipe->add_option("--reduction", reduction, "reduction to run");
  pipe->callback([&] {
    action = [&] { return cmd_pipeline(config.empty() ? potential : config, reduction, out, seed); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    rc = action ? action() : kInputError;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const InvalidPotential& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const UnknownPreset& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const PipelineError& e) {
    std::cerr << "pipeline failed " << e.what() << "\n";
    return e.stage() == "select" ? kInputError : kVerifyFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kVerifyFail;
  }
  return rc;
}

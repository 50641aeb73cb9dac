#pragma once

#include <array>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "inertia/expr.hpp"
#include "inertia/parse.hpp"

namespace inertia {

class InvalidPotential : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Coefficients over (X1, X6, X7, X14).
struct GeneratorCoeffs {
  double c1 = 0, c6 = 0, c7 = 0, c15 = 0;

  std::array<double, 4> vec() const { return {c1, c6, c7, c15}; }
  static GeneratorCoeffs from(const std::array<double, 4>& v) { return {v[0], v[1], v[2], v[3]}; }
  std::string str() const {
    std::ostringstream os;
    os.precision(10);
    os << "(" << c1 << ", " << c6 << ", " << c7 << ", " << c15 << ")";
    return os.str();
  }
};

enum class PotentialClass { M1 = 1, M2, M3, M4, M5, M6, M7, M8, M9, M10, M11, M12, M13, M14, M15 };

inline std::string class_name(PotentialClass c) { return "M" + std::to_string(static_cast<int>(c)); }

inline std::optional<PotentialClass> class_from_name(const std::string& s) {
  if (s.size() < 2 || (s[0] != 'M' && s[0] != 'm')) return std::nullopt;
  try {
    std::size_t used = 0;
    int k = std::stoi(s.substr(1), &used);
    if (used != s.size() - 1 || k < 1 || k > 15) return std::nullopt;
    return static_cast<PotentialClass>(k);
  } catch (...) {
    return std::nullopt;
  }
}

inline std::vector<PotentialClass> all_classes() {
  std::vector<PotentialClass> v;
  for (int k = 1; k <= 15; ++k) v.push_back(static_cast<PotentialClass>(k));
  return v;
}

struct PotentialSpec {
  Expr W;
  ParamEnv env;
  std::optional<PotentialClass> class_tag;
  std::optional<std::vector<GeneratorCoeffs>> expected_extension;
  std::string label;

  double operator()(double r, double rd) const { return evaluate(W, env, r, rd); }
};

// Throws InvalidPotential when a parameter is unbound or W_{rhodot rhodot}
// vanishes at every probe point.
inline void validate(const PotentialSpec& spec) {
  for (const auto& name : params_of(spec.W))
    if (!spec.env.count(name)) throw InvalidPotential("missing parameter '" + name + "'");
  Expr wdd = differentiate(spec.W, Var::RhoDot, 2);
  static const double probes[5][2] = {{0.7, 0.9}, {1.3, 1.1}, {1.9, 0.6}, {1.1, 2.2}, {2.4, 1.7}};
  for (const auto& p : probes) {
    try {
      if (std::fabs(evaluate(wdd, spec.env, p[0], p[1])) > 1e-12) return;
    } catch (const DomainError&) {
    }
  }
  throw InvalidPotential("W_{rhodot rhodot} vanishes identically (degenerate potential)");
}

namespace detail {

inline Expr real_power(const Expr& base, double e) {
  if (auto q = Rational::from_double(e)) return pow(base, *q);
  return exp(constant(e) * ln(base));
}

inline Expr num(double v) {
  if (auto q = Rational::from_double(v)) return constant(*q);
  return constant(v);
}

// Twice-integrated rho^m with zero integration constants.
inline Expr double_antiderivative_power(double m) {
  Expr r = rho();
  if (std::fabs(m + 1.0) < 1e-14) return r * ln(r);
  if (std::fabs(m + 2.0) < 1e-14) return -ln(r);
  return real_power(r, m + 2.0) * num(1.0 / ((m + 1.0) * (m + 2.0)));
}

// Twice-integrated rho^m ln(rho); m = -1, -2 are handled separately.
inline Expr double_antiderivative_power_log(double m) {
  Expr r = rho();
  if (std::fabs(m + 1.0) < 1e-14) return (r / 2.0) * (pow(ln(r), Rational(2)) - 2.0 * ln(r) + 2.0);
  if (std::fabs(m + 2.0) < 1e-14) return -(pow(ln(r), Rational(2)) / 2.0 + ln(r));
  double a = (m + 1.0) * (m + 2.0);
  return real_power(r, m + 2.0) * num(1.0 / a) * (ln(r) - num((2.0 * m + 3.0) / a));
}

inline double need(const ParamEnv& p, const std::string& k) {
  auto it = p.find(k);
  if (it == p.end()) throw InvalidPotential("missing parameter '" + k + "'");
  return it->second;
}

}  // namespace detail

struct ClassOptions {
  // phi(rho) for M3, M4, M5; phi2(rho) for M9; phi(z) for M6 written in the parameter z
  std::optional<Expr> phi;
  bool check_side_conditions = true;
};

// Parameters used when a class is instantiated without explicit values.
inline ParamEnv default_params(PotentialClass c) {
  switch (c) {
    case PotentialClass::M1: return {{"q0", 1}, {"C2", 1}};
    case PotentialClass::M2: return {{"q0", 1}};
    case PotentialClass::M3: return {{"p", 3}};
    case PotentialClass::M4: return {};
    case PotentialClass::M5: return {};
    case PotentialClass::M6: return {{"p", 2}, {"k", 1}, {"C2", 1}};
    case PotentialClass::M7: return {{"q0", 1}, {"lambda", 2}, {"p", 3}, {"mu", 0.5}, {"C2", 1}};
    case PotentialClass::M8: return {{"q0", 1}, {"lambda", 1}, {"p", 3}};
    case PotentialClass::M9: return {{"q0", 1}, {"lambda", 0}};
    case PotentialClass::M10: return {{"q0", 1}, {"lambda", 0}, {"C2", 1}};
    case PotentialClass::M11: return {{"q0", 1}, {"lambda", 2}, {"mu", 0.5}, {"C2", 1}};
    case PotentialClass::M12: return {{"q0", 1}, {"lambda", 2}, {"mu", 0.5}, {"C2", 1}};
    case PotentialClass::M13: return {{"q0", 1}, {"lambda", 2}};
    case PotentialClass::M14: return {{"q0", 1}, {"mu", 0.5}, {"C2", 1}};
    case PotentialClass::M15: return {{"q0", 1}};
  }
  return {};
}

inline Expr default_phi(PotentialClass c) {
  switch (c) {
    case PotentialClass::M4: return 1.0 + rho();
    case PotentialClass::M6: return exp(param("z"));
    default: return exp(rho());
  }
}

// Builds the catalog template for class c. q0 and C2 stay symbolic; the
// exponent-like constants (lambda, p, k, mu) are baked in. An empty parameter
// map selects default_params(c); otherwise every constant must be given.
inline PotentialSpec make_class(PotentialClass c, const ParamEnv& given = {},
                                const ClassOptions& opt = {}) {
  ParamEnv p = given.empty() ? default_params(c) : given;
  auto side = [&](bool ok, const std::string& what) {
    if (opt.check_side_conditions && !ok)
      throw InvalidPotential(class_name(c) + " side condition violated: " + what);
  };
  using detail::need;
  using detail::num;
  using detail::real_power;
  Expr r = rho(), rd = rhodot();
  Expr q0 = param("q0"), C2 = param("C2");
  Expr phi = opt.phi ? *opt.phi : default_phi(c);
  PotentialSpec s;
  std::vector<GeneratorCoeffs> ext;

  if (p.count("q0")) side(need(p, "q0") != 0.0, "q0 != 0");
  switch (c) {
    case PotentialClass::M1:
      side(need(p, "C2") != 0.0, "C2 != 0");
      s.W = -(q0 * pow(r, Rational(-5, 3)) * pow(rd, Rational(2))) +
            C2 * detail::double_antiderivative_power(-1.0 / 3.0);
      ext = {{0, 1, 0, 0}, {1, 0, -2, 3}};
      break;
    case PotentialClass::M2:
      s.W = -(q0 * pow(r, Rational(-5, 3)) * pow(rd, Rational(2)));
      ext = {{0, 1, 0, 0}, {1, 0, 0, -3}, {0, 0, 1, -3}};
      break;
    case PotentialClass::M3: {
      double pp = need(p, "p");
      side(pp * (pp - 1.0) != 0.0, "p(p-1) != 0");
      s.W = phi * real_power(rd, pp);
      ext = {{-pp, 0, 2, 0}};
      break;
    }
    case PotentialClass::M4:
      s.W = phi * ln(rd);
      ext = {{0, 0, 1, 0}};
      break;
    case PotentialClass::M5:
      s.W = rd * phi * ln(rd);
      ext = {{1, 0, -2, 0}};
      break;
    case PotentialClass::M6: {
      double pp = need(p, "p"), kk = need(p, "k");
      Expr z = rd * real_power(r, kk);
      s.W = real_power(r, pp) * substitute_param(phi, "z", z) +
            C2 * detail::double_antiderivative_power(pp - 2.0);
      ext = {{pp - 1.0, 0, 2.0 * (kk + 1.0), 2}};
      break;
    }
    case PotentialClass::M7: {
      double lam = need(p, "lambda"), pp = need(p, "p"), mu = need(p, "mu");
      side(pp * (pp - 1.0) != 0.0, "p(p-1) != 0");
      side(need(p, "C2") != 0.0, "C2 != 0");
      s.W = -(q0 * real_power(r, lam) * real_power(rd, pp)) +
            C2 * detail::double_antiderivative_power(-mu);
      double ph = (mu + lam + pp - 2.0) / pp;
      ext = {{1.0 - mu, 0, 2.0 * ph, 2}};
      break;
    }
    case PotentialClass::M8: {
      double lam = need(p, "lambda"), pp = need(p, "p");
      side(pp * (pp - 1.0) != 0.0, "p(p-1) != 0");
      s.W = -(q0 * real_power(r, lam) * real_power(rd, pp));
      ext = {{pp, 0, -2, 0}, {pp + lam - 1.0, 0, 0, 2}};
      break;
    }
    case PotentialClass::M9: {
      double lam = need(p, "lambda");
      side(lam * (lam - 1.0) == 0.0, "lambda in {0, 1}");
      s.W = -(q0 * real_power(r, lam) * ln(rd)) + phi;
      ext = {{0, 0, 1, 0}};
      break;
    }
    case PotentialClass::M10: {
      double lam = need(p, "lambda");
      side(lam * (lam - 1.0) == 0.0, "lambda in {0, 1}");
      side(need(p, "C2") != 0.0, "C2 != 0");
      s.W = -(q0 * real_power(r, lam) * ln(rd)) + C2 * detail::double_antiderivative_power(lam - 2.0);
      ext = {{lam - 1.0, 0, 0, 2}, {0, 0, 1, 0}};
      break;
    }
    case PotentialClass::M11: {
      double lam = need(p, "lambda"), mu = need(p, "mu");
      side(lam * (lam - 1.0) != 0.0, "lambda(lambda-1) != 0");
      s.W = -(q0 * real_power(r, lam) * ln(rd)) + C2 * detail::double_antiderivative_power(lam - 2.0) -
            q0 * num(lam * (lam - 1.0) * mu) * detail::double_antiderivative_power_log(lam - 2.0);
      ext = {{lam - 1.0, 0, 2.0 * (mu + 1.0), 2}};
      break;
    }
    case PotentialClass::M12: {
      double lam = need(p, "lambda"), mu = need(p, "mu");
      side(need(p, "C2") != 0.0, "C2 != 0");
      s.W = -(q0 * real_power(r, lam) * rd * ln(rd)) + C2 * detail::double_antiderivative_power(-mu);
      ext = {{1.0 - mu, 0, 2.0 * (mu + lam - 1.0), 2}};
      break;
    }
    case PotentialClass::M13: {
      double lam = need(p, "lambda");
      s.W = -(q0 * real_power(r, lam) * rd * ln(rd));
      ext = {{1, 0, -2, 0}, {0, 0, lam, 1}};
      break;
    }
    case PotentialClass::M14: {
      double mu = need(p, "mu");
      side(need(p, "C2") != 0.0, "C2 != 0");
      s.W = -(q0 * pow(rd, Rational(2))) + C2 * detail::double_antiderivative_power(-mu);
      ext = {{1.0 - mu, 0, mu, 2}};
      break;
    }
    case PotentialClass::M15:
      s.W = -(q0 * pow(rd, Rational(2)));
      ext = {{1, 0, 0, 2}, {1, 0, -1, 0}};
      break;
  }
  s.env = p;
  s.class_tag = c;
  s.expected_extension = ext;
  s.label = class_name(c);
  if (opt.check_side_conditions) validate(s);
  return s;
}

class UnknownPreset : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

inline PotentialSpec preset(const std::string& name, const ParamEnv& overrides = {}) {
  if (name == "green_naghdi") {
    PotentialSpec s;
    s.W = parse("rho*(3*g*rho - eps^2*rhodot^2)/6");
    s.env = {{"g", 1.0}, {"eps", 1.0}};
    for (const auto& [k, v] : overrides) s.env[k] = v;
    s.class_tag = PotentialClass::M7;
    // M7 with lambda = 1, p = 2, mu = 0, so phi = 1/2
    s.expected_extension = std::vector<GeneratorCoeffs>{{1, 0, 1, 2}};
    s.label = "green_naghdi";
    validate(s);
    return s;
  }
  if (name == "chaplygin_m3") {
    ParamEnv p = {{"p", 2}};
    for (const auto& [k, v] : overrides) p[k] = v;
    PotentialSpec s = make_class(PotentialClass::M3, p);
    s.label = "chaplygin_m3";
    return s;
  }
  throw UnknownPreset("unknown preset '" + name + "'");
}

// ---------------------------------------------------------------------------
// equivalence transformations, acting on the graph of W

enum class EquivalenceId { X11, X12, X13, X14, X15, X16 };

struct EquivalenceOp {
  EquivalenceId id;
  double a = 0.0;
};

inline std::string equivalence_name(EquivalenceId id) {
  static const char* names[] = {"X11", "X12", "X13", "X14", "X15", "X16"};
  return names[static_cast<int>(id)];
}

inline std::vector<EquivalenceId> all_equivalences() {
  return {EquivalenceId::X11, EquivalenceId::X12, EquivalenceId::X13,
          EquivalenceId::X14, EquivalenceId::X15, EquivalenceId::X16};
}

inline PotentialSpec apply_equivalence(const PotentialSpec& spec, const EquivalenceOp& op) {
  PotentialSpec out = spec;
  Expr r = rho(), rd = rhodot();
  double ea = std::exp(op.a);
  const Expr& W = spec.W;
  switch (op.id) {
    case EquivalenceId::X11:  // rhodot' = e^{-a} rhodot
      out.W = substitute(W, r, ea * rd);
      break;
    case EquivalenceId::X12:
      out.W = W + op.a;
      break;
    case EquivalenceId::X13:
      out.W = W + op.a * r;
      break;
    case EquivalenceId::X14:
      out.W = W + op.a * rd;
      break;
    case EquivalenceId::X15:  // (rho, rhodot, W) all scale by e^a
      out.W = ea * substitute(W, r / ea, rd / ea);
      break;
    case EquivalenceId::X16: {  // (rho, rhodot) scale by e^{-2a}
      double s = std::exp(2.0 * op.a);
      out.W = substitute(W, s * r, s * rd);
      break;
    }
  }
  out.class_tag.reset();
  out.expected_extension.reset();
  std::ostringstream os;
  os << equivalence_name(op.id) << "(" << op.a << ")[" << spec.label << "]";
  out.label = os.str();
  return out;
}

// ---------------------------------------------------------------------------
// potential files: key=value lines, '#' comments

inline double parse_number_expr(const std::string& text, const std::string& key) {
  Expr e = parse(text);
  if (!params_of(e).empty() || e.depends_on(Var::Rho) || e.depends_on(Var::RhoDot))
    throw InvalidPotential("value of '" + key + "' must be a number");
  return evaluate(e, {}, 1.0, 1.0);
}

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Reads key=value pairs; duplicate keys are an error. Unknown string keys
// are passed through so callers can pick their own settings out of the map.
inline std::map<std::string, std::string> read_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidPotential("line " + std::to_string(lineno) + ": expected key=value");
    std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
    if (k.empty()) throw InvalidPotential("line " + std::to_string(lineno) + ": empty key");
    if (kv.count(k)) throw InvalidPotential("duplicate key '" + k + "'");
    kv[k] = v;
  }
  return kv;
}

// Keys that are not potential parameters (pipeline settings and the like).
inline bool is_reserved_key(const std::string& k) {
  static const std::set<std::string> reserved = {
      "class", "W", "phi", "preset", "label", "reduction", "y0", "y1", "state",
      "tol", "tgrid", "rgrid", "samples", "gamma", "alpha0", "R0", "h0", "r0", "r1", "grid"};
  return reserved.count(k) > 0;
}

inline PotentialSpec potential_from_map(const std::map<std::string, std::string>& kv) {
  ParamEnv env;
  for (const auto& [k, v] : kv)
    if (!is_reserved_key(k)) env[k] = parse_number_expr(v, k);
  int sources = static_cast<int>(kv.count("class")) + static_cast<int>(kv.count("W")) +
                static_cast<int>(kv.count("preset"));
  if (sources != 1) throw InvalidPotential("exactly one of class=, W= or preset= is required");
  PotentialSpec s;
  if (kv.count("preset")) {
    s = preset(kv.at("preset"), env);
  } else if (kv.count("class")) {
    auto c = class_from_name(kv.at("class"));
    if (!c) throw InvalidPotential("unknown class '" + kv.at("class") + "'");
    ClassOptions opt;
    if (kv.count("phi")) opt.phi = parse(kv.at("phi"));
    s = make_class(*c, env, opt);
  } else {
    s.W = parse(kv.at("W"));
    s.env = env;
    s.label = "W = " + kv.at("W");
    validate(s);
  }
  if (kv.count("label")) s.label = kv.at("label");
  return s;
}

inline PotentialSpec read_potential_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidPotential("cannot open potential file '" + path + "'");
  return potential_from_map(read_key_values(in));
}

}  // namespace inertia

#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "inertia/rational.hpp"

namespace inertia {

class DomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class UnboundParameter : public std::runtime_error {
public:
  explicit UnboundParameter(const std::string& name)
      : std::runtime_error("unbound parameter '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

private:
  std::string name_;
};

using ParamEnv = std::map<std::string, double>;

enum class Var { Rho = 0, RhoDot = 1 };

enum class Kind { Constant, Param, Rho, RhoDot, Sum, Product, Power, Ln, Exp, Neg };

class Expr;

namespace detail {

struct Node {
  Kind kind = Kind::Constant;
  double value = 0.0;                 // Constant
  std::optional<Rational> exact;      // Constant, when known exactly
  std::string name;                   // Param
  Rational exponent;                  // Power
  std::vector<std::shared_ptr<const Node>> children;
  bool depends[2] = {false, false};

  // first-derivative cache, one slot per variable; filled at most once
  mutable std::once_flag once[2];
  mutable std::shared_ptr<const Node> deriv[2];
};

using NodePtr = std::shared_ptr<const Node>;

}  // namespace detail

// Immutable handle to an expression tree in rho and rhodot.
class Expr {
public:
  Expr();
  explicit Expr(detail::NodePtr n) : node_(std::move(n)) {}

  Kind kind() const { return node_->kind; }
  const detail::Node& node() const { return *node_; }
  const detail::NodePtr& ptr() const { return node_; }
  std::size_t child_count() const { return node_->children.size(); }
  Expr child(std::size_t i) const { return Expr(node_->children.at(i)); }
  bool depends_on(Var v) const { return node_->depends[static_cast<int>(v)]; }

  bool is_constant() const { return node_->kind == Kind::Constant; }
  bool is_zero() const { return is_constant() && node_->value == 0.0; }
  bool is_one() const { return is_constant() && node_->value == 1.0; }
  double constant_value() const { return node_->value; }
  std::optional<Rational> exact_value() const { return node_->exact; }

private:
  detail::NodePtr node_;
};

namespace detail {

inline std::shared_ptr<Node> make_node(Kind k) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  return n;
}

inline void inherit_deps(Node& n) {
  for (const auto& c : n.children) {
    n.depends[0] = n.depends[0] || c->depends[0];
    n.depends[1] = n.depends[1] || c->depends[1];
  }
}

}  // namespace detail

inline Expr constant(double v) {
  auto n = detail::make_node(Kind::Constant);
  n->value = v;
  if (auto r = Rational::from_double(v, 0.0)) n->exact = r;
  return Expr(n);
}

inline Expr constant(const Rational& r) {
  auto n = detail::make_node(Kind::Constant);
  n->value = r.to_double();
  n->exact = r;
  return Expr(n);
}

inline Expr::Expr() : node_(constant(0.0).ptr()) {}

inline Expr param(const std::string& name) {
  auto n = detail::make_node(Kind::Param);
  n->name = name;
  return Expr(n);
}

inline Expr rho() {
  static const Expr e = [] {
    auto n = detail::make_node(Kind::Rho);
    n->depends[0] = true;
    return Expr(n);
  }();
  return e;
}

inline Expr rhodot() {
  static const Expr e = [] {
    auto n = detail::make_node(Kind::RhoDot);
    n->depends[1] = true;
    return Expr(n);
  }();
  return e;
}

namespace detail {

// Folds two constants; exact when both are exact and the result fits.
inline Expr fold(const Expr& a, const Expr& b, bool multiply) {
  auto ea = a.exact_value(), eb = b.exact_value();
  if (ea && eb) {
    auto r = multiply ? Rational::checked_mul(*ea, *eb) : Rational::checked_add(*ea, *eb);
    if (r) return constant(*r);
  }
  return constant(multiply ? a.constant_value() * b.constant_value()
                           : a.constant_value() + b.constant_value());
}

}  // namespace detail

inline Expr sum(const std::vector<Expr>& terms) {
  std::vector<detail::NodePtr> kids;
  Expr acc = constant(Rational(0));
  for (const auto& t : terms) {
    if (t.kind() == Kind::Sum) {
      for (std::size_t i = 0; i < t.child_count(); ++i) {
        Expr c = t.child(i);
        if (c.is_constant()) acc = detail::fold(acc, c, false);
        else kids.push_back(c.ptr());
      }
    } else if (t.is_constant()) {
      acc = detail::fold(acc, t, false);
    } else {
      kids.push_back(t.ptr());
    }
  }
  if (!acc.is_zero()) kids.push_back(acc.ptr());
  if (kids.empty()) return constant(Rational(0));
  if (kids.size() == 1) return Expr(kids[0]);
  auto n = detail::make_node(Kind::Sum);
  n->children = std::move(kids);
  detail::inherit_deps(*n);
  return Expr(n);
}

inline Expr product(const std::vector<Expr>& factors) {
  std::vector<detail::NodePtr> kids;
  Expr acc = constant(Rational(1));
  for (const auto& f : factors) {
    if (f.kind() == Kind::Product) {
      for (std::size_t i = 0; i < f.child_count(); ++i) {
        Expr c = f.child(i);
        if (c.is_constant()) acc = detail::fold(acc, c, true);
        else kids.push_back(c.ptr());
      }
    } else if (f.is_constant()) {
      acc = detail::fold(acc, f, true);
    } else {
      kids.push_back(f.ptr());
    }
  }
  if (acc.is_zero()) return constant(Rational(0));
  if (!acc.is_one()) kids.insert(kids.begin(), acc.ptr());
  if (kids.empty()) return constant(Rational(1));
  if (kids.size() == 1) return Expr(kids[0]);
  auto n = detail::make_node(Kind::Product);
  n->children = std::move(kids);
  detail::inherit_deps(*n);
  return Expr(n);
}

inline Expr neg(const Expr& a) {
  if (a.is_constant()) {
    if (auto r = a.exact_value()) return constant(-*r);
    return constant(-a.constant_value());
  }
  if (a.kind() == Kind::Neg) return a.child(0);
  auto n = detail::make_node(Kind::Neg);
  n->children = {a.ptr()};
  detail::inherit_deps(*n);
  return Expr(n);
}

inline Expr pow(const Expr& base, const Rational& q) {
  if (q.is_zero()) return constant(Rational(1));
  if (q == Rational(1)) return base;
  if (base.is_constant()) {
    auto eb = base.exact_value();
    if (eb && q.is_integer() && std::llabs(q.num()) <= 64) {
      if (auto r = Rational::checked_pow(*eb, q.num())) return constant(*r);
    }
    double b = base.constant_value();
    if (b > 0.0 || q.is_integer()) return constant(std::pow(b, q.to_double()));
  }
  // (u^a)^k with integer k is safe to merge
  if (base.kind() == Kind::Power && q.is_integer()) {
    auto merged = Rational::checked_mul(base.node().exponent, q);
    if (merged) return pow(base.child(0), *merged);
  }
  auto n = detail::make_node(Kind::Power);
  n->exponent = q;
  n->children = {base.ptr()};
  detail::inherit_deps(*n);
  return Expr(n);
}

inline Expr ln(const Expr& a) {
  if (a.is_constant() && a.constant_value() > 0.0) {
    if (a.is_one()) return constant(Rational(0));
    return constant(std::log(a.constant_value()));
  }
  auto n = detail::make_node(Kind::Ln);
  n->children = {a.ptr()};
  detail::inherit_deps(*n);
  return Expr(n);
}

inline Expr exp(const Expr& a) {
  if (a.is_constant()) {
    if (a.is_zero()) return constant(Rational(1));
    return constant(std::exp(a.constant_value()));
  }
  auto n = detail::make_node(Kind::Exp);
  n->children = {a.ptr()};
  detail::inherit_deps(*n);
  return Expr(n);
}

// Power with an arbitrary exponent expression. Constant exponents that are
// recognisably rational stay exact; anything else becomes exp(b*ln(a)).
inline Expr pow(const Expr& base, const Expr& e) {
  if (e.is_constant()) {
    if (auto r = e.exact_value()) return pow(base, *r);
    if (auto r = Rational::from_double(e.constant_value())) return pow(base, *r);
  }
  return exp(product({e, ln(base)}));
}

inline Expr pow(const Expr& base, double e) { return pow(base, constant(e)); }

inline Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
inline Expr operator-(const Expr& a, const Expr& b) { return sum({a, neg(b)}); }
inline Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }
inline Expr operator/(const Expr& a, const Expr& b) { return product({a, pow(b, Rational(-1))}); }
inline Expr operator-(const Expr& a) { return neg(a); }
inline Expr operator+(const Expr& a, double b) { return a + constant(b); }
inline Expr operator+(double a, const Expr& b) { return constant(a) + b; }
inline Expr operator-(const Expr& a, double b) { return a - constant(b); }
inline Expr operator-(double a, const Expr& b) { return constant(a) - b; }
inline Expr operator*(double a, const Expr& b) { return constant(a) * b; }
inline Expr operator*(const Expr& a, double b) { return a * constant(b); }
inline Expr operator/(const Expr& a, double b) { return a / constant(b); }
inline Expr operator/(double a, const Expr& b) { return constant(a) / b; }

// ---------------------------------------------------------------------------
// differentiation

namespace detail {

inline Expr derivative_uncached(const Expr& e, Var v);

inline Expr d1(const Expr& e, Var v) {
  if (!e.depends_on(v)) return constant(Rational(0));
  const Node& n = e.node();
  int slot = static_cast<int>(v);
  std::call_once(n.once[slot], [&] { n.deriv[slot] = derivative_uncached(e, v).ptr(); });
  return Expr(n.deriv[slot]);
}

inline Expr derivative_uncached(const Expr& e, Var v) {
  switch (e.kind()) {
    case Kind::Constant:
    case Kind::Param:
      return constant(Rational(0));
    case Kind::Rho:
      return constant(Rational(v == Var::Rho ? 1 : 0));
    case Kind::RhoDot:
      return constant(Rational(v == Var::RhoDot ? 1 : 0));
    case Kind::Sum: {
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < e.child_count(); ++i) terms.push_back(d1(e.child(i), v));
      return sum(terms);
    }
    case Kind::Product: {
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < e.child_count(); ++i) {
        if (!e.child(i).depends_on(v)) continue;
        std::vector<Expr> f;
        for (std::size_t j = 0; j < e.child_count(); ++j)
          f.push_back(i == j ? d1(e.child(j), v) : e.child(j));
        terms.push_back(product(f));
      }
      return sum(terms);
    }
    case Kind::Power: {
      const Rational& q = e.node().exponent;
      Expr u = e.child(0);
      return product({constant(q), pow(u, q - Rational(1)), d1(u, v)});
    }
    case Kind::Ln: {
      Expr u = e.child(0);
      return product({d1(u, v), pow(u, Rational(-1))});
    }
    case Kind::Exp:
      return product({e, d1(e.child(0), v)});
    case Kind::Neg:
      return neg(d1(e.child(0), v));
  }
  throw std::logic_error("malformed expression");
}

}  // namespace detail

inline Expr differentiate(const Expr& e, Var v, int order = 1) {
  if (order < 1) throw std::invalid_argument("derivative order must be >= 1");
  Expr r = e;
  for (int i = 0; i < order; ++i) r = detail::d1(r, v);
  return r;
}

// Mixed derivative, applied left to right: d(e, {RhoDot, RhoDot, Rho}).
inline Expr differentiate(const Expr& e, std::initializer_list<Var> vars) {
  Expr r = e;
  for (Var v : vars) r = detail::d1(r, v);
  return r;
}

// ---------------------------------------------------------------------------
// evaluation

namespace detail {

inline double check_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw DomainError(std::string("non-finite value in ") + what);
  return x;
}

inline double eval(const Node& n, const ParamEnv& env, double r, double rd) {
  switch (n.kind) {
    case Kind::Constant:
      return n.value;
    case Kind::Param: {
      auto it = env.find(n.name);
      if (it == env.end()) throw UnboundParameter(n.name);
      return it->second;
    }
    case Kind::Rho:
      return r;
    case Kind::RhoDot:
      return rd;
    case Kind::Sum: {
      double s = 0.0;
      for (const auto& c : n.children) s += eval(*c, env, r, rd);
      return s;
    }
    case Kind::Product: {
      double p = 1.0;
      for (const auto& c : n.children) p *= eval(*c, env, r, rd);
      return p;
    }
    case Kind::Power: {
      double b = eval(*n.children[0], env, r, rd);
      const Rational& q = n.exponent;
      if (b == 0.0 && q.num() < 0) throw DomainError("zero raised to a negative power");
      if (q.is_integer()) {
        auto k = q.num();
        if (k == 2) return b * b;
        if (k == -1) return check_finite(1.0 / b, "power");
        return check_finite(std::pow(b, static_cast<double>(k)), "power");
      }
      if (b < 0.0) {
        if (q.den() % 2 == 0) throw DomainError("even root of a negative number");
        double m = std::pow(-b, q.to_double());
        return check_finite(q.num() % 2 == 0 ? m : -m, "power");
      }
      return check_finite(std::pow(b, q.to_double()), "power");
    }
    case Kind::Ln: {
      double a = eval(*n.children[0], env, r, rd);
      if (!(a > 0.0)) throw DomainError("logarithm of a non-positive number");
      return std::log(a);
    }
    case Kind::Exp:
      return check_finite(std::exp(eval(*n.children[0], env, r, rd)), "exp");
    case Kind::Neg:
      return -eval(*n.children[0], env, r, rd);
  }
  throw std::logic_error("malformed expression");
}

}  // namespace detail

inline double evaluate(const Expr& e, const ParamEnv& env, double rho_value, double rhodot_value) {
  return detail::check_finite(detail::eval(e.node(), env, rho_value, rhodot_value), "evaluate");
}

// ---------------------------------------------------------------------------
// structural helpers

inline void collect_params(const Expr& e, std::set<std::string>& out) {
  if (e.kind() == Kind::Param) out.insert(e.node().name);
  for (std::size_t i = 0; i < e.child_count(); ++i) collect_params(e.child(i), out);
}

inline std::set<std::string> params_of(const Expr& e) {
  std::set<std::string> s;
  collect_params(e, s);
  return s;
}

// Rebuilds e bottom-up, replacing leaves through `leaf` (which returns
// nullopt to keep the leaf as is).
inline Expr rebuild(const Expr& e, const std::function<std::optional<Expr>(const Expr&)>& leaf) {
  switch (e.kind()) {
    case Kind::Constant:
    case Kind::Param:
    case Kind::Rho:
    case Kind::RhoDot: {
      auto r = leaf(e);
      return r ? *r : e;
    }
    case Kind::Sum:
    case Kind::Product: {
      std::vector<Expr> kids;
      for (std::size_t i = 0; i < e.child_count(); ++i) kids.push_back(rebuild(e.child(i), leaf));
      return e.kind() == Kind::Sum ? sum(kids) : product(kids);
    }
    case Kind::Power:
      return pow(rebuild(e.child(0), leaf), e.node().exponent);
    case Kind::Ln:
      return ln(rebuild(e.child(0), leaf));
    case Kind::Exp:
      return exp(rebuild(e.child(0), leaf));
    case Kind::Neg:
      return neg(rebuild(e.child(0), leaf));
  }
  throw std::logic_error("malformed expression");
}

inline Expr substitute(const Expr& e, const Expr& rho_by, const Expr& rhodot_by) {
  return rebuild(e, [&](const Expr& x) -> std::optional<Expr> {
    if (x.kind() == Kind::Rho) return rho_by;
    if (x.kind() == Kind::RhoDot) return rhodot_by;
    return std::nullopt;
  });
}

inline Expr substitute_param(const Expr& e, const std::string& name, const Expr& by) {
  return rebuild(e, [&](const Expr& x) -> std::optional<Expr> {
    if (x.kind() == Kind::Param && x.node().name == name) return by;
    return std::nullopt;
  });
}

inline Expr bind_params(const Expr& e, const ParamEnv& env) {
  return rebuild(e, [&](const Expr& x) -> std::optional<Expr> {
    if (x.kind() != Kind::Param) return std::nullopt;
    auto it = env.find(x.node().name);
    if (it == env.end()) return std::nullopt;
    return constant(it->second);
  });
}

// ---------------------------------------------------------------------------
// printing

namespace detail {

inline std::string fmt_number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

// precedence: 1 sum, 2 product, 3 unary minus, 4 power, 5 atom
inline std::string print(const Expr& e, int& prec) {
  auto wrap = [](const std::string& s, int inner, int need) {
    return inner < need ? "(" + s + ")" : s;
  };
  switch (e.kind()) {
    case Kind::Constant: {
      auto r = e.exact_value();
      std::string s = r ? r->str() : fmt_number(e.constant_value());
      prec = (r && !r->is_integer()) ? 2 : 5;
      if (e.constant_value() < 0.0) prec = 3;
      return s;
    }
    case Kind::Param:
      prec = 5;
      return e.node().name;
    case Kind::Rho:
      prec = 5;
      return "rho";
    case Kind::RhoDot:
      prec = 5;
      return "rhodot";
    case Kind::Sum: {
      std::string s;
      for (std::size_t i = 0; i < e.child_count(); ++i) {
        Expr c = e.child(i);
        int p = 0;
        if (i > 0 && c.kind() == Kind::Neg) {
          int q = 0;
          std::string inner = print(c.child(0), q);
          s += " - " + wrap(inner, q, 2);
          continue;
        }
        if (i > 0 && c.is_constant() && c.constant_value() < 0.0) {
          int q = 0;
          std::string inner = print(neg(c), q);
          s += " - " + wrap(inner, q, 2);
          continue;
        }
        std::string t = print(c, p);
        if (i > 0) s += " + ";
        s += wrap(t, p, 1);
      }
      prec = 1;
      return s;
    }
    case Kind::Product: {
      std::string s;
      for (std::size_t i = 0; i < e.child_count(); ++i) {
        int p = 0;
        std::string t = print(e.child(i), p);
        if (i > 0) s += "*";
        s += wrap(t, p, i == 0 ? 3 : 4);
      }
      prec = 2;
      return s;
    }
    case Kind::Power: {
      int p = 0;
      std::string b = print(e.child(0), p);
      const Rational& q = e.node().exponent;
      std::string ex = q.is_integer() && q.num() >= 0 ? q.str() : "(" + q.str() + ")";
      prec = 4;
      return wrap(b, p, 5) + "^" + ex;
    }
    case Kind::Ln:
    case Kind::Exp: {
      int p = 0;
      std::string a = print(e.child(0), p);
      prec = 5;
      return std::string(e.kind() == Kind::Ln ? "ln(" : "exp(") + a + ")";
    }
    case Kind::Neg: {
      int p = 0;
      std::string a = print(e.child(0), p);
      prec = 3;
      return "-" + wrap(a, p, 3);
    }
  }
  throw std::logic_error("malformed expression");
}

}  // namespace detail

inline std::string to_string(const Expr& e) {
  int p = 0;
  return detail::print(e, p);
}

inline std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_string(e); }

}  // namespace inertia

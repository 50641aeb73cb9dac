#pragma once

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace inertia {

// Coordinates over (X0, X1, X2, X3).
struct AlgebraElement {
  std::array<double, 4> x{};

  double& operator[](int i) { return x[i]; }
  double operator[](int i) const { return x[i]; }

  static AlgebraElement basis(int i) {
    AlgebraElement e;
    e.x[i] = 1.0;
    return e;
  }
  friend AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
    AlgebraElement r;
    for (int i = 0; i < 4; ++i) r.x[i] = a.x[i] + b.x[i];
    return r;
  }
  friend AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
    AlgebraElement r;
    for (int i = 0; i < 4; ++i) r.x[i] = a.x[i] - b.x[i];
    return r;
  }
  friend AlgebraElement operator*(double s, const AlgebraElement& a) {
    AlgebraElement r;
    for (int i = 0; i < 4; ++i) r.x[i] = s * a.x[i];
    return r;
  }
  double max_abs() const {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::fabs(v));
    return m;
  }
  double norm() const { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]); }
  std::string str() const {
    std::ostringstream os;
    os.precision(10);
    os << "(" << x[0] << ", " << x[1] << ", " << x[2] << ", " << x[3] << ")";
    return os.str();
  }
};

enum class Algebra { L3, L4 };

// structure_constants()[i][j] = [Xi, Xj]
inline const std::array<std::array<AlgebraElement, 4>, 4>& structure_constants() {
  static const auto table = [] {
    std::array<std::array<AlgebraElement, 4>, 4> t{};
    auto X = [](int i) { return AlgebraElement::basis(i); };
    auto set = [&](int i, int j, const AlgebraElement& v) {
      t[i][j] = v;
      t[j][i] = -1.0 * v;
    };
    set(0, 1, X(0));
    set(0, 2, X(3));
    set(0, 3, 2.0 * X(0));
    set(1, 2, X(2));
    set(1, 3, AlgebraElement{});
    set(2, 3, -2.0 * X(2));
    return t;
  }();
  return table;
}

inline AlgebraElement bracket(const AlgebraElement& X, const AlgebraElement& Y) {
  const auto& C = structure_constants();
  AlgebraElement r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double c = X.x[i] * Y.x[j];
      if (c == 0.0) continue;
      for (int k = 0; k < 4; ++k) r.x[k] += c * C[i][j].x[k];
    }
  return r;
}

enum class Automorphism { A0, A1, A2, A3, E };

inline std::string automorphism_name(Automorphism id) {
  static const char* n[] = {"A0", "A1", "A2", "A3", "E"};
  return n[static_cast<int>(id)];
}

// A3 acts as exp(a ad X3); the scaling x0 e^a, x2 e^a does not preserve
// [X0, X2] = X3 and is not used.
inline AlgebraElement apply_automorphism(Automorphism id, double a, const AlgebraElement& X) {
  AlgebraElement r = X;
  const double x0 = X.x[0], x1 = X.x[1], x2 = X.x[2], x3 = X.x[3];
  switch (id) {
    case Automorphism::A0:
      r.x[0] = x0 + a * (x1 + 2.0 * x3) + a * a * x2;
      r.x[3] = x3 + a * x2;
      break;
    case Automorphism::A1:
      r.x[0] = x0 * std::exp(-a);
      r.x[2] = x2 * std::exp(a);
      break;
    case Automorphism::A2:
      r.x[2] = x2 + a * (x1 + 2.0 * x3) + a * a * x0;
      r.x[3] = x3 + a * x0;
      break;
    case Automorphism::A3:
      r.x[0] = x0 * std::exp(-2.0 * a);
      r.x[2] = x2 * std::exp(2.0 * a);
      break;
    case Automorphism::E:
      r.x[0] = -x0;
      r.x[2] = -x2;
      break;
  }
  return r;
}

enum class Representative { X2_plus_X0, X2_minus_X0, X0, X1_X2_gammaX0, X3_minus_2X1, X1 };

inline std::string representative_name(Representative r) {
  switch (r) {
    case Representative::X2_plus_X0: return "X2+X0";
    case Representative::X2_minus_X0: return "X2-X0";
    case Representative::X0: return "X0";
    case Representative::X1_X2_gammaX0: return "X1+X2+gammaX0";
    case Representative::X3_minus_2X1: return "X3-2X1";
    case Representative::X1: return "X1";
  }
  return "?";
}

inline AlgebraElement representative_coords(Representative r, double gamma = 0.0) {
  switch (r) {
    case Representative::X2_plus_X0: return {{1, 0, 1, 0}};
    case Representative::X2_minus_X0: return {{-1, 0, 1, 0}};
    case Representative::X0: return {{1, 0, 0, 0}};
    case Representative::X1_X2_gammaX0: return {{gamma, 1, 1, 0}};
    case Representative::X3_minus_2X1: return {{0, -2, 0, 1}};
    case Representative::X1: return {{0, 1, 0, 0}};
  }
  return {};
}

struct CertificateStep {
  enum class Kind { Map, Scale } kind = Kind::Map;
  Automorphism id = Automorphism::A0;
  double a = 0.0;  // group parameter, or the factor for Scale

  std::string str() const {
    std::ostringstream os;
    os.precision(12);
    if (kind == Kind::Scale) os << "scale(" << a + 0.0 << ")";
    else if (id == Automorphism::E) os << "E";
    else os << automorphism_name(id) << "(" << a + 0.0 << ")";
    return os.str();
  }
};

struct CanonicalRep {
  Representative rep;
  double gamma = 0.0;
  std::vector<CertificateStep> certificate;

  AlgebraElement coords() const { return representative_coords(rep, gamma); }
  std::string name() const {
    if (rep != Representative::X1_X2_gammaX0) return representative_name(rep);
    std::ostringstream os;
    os.precision(12);
    os << "X1+X2+" << gamma << "X0";
    return os.str();
  }
};

inline AlgebraElement replay(const AlgebraElement& X, const std::vector<CertificateStep>& cert) {
  AlgebraElement r = X;
  for (const auto& s : cert) {
    if (s.kind == CertificateStep::Kind::Scale) r = s.a * r;
    else r = apply_automorphism(s.id, s.a, r);
  }
  return r;
}

// Nonzero multiples are identified; both vectors are scaled so the largest
// coordinate is +1 before comparison.
inline bool projective_equal(const AlgebraElement& a, const AlgebraElement& b, double tol = 1e-9) {
  auto canon = [](const AlgebraElement& v) {
    int k = 0;
    for (int i = 1; i < 4; ++i)
      if (std::fabs(v.x[i]) > std::fabs(v.x[k]) + 1e-15) k = i;
    return (1.0 / v.x[k]) * v;
  };
  if (a.max_abs() == 0.0 || b.max_abs() == 0.0) return a.max_abs() == b.max_abs();
  AlgebraElement d = canon(a) - canon(b);
  return d.max_abs() <= tol;
}

class ZeroElement : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

struct Normalizer {
  AlgebraElement x;
  std::vector<CertificateStep> cert;
  double zero_tol;

  void map(Automorphism id, double a) {
    x = apply_automorphism(id, a, x);
    cert.push_back({CertificateStep::Kind::Map, id, a});
  }
  void scale(double s) {
    x = s * x;
    cert.push_back({CertificateStep::Kind::Scale, Automorphism::A0, s});
  }
  bool is_zero(double v) const { return std::fabs(v) <= zero_tol * x.max_abs(); }

  // A0 with the candidate parameter that makes x0 largest.
  void make_x0_nonzero() {
    static const double candidates[] = {1.0, -1.0, 2.0, -2.0, 0.5, -0.5};
    double best = candidates[0], best_val = -1.0;
    for (double a : candidates) {
      double v = std::fabs(apply_automorphism(Automorphism::A0, a, x).x[0]);
      if (v > best_val) {
        best_val = v;
        best = a;
      }
    }
    map(Automorphism::A0, best);
  }

  // Clean coordinates that the chain has driven to zero.
  void snap(std::initializer_list<int> idx) {
    for (int i : idx)
      if (is_zero(x.x[i])) x.x[i] = 0.0;
  }
};

}  // namespace detail

inline CanonicalRep normalize(const AlgebraElement& X, Algebra algebra = Algebra::L4,
                              double zero_tol = 1e-12) {
  if (X.max_abs() == 0.0) throw ZeroElement("cannot normalize the zero element");
  detail::Normalizer n{X, {}, zero_tol};
  if (algebra == Algebra::L3 && !n.is_zero(X.x[1]))
    throw std::invalid_argument("L3 elements must have x1 = 0");

  if (algebra == Algebra::L3 || n.is_zero(X.x[1])) {
    // case (a)
    n.x.x[1] = 0.0;
    if (n.is_zero(n.x.x[0])) n.make_x0_nonzero();
    n.map(Automorphism::A2, -n.x.x[3] / n.x.x[0]);
    n.snap({3});
    double x0 = n.x.x[0], x2 = n.x.x[2];
    if (n.is_zero(x2)) {
      n.scale(1.0 / x0);
      return {Representative::X0, 0.0, n.cert};
    }
    n.map(Automorphism::A1, 0.5 * std::log(std::fabs(x0 / x2)));
    double m = std::sqrt(std::fabs(x0 * x2));
    n.scale((x2 > 0 ? 1.0 : -1.0) / m);
    return {x0 * x2 > 0 ? Representative::X2_plus_X0 : Representative::X2_minus_X0, 0.0, n.cert};
  }

  // case (b)
  n.scale(1.0 / X.x[1]);
  if (n.is_zero(n.x.x[0])) {
    if (!n.is_zero(2.0 * n.x.x[3] + 1.0) || !n.is_zero(n.x.x[2])) {
      n.make_x0_nonzero();
    } else {
      n.scale(-2.0);
      return {Representative::X3_minus_2X1, 0.0, n.cert};
    }
  }
  n.map(Automorphism::A2, -n.x.x[3] / n.x.x[0]);
  n.snap({3});
  if (n.is_zero(n.x.x[2])) {
    n.map(Automorphism::A0, -n.x.x[0]);
    return {Representative::X1, 0.0, n.cert};
  }
  if (n.x.x[2] < 0.0) n.map(Automorphism::E, 0.0);
  n.map(Automorphism::A1, -std::log(n.x.x[2]));
  return {Representative::X1_X2_gammaX0, n.x.x[0], n.cert};
}

}  // namespace inertia

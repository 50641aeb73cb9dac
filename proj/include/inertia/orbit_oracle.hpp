#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "inertia/lie_algebra.hpp"

namespace inertia {

// Independent check that a representative lies in the orbit of an element:
// a coarse grid over compositions of three automorphisms, refined by
// Nelder-Mead. Does not use normalize.
struct OrbitSearchResult {
  bool found = false;
  double distance = std::numeric_limits<double>::infinity();
  std::array<double, 3> params{};
  int order = 0;
  bool with_E = false;
};

inline double projective_distance(const AlgebraElement& a, const AlgebraElement& b) {
  double na = a.norm(), nb = b.norm();
  if (!(na > 0) || !(nb > 0) || !std::isfinite(na) || !std::isfinite(nb))
    return std::numeric_limits<double>::infinity();
  AlgebraElement u = (1.0 / na) * a, v = (1.0 / nb) * b;
  return std::min((u - v).norm(), (u + v).norm());
}

namespace detail {

inline AlgebraElement orbit_map(const AlgebraElement& X, const std::array<double, 3>& p, int order, bool E) {
  static const Automorphism orders[4][3] = {{Automorphism::A2, Automorphism::A1, Automorphism::A0},
                                            {Automorphism::A0, Automorphism::A1, Automorphism::A2},
                                            {Automorphism::A0, Automorphism::A2, Automorphism::A0},
                                            {Automorphism::A2, Automorphism::A0, Automorphism::A2}};
  AlgebraElement Y = E ? apply_automorphism(Automorphism::E, 0.0, X) : X;
  for (int k = 0; k < 3; ++k) Y = apply_automorphism(orders[order][k], p[k], Y);
  return Y;
}

template <class F>
std::array<double, 3> nelder_mead(F f, std::array<double, 3> x0, double step, int max_iter, double ftol) {
  std::array<std::array<double, 3>, 4> s;
  std::array<double, 4> fv;
  s[0] = x0;
  for (int i = 0; i < 3; ++i) {
    s[i + 1] = x0;
    s[i + 1][i] += step;
  }
  for (int i = 0; i < 4; ++i) fv[i] = f(s[i]);
  for (int it = 0; it < max_iter; ++it) {
    std::array<int, 4> idx = {0, 1, 2, 3};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    auto s2 = s;
    auto f2 = fv;
    for (int i = 0; i < 4; ++i) {
      s[i] = s2[idx[i]];
      fv[i] = f2[idx[i]];
    }
    if (fv[0] < ftol) break;
    std::array<double, 3> c{};
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) c[k] += s[i][k] / 3.0;
    auto along = [&](double t) {
      std::array<double, 3> p;
      for (int k = 0; k < 3; ++k) p[k] = c[k] + t * (s[3][k] - c[k]);
      return p;
    };
    auto xr = along(-1.0);
    double fr = f(xr);
    if (fr < fv[0]) {
      auto xe = along(-2.0);
      double fe = f(xe);
      if (fe < fr) {
        s[3] = xe;
        fv[3] = fe;
      } else {
        s[3] = xr;
        fv[3] = fr;
      }
    } else if (fr < fv[2]) {
      s[3] = xr;
      fv[3] = fr;
    } else {
      auto xc = fr < fv[3] ? along(-0.5) : along(0.5);
      double fc = f(xc);
      if (fc < std::min(fr, fv[3])) {
        s[3] = xc;
        fv[3] = fc;
      } else {
        for (int i = 1; i < 4; ++i) {
          for (int k = 0; k < 3; ++k) s[i][k] = s[0][k] + 0.5 * (s[i][k] - s[0][k]);
          fv[i] = f(s[i]);
        }
      }
    }
  }
  int best = static_cast<int>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  return s[best];
}

}  // namespace detail

inline OrbitSearchResult orbit_contains(const AlgebraElement& X, const AlgebraElement& target, double tol = 1e-6,
                                        int grid = 21, double range = 5.0) {
  struct Seed {
    double d;
    std::array<double, 3> p;
    int order;
    bool E;
  };
  std::vector<Seed> seeds;
  seeds.reserve(static_cast<std::size_t>(8 * grid * grid * grid));
  OrbitSearchResult best;
  for (int order = 0; order < 4; ++order)
    for (int e = 0; e < 2; ++e)
      for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j)
          for (int k = 0; k < grid; ++k) {
            std::array<double, 3> p = {-range + 2 * range * i / (grid - 1), -range + 2 * range * j / (grid - 1),
                                       -range + 2 * range * k / (grid - 1)};
            double d = projective_distance(detail::orbit_map(X, p, order, e == 1), target);
            if (!std::isfinite(d)) continue;
            if (d < tol) return {true, d, p, order, e == 1};
            seeds.push_back({d, p, order, e == 1});
          }
  const std::size_t n_refine = std::min<std::size_t>(seeds.size(), 12);
  std::partial_sort(seeds.begin(), seeds.begin() + static_cast<std::ptrdiff_t>(n_refine), seeds.end(),
                    [](const Seed& a, const Seed& b) { return a.d < b.d; });
  for (std::size_t s = 0; s < n_refine; ++s) {
    const Seed& sd = seeds[s];
    auto f = [&](const std::array<double, 3>& p) {
      double d = projective_distance(detail::orbit_map(X, p, sd.order, sd.E), target);
      return std::isfinite(d) ? d : 1e6;
    };
    auto p = detail::nelder_mead(f, sd.p, 2.0 * range / (grid - 1), 4000, tol * 1e-3);
    double d = f(p);
    if (d < best.distance) best = {d < tol, d, p, sd.order, sd.E};
    if (best.found) break;
  }
  return best;
}

}  // namespace inertia

#pragma once

// Independent second transcription of the reduced systems, used only to
// cross-check the production right-hand sides.

#include <array>
#include <cmath>

namespace oracle {

using std::pow;

// returns (V', h', Lambda', R''')
using Out = std::array<double, 4>;

inline Out gamma_plus(double y, double V, double h, double L, double R, double Rp, double Rpp, double q0,
                      double mu) {
  double R23 = pow(R, 2.0 / 3);
  double C = (3 * (4 * (44 * V + 5 * y) * y - 19 * L * h) * R + 308 * Rp * V * pow(y, 2)) * pow(Rp, 2) -
             3 * (88 * Rp * V * pow(y, 2) - 9 * L * h * R + 12 * (6 * V + y) * R * y) * Rpp * R;
  double D = 4 * (4 * (2 * V + y) * V - (4 * mu * mu + 1) * pow(y, 2)) * pow(y, 2) + (L - 4 * h * V * y) * L;
  double A = 8 * C * V * q0 * y - 9 * R23 * D * pow(R, 3);
  double B = 8 * (R23 * V * pow(y, 3) + 4 * L * h * q0) * V * y - (2 * h * h + 1) * L * L * q0 -
             4 * (8 * (5 * V + y) * V - (4 * mu * mu + 1) * pow(y, 2)) * q0 * pow(y, 2);
  double R3 = (-(A * y - 18 * B * Rp * pow(R, 2))) / (288 * pow(R, 2) * pow(V, 2) * q0 * pow(y, 4));
  return {-Rp / R * V + (L * h - 8 * V * y) / (4 * y * y), L / V * (h * h + 1) / (4 * y * y), L / V, R3};
}

inline Out gamma_minus(double y, double V, double h, double L, double R, double Rp, double Rpp, double q0,
                       double m2) {
  double R23 = pow(R, 2.0 / 3);
  double R3 =
      (528 * Rpp * Rp * R * V * V * q0 * pow(y, 4) +
       72 * Rpp * R * R * V * q0 * y * y * (-3 * L * h + 6 * V * y + y * y) - 616 * pow(Rp, 3) * V * V * q0 * pow(y, 4) +
       24 * Rp * Rp * R * V * q0 * y * y * (19 * L * h - 44 * V * y - 5 * y * y) +
       18 * Rp * R * R *
           (2 * R23 * V * V * pow(y, 4) - 8 * L * L * h * h * q0 - 4 * L * L * q0 + 32 * L * h * V * q0 * y -
            40 * V * V * q0 * y * y - 8 * V * q0 * pow(y, 3) - 4 * m2 * q0 * pow(y, 4) + q0 * pow(y, 4)) +
       9 * R23 * pow(R, 3) * y *
           (4 * L * L - 4 * L * h * V * y + 8 * V * V * y * y + 4 * V * pow(y, 3) + 4 * m2 * pow(y, 4) - pow(y, 4))) /
      (72 * R * R * V * V * q0 * pow(y, 4));
  return {-V * Rp / R + (L * h - 2 * V * y) / (y * y), L * (h * h + 1) / (V * y * y), L / V, R3};
}

inline Out x1(double y, double V, double h, double a, double R, double Rp, double Rpp, double q0) {
  double R23 = pow(R, 2.0 / 3);
  double R3 =
      (132 * Rpp * Rp * R * V * V * q0 * pow(y, 4) +
       18 * Rpp * R * R * V * q0 * y * y * (-3 * a * h + 6 * V * y + y * y) - 154 * pow(Rp, 3) * V * V * q0 * pow(y, 4) +
       6 * Rp * Rp * R * V * q0 * y * y * (19 * a * h - 44 * V * y - 5 * y * y) +
       9 * Rp * R * R *
           (R23 * V * V * pow(y, 4) - 4 * a * a * h * h * q0 - 2 * a * a * q0 + 16 * a * h * V * q0 * y -
            20 * V * V * q0 * y * y - 4 * V * q0 * pow(y, 3)) +
       9 * R23 * pow(R, 3) * y * (a * a - a * h * V * y + 2 * V * V * y * y + V * pow(y, 3))) /
      (18 * R * R * V * V * q0 * pow(y, 4));
  return {-V * Rp / R + (a * h - 2 * V * y) / (y * y), a / V * (h * h + 1) / (y * y), a / V, R3};
}

inline Out x2px0(double y, double V, double h, double L, double R, double Rp, double Rpp, double q0, double beta) {
  double R23 = pow(R, 2.0 / 3), R13 = pow(R, 1.0 / 3);
  double R3 =
      (132 * Rpp * Rp * R * V * V * q0 * pow(y, 4) + 54 * Rpp * R * R * V * q0 * y * y * (-L * h + 2 * V * y) -
       154 * pow(Rp, 3) * V * V * q0 * pow(y, 4) + 6 * Rp * Rp * R * V * q0 * y * y * (19 * L * h - 44 * V * y) -
       10 * R13 * Rp * pow(R, 3) * beta * pow(y, 4) +
       9 * Rp * R * R *
           (R23 * V * V * pow(y, 4) - 4 * L * L * h * h * q0 - 2 * L * L * q0 + 16 * L * h * V * q0 * y -
            20 * V * V * q0 * y * y + 2 * q0 * pow(y, 4)) +
       9 * R23 * pow(R, 3) * y * (L * L - L * h * V * y + 2 * V * V * y * y - pow(y, 4))) /
      (18 * R * R * V * V * q0 * pow(y, 4));
  return {-V * Rp / R + (L * h - 2 * V * y) / (y * y), L / V * (h * h + 1) / (y * y), 0.0, R3};
}

inline Out x3(double y, double V, double h, double a, double R, double Rp, double Rpp, double q0, double beta) {
  double R23 = pow(R, 2.0 / 3);
  double w = y - 2 * V;
  double R3 = (2 * w * w * q0 * pow(y, 3) *
                   (66 * Rpp * Rp * R * y + 54 * Rpp * R * R - 77 * pow(Rp, 3) * y - 132 * Rp * Rp * R) +
               9 * w * w * y * y * R * R * (Rp * R23 * y * y - 20 * Rp * q0 + 2 * pow(R, 5.0 / 3) * y) -
               18 * Rp * R * R * pow(y, 4) * q0 +
               6 * w * a * h * y *
                   (18 * Rpp * R * R * q0 * y - 38 * Rp * Rp * R * q0 * y - 48 * Rp * R * R * q0 +
                    3 * R23 * pow(R, 3) * y) -
               72 * Rp * a * a * R * R * q0 * (2 * h * h + 1) - 40 * pow(R, 10.0 / 3) * Rp * beta * pow(y, 4) +
               36 * R23 * a * a * pow(R, 3) * y + 9 * pow(R, 11.0 / 3) * pow(y, 5)) /
              (18 * R * R * q0 * pow(y, 4) * w * w);
  return {(y / 2 - V) * Rp / R + (2 * a * h - (4 * V - 3 * y) * y) / (2 * y * y), a / (V - y / 2) * (h * h + 1) / (y * y),
          0.0, R3};
}

// (V', Lambda', R', h') from 3(R^(2/3) + 6 q0)(V' + V^2) = Lambda^2 (4 q0 (h^2 - 3) + 3 (R^(2/3) + 6 q0))
inline std::array<double, 4> x3_2x1(double V, double L, double R, double h, double q0) {
  double k = 3 * (pow(R, 2.0 / 3) + 6 * q0);
  double Vp = L * L * (4 * q0 * (h * h - 3) + k) / k - V * V;
  return {Vp, -2 * L * V, L * h * R, L * (h * h + 1)};
}

}  // namespace oracle

#pragma once

// Test-only oracles: the case-I and case-II determinants evaluated by raw
// cofactor expansion of the 3x3 matrices in extended precision, with no
// stabilization whatsoever. Independent of the production evaluators.

#include <cmath>

namespace tjstab_test {

inline long double naive_det3(const long double m[3][3]) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

inline long double naive_D1(long double x, long double ls, long double Ls) {
  const long double r3 = sqrtl(3.0L);
  const long double s = sqrtl(1.0L - x * x);
  const long double a = 2.0L / r3 * s;
  const long double z = expl(Ls * s);
  const long double m[3][3] = {
      {x * x, a * (z - 1) - (z + 1), 2.0L / r3 * x * x},
      {1.0L, -(z + 1), -2.0L * x * cosl(ls * x) / sinl(ls * x)},
      {ls * (1 - x * x) - Ls * x * x, 2.0L * (z - 1) / s, -2.0L}};
  return naive_det3(m) / (x * x * (1 - x));
}

inline long double naive_D2(long double x, long double ls, long double Ls) {
  const long double r3 = sqrtl(3.0L);
  const long double S = sqrtl(1.0L + x * x);
  const long double a = 2.0L / r3 * S;
  const long double z = expl(Ls * S);
  const long double E = expl(2.0L * x * ls);
  const long double m[3][3] = {
      {x * x, a * (z - 1) - (z + 1), -2.0L / r3 * x * (E - 1)},
      {1.0L, z + 1, 2.0L * (E + 1)},
      {Ls * x * x + ls * (x * x + 1), -2.0L * (z - 1) / S, 2.0L / x * (E - 1)}};
  return naive_det3(m) / (x * x);
}

}  // namespace tjstab_test

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "tjstab/errors.hpp"

namespace tjstab {
namespace num {

// ---------------------------------------------------------------------------
// Series-stabilized scalar kernels.
//
// The determinant evaluators need expm1-type ratios that stay accurate when
// the argument underflows the direct formulas. Each kernel switches to its
// Taylor series below a crossover chosen so both branches carry ~1e-16
// relative error.
// ---------------------------------------------------------------------------

// E(t) = expm1(t)/t, E(0) = 1.
template <class Real>
inline Real expm1_over(Real t) {
  if (std::abs(t) < Real(1e-5)) {
    return Real(1) + t / Real(2) + t * t / Real(6) + t * t * t / Real(24);
  }
  return std::expm1(t) / t;
}

// g2(t) = (expm1(t) - t)/t^2, g2(0) = 1/2.
template <class Real>
inline Real expm1_g2(Real t) {
  if (std::abs(t) < Real(1e-2)) {
    return Real(0.5) + t / Real(6) + t * t / Real(24) + t * t * t / Real(120) +
           t * t * t * t / Real(720) + t * t * t * t * t / Real(5040);
  }
  return (std::expm1(t) - t) / (t * t);
}

// g3(t) = (expm1(t) - t - t^2/2)/t^3, g3(0) = 1/6.
template <class Real>
inline Real expm1_g3(Real t) {
  if (std::abs(t) < Real(3e-2)) {
    return Real(1) / Real(6) + t / Real(24) + t * t / Real(120) +
           t * t * t / Real(720) + t * t * t * t / Real(5040) +
           t * t * t * t * t / Real(40320);
  }
  return (std::expm1(t) - t - t * t / Real(2)) / (t * t * t);
}

// psi2(t) = (2 expm1(t)/t - expm1(t) - 2)/t^2, psi2(0) = -1/6.
// Series: -sum_{m>=0} (m+1) t^m / (m+3)!.
template <class Real>
inline Real expm1_psi2(Real t) {
  if (std::abs(t) < Real(3e-2)) {
    return -(Real(1) / Real(6) + t / Real(12) + t * t / Real(40) +
             t * t * t / Real(180) + t * t * t * t / Real(1008) +
             t * t * t * t * t / Real(6720));
  }
  const Real em = std::expm1(t);
  return (Real(2) * em / t - em - Real(2)) / (t * t);
}

// x * cot(c*x), continued through x = 0 with value 1/c.
template <class Real>
inline Real x_cot_cx(Real x, Real c) {
  const Real u = c * x;
  if (std::abs(u) < Real(1e-4)) {
    // x cot(cx) = 1/c - c x^2/3 - c^3 x^4/45 - ...
    return Real(1) / c - c * x * x / Real(3) - c * c * c * x * x * x * x / Real(45);
  }
  return x * std::cos(u) / std::sin(u);
}

// (1 - c * x cot(c x)) / x^2, continued through x = 0 with value c^2/3.
template <class Real>
inline Real one_minus_xcot_over_x2(Real x, Real c) {
  const Real u = c * x;
  if (std::abs(u) < Real(3e-2)) {
    // c^2 (1/3 + u^2/45 + 2u^4/945 + u^6/4725)
    const Real u2 = u * u;
    return c * c *
           (Real(1) / Real(3) + u2 / Real(45) + Real(2) * u2 * u2 / Real(945) +
            u2 * u2 * u2 / Real(4725));
  }
  return (Real(1) - c * x_cot_cx(x, c)) / (x * x);
}

// ---------------------------------------------------------------------------
// Bracketed root refinement.
// ---------------------------------------------------------------------------

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  double f_lo = 0.0;
  double f_hi = 0.0;
};

// Scan f on a uniform grid over [a, b] and return every sign-change bracket.
inline std::vector<Bracket> scan_sign_changes(const std::function<double(double)>& f,
                                              double a, double b, int n_points) {
  if (n_points < 2) throw DomainError("scan_sign_changes: need at least 2 points");
  std::vector<Bracket> out;
  const double h = (b - a) / (n_points - 1);
  double x_prev = a;
  double f_prev = f(a);
  for (int i = 1; i < n_points; ++i) {
    const double x = (i == n_points - 1) ? b : a + i * h;
    const double fx = f(x);
    if (std::isfinite(f_prev) && std::isfinite(fx) &&
        ((f_prev < 0.0 && fx > 0.0) || (f_prev > 0.0 && fx < 0.0))) {
      out.push_back({x_prev, x, f_prev, fx});
    }
    x_prev = x;
    f_prev = fx;
  }
  return out;
}

// Plain bisection on a sign-change bracket; returns the midpoint once the
// interval is below xtol (absolute).
inline double bisect(const std::function<double(double)>& f, Bracket br,
                     double xtol, int max_iter = 200) {
  if (!((br.f_lo < 0.0 && br.f_hi > 0.0) || (br.f_lo > 0.0 && br.f_hi < 0.0)))
    throw DomainError("bisect: bracket does not change sign");
  for (int i = 0; i < max_iter && (br.hi - br.lo) > xtol; ++i) {
    const double mid = 0.5 * (br.lo + br.hi);
    if (mid <= br.lo || mid >= br.hi) break;  // hit double resolution
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (br.f_lo < 0.0)) {
      br.lo = mid;
      br.f_lo = fm;
    } else {
      br.hi = mid;
      br.f_hi = fm;
    }
  }
  return 0.5 * (br.lo + br.hi);
}

// ---------------------------------------------------------------------------
// Small dense helpers (row-major, n <= ~16). Enough for the 3x3 and 8x8
// systems of the spectral module; the oracle uses Eigen for everything big.
// ---------------------------------------------------------------------------

template <class Real>
inline Real det3(const std::array<std::array<Real, 3>, 3>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// Determinant by LU with partial pivoting; A is overwritten.
inline double det_lu(std::vector<double>& a, int n) {
  double det = 1.0;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(a[k * n + k]);
    for (int i = k + 1; i < n; ++i) {
      const double v = std::abs(a[i * n + k]);
      if (v > best) { best = v; piv = i; }
    }
    if (best == 0.0) return 0.0;
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      det = -det;
    }
    det *= a[k * n + k];
    for (int i = k + 1; i < n; ++i) {
      const double f = a[i * n + k] / a[k * n + k];
      for (int j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
    }
  }
  return det;
}

}  // namespace num
}  // namespace tjstab

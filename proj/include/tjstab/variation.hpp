#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "tjstab/errors.hpp"
#include "tjstab/geometry.hpp"

namespace tjstab {

// Tolerance for accepting the spine traces of an input sample (allows
// interpolated analytic solutions).
inline constexpr double kSpineCompatTol = 1e-9;

// A discretized admissible variation: nodal values of the normal component on
// each leaf plus the (f1, h1) spine data at the two junctions.
struct VariationSample {
  std::array<std::vector<double>, 5> f;   // leaf i on a uniform grid of n+1 nodes
  std::array<double, 2> f1_spine = {0.0, 0.0};
  std::array<double, 2> h1_spine = {0.0, 0.0};

  int nodes() const { return static_cast<int>(f[0].size()); }
};

namespace detail {

inline void check_shapes(const VariationSample& v) {
  const std::size_t n0 = v.f[0].size();
  if (n0 < 2) throw ShapeError("VariationSample: need at least 2 nodes per leaf");
  for (int i = 1; i < 5; ++i)
    if (v.f[i].size() != n0)
      throw ShapeError("VariationSample: leaf grids have mismatched lengths");
}

inline void check_spine(const VariationSample& v) {
  for (int j = 0; j < 2; ++j) {
    const SpineTrace t = spine_transform(v.f1_spine[j], v.h1_spine[j]);
    const double f1_end = (j == 0) ? v.f[0].front() : v.f[0].back();
    const double f2_end = v.f[j == 0 ? 1 : 3].front();
    const double f3_end = v.f[j == 0 ? 2 : 4].front();
    const double err = std::max({std::abs(f1_end - t.f1), std::abs(f2_end - t.f2),
                                 std::abs(f3_end - t.f3)});
    if (err > kSpineCompatTol)
      throw ConstraintError("VariationSample: spine trace mismatch at junction " +
                            std::to_string(j + 1) + " (|err| = " + std::to_string(err) + ")");
  }
}

inline double trapezoid(const std::vector<double>& f, double h) {
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t m = 1; m + 1 < f.size(); ++m) s += f[m];
  return s * h;
}

inline double trapezoid_sq(const std::vector<double>& f, double h) {
  double s = 0.5 * (f.front() * f.front() + f.back() * f.back());
  for (std::size_t m = 1; m + 1 < f.size(); ++m) s += f[m] * f[m];
  return s * h;
}

// Dirichlet energy of the piecewise-linear interpolant. Together with the
// trapezoid mass this is exactly the quadratic form the oracle assembles, so
// analytic identities (J(eigvec) = mu) hold to roundoff, not just to O(h^2).
inline double dirichlet(const std::vector<double>& f, double h) {
  double s = 0.0;
  for (std::size_t m = 0; m + 1 < f.size(); ++m) {
    const double d = f[m + 1] - f[m];
    s += d * d;
  }
  return s / h;
}

}  // namespace detail

// The second-variation quadratic form on a discretized variation:
//   sum_i int (f_i'^2 - kappa_i^2 f_i^2) - sum_walls sigma f^2
//   + sum_j [alpha (f1j^2 - h1j^2) + 2 beta f1j h1j].
inline double eval_J(const PartitionConfig& cfg, const VariationSample& v) {
  detail::check_shapes(v);
  detail::check_spine(v);
  const int n = v.nodes() - 1;
  double J = 0.0;
  for (int i = 0; i < 5; ++i) {
    const Leaf& lf = cfg.leaves[i];
    const double h = lf.length / n;
    J += detail::dirichlet(v.f[i], h);
    J -= lf.kappa * lf.kappa * detail::trapezoid_sq(v.f[i], h);
    if (i > 0) J -= lf.sigma_wall * v.f[i].back() * v.f[i].back();
  }
  for (int j = 1; j <= 2; ++j) {
    const auto [alpha, beta] = alpha_beta(cfg, j);
    const double f1 = v.f1_spine[j - 1];
    const double h1 = v.h1_spine[j - 1];
    J += alpha * (f1 * f1 - h1 * h1) + 2.0 * beta * f1 * h1;
  }
  return J;
}

struct ConstraintResiduals {
  double vol2 = 0.0;  // -int f1 + int f3 + int f5
  double vol3 = 0.0;  // -int f1 + int f2 + int f4
  double norm = 0.0;  // sum int f^2 - 1
};

inline ConstraintResiduals constraint_residuals(const PartitionConfig& cfg,
                                                const VariationSample& v) {
  detail::check_shapes(v);
  const int n = v.nodes() - 1;
  std::array<double, 5> I{}, Isq{};
  for (int i = 0; i < 5; ++i) {
    const double h = cfg.leaves[i].length / n;
    I[i] = detail::trapezoid(v.f[i], h);
    Isq[i] = detail::trapezoid_sq(v.f[i], h);
  }
  ConstraintResiduals r;
  r.vol2 = -I[0] + I[2] + I[4];
  r.vol3 = -I[0] + I[1] + I[3];
  r.norm = Isq[0] + Isq[1] + Isq[2] + Isq[3] + Isq[4] - 1.0;
  return r;
}

// Build a sample from analytic per-leaf functions f_i(s); the spine data is
// read off the leaf traces.
inline VariationSample sample_from_functions(
    const PartitionConfig& cfg, int n,
    const std::array<std::function<double(double)>, 5>& fn) {
  if (n < 1) throw DomainError("sample_from_functions: n must be positive");
  VariationSample v;
  for (int i = 0; i < 5; ++i) {
    const double len = cfg.leaves[i].length;
    v.f[i].resize(n + 1);
    for (int m = 0; m <= n; ++m) v.f[i][m] = fn[i](len * m / n);
  }
  v.f1_spine = {v.f[0].front(), v.f[0].back()};
  v.h1_spine = {h1_from_traces(v.f[1].front(), v.f[2].front()),
                h1_from_traces(v.f[3].front(), v.f[4].front())};
  return v;
}

// ---------------------------------------------------------------------------
// Constant-variation instability screen
// ---------------------------------------------------------------------------

struct ScreenResult {
  double j_min_constant = 0.0;  // Rayleigh value of the worst feasible constant variation
  bool feasible = false;        // whether the f1 != 0 family admits a solution
};

// Piecewise-constant normal variations, one constant per leaf, subject to the
// two volume constraints and the spine matching. With f1 = 1 the conormal
// components (h1, h2) must solve
//     A21 h1 + A22 h2 = -(1/sqrt3)(2 A1 + A21 + A22)
//     A31 h1 + A32 h2 = +(1/sqrt3)(2 A1 + A31 + A32)
// (lengths in place of areas in 2D). For equal curved-leaf lengths the system
// is inconsistent, so the screen falls back to the f1 = 0, h2 = -h1 branch.
// A nonpositive value proves instability; the test is sufficient only.
inline ScreenResult constant_variation_screen(const PartitionConfig& cfg) {
  const double A1 = cfg.L;
  const double A21 = cfg.l, A22 = cfg.l, A31 = cfg.l, A32 = cfg.l;

  const auto rayleigh = [&cfg](double f1, double h1, double h2) {
    const SpineTrace t1 = spine_transform(f1, h1);
    const SpineTrace t2 = spine_transform(f1, h2);
    const int n = 16;  // constants per leaf: the quadrature is exact
    VariationSample v = sample_from_functions(
        cfg, n,
        {[&](double) { return f1; }, [&](double) { return t1.f2; },
         [&](double) { return t1.f3; }, [&](double) { return t2.f2; },
         [&](double) { return t2.f3; }});
    const double norm = constraint_residuals(cfg, v).norm + 1.0;
    return eval_J(cfg, v) / norm;
  };

  const double det = A21 * A32 - A22 * A31;
  const double b2 = -(2.0 * A1 + A21 + A22) / kSqrt3;
  const double b3 = +(2.0 * A1 + A31 + A32) / kSqrt3;
  ScreenResult res;
  if (std::abs(det) > 1e-12 * (A21 * A32 + A22 * A31)) {
    res.feasible = true;
    const double h1 = (b2 * A32 - A22 * b3) / det;
    const double h2 = (A21 * b3 - b2 * A31) / det;
    res.j_min_constant = rayleigh(1.0, h1, h2);
    return res;
  }
  // Singular length matrix: the f1 != 0 family exists only if both right-hand
  // sides agree, which fails here since A1, lengths > 0.
  res.feasible = false;
  res.j_min_constant = rayleigh(0.0, 1.0, -A21 / A22);
  return res;
}

}  // namespace tjstab

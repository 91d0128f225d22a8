#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "tjstab/errors.hpp"
#include "tjstab/geometry.hpp"
#include "tjstab/variation.hpp"

namespace tjstab {

// ---------------------------------------------------------------------------
// Brute-force verification path: discretize the constrained quadratic form J
// and compute its smallest eigenvalue directly. Nothing here touches the
// closed-form case machinery.
//
// Unknowns are the nodal values of all five leaves, N = 5(n+1). The quadratic
// form is the piecewise-linear Dirichlet energy minus the curvature mass plus
// the junction point terms; the mass matrix is the lumped trapezoid rule; the
// constraints are the two volume rows and one compatibility row per junction.
// ---------------------------------------------------------------------------

struct DiscretizedProblem {
  PartitionConfig config;
  int n = 0;  // cells per leaf
  int N = 0;  // total unknowns
  std::array<int, 5> offset{};
  std::array<double, 5> h{};

  // A = tridiagonal part (diag/off per leaf) + two 3x3 junction blocks.
  std::vector<double> a_diag;
  std::vector<double> a_off;  // a_off[k] couples nodes k and k+1; 0 across leaves
  std::vector<double> b_diag;
  std::array<std::array<int, 3>, 2> junc_nodes{};
  std::array<std::array<std::array<double, 3>, 3>, 2> junc_block{};
  std::vector<std::vector<double>> C;  // 4 x N constraint rows

  int node(int leaf, int m) const { return offset[leaf] + m; }

  void apply_A(const double* x, double* y) const {
    for (int i = 0; i < N; ++i) y[i] = a_diag[i] * x[i];
    for (int i = 0; i + 1 < N; ++i) {
      y[i] += a_off[i] * x[i + 1];
      y[i + 1] += a_off[i] * x[i];
    }
    for (int j = 0; j < 2; ++j)
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
          y[junc_nodes[j][r]] += junc_block[j][r][c] * x[junc_nodes[j][c]];
  }

  Eigen::MatrixXd dense_A() const {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < N; ++i) A(i, i) = a_diag[i];
    for (int i = 0; i + 1 < N; ++i) {
      A(i, i + 1) += a_off[i];
      A(i + 1, i) += a_off[i];
    }
    for (int j = 0; j < 2; ++j)
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
          A(junc_nodes[j][r], junc_nodes[j][c]) += junc_block[j][r][c];
    return A;
  }

  Eigen::MatrixXd dense_C() const {
    Eigen::MatrixXd Cm(4, N);
    for (int r = 0; r < 4; ++r)
      for (int i = 0; i < N; ++i) Cm(r, i) = C[r][i];
    return Cm;
  }
};

inline DiscretizedProblem discretize(const PartitionConfig& cfg, int n) {
  if (n < 8) throw DomainError("discretize: n must be at least 8");
  DiscretizedProblem P;
  P.config = cfg;
  P.n = n;
  P.N = 5 * (n + 1);
  P.a_diag.assign(P.N, 0.0);
  P.a_off.assign(P.N - 1, 0.0);
  P.b_diag.assign(P.N, 0.0);

  for (int i = 0; i < 5; ++i) {
    P.offset[i] = i * (n + 1);
    const Leaf& lf = cfg.leaves[i];
    const double hh = lf.length / n;
    P.h[i] = hh;
    const int o = P.offset[i];
    for (int m = 0; m < n; ++m) {
      P.a_diag[o + m] += 1.0 / hh;
      P.a_diag[o + m + 1] += 1.0 / hh;
      P.a_off[o + m] -= 1.0 / hh;
    }
    for (int m = 0; m <= n; ++m) {
      const double w = (m == 0 || m == n) ? 0.5 * hh : hh;
      P.b_diag[o + m] = w;
      P.a_diag[o + m] -= lf.kappa * lf.kappa * w;
    }
    if (i > 0) P.a_diag[o + n] -= lf.sigma_wall;  // wall term, zero under H1
  }

  // Junction point terms: Q = alpha (f1^2 - h^2) + 2 beta f1 h with
  // h = (f3 - f2)/sqrt3 expressed through the three endpoint unknowns.
  for (int j = 0; j < 2; ++j) {
    const auto [alpha, beta] = alpha_beta(cfg, j + 1);
    const std::array<int, 3> nodes =
        (j == 0) ? std::array<int, 3>{P.node(0, 0), P.node(1, 0), P.node(2, 0)}
                 : std::array<int, 3>{P.node(0, n), P.node(3, 0), P.node(4, 0)};
    P.junc_nodes[j] = nodes;
    // Coefficient matrix of the quadratic form in (u1, u2, u3):
    //  alpha u1^2 - (alpha/3)(u3 - u2)^2 + (2 beta/sqrt3) u1 (u3 - u2)
    std::array<std::array<double, 3>, 3> Q{};
    Q[0][0] = alpha;
    Q[1][1] = -alpha / 3.0;
    Q[2][2] = -alpha / 3.0;
    Q[1][2] = Q[2][1] = alpha / 3.0;
    Q[0][2] = Q[2][0] = beta / kSqrt3;
    Q[0][1] = Q[1][0] = -beta / kSqrt3;
    P.junc_block[j] = Q;
  }

  // Constraint rows: volumes (phase-2 and phase-3 pairings) and the two
  // spine compatibility sums.
  P.C.assign(4, std::vector<double>(P.N, 0.0));
  const auto add_integral = [&](int row, int leaf, double sign) {
    const int o = P.offset[leaf];
    for (int m = 0; m <= n; ++m) P.C[row][o + m] += sign * P.b_diag[o + m];
  };
  add_integral(0, 0, -1.0);  // vol3: -int f1 + int f2 + int f4
  add_integral(0, 1, +1.0);
  add_integral(0, 3, +1.0);
  add_integral(1, 0, -1.0);  // vol2: -int f1 + int f3 + int f5
  add_integral(1, 2, +1.0);
  add_integral(1, 4, +1.0);
  P.C[2][P.node(0, 0)] = P.C[2][P.node(1, 0)] = P.C[2][P.node(2, 0)] = 1.0;
  P.C[3][P.node(0, n)] = P.C[3][P.node(3, 0)] = P.C[3][P.node(4, 0)] = 1.0;
  return P;
}

// Rigorous lower bound on the constrained spectrum, used to place the
// shift-invert pole strictly below mu_min: the junction terms are bounded via
// the trace inequality f(0)^2 <= ||f||^2/len + 2 ||f|| ||f'||.
inline double oracle_mu_lower_bound(const PartitionConfig& cfg) {
  const auto [alpha, beta] = alpha_beta(cfg, 1);
  const double g = std::abs(alpha) + std::abs(beta);
  const double lmin = std::min(cfg.l, cfg.L);
  return -(cfg.kappa * cfg.kappa + 2.0 * g * (1.0 / lmin + 4.0 * g));
}

struct OracleOptions {
  int n_eigs = 4;          // how many smallest eigenvalues to report
  bool force_dense = false;
  int dense_threshold = 900;
  int max_lanczos = 500;
  double ritz_tol = 1e-11;
};

struct OracleResult {
  double mu_min = 0.0;
  std::vector<double> mu_smallest;
  VariationSample eigvec;
  double constraint_residual = 0.0;
  bool used_dense = false;
  int iterations = 0;
};

namespace detail {

// Symmetric LDL^T solve for a positive definite tridiagonal block (Thomas).
struct TridiagLDL {
  std::vector<double> d_inv, l;
  void factor(const std::vector<double>& diag, const std::vector<double>& off,
              int begin, int end /*exclusive*/) {
    const int m = end - begin;
    d_inv.resize(m);
    l.resize(m > 0 ? m - 1 : 0);
    double d_prev = diag[begin];
    if (!(d_prev > 0.0)) throw NumericalError("tridiagonal factor: not positive definite");
    d_inv[0] = 1.0 / d_prev;
    for (int i = 1; i < m; ++i) {
      const double e = off[begin + i - 1];
      l[i - 1] = e * d_inv[i - 1];
      const double d = diag[begin + i] - l[i - 1] * e;
      if (!(d > 0.0)) throw NumericalError("tridiagonal factor: not positive definite");
      d_inv[i] = 1.0 / d;
    }
  }
  void solve(double* x, int m) const {
    for (int i = 1; i < m; ++i) x[i] -= l[i - 1] * x[i - 1];
    for (int i = 0; i < m; ++i) x[i] *= d_inv[i];
    for (int i = m - 2; i >= 0; --i) x[i] -= l[i] * x[i + 1];
  }
};

inline uint64_t splitmix64(uint64_t& s) {
  s += 0x9e3779b97f4a7c15ull;
  uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace detail

// Smallest eigenvalue(s) of  min f^T A f  s.t.  f^T B f = 1, C f = 0.
// Small problems go through a dense projected eigensolve; large ones through
// shift-invert Lanczos with the shift placed below the provable lower bound,
// so the extreme Ritz value is guaranteed to be mu_min.
inline OracleResult min_eigenvalue(const DiscretizedProblem& P,
                                   const OracleOptions& opt = {}) {
  const int N = P.N;
  const int n = P.n;

  // Symmetrize the metric: y = B^{1/2} f.
  std::vector<double> d_sqrt(N), d_isqrt(N);
  for (int i = 0; i < N; ++i) {
    if (!(P.b_diag[i] > 0.0)) throw NumericalError("mass matrix not positive");
    d_sqrt[i] = std::sqrt(P.b_diag[i]);
    d_isqrt[i] = 1.0 / d_sqrt[i];
  }
  const auto apply_At = [&](const double* x, double* y, std::vector<double>& tmp) {
    for (int i = 0; i < N; ++i) tmp[i] = x[i] * d_isqrt[i];
    P.apply_A(tmp.data(), y);
    for (int i = 0; i < N; ++i) y[i] *= d_isqrt[i];
  };

  // Orthonormal basis V of the scaled constraint rows (modified Gram-Schmidt).
  std::vector<std::vector<double>> V(4, std::vector<double>(N));
  for (int r = 0; r < 4; ++r)
    for (int i = 0; i < N; ++i) V[r][i] = P.C[r][i] * d_isqrt[i];
  for (int r = 0; r < 4; ++r) {
    for (int p = 0; p < r; ++p) {
      double dot = 0.0;
      for (int i = 0; i < N; ++i) dot += V[r][i] * V[p][i];
      for (int i = 0; i < N; ++i) V[r][i] -= dot * V[p][i];
    }
    double nrm = 0.0;
    for (int i = 0; i < N; ++i) nrm += V[r][i] * V[r][i];
    nrm = std::sqrt(nrm);
    if (nrm < 1e-12) throw NumericalError("constraint rows are rank deficient");
    for (int i = 0; i < N; ++i) V[r][i] /= nrm;
  }

  const auto project_out = [&](std::vector<double>& x) {
    for (int r = 0; r < 4; ++r) {
      double dot = 0.0;
      for (int i = 0; i < N; ++i) dot += x[i] * V[r][i];
      for (int i = 0; i < N; ++i) x[i] -= dot * V[r][i];
    }
  };

  // Gershgorin bound for the scaled operator, for the deflation shift tau.
  double gersh = 0.0;
  {
    Eigen::MatrixXd probe;  // unused; bound from the structured parts
    double row_max = 0.0;
    for (int i = 0; i < N; ++i) {
      double s = std::abs(P.a_diag[i]);
      if (i > 0) s += std::abs(P.a_off[i - 1]);
      if (i + 1 < N) s += std::abs(P.a_off[i]);
      s *= d_isqrt[i] * d_isqrt[i];
      row_max = std::max(row_max, s);
    }
    double jmax = 0.0;
    for (int j = 0; j < 2; ++j)
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
          jmax = std::max(jmax, std::abs(P.junc_block[j][r][c]) *
                                     d_isqrt[P.junc_nodes[j][r]] *
                                     d_isqrt[P.junc_nodes[j][c]]);
    gersh = row_max + 6.0 * jmax;
    (void)probe;
  }
  const double tau = 2.0 * gersh + 10.0;

  const auto apply_H = [&](const double* x, double* y, std::vector<double>& t1,
                           std::vector<double>& t2) {
    std::array<double, 4> vx{};
    for (int r = 0; r < 4; ++r) {
      double dot = 0.0;
      for (int i = 0; i < N; ++i) dot += x[i] * V[r][i];
      vx[r] = dot;
    }
    for (int i = 0; i < N; ++i) t1[i] = x[i];
    for (int r = 0; r < 4; ++r)
      for (int i = 0; i < N; ++i) t1[i] -= vx[r] * V[r][i];
    apply_At(t1.data(), y, t2);
    std::array<double, 4> vy{};
    for (int r = 0; r < 4; ++r) {
      double dot = 0.0;
      for (int i = 0; i < N; ++i) dot += y[i] * V[r][i];
      vy[r] = dot;
    }
    for (int r = 0; r < 4; ++r)
      for (int i = 0; i < N; ++i) y[i] += (tau * vx[r] - vy[r]) * V[r][i];
  };

  OracleResult res;
  std::vector<double> y_min(N);

  if (opt.force_dense || N <= opt.dense_threshold) {
    res.used_dense = true;
    Eigen::MatrixXd At = P.dense_A();
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) At(i, j) *= d_isqrt[i] * d_isqrt[j];
    Eigen::MatrixXd Vm(N, 4);
    for (int r = 0; r < 4; ++r)
      for (int i = 0; i < N; ++i) Vm(i, r) = V[r][i];
    const Eigen::MatrixXd Pm = Eigen::MatrixXd::Identity(N, N) - Vm * Vm.transpose();
    Eigen::MatrixXd H = Pm * At * Pm + tau * Vm * Vm.transpose();
    H = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success) throw NumericalError("dense eigensolve failed");
    for (int k = 0; k < std::min<int>(opt.n_eigs, N); ++k)
      res.mu_smallest.push_back(es.eigenvalues()(k));
    for (int i = 0; i < N; ++i) y_min[i] = es.eigenvectors()(i, 0);
  } else {
    // ---- shift-invert Lanczos ----
    const double sigma = oracle_mu_lower_bound(P.config) - 1.0;

    // Tridiagonal part minus the shift, factored per leaf.
    std::vector<double> m_diag(N), m_off(N - 1);
    for (int i = 0; i < N; ++i)
      m_diag[i] = P.a_diag[i] * d_isqrt[i] * d_isqrt[i] - sigma;
    for (int i = 0; i + 1 < N; ++i)
      m_off[i] = P.a_off[i] * d_isqrt[i] * d_isqrt[i + 1];
    std::array<detail::TridiagLDL, 5> fac;
    for (int leaf = 0; leaf < 5; ++leaf)
      fac[leaf].factor(m_diag, m_off, P.offset[leaf], P.offset[leaf] + n + 1);
    const auto solve_M = [&](std::vector<double>& x) {
      for (int leaf = 0; leaf < 5; ++leaf)
        fac[leaf].solve(x.data() + P.offset[leaf], n + 1);
    };

    // Low-rank completion H - (T - sigma I) = sum_u U G^T (Woodbury).
    std::vector<std::vector<double>> U, G;
    const auto push_pair = [&](std::vector<double>&& u, std::vector<double>&& g) {
      U.push_back(std::move(u));
      G.push_back(std::move(g));
    };
    for (int j = 0; j < 2; ++j) {
      for (int c = 0; c < 3; ++c) {
        std::vector<double> g(N, 0.0), u(N, 0.0);
        g[P.junc_nodes[j][c]] = d_isqrt[P.junc_nodes[j][c]];
        for (int r = 0; r < 3; ++r)
          u[P.junc_nodes[j][r]] = P.junc_block[j][r][c] * d_isqrt[P.junc_nodes[j][r]];
        push_pair(std::move(u), std::move(g));
      }
    }
    std::vector<std::vector<double>> W(4, std::vector<double>(N));
    {
      std::vector<double> tmp(N);
      for (int r = 0; r < 4; ++r) apply_At(V[r].data(), W[r].data(), tmp);
    }
    Eigen::Matrix4d S4;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        double dot = 0.0;
        for (int i = 0; i < N; ++i) dot += V[r][i] * W[c][i];
        S4(r, c) = dot;
      }
    for (int r = 0; r < 4; ++r) {
      push_pair(std::vector<double>(V[r]), std::vector<double>(W[r]));  // -V W^T
      for (double& v : U.back()) v = -v;
      push_pair(std::vector<double>(W[r]), std::vector<double>(V[r]));  // -W V^T
      for (double& v : U.back()) v = -v;
      std::vector<double> u(N, 0.0);
      for (int c = 0; c < 4; ++c)
        for (int i = 0; i < N; ++i)
          u[i] += (S4(r, c) + (r == c ? tau : 0.0)) * V[c][i];
      push_pair(std::move(u), std::vector<double>(V[r]));  // V (S + tau I) V^T
    }
    const int m = static_cast<int>(U.size());
    // X = M^{-1} U, S_w = I + G^T X
    std::vector<std::vector<double>> X = U;
    for (auto& col : X) solve_M(col);
    Eigen::MatrixXd Sw = Eigen::MatrixXd::Identity(m, m);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) {
        double dot = 0.0;
        for (int i = 0; i < N; ++i) dot += G[r][i] * X[c][i];
        Sw(r, c) += dot;
      }
    // Row-equilibrate before factoring: the deflation rows carry scale tau by
    // construction, which is not ill conditioning.
    Eigen::VectorXd row_scale(m);
    for (int r = 0; r < m; ++r)
      row_scale(r) = std::max(1e-300, Sw.row(r).cwiseAbs().maxCoeff());
    const Eigen::MatrixXd Sw_eq = row_scale.cwiseInverse().asDiagonal() * Sw;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(Sw_eq);
    {
      const Eigen::VectorXd d = lu.matrixLU().diagonal().cwiseAbs();
      const double cond_est = d.maxCoeff() / std::max(1e-300, d.minCoeff());
      if (!(cond_est < 1e12))
        throw NumericalError("oracle: reduced solve is ill-conditioned");
    }
    const auto apply_K = [&](const std::vector<double>& r, std::vector<double>& out) {
      out = r;
      solve_M(out);
      Eigen::VectorXd gt(m);
      for (int c = 0; c < m; ++c) {
        double dot = 0.0;
        for (int i = 0; i < N; ++i) dot += G[c][i] * out[i];
        gt(c) = dot;
      }
      const Eigen::VectorXd s = lu.solve(row_scale.cwiseInverse().asDiagonal() * gt);
      for (int c = 0; c < m; ++c)
        for (int i = 0; i < N; ++i) out[i] -= s(c) * X[c][i];
    };

    // Lanczos with full reorthogonalization on K.
    const int kmax = std::min(opt.max_lanczos, N - 4);
    std::vector<std::vector<double>> Q;
    std::vector<double> alpha_k, beta_k;
    std::vector<double> q(N);
    uint64_t seed = 0x5eed5eedull + static_cast<uint64_t>(N);
    for (int i = 0; i < N; ++i)
      q[i] = (detail::splitmix64(seed) >> 11) * (1.0 / 9007199254740992.0) - 0.5;
    project_out(q);
    {
      double nrm = 0.0;
      for (double v : q) nrm += v * v;
      nrm = std::sqrt(nrm);
      for (double& v : q) v /= nrm;
    }
    Q.push_back(q);
    std::vector<double> w(N), prev(N, 0.0);
    double beta_prev = 0.0;
    int converged_at = -1;
    for (int k = 0; k < kmax; ++k) {
      apply_K(Q.back(), w);
      // K preserves range(P) up to roundoff; keep the iteration there.
      project_out(w);
      double a = 0.0;
      for (int i = 0; i < N; ++i) a += w[i] * Q.back()[i];
      alpha_k.push_back(a);
      for (int i = 0; i < N; ++i) w[i] -= a * Q.back()[i] + beta_prev * prev[i];
      for (const auto& qq : Q) {  // full reorthogonalization
        double dot = 0.0;
        for (int i = 0; i < N; ++i) dot += w[i] * qq[i];
        for (int i = 0; i < N; ++i) w[i] -= dot * qq[i];
      }
      double b = 0.0;
      for (double v : w) b += v * v;
      b = std::sqrt(b);
      beta_k.push_back(b);

      const int kk = k + 1;
      if ((kk >= 12 && kk % 8 == 0) || kk == kmax || b < 1e-14) {
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(kk, kk);
        for (int i = 0; i < kk; ++i) {
          T(i, i) = alpha_k[i];
          if (i + 1 < kk) T(i, i + 1) = T(i + 1, i) = beta_k[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        // Largest Ritz values of K are the smallest eigenvalues of H.
        bool ok = true;
        const int want = std::min(opt.n_eigs, kk);
        for (int e = 0; e < want; ++e) {
          const int idx = kk - 1 - e;
          const double theta = es.eigenvalues()(idx);
          if (!(theta > 0.0)) { ok = false; break; }
          const double resid = b * std::abs(es.eigenvectors()(kk - 1, idx));
          // residual on K maps to |dmu| ~ resid / theta^2
          if (resid / (theta * theta) > opt.ritz_tol * (1.0 + std::abs(sigma)))
            ok = false;
        }
        if (ok || b < 1e-14) {
          std::vector<std::pair<double, int>> top;
          for (int e = 0; e < want; ++e) top.push_back({es.eigenvalues()(kk - 1 - e), kk - 1 - e});
          for (const auto& [theta, idx] : top)
            res.mu_smallest.push_back(sigma + 1.0 / theta);
          // Ritz vector of the extreme pair
          for (int i = 0; i < N; ++i) {
            double s = 0.0;
            for (int kq = 0; kq < kk; ++kq) s += Q[kq][i] * es.eigenvectors()(kq, top[0].second);
            y_min[i] = s;
          }
          converged_at = kk;
          break;
        }
      }
      if (b < 1e-14) break;
      prev = Q.back();
      for (int i = 0; i < N; ++i) w[i] /= b;
      Q.push_back(w);
      beta_prev = b;
    }
    if (converged_at < 0)
      throw NumericalError("oracle: Lanczos did not converge");
    res.iterations = converged_at;

    // Explicit residual certificate on H.
    {
      std::vector<double> t1(N), t2(N), hy(N);
      apply_H(y_min.data(), hy.data(), t1, t2);
      const double mu = res.mu_smallest[0];
      double rn = 0.0, yn = 0.0;
      for (int i = 0; i < N; ++i) {
        const double r = hy[i] - mu * y_min[i];
        rn += r * r;
        yn += y_min[i] * y_min[i];
      }
      if (std::sqrt(rn / yn) > 1e-7 * std::max(1.0, gersh))
        throw NumericalError("oracle: eigenpair residual too large");
    }
  }

  std::sort(res.mu_smallest.begin(), res.mu_smallest.end());
  res.mu_min = res.mu_smallest.front();

  // Map back to nodal values, B-normalized; fix the sign deterministically.
  {
    double nrm = 0.0;
    for (double v : y_min) nrm += v * v;
    nrm = std::sqrt(nrm);
    int imax = 0;
    for (int i = 0; i < N; ++i)
      if (std::abs(y_min[i]) > std::abs(y_min[imax])) imax = i;
    const double s = (y_min[imax] < 0.0 ? -1.0 : 1.0) / nrm;
    VariationSample v;
    for (int leaf = 0; leaf < 5; ++leaf) {
      v.f[leaf].resize(n + 1);
      for (int mnode = 0; mnode <= n; ++mnode)
        v.f[leaf][mnode] = s * y_min[P.node(leaf, mnode)] * d_isqrt[P.node(leaf, mnode)];
    }
    v.f1_spine = {v.f[0].front(), v.f[0].back()};
    v.h1_spine = {h1_from_traces(v.f[1].front(), v.f[2].front()),
                  h1_from_traces(v.f[3].front(), v.f[4].front())};
    res.eigvec = v;
    double cres = 0.0;
    for (int r = 0; r < 4; ++r) {
      double dot = 0.0;
      for (int leaf = 0; leaf < 5; ++leaf)
        for (int mnode = 0; mnode <= n; ++mnode)
          dot += P.C[r][P.node(leaf, mnode)] * v.f[leaf][mnode];
      cres = std::max(cres, std::abs(dot));
    }
    res.constraint_residual = cres;
  }
  return res;
}

// mu_min at n and 2n plus the second-order Richardson extrapolant.
struct RichardsonResult {
  double mu_n = 0.0;
  double mu_2n = 0.0;
  double mu_extrapolated = 0.0;
};

inline RichardsonResult oracle_mu_min_richardson(const PartitionConfig& cfg, int n,
                                                 const OracleOptions& opt = {}) {
  RichardsonResult r;
  r.mu_n = min_eigenvalue(discretize(cfg, n), opt).mu_min;
  r.mu_2n = min_eigenvalue(discretize(cfg, 2 * n), opt).mu_min;
  r.mu_extrapolated = (4.0 * r.mu_2n - r.mu_n) / 3.0;
  return r;
}

}  // namespace tjstab

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "tjstab/oracle.hpp"
#include "tjstab/spectral.hpp"

using namespace tjstab;

TEST_CASE("discretization shapes and definiteness", "[oracle]") {
  const PartitionConfig cfg = build_config(1.0, 0.4, 0.5);
  CHECK_THROWS_AS(discretize(cfg, 4), DomainError);
  const DiscretizedProblem P = discretize(cfg, 8);
  CHECK(P.N == 5 * 9);
  // B positive definite: Cholesky of the diagonal mass succeeds
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(P.N, P.N);
  for (int i = 0; i < P.N; ++i) B(i, i) = P.b_diag[i];
  Eigen::LLT<Eigen::MatrixXd> llt(B);
  CHECK(llt.info() == Eigen::Success);
  // A symmetric by construction
  const Eigen::MatrixXd A = P.dense_A();
  CHECK((A - A.transpose()).cwiseAbs().maxCoeff() == 0.0);
  // constraint matrix has full row rank 4
  Eigen::FullPivLU<Eigen::MatrixXd> lu(P.dense_C());
  CHECK(lu.rank() == 4);
}

TEST_CASE("discrete form reproduces eval_J on nodal data", "[oracle]") {
  const PartitionConfig cfg = build_config(1.0, 0.4, 0.5);
  const int n = 32;
  const DiscretizedProblem P = discretize(cfg, n);
  // the constant-per-leaf screen vector
  const SpineTrace t1 = spine_transform(0.0, 1.0);
  const SpineTrace t2 = spine_transform(0.0, -1.0);
  VariationSample v = sample_from_functions(
      cfg, n,
      {[](double) { return 0.0; }, [&](double) { return t1.f2; },
       [&](double) { return t1.f3; }, [&](double) { return t2.f2; },
       [&](double) { return t2.f3; }});
  std::vector<double> x(P.N), Ax(P.N);
  for (int leaf = 0; leaf < 5; ++leaf)
    for (int m = 0; m <= n; ++m) x[P.node(leaf, m)] = v.f[leaf][m];
  P.apply_A(x.data(), Ax.data());
  double quad = 0.0;
  for (int i = 0; i < P.N; ++i) quad += x[i] * Ax[i];
  CHECK(quad == Catch::Approx(eval_J(cfg, v)).margin(1e-10));

  // a non-constant sample too
  VariationSample w = sample_from_functions(
      cfg, n,
      {[&](double s) { return 0.2 * std::cos(3 * s); },
       [&](double s) { return spine_transform(0.2, 0.5).f2 + std::sin(2 * s); },
       [&](double s) { return spine_transform(0.2, 0.5).f3 - 0.3 * s; },
       [&](double s) {
         return spine_transform(0.2 * std::cos(3 * cfg.L), -0.1).f2 + s * s;
       },
       [&](double) { return spine_transform(0.2 * std::cos(3 * cfg.L), -0.1).f3; }});
  for (int leaf = 0; leaf < 5; ++leaf)
    for (int m = 0; m <= n; ++m) x[P.node(leaf, m)] = w.f[leaf][m];
  P.apply_A(x.data(), Ax.data());
  quad = 0.0;
  for (int i = 0; i < P.N; ++i) quad += x[i] * Ax[i];
  CHECK(quad == Catch::Approx(eval_J(cfg, w)).margin(1e-10));
}

TEST_CASE("wall term enters the discrete form consistently", "[oracle]") {
  PartitionConfig cfg = build_config(1.0, 0.4, 0.5);
  cfg.leaves[2].sigma_wall = 0.25;
  const int n = 24;
  const DiscretizedProblem P = discretize(cfg, n);
  const SpineTrace t = spine_transform(0.1, 0.2);
  VariationSample v = sample_from_functions(
      cfg, n,
      {[](double) { return 0.1; }, [&](double s) { return t.f2 + 0.3 * s * s; },
       [&](double s) { return t.f3 - 0.1 * s; },
       [&](double s) { return spine_transform(0.1, -0.4).f2 * std::cos(s); },
       [&](double s) { return spine_transform(0.1, -0.4).f3 + s; }});
  std::vector<double> x(P.N), Ax(P.N);
  for (int leaf = 0; leaf < 5; ++leaf)
    for (int m = 0; m <= n; ++m) x[P.node(leaf, m)] = v.f[leaf][m];
  P.apply_A(x.data(), Ax.data());
  double quad = 0.0;
  for (int i = 0; i < P.N; ++i) quad += x[i] * Ax[i];
  CHECK(quad == Catch::Approx(eval_J(cfg, v)).margin(1e-12));
}

TEST_CASE("dense and Lanczos paths agree", "[oracle]") {
  const PartitionConfig cfg = build_config(1.0, 0.4, 0.05);
  const DiscretizedProblem P = discretize(cfg, 80);
  OracleOptions dense;
  dense.force_dense = true;
  OracleOptions lanczos;
  lanczos.dense_threshold = 10;
  const OracleResult rd = min_eigenvalue(P, dense);
  const OracleResult rl = min_eigenvalue(P, lanczos);
  CHECK_FALSE(rd.mu_smallest.empty());
  CHECK(rl.iterations > 0);
  CHECK(rd.mu_min == Catch::Approx(rl.mu_min).margin(1e-9));
  for (std::size_t k = 0; k < 3; ++k)
    CHECK(rd.mu_smallest[k] == Catch::Approx(rl.mu_smallest[k]).margin(1e-7));
}

TEST_CASE("stable point: positive spectrum and clean eigenpair", "[oracle]") {
  const PartitionConfig cfg = build_config(1.0, 0.4, 0.05);
  const OracleResult r = min_eigenvalue(discretize(cfg, 100));
  CHECK(r.mu_min > 0.0);
  CHECK(r.constraint_residual < 1e-12);
  const ConstraintResiduals cr = constraint_residuals(cfg, r.eigvec);
  CHECK(std::abs(cr.vol2) < 1e-12);
  CHECK(std::abs(cr.vol3) < 1e-12);
  CHECK(std::abs(cr.norm) < 1e-12);  // B-normalized
  CHECK(std::abs(eval_J(cfg, r.eigvec) - r.mu_min) < 1e-9);
}

TEST_CASE("grid convergence of mu_min is second order", "[oracle]") {
  const PartitionConfig cfg = build_config(1.0, 0.4, 0.05);
  const double m1 = min_eigenvalue(discretize(cfg, 50)).mu_min;
  const double m2 = min_eigenvalue(discretize(cfg, 100)).mu_min;
  const double m4 = min_eigenvalue(discretize(cfg, 200)).mu_min;
  const double m8 = min_eigenvalue(discretize(cfg, 400)).mu_min;
  const double mu_star = (4.0 * m8 - m4) / 3.0;  // fine Richardson reference
  const double e1 = std::abs(m1 - mu_star), e2 = std::abs(m2 - mu_star);
  CHECK(e1 / e2 > 3.2);
  CHECK(e1 / e2 < 4.8);
  // Richardson helper wires n and 2n together
  const RichardsonResult rr = oracle_mu_min_richardson(cfg, 50);
  CHECK(rr.mu_n == Catch::Approx(m1).margin(1e-12));
  CHECK(rr.mu_2n == Catch::Approx(m2).margin(1e-12));
  CHECK(rr.mu_extrapolated == Catch::Approx((4 * m2 - m1) / 3).margin(1e-12));
  CHECK(std::abs(rr.mu_extrapolated - mu_star) < std::abs(m1 - mu_star) / 8.0);
}

TEST_CASE("Rayleigh quotients of admissible samples sit above mu_min", "[oracle]") {
  const PartitionConfig cfg = build_config(1.0, 0.4, 0.05);
  const int n = 60;
  const DiscretizedProblem P = discretize(cfg, n);
  const double mu_min = min_eigenvalue(P).mu_min;
  // random nodal vectors projected onto the constraints
  const Eigen::MatrixXd C = P.dense_C();
  Eigen::VectorXd b(P.N);
  for (int i = 0; i < P.N; ++i) b(i) = P.b_diag[i];
  std::mt19937 rng(5150);
  std::normal_distribution<double> g;
  for (int it = 0; it < 10; ++it) {
    Eigen::VectorXd x(P.N);
    for (int i = 0; i < P.N; ++i) x(i) = g(rng);
    // project out the constraints in the B inner product
    const Eigen::MatrixXd CBCt =
        C * b.cwiseInverse().asDiagonal() * C.transpose();
    const Eigen::VectorXd lambda = CBCt.ldlt().solve(C * x);
    x -= b.cwiseInverse().asDiagonal() * C.transpose() * lambda;
    std::vector<double> ax(P.N);
    P.apply_A(x.data(), ax.data());
    double num = 0.0, den = 0.0;
    for (int i = 0; i < P.N; ++i) {
      num += x(i) * ax[i];
      den += x(i) * b(i) * x(i);
    }
    CHECK(num / den >= mu_min - 1e-9 * std::abs(mu_min));
  }
}

TEST_CASE("no negative oracle eigenvalue where the determinants are root-free",
          "[oracle]") {
  for (auto [l, L] : {std::pair{0.4, 1.0}, std::pair{0.3, 1.5}, std::pair{0.15, 1.2}}) {
    const PartitionConfig cfg = build_config(1.0, l, L);
    const StabilityReport rep = scan_and_verdict(cfg, {});
    REQUIRE(rep.verdict == Verdict::Stable);
    CHECK(min_eigenvalue(discretize(cfg, 150)).mu_min > 0.0);
  }
}

TEST_CASE("oracle confirms the corrected neutral boundary", "[oracle]") {
  // mu_min crosses zero at (tan l* + sqrt3) L* = 4, not at the root of the
  // printed scalar condition.
  const double ls = 0.4;
  const double Lc = 4.0 / (std::tan(ls) + kSqrt3);
  const PartitionConfig below = build_config(1.0, ls, Lc - 0.02);
  const PartitionConfig above = build_config(1.0, ls, Lc + 0.02);
  CHECK(oracle_mu_min_richardson(below, 200).mu_extrapolated > 0.0);
  CHECK(oracle_mu_min_richardson(above, 200).mu_extrapolated < 0.0);
  // at the spurious scalar-condition root the spectrum is comfortably positive
  const PartitionConfig spurious = build_config(1.0, ls, 1.7745903);
  CHECK(oracle_mu_min_richardson(spurious, 200).mu_extrapolated > 0.05);
}

TEST_CASE("randomized verdict cross-validation against the oracle", "[oracle]") {
  std::mt19937 rng(20260809);
  std::uniform_real_distribution<double> dl(0.05, 0.5), dL(0.05, 10.0);
  for (int i = 0; i < 10; ++i) {
    const double ls = dl(rng), Ls = dL(rng);
    const PartitionConfig cfg = build_config(1.0, ls, Ls);
    const StabilityReport rep = scan_and_verdict(cfg, {});
    const double mu_o = oracle_mu_min_richardson(cfg, 120).mu_extrapolated;
    if (std::abs(mu_o) < 1e-3) continue;  // discretization fog near the boundary
    INFO("l*=" << ls << " L*=" << Ls << " verdict=" << verdict_name(rep.verdict)
               << " mu_oracle=" << mu_o);
    if (rep.verdict == Verdict::Stable) {
      CHECK(mu_o > 0.0);
    } else {
      REQUIRE(rep.verdict == Verdict::Unstable);
      CHECK(mu_o < 0.0);
      CHECK(std::abs(mu_o - rep.mu) < 1e-3 * std::abs(rep.mu));
    }
  }
}

TEST_CASE("oracle pins the analytic eigenvalue at an unstable point", "[oracle]") {
  // First unstable L* along l* = 0.4 (step 0.1) lies near 1.9.
  double Lstar = -1.0;
  StabilityReport rep;
  for (double L = 1.5; L <= 4.0; L += 0.1) {
    rep = scan_and_verdict(build_config(1.0, 0.4, L), {});
    if (rep.verdict == Verdict::Unstable) {
      Lstar = L;
      break;
    }
  }
  REQUIRE(Lstar > 0.0);
  const PartitionConfig cfg = build_config(1.0, 0.4, Lstar);
  const RichardsonResult rr = oracle_mu_min_richardson(cfg, 200);
  CHECK(rr.mu_extrapolated < 0.0);
  CHECK(std::abs(rr.mu_extrapolated - rep.mu) < 1e-3 * std::abs(rep.mu));
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <random>

#include "support/naive_determinants.hpp"
#include "tjstab/spectral.hpp"

using namespace tjstab;
using tjstab_test::naive_D1;
using tjstab_test::naive_D2;

namespace {
const double kAlphaStar = -kSqrt3 / 2.0;

// Smallest L* (coarse step) at l* = 0.4 with a reduced-determinant root; the
// spectral sweep in the stability map crosses it around L* ~ 6.5.
double find_reduced_root_L(double l_star) {
  for (double L = 0.5; L <= 10.0; L += 0.25) {
    const auto f = [&](double x) { return det_D1(x, l_star, L); };
    if (!num::scan_sign_changes(f, 1e-6, 1.0 - 1e-6, 600).empty()) return L;
  }
  return -1.0;
}
}  // namespace

TEST_CASE("D1 agrees with the extended-precision cofactor oracle", "[spectral]") {
  const double ls = 0.4, Ls = 0.1;
  for (double x : {0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999}) {
    const double mine = det_D1(x, ls, Ls);
    const long double ref = naive_D1(x, ls, Ls);
    CHECK(mine == Catch::Approx((double)ref).epsilon(1e-10));
  }
  // stays positive at this stable configuration
  for (double x = 0.01; x < 1.0; x += 0.0137) CHECK(det_D1(x, ls, Ls) > 0.0);
}

TEST_CASE("D1 small-L expansion", "[spectral]") {
  const double ls = 0.4, x = 0.5, Ls = 1e-8;
  const double zeroth =
      4.0 * (x + 1.0) / (x * x) *
      (ls / kSqrt3 * x * x + ls * x / std::tan(ls * x) - 1.0);
  CHECK(det_D1(x, ls, Ls) == Catch::Approx(zeroth).epsilon(1e-5));
}

TEST_CASE("D1 endpoint limits: the prefactor singularity cancels", "[spectral]") {
  const double ls = 0.4, Ls = 0.1;
  // x -> 1^-: compare the analytic-limit evaluation at x = 1 against the raw
  // cofactor form just inside, where extended precision still resolves it.
  const long double near1 = naive_D1(1.0L - 1e-6L, ls, Ls);
  CHECK(det_D1(1.0, ls, Ls) == Catch::Approx((double)near1).epsilon(1e-4));
  CHECK(std::isfinite(det_D1(1.0, ls, Ls)));
  // x -> 0^+ likewise
  const long double near0 = naive_D1(1e-5L, ls, Ls);
  CHECK(det_D1(0.0, ls, Ls) == Catch::Approx((double)near0).epsilon(1e-4));
  CHECK_THROWS_AS(det_D1(1.5, ls, Ls), DomainError);
  CHECK_THROWS_AS(det_D1(0.5, 0.6, Ls), DomainError);  // l* >= pi/6
}

TEST_CASE("D2 agrees with the extended-precision cofactor oracle", "[spectral]") {
  const double ls = 0.4, Ls = 0.1;
  for (double x : {0.5, 1.0, 2.0, 5.0}) {
    const double mine = det_D2(x, ls, Ls);
    CHECK(mine > 0.0);
    CHECK(mine == Catch::Approx((double)naive_D2(x, ls, Ls)).epsilon(1e-10));
  }
  // the two evaluation regimes agree where both are exact
  for (double x : {0.2, 0.8, 3.0}) {
    const double a = det_D2_scaled(x, ls, Ls);
    const long double b =
        naive_D2(x, ls, Ls) / expl((long double)Ls * sqrtl(1.0L + x * x) + 2.0L * x * ls);
    CHECK(a == Catch::Approx((double)b).epsilon(1e-10));
  }
  // large-exponent regime against the long-double raw form
  {
    const double x = 400.0, ls2 = 0.4, Ls2 = 0.5;
    const long double b = naive_D2(x, ls2, Ls2) /
                          expl((long double)Ls2 * sqrtl(1.0L + (long double)x * x) +
                               2.0L * x * ls2);
    CHECK(det_D2_scaled(x, ls2, Ls2) == Catch::Approx((double)b).epsilon(1e-7));
  }
}

TEST_CASE("D2 small-L and large-x behavior", "[spectral]") {
  const double ls = 0.4;
  {
    const double x = 0.3;
    const double E = std::exp(2.0 * ls * x);
    const double limit = 4.0 * (x * x + 1.0) / (x * x * x) *
                         ((ls / kSqrt3 * x * x - ls * x + 1.0) * E -
                          ls / kSqrt3 * x * x - ls * x - 1.0);
    CHECK(det_D2(x, ls, 0.0) == Catch::Approx(limit).epsilon(1e-5));
  }
  {
    const double Ls = 0.1, x = 50.0;
    const double ratio = det_D2_scaled(x, ls, Ls) / x;
    CHECK(ratio == Catch::Approx(2.0 * kSqrt3 * (Ls + ls)).epsilon(0.05));
  }
}

TEST_CASE("case III residual", "[spectral]") {
  CHECK(case_III_residual(0.4, 0.1) > 0.0);
  // L* -> 0 limit is l*^2 (1 - l*/sqrt3); the exact L* = 0 evaluation matches
  CHECK(case_III_residual(0.4, 0.0) ==
        Catch::Approx(case_III_limit(0.4)).margin(1e-15));
  // first-order Taylor in L*: residual(eps) = residual(0) + eps * d + O(eps^2)
  {
    const double eps = 1e-10;
    const double d = (case_III_residual(0.4, 1e-5) - case_III_residual(0.4, 0.0)) / 1e-5;
    CHECK(case_III_residual(0.4, eps) ==
          Catch::Approx(case_III_residual(0.4, 0.0) + eps * d).epsilon(1e-9));
    CHECK(case_III_residual(0.4, eps) > 0.0);
  }
  // the limit expression's root, continued past pi/6, sits at sqrt3
  const auto f = [](double l) { return case_III_limit(l); };
  const auto brs = num::scan_sign_changes(f, 1.0, 2.0, 200);
  REQUIRE(brs.size() == 1);
  CHECK(num::bisect(f, brs[0], 1e-12) == Catch::Approx(kSqrt3).margin(1e-9));
}

TEST_CASE("case IV residual", "[spectral]") {
  CHECK(case_IV_residual(0.4, 0.1) != 0.0);
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> dist(0.05, 0.5);
  for (int i = 0; i < 50; ++i) {
    const double l = dist(rng);
    CHECK(std::abs(case_IV_residual(l, 0.0) - case_IV_limit(l)) < 1e-12);
  }
  // no root of the limit expression inside (0, pi/6)
  int sign = 0;
  for (int i = 1; i <= 4096; ++i) {
    const double l = (kPi / 6.0) * i / 4097.0;
    const double v = case_IV_limit(l);
    if (sign == 0) sign = v > 0 ? 1 : -1;
    CHECK(v * sign > 0.0);
  }
}

TEST_CASE("full system has rank 8 away from roots", "[spectral]") {
  const PartitionConfig cfg = build_config(1.0, 0.4, 0.1);
  for (SpectralCase tag : {SpectralCase::I, SpectralCase::II, SpectralCase::III}) {
    const double x = (tag == SpectralCase::II) ? 0.7 : 0.5;
    const auto sv = full_system_singular_values(assemble_full_system(tag, x, cfg));
    CHECK(sv[7] / sv[0] > 1e-6);
  }
}

TEST_CASE("full system drops to rank 7 at a reduced-determinant root", "[spectral]") {
  const double ls = 0.4;
  const double Lroot = find_reduced_root_L(ls);
  REQUIRE(Lroot > 0.0);
  const PartitionConfig cfg = build_config(1.0, ls, Lroot);
  const auto f = [&](double x) { return det_D1(x, ls, Lroot); };
  const auto brs = num::scan_sign_changes(f, 1e-6, 1.0 - 1e-6, 600);
  REQUIRE_FALSE(brs.empty());
  const double xr = num::bisect(f, brs[0], 1e-13);

  double sigma_ratio = 1.0;
  const CaseSolution sol = build_case_solution(SpectralCase::I, xr, cfg, &sigma_ratio);
  CHECK(sigma_ratio < 1e-8);

  // null vector structure of the reduction: c2 = c3 = c4 = c5, the
  // antisymmetric flat coefficient vanishes (D1 = z C1), lt2 = lt3
  const double scale = std::abs(sol.coeff[4]) + std::abs(sol.coeff[2]) + 1e-30;
  CHECK(std::abs(sol.coeff[0] - sol.coeff[1]) < 1e-8 * scale);
  CHECK(std::abs(sol.coeff[3]) < 1e-8 * scale);
  for (int i = 5; i < 8; ++i)
    CHECK(std::abs(sol.coeff[i] - sol.coeff[4]) < 1e-8 * scale);

  // eigenfunction quality: ODE residual, wall condition, system residual
  double worst = 0.0;
  for (int leaf = 1; leaf <= 5; ++leaf) {
    const double len = (leaf == 1) ? cfg.L_star : cfg.l_star;
    for (int i = 0; i <= 32; ++i)
      worst = std::max(worst, std::abs(sol.ode_residual(leaf, len * i / 32.0)));
  }
  CHECK(worst < 1e-10);
  for (int leaf = 2; leaf <= 5; ++leaf)
    CHECK(std::abs(sol.df(leaf, cfg.l_star)) < 1e-14);
  const Mat8 m = assemble_full_system(SpectralCase::I, xr, cfg);
  for (int r = 0; r < 8; ++r) {
    double resid = 0.0;
    for (int c = 0; c < 8; ++c) resid += m[r][c] * sol.coeff[c];
    CHECK(std::abs(resid) < 1e-8);
  }

  // sampling the eigenfunction: the discretized J reproduces mu
  {
    const int n = 2000;
    std::array<std::function<double(double)>, 5> fns;
    for (int leaf = 1; leaf <= 5; ++leaf)
      fns[leaf - 1] = [&sol, &cfg, leaf](double s) {
        return sol.f(leaf, cfg.kappa * s);
      };
    const VariationSample v = sample_from_functions(cfg, n, fns);
    const double norm = constraint_residuals(cfg, v).norm + 1.0;
    const double mu = sol.mu_star * cfg.kappa * cfg.kappa;
    CHECK(eval_J(cfg, v) / norm == Catch::Approx(mu).epsilon(2e-3));
  }
}

TEST_CASE("reduction equivalence on random parameters", "[spectral]") {
  // Full-system determinant roots coincide with the reduced-determinant roots
  // within the small-L reduction hypothesis (spot check; the acceptance suite
  // runs the full 200-tuple version).
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> dl(0.05, 0.5);
  for (int it = 0; it < 20; ++it) {
    const double ls = dl(rng);
    const double Lmax = 0.9 * 4.0 / (std::tan(ls) + kSqrt3);
    std::uniform_real_distribution<double> dL(0.01, Lmax);
    const double Ls = dL(rng);
    const auto f_red = [&](double x) { return det_D1(x, ls, Ls); };
    const auto f_full = [&](double x) {
      return full_system_det(SpectralCase::I, x, kAlphaStar, 0.0, ls, Ls);
    };
    const auto br_red = num::scan_sign_changes(f_red, 1e-6, 1.0 - 1e-6, 400);
    const auto br_full = num::scan_sign_changes(f_full, 1e-6, 1.0 - 1e-6, 400);
    REQUIRE(br_red.size() == br_full.size());
    for (std::size_t i = 0; i < br_red.size(); ++i) {
      const double xr = num::bisect(f_red, br_red[i], 1e-13);
      const double xf = num::bisect(f_full, br_full[i], 1e-13);
      CHECK(std::abs(xr - xf) < 1e-10);
    }
  }
}

TEST_CASE("verdict: small L* is stable", "[spectral]") {
  const PartitionConfig cfg = build_config(1.0, 0.4, 0.05);
  const StabilityReport rep = scan_and_verdict(cfg, {});
  CHECK(rep.verdict == Verdict::Stable);
  CHECK(rep.cases[0].roots.empty());
  CHECK(rep.cases[1].roots.empty());
  CHECK(std::abs(rep.cases[2].residual) > 1e-6);
  CHECK(std::abs(rep.cases[3].residual) > 1e-6);
  CHECK(rep.lemma_case_i_hypothesis);

  // coarse scan with loose tolerance stays stable
  ScanOptions coarse;
  coarse.scan_n = 64;
  coarse.tol = 1e-3;
  CHECK(scan_and_verdict(cfg, coarse).verdict == Verdict::Stable);
}

TEST_CASE("verdict: an unstable point carries a certified bracket", "[spectral]") {
  // Sweep upward in L* until the verdict flips; certify root and eigenvalue.
  double Lstar = -1.0;
  StabilityReport rep;
  for (double L = 0.5; L <= 10.0; L += 0.5) {
    rep = scan_and_verdict(build_config(1.0, 0.4, L), {});
    if (rep.verdict == Verdict::Unstable) {
      Lstar = L;
      break;
    }
  }
  REQUIRE(Lstar > 0.0);
  CHECK(rep.mu < 0.0);
  CHECK(rep.mu_star == Catch::Approx(rep.unstable_x * rep.unstable_x - 1.0)
                           .epsilon(1e-12));  // case I conversion
  bool found_certified = false;
  for (const RootRecord& r : rep.cases[0].roots)
    if (r.certified) {
      found_certified = true;
      CHECK(r.x_lo < r.x_root);
      CHECK(r.x_hi > r.x_root);
      CHECK(r.sigma_ratio < 1e-8);
    }
  CHECK(found_certified);
}

TEST_CASE("neutral boundary sits exactly at (tan l* + sqrt3) L* = 4", "[spectral]") {
  // The full case-IV system turns singular precisely where the asymmetric
  // branch is born; the discretized oracle confirms the same crossing (see
  // the oracle tests). The closed form makes the small-L hypothesis sharp.
  for (double ls : {0.15, 0.35, 0.45}) {
    const auto f = [&](double L) {
      return full_system_det(SpectralCase::IV, 0.0, -kSqrt3 / 2, 0.0, ls, L);
    };
    const auto brs = num::scan_sign_changes(f, 0.01, 4.0, 4000);
    REQUIRE(brs.size() == 1);
    const double Lc = num::bisect(f, brs[0], 1e-13);
    CHECK(Lc == Catch::Approx(4.0 / (std::tan(ls) + kSqrt3)).margin(1e-9));
  }
}

TEST_CASE("the printed mu = 0 condition has a spurious root the rank check rejects",
          "[spectral]") {
  // case_IV_residual vanishes near L* = 1.7746 at l* = 0.4, but the full
  // case-IV system stays regular there and the configuration is stable
  // (cross-checked against the discretized eigenvalue oracle in the oracle
  // tests). The verdict must not flag it.
  const double ls = 0.4;
  const auto f = [&](double L) { return case_IV_residual(ls, L); };
  const auto brs = num::scan_sign_changes(f, 0.5, 3.0, 4000);
  REQUIRE_FALSE(brs.empty());
  const double Lr = num::bisect(f, brs[0], 1e-13);
  CHECK(Lr == Catch::Approx(1.7745903).margin(1e-5));
  const PartitionConfig cfg = build_config(1.0, ls, Lr);
  const StabilityReport rep = scan_and_verdict(cfg, {});
  CHECK(std::abs(rep.cases[3].residual) < 1e-6);   // printed condition fires...
  CHECK(rep.cases[3].sigma_ratio > 1e-4);          // ...but the system is regular
  CHECK(rep.verdict == Verdict::Stable);

  // exactly on the corrected boundary the verdict is Inconclusive (neutral)
  const double Lc = 4.0 / (std::tan(ls) + kSqrt3);
  const StabilityReport repc = scan_and_verdict(build_config(1.0, ls, Lc), {});
  CHECK(repc.cases[3].sigma_ratio < 1e-8);
  CHECK(repc.verdict == Verdict::Inconclusive);
}

TEST_CASE("small-L reduction hypothesis holds up to L* = 0.5", "[spectral]") {
  // (tan l* + sqrt3) L* < 4 for every l* < pi/6 and L* <= 0.5
  for (int i = 1; i <= 100; ++i) {
    const double ls = (kPi / 6.0) * i / 101.0;
    CHECK((std::tan(ls) + kSqrt3) * 0.5 < 4.0);
  }
  const StabilityReport rep = scan_and_verdict(build_config(1.0, 0.4, 0.5), {});
  CHECK(rep.lemma_case_i_hypothesis);
}

TEST_CASE("scan_and_verdict validates its inputs", "[spectral]") {
  const PartitionConfig cfg = build_config(1.0, 0.4, 0.1);
  ScanOptions bad;
  bad.scan_n = 32;
  CHECK_THROWS_AS(scan_and_verdict(cfg, bad), DomainError);
  CHECK_THROWS_AS(scan_and_verdict(flipped_orientation(cfg), {}), DomainError);
}

TEST_CASE("extreme parameters stay finite and decided", "[spectral]") {
  for (auto [ls, Ls] : {std::pair{0.01, 1e-6}, std::pair{0.52, 1e-6},
                        std::pair{0.01, 20.0}, std::pair{0.52, 20.0},
                        std::pair{0.3, 1e-4}}) {
    const PartitionConfig cfg = build_config(1.0, ls, Ls);
    const StabilityReport rep = scan_and_verdict(cfg, {});
    CHECK(rep.verdict != Verdict::Inconclusive);
    CHECK(std::isfinite(rep.cases[2].residual));
    CHECK(std::isfinite(rep.cases[3].residual));
    for (int c = 0; c < 2; ++c)
      for (const RootRecord& r : rep.cases[c].roots) {
        CHECK(std::isfinite(r.mu));
        CHECK(r.certified);
      }
    if (Ls <= 1e-4) CHECK(rep.verdict == Verdict::Stable);
  }
}

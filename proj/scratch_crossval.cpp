// Broad randomized cross-validation: analytic verdict vs discretized oracle.
#include <cstdio>
#include <cmath>
#include <random>
#include "tjstab/spectral.hpp"
#include "tjstab/oracle.hpp"

using namespace tjstab;

int main(int argc, char** argv) {
  const int npts = argc > 1 ? std::atoi(argv[1]) : 80;
  std::mt19937 rng(20260809);
  std::uniform_real_distribution<double> dl(0.03, 0.52), dL(0.01, 12.0);
  int bad = 0, inconclusive = 0, unstable = 0, boundary = 0;
  double worst_rel = 0.0;
  for (int i = 0; i < npts; ++i) {
    const double ls = dl(rng), Ls = dL(rng);
    const PartitionConfig cfg = build_config(1.0, ls, Ls);
    StabilityReport rep;
    try {
      rep = scan_and_verdict(cfg, {});
    } catch (const std::exception& e) {
      printf("EXCEPTION at (%.4f, %.4f): %s\n", ls, Ls, e.what());
      ++bad;
      continue;
    }
    const RichardsonResult rr = oracle_mu_min_richardson(cfg, 160);
    const double mu_o = rr.mu_extrapolated;
    if (std::abs(mu_o) < 1e-3) { ++boundary; continue; }  // within discretization fog
    bool ok = true;
    if (rep.verdict == Verdict::Stable) {
      ok = mu_o > 0.0;
    } else if (rep.verdict == Verdict::Unstable) {
      ++unstable;
      const double rel = std::abs(mu_o - rep.mu) / std::abs(rep.mu);
      worst_rel = std::max(worst_rel, rel);
      ok = mu_o < 0.0 && rel < 5e-2;
    } else {
      ++inconclusive;
      printf("INCONCLUSIVE at (%.4f, %.4f): mu_o=%.6f touchI=%d touchII=%d sigmaIV=%.2e\n",
             ls, Ls, mu_o, (int)rep.cases[0].touch_suspected,
             (int)rep.cases[1].touch_suspected, rep.cases[3].sigma_ratio);
    }
    if (!ok) {
      ++bad;
      printf("MISMATCH at (%.4f, %.4f): verdict=%s mu_analytic=%.8f mu_oracle=%.8f\n",
             ls, Ls, verdict_name(rep.verdict), rep.mu, mu_o);
    }
  }
  printf("checked %d points: %d mismatches, %d inconclusive, %d unstable, %d near-boundary, worst unstable rel diff %.2e\n",
         npts, bad, inconclusive, unstable, boundary, worst_rel);
  return bad;
}

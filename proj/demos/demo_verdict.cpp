// Minimal library usage: decide stability of one configuration and print the
// per-case diagnostics.

#include <cstdio>

#include "tjstab/oracle.hpp"
#include "tjstab/spectral.hpp"

int main() {
  using namespace tjstab;
  const PartitionConfig cfg = build_config(/*kappa=*/1.0, /*l=*/0.4, /*L=*/0.05);
  const StabilityReport rep = scan_and_verdict(cfg, {});
  std::printf("l* = %.3f, L* = %.3f -> %s\n", rep.l_star, rep.L_star,
              verdict_name(rep.verdict));
  std::printf("case I roots: %zu, case II roots: %zu\n", rep.cases[0].roots.size(),
              rep.cases[1].roots.size());
  std::printf("case III residual: %.6g, case IV residual: %.6g\n",
              rep.cases[2].residual, rep.cases[3].residual);

  const RichardsonResult rr = oracle_mu_min_richardson(cfg, 200);
  std::printf("oracle mu_min (Richardson n=200): %.9f\n", rr.mu_extrapolated);
  return rep.verdict == Verdict::Stable ? 0 : 1;
}

#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tjstab/errors.hpp"
#include "tjstab/oracle.hpp"
#include "tjstab/report_json.hpp"
#include "tjstab/runconfig.hpp"
#include "tjstab/spectral.hpp"
#include "tjstab/svg.hpp"

namespace tjstab {
namespace cli {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Dispatch [0, count) over a fixed-size pool; results land in caller storage
// indexed by task id, so the output order never depends on scheduling.
template <class Fn>
inline void parallel_for(int count, int jobs, Fn&& fn) {
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex err_mx;
  const int nthreads = std::min(jobs, count);
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mx);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline ScanOptions scan_options(const RunConfig& rc) {
  ScanOptions opt;
  opt.scan_n = rc.scan_n;
  opt.tol = rc.tol;
  return opt;
}

inline OracleSummary run_oracle(const PartitionConfig& cfg, int n,
                                const StabilityReport& rep) {
  OracleSummary os;
  os.n = n;
  const OracleOptions oo;
  const OracleResult r = min_eigenvalue(discretize(cfg, n), oo);
  const OracleResult r2 = min_eigenvalue(discretize(cfg, 2 * n), oo);
  os.mu_min = r.mu_min;
  os.mu_min_richardson = (4.0 * r2.mu_min - r.mu_min) / 3.0;
  os.constraint_residual = r.constraint_residual;
  os.j_identity_error = std::abs(eval_J(cfg, r.eigvec) - r.mu_min);
  switch (rep.verdict) {
    case Verdict::Stable:
      os.agrees_with_verdict = os.mu_min_richardson > 0.0;
      break;
    case Verdict::Unstable:
      os.agrees_with_verdict =
          os.mu_min_richardson < 0.0 &&
          std::abs(os.mu_min_richardson - rep.mu) <= 1e-2 * std::abs(rep.mu);
      break;
    case Verdict::Inconclusive:
      os.agrees_with_verdict = true;
      break;
  }
  return os;
}

inline std::string human_report(const StabilityReport& rep) {
  std::ostringstream os;
  os.precision(12);
  os << "double triple-junction stability analysis\n";
  os << "  kappa = " << rep.kappa << ", l = " << rep.l << ", L = " << rep.L
     << "  (l* = " << rep.l_star << ", L* = " << rep.L_star << ")\n";
  os << "  verdict: " << verdict_name(rep.verdict) << "\n";
  if (rep.verdict == Verdict::Unstable)
    os << "  negative eigenvalue mu = " << rep.mu << " (mu/kappa^2 = " << rep.mu_star
       << ", case " << rep.unstable_case << ", x = " << rep.unstable_x << ")\n";
  os << "  small-L reduction hypothesis (tan l* + sqrt3) L* < 4: "
     << (rep.lemma_case_i_hypothesis ? "holds" : "fails") << "\n";
  for (const CaseScanResult& c : rep.cases) {
    os << "  case " << c.tag << ": ";
    if (c.tag == "III" || c.tag == "IV") {
      os << "residual = " << c.residual
         << ", full-system sigma_min/sigma_max = " << c.sigma_ratio;
    } else {
      os << c.scan_points << " scan points on [" << c.x_min << ", " << c.x_max << "], "
         << c.roots.size() << " root(s)";
      if (c.touch_suspected) os << " [tangential touch suspected]";
    }
    os << "\n";
    for (const RootRecord& r : c.roots)
      os << "    root x = " << r.x_root << "  mu = " << r.mu
         << "  sigma_min/sigma_max = " << r.sigma_ratio
         << (r.certified ? "  (certified)" : "  (NOT certified)")
         << (r.source == 'F' ? "  [full system]" : "  [reduced]") << "\n";
  }
  os << "  case II scan cutoff x0 = " << rep.x0_cutoff << "\n";
  os << "  constant-variation screen: J_min = " << rep.screen_value
     << (rep.screen_feasible ? " (f1 != 0 family feasible)"
                             : " (f1 != 0 family infeasible; f1 = 0 branch)")
     << "\n";
  if (rep.oracle) {
    os << "  oracle (n = " << rep.oracle->n << "): mu_min = " << rep.oracle->mu_min
       << ", Richardson = " << rep.oracle->mu_min_richardson
       << ", constraint residual = " << rep.oracle->constraint_residual
       << ", |J(f) - mu| = " << rep.oracle->j_identity_error << "  ["
       << (rep.oracle->agrees_with_verdict ? "agrees" : "DISAGREES") << "]\n";
  }
  os << "  elapsed: " << rep.elapsed_seconds << " s\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

struct AnalyzeOutput {
  StabilityReport report;
  int exit_code = 1;
  std::string text;
};

inline AnalyzeOutput cmd_analyze(const RunConfig& rc) {
  rc.validate_numerics();
  const PartitionConfig cfg = rc.partition();
  StabilityReport rep = scan_and_verdict(cfg, scan_options(rc));
  if (rc.oracle) rep.oracle = run_oracle(cfg, rc.grid_n, rep);

  namespace fs = std::filesystem;
  fs::create_directories(rc.out_dir);
  AnalyzeOutput out;
  out.report = rep;
  out.text = human_report(rep);
  out.exit_code = static_cast<int>(rep.verdict);
  {
    std::ofstream txt(fs::path(rc.out_dir) / "report.txt");
    if (!txt) throw IOError("cannot write report.txt");
    txt << out.text;
  }
  save_report_json(rep, (fs::path(rc.out_dir) / "report.json").string());
  if (rc.emit_svg)
    emit_geometry_svg(cfg, (fs::path(rc.out_dir) / "geometry.svg").string());
  return out;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepRow {
  double l_star = 0.0, L_star = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  double mu = std::numeric_limits<double>::quiet_NaN();
  double oracle_mu = std::numeric_limits<double>::quiet_NaN();
  double screen = 0.0;
  double seconds = 0.0;
};

struct SweepOutput {
  std::vector<SweepRow> rows;
  // per l*: largest scanned L* that is still stable (NaN when the first
  // point is already unstable)
  std::vector<std::pair<double, double>> frontier;
};

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

inline SweepOutput cmd_sweep(const RunConfig& rc) {
  rc.validate_numerics();
  const std::vector<double> ls = linspace(rc.sweep_l_min, rc.sweep_l_max, rc.sweep_l_steps);
  const std::vector<double> Ls = linspace(rc.sweep_L_min, rc.sweep_L_max, rc.sweep_L_steps);
  SweepOutput out;
  out.rows.resize(ls.size() * Ls.size());

  parallel_for(static_cast<int>(out.rows.size()), rc.jobs, [&](int idx) {
    const double l_star = ls[idx / Ls.size()];
    const double L_star = Ls[idx % Ls.size()];
    SweepRow row;
    row.l_star = l_star;
    row.L_star = L_star;
    const PartitionConfig cfg = build_config(1.0, l_star, L_star);
    const StabilityReport rep = scan_and_verdict(cfg, scan_options(rc));
    row.verdict = rep.verdict;
    row.screen = rep.screen_value;
    row.seconds = rep.elapsed_seconds;
    if (rep.verdict == Verdict::Unstable) row.mu = rep.mu;
    if (rc.oracle)
      row.oracle_mu = oracle_mu_min_richardson(cfg, rc.grid_n).mu_extrapolated;
    out.rows[idx] = row;
  });

  for (std::size_t i = 0; i < ls.size(); ++i) {
    double frontier = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t j = 0; j < Ls.size(); ++j) {
      if (out.rows[i * Ls.size() + j].verdict == Verdict::Stable)
        frontier = Ls[j];
      else
        break;
    }
    out.frontier.push_back({ls[i], frontier});
  }
  return out;
}

inline void write_sweep_csv(const SweepOutput& out, bool with_oracle,
                            const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream csv(fs::path(dir) / "sweep.csv");
    if (!csv) throw IOError("cannot write sweep.csv");
    csv << "l_star,L_star,verdict,mu";
    if (with_oracle) csv << ",oracle_mu_richardson";
    csv << ",screen,seconds\n";
    for (const SweepRow& r : out.rows) {
      csv << fmt17(r.l_star) << "," << fmt17(r.L_star) << "," << verdict_name(r.verdict)
          << "," << fmt17(r.mu);
      if (with_oracle) csv << "," << fmt17(r.oracle_mu);
      csv << "," << fmt17(r.screen) << "," << fmt17(r.seconds) << "\n";
    }
  }
  {
    std::ofstream csv(fs::path(dir) / "frontier.csv");
    if (!csv) throw IOError("cannot write frontier.csv");
    csv << "l_star,L_star_max_stable\n";
    for (const auto& [l, f] : out.frontier)
      csv << fmt17(l) << "," << fmt17(f) << "\n";
  }
}

// ---------------------------------------------------------------------------
// trace
// ---------------------------------------------------------------------------

struct TraceRow {
  double t = 0.0;  // x or L*
  double d1 = 0.0, d2 = 0.0, res3 = 0.0, res4 = 0.0;
};

inline std::vector<TraceRow> cmd_trace(const RunConfig& rc) {
  rc.validate_numerics();
  if (rc.trace_samples < 2) throw ConfigError("trace needs at least 2 samples");
  std::vector<TraceRow> rows;
  if (rc.trace_kind == "x") {
    const PartitionConfig cfg = rc.partition();
    const double l_star = cfg.l_star, L_star = cfg.L_star;
    for (int i = 0; i < rc.trace_samples; ++i) {
      TraceRow r;
      r.t = (i + 1.0) / (rc.trace_samples + 1.0);  // strictly increasing in (0,1)
      r.d1 = det_D1(r.t, l_star, L_star);
      r.d2 = det_D2(r.t, l_star, L_star);
      r.res3 = case_III_residual(l_star, L_star);
      r.res4 = case_IV_residual(l_star, L_star);
      rows.push_back(r);
    }
    return rows;
  }
  // L* trace at fixed l*: determinant columns carry the signed minimum over
  // the x scan, so a zero crossing marks the first root appearing.
  if (!rc.l_star && !rc.l) throw ConfigError("L_star trace needs l_star (or l with kappa)");
  const double l_star = rc.l_star ? *rc.l_star : (*rc.kappa) * (*rc.l);
  for (int i = 0; i < rc.trace_samples; ++i) {
    TraceRow r;
    r.t = rc.sweep_L_min +
          (rc.sweep_L_max - rc.sweep_L_min) * i / (rc.trace_samples - 1.0);
    double d1min = std::numeric_limits<double>::infinity();
    double d2min = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 256; ++k) {
      const double x = k / 257.0;
      d1min = std::min(d1min, det_D1(x, l_star, r.t));
      d2min = std::min(d2min, det_D2_scaled(x, l_star, r.t));
    }
    for (int k = 0; k <= 64; ++k)
      d2min = std::min(d2min, det_D2_scaled(1.0 + k * 0.25, l_star, r.t));
    r.d1 = d1min;
    r.d2 = d2min;
    r.res3 = case_III_residual(l_star, r.t);
    r.res4 = case_IV_residual(l_star, r.t);
    rows.push_back(r);
  }
  return rows;
}

inline void write_trace_csv(const std::vector<TraceRow>& rows, const std::string& kind,
                            const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::ofstream csv(fs::path(dir) / "trace.csv");
  if (!csv) throw IOError("cannot write trace.csv");
  csv << (kind == "x" ? "x" : "L_star") << ",D1,D2,residual_III,residual_IV\n";
  for (const TraceRow& r : rows)
    csv << fmt17(r.t) << "," << fmt17(r.d1) << "," << fmt17(r.d2) << ","
        << fmt17(r.res3) << "," << fmt17(r.res4) << "\n";
}

}  // namespace cli
}  // namespace tjstab

// tjstab: stability of the disconnected two-junction three-phase partition.
//
// Subcommands:
//   analyze  full spectral scan + verdict for one configuration
//   sweep    (l*, L*) grid -> CSV stability map and frontier
//   trace    determinant/residual curves -> CSV
//   render   geometry figure -> SVG

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "tjstab/cli.hpp"

using namespace tjstab;

namespace {

// One subcommand's worth of flag storage; values are copied onto the
// RunConfig only when the user actually passed them, so file settings and
// built-in defaults survive.
struct Flags {
  std::string config_path;
  double kappa = 0, l = 0, L = 0, l_star = 0, L_star = 0;
  std::string out_dir, trace_kind;
  int jobs = 0, grid_n = 0, scan_n = 0, samples = 0;
  int l_steps = 0, L_steps = 0;
  double tol = 0, l_min = 0, l_max = 0, L_min = 0, L_max = 0;
  bool oracle = false, svg = false;

  CLI::Option *o_kappa = nullptr, *o_l = nullptr, *o_L = nullptr;
  CLI::Option *o_ls = nullptr, *o_Ls = nullptr, *o_out = nullptr, *o_jobs = nullptr;
  CLI::Option *o_gn = nullptr, *o_scan = nullptr, *o_tol = nullptr;
  CLI::Option *o_lmin = nullptr, *o_lmax = nullptr, *o_lsteps = nullptr;
  CLI::Option *o_Lmin = nullptr, *o_Lmax = nullptr, *o_Lsteps = nullptr;
  CLI::Option *o_samples = nullptr, *o_kind = nullptr;

  void add_common(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "ini configuration file");
    o_out = cmd->add_option("--out", out_dir, "output directory");
    o_jobs = cmd->add_option("--jobs", jobs, "worker threads for sweeps");
    cmd->add_flag("--oracle", oracle, "run the discretized eigenvalue oracle");
    o_gn = cmd->add_option("--oracle-n", grid_n, "oracle grid size per leaf");
    o_tol = cmd->add_option("--tol", tol, "bisection tolerance on x");
    o_scan = cmd->add_option("--scan", scan_n, "determinant scan resolution");
    o_kappa = cmd->add_option("--kappa", kappa, "arc curvature");
    o_l = cmd->add_option("--l", l, "curved-leaf length");
    o_L = cmd->add_option("--L", L, "flat-leaf length");
    o_ls = cmd->add_option("--l-star", l_star, "dimensionless kappa*l");
    o_Ls = cmd->add_option("--L-star", L_star, "dimensionless kappa*L");
  }

  void add_sweep(CLI::App* cmd) {
    o_lmin = cmd->add_option("--l-star-min", l_min);
    o_lmax = cmd->add_option("--l-star-max", l_max);
    o_lsteps = cmd->add_option("--l-star-steps", l_steps);
    o_Lmin = cmd->add_option("--L-star-min", L_min);
    o_Lmax = cmd->add_option("--L-star-max", L_max);
    o_Lsteps = cmd->add_option("--L-star-steps", L_steps);
  }

  RunConfig finalize() const {
    RunConfig rc = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (o_kappa && o_kappa->count()) rc.kappa = kappa;
    if (o_l && o_l->count()) rc.l = l;
    if (o_L && o_L->count()) rc.L = L;
    if (o_ls && o_ls->count()) rc.l_star = l_star;
    if (o_Ls && o_Ls->count()) rc.L_star = L_star;
    if (o_out && o_out->count()) rc.out_dir = out_dir;
    if (o_jobs && o_jobs->count()) rc.jobs = jobs;
    if (oracle) rc.oracle = true;
    if (svg) rc.emit_svg = true;
    if (o_gn && o_gn->count()) rc.grid_n = grid_n;
    if (o_tol && o_tol->count()) rc.tol = tol;
    if (o_scan && o_scan->count()) rc.scan_n = scan_n;
    if (o_lmin && o_lmin->count()) rc.sweep_l_min = l_min;
    if (o_lmax && o_lmax->count()) rc.sweep_l_max = l_max;
    if (o_lsteps && o_lsteps->count()) rc.sweep_l_steps = l_steps;
    if (o_Lmin && o_Lmin->count()) rc.sweep_L_min = L_min;
    if (o_Lmax && o_Lmax->count()) rc.sweep_L_max = L_max;
    if (o_Lsteps && o_Lsteps->count()) rc.sweep_L_steps = L_steps;
    if (o_samples && o_samples->count()) rc.trace_samples = samples;
    if (o_kind && o_kind->count()) rc.trace_kind = trace_kind;
    if (const char* env = std::getenv("TJSTAB_OUT")) rc.out_dir = env;
    return rc;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stability analysis of disconnected double triple-junction partitions"};
  app.require_subcommand(1);

  Flags fa, fs, ft, fr;

  CLI::App* analyze = app.add_subcommand("analyze", "analyze one configuration");
  fa.add_common(analyze);
  analyze->add_flag("--svg", fa.svg, "also emit the geometry figure");

  CLI::App* sweep = app.add_subcommand("sweep", "stability map over (l*, L*)");
  fs.add_common(sweep);
  fs.add_sweep(sweep);

  CLI::App* trace = app.add_subcommand("trace", "determinant and residual curves");
  ft.add_common(trace);
  ft.o_samples = trace->add_option("--samples", ft.samples, "rows in the trace CSV");
  ft.o_kind = trace->add_option("--kind", ft.trace_kind, "'x' or 'L_star'");
  ft.o_Lmin = trace->add_option("--L-star-min", ft.L_min);
  ft.o_Lmax = trace->add_option("--L-star-max", ft.L_max);

  CLI::App* render = app.add_subcommand("render", "emit the geometry SVG");
  fr.add_common(render);

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) {
      const cli::AnalyzeOutput out = cli::cmd_analyze(fa.finalize());
      std::cout << out.text;
      return out.exit_code;
    }
    if (sweep->parsed()) {
      const RunConfig rc = fs.finalize();
      const cli::SweepOutput out = cli::cmd_sweep(rc);
      cli::write_sweep_csv(out, rc.oracle, rc.out_dir);
      int stable = 0, unstable = 0, inconclusive = 0;
      for (const cli::SweepRow& r : out.rows) {
        if (r.verdict == Verdict::Stable) ++stable;
        else if (r.verdict == Verdict::Unstable) ++unstable;
        else ++inconclusive;
      }
      std::cout << "sweep: " << out.rows.size() << " points (" << stable
                << " stable, " << unstable << " unstable, " << inconclusive
                << " inconclusive) -> " << rc.out_dir << "/sweep.csv\n";
      return 0;
    }
    if (trace->parsed()) {
      const RunConfig rc = ft.finalize();
      const auto rows = cli::cmd_trace(rc);
      cli::write_trace_csv(rows, rc.trace_kind, rc.out_dir);
      std::cout << "trace: " << rows.size() << " rows -> " << rc.out_dir
                << "/trace.csv\n";
      return 0;
    }
    if (render->parsed()) {
      const RunConfig rc = fr.finalize();
      namespace fsx = std::filesystem;
      fsx::create_directories(rc.out_dir);
      const std::string path = (fsx::path(rc.out_dir) / "geometry.svg").string();
      emit_geometry_svg(rc.partition(), path);
      std::cout << "wrote " << path << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

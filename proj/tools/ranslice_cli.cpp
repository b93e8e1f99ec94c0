// Experiment runner: one subcommand per experiment, CSV output under --out.

#include <cstdint>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ranslice/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool quick = false;
  bool full = false;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "INI configuration file");
  cmd->add_option("--out", o.out_dir, "output directory for CSV files");
  cmd->add_option("--seed", o.seed, "master seed (overrides sim.seed and slice_gen.seed)");
  auto* quick = cmd->add_flag("--quick", o.quick, "desk-scale Monte Carlo (default)");
  cmd->add_flag("--full", o.full, "full-scale Monte Carlo")->excludes(quick);
  cmd->add_option("--threads", o.threads, "worker threads (default: $RANSLICE_THREADS or 1)")
      ->check(CLI::Range(1u, 1024u));
}

unsigned resolve_threads(const CommonOptions& o) {
  if (o.threads) return *o.threads;
  if (const char* env = std::getenv("RANSLICE_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1 && v <= 1024) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw ranslice::ConfigError(std::string("RANSLICE_THREADS must be an integer in [1, 1024], got '") + env + "'");
  }
  return 1;
}

ranslice::ExperimentConfig resolve(const CommonOptions& o) {
  ranslice::ExperimentConfig cfg;
  if (!o.config_path.empty()) ranslice::apply_config_file(cfg, o.config_path);
  if (!o.out_dir.empty()) cfg.output_dir = o.out_dir;
  if (o.seed) {
    cfg.sim.seed = *o.seed;
    cfg.slice_gen.seed = *o.seed;
  }
  cfg.full = o.full;
  cfg.sim.threads = resolve_threads(o);
  cfg.check();
  return cfg;
}

void print_table(const ranslice::Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) std::cout << (i ? "  " : "") << std::setw(14) << t.columns[i];
  std::cout << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::cout << (i ? "  " : "") << std::setw(14) << ranslice::format_cell(row[i]);
    }
    std::cout << '\n';
  }
}

int emit(const ranslice::Table& t, const ranslice::ExperimentConfig& cfg) {
  const auto path = ranslice::write_csv(t, cfg, cfg.output_dir);
  print_table(t);
  std::cout << "wrote " << path.string() << '\n';
  if (t.solver_stalls > 0) {
    std::cerr << "error: " << t.solver_stalls << " dual solves stalled; results may be misleading\n";
    return kExitSolver;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic-geometry RAN slicing experiments"};
  app.set_version_flag("--version", std::string(ranslice::version()));
  app.require_subcommand(1);

  CommonOptions common;
  auto* validate = app.add_subcommand("validate", "closed-form PSE against Monte Carlo over a density sweep");
  auto* optimality = app.add_subcommand("optimality", "admission control against exhaustive search");
  auto* benefits = app.add_subcommand("benefits", "sum-PSE ratio to the non-sliced network vs request count");
  auto* gains = app.add_subcommand("gains", "slicing gain over density ratios and thresholds");
  auto* convergence = app.add_subcommand("convergence", "dual iterations and wall time vs tenant count");
  auto* eval = app.add_subcommand("eval", "single-point PSE evaluation");
  for (auto* cmd : {validate, optimality, benefits, gains, convergence, eval}) add_common(cmd, common);

  std::optional<double> power_w, bandwidth_hz, lambda_ratio;
  bool eval_mc = false;
  eval->add_option("--power-w", power_w, "transmit power in W (default: total budget)")->check(CLI::NonNegativeNumber);
  eval->add_option("--bandwidth-hz", bandwidth_hz, "bandwidth in Hz (default: total budget)")
      ->check(CLI::NonNegativeNumber);
  eval->add_option("--lambda-ratio", lambda_ratio, "MT density as a multiple of the BS density")
      ->check(CLI::NonNegativeNumber);
  eval->add_flag("--mc", eval_mc, "also run the Monte Carlo estimate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const ranslice::ExperimentConfig cfg = resolve(common);
    if (validate->parsed()) return emit(ranslice::run_validate(cfg), cfg);
    if (optimality->parsed()) return emit(ranslice::run_optimality(cfg), cfg);
    if (benefits->parsed()) return emit(ranslice::run_benefits(cfg), cfg);
    if (gains->parsed()) return emit(ranslice::run_gains(cfg), cfg);
    if (convergence->parsed()) return emit(ranslice::run_convergence(cfg), cfg);
    if (eval->parsed()) {
      const auto params = cfg.params();
      const double ratio = lambda_ratio.value_or(cfg.slice_gen.lambda_ratio);
      const auto r = ranslice::run_eval(cfg, power_w.value_or(params.p_tot), bandwidth_hz.value_or(params.b_tot),
                                        ratio * params.lambda_bs, eval_mc);
      std::cout << std::setprecision(17);
      std::cout << "power_w = " << r.power << "\nbandwidth_hz = " << r.bandwidth << "\nlambda_t = " << r.lambda_t
                << "\npse = " << r.pse << '\n';
      if (r.monte_carlo) {
        std::cout << "mc_mean = " << r.monte_carlo->mean << "\nmc_ci95 = " << r.monte_carlo->ci95_half_width
                  << "\nmc_realizations = " << r.monte_carlo->n_realizations << '\n';
      }
      return kExitOk;
    }
  } catch (const ranslice::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ranslice::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ranslice::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ranslice::ConvergenceError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const ranslice::StallError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitOk;
}

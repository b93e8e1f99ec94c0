#include "ranslice/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ranslice/parallel.hpp"

#ifndef RANSLICE_VERSION
#define RANSLICE_VERSION "0.0.0"
#endif

namespace ranslice {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Stats {
  double mean = 0;
  double ci95 = 0;
  double min = 0;
  double max = 0;
};

Stats stats(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) return s;
  double sum = 0;
  s.min = xs.front();
  s.max = xs.front();
  for (double x : xs) {
    sum += x;
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.ci95 = 1.96 * std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return s;
}

NetworkParams with_thresholds(const ExperimentConfig& cfg, double threshold_db) {
  NetworkSpec spec = cfg.network;
  spec.gamma_i_db = threshold_db;
  spec.gamma_a_db = threshold_db;
  return spec.to_params();
}

// Stream indices keep experiments independent of each other and of the
// thread count: (experiment tag, outer index, inner index).
std::uint64_t experiment_seed(std::uint64_t base, std::uint64_t tag, std::uint64_t a, std::uint64_t b = 0) {
  return stream_seed(stream_seed(stream_seed(base, tag), a), b);
}

std::string seed_note(const char* what, std::uint64_t seed) {
  return std::string("seed.") + what + " = " + std::to_string(seed);
}

std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

}  // namespace

std::string_view version() { return RANSLICE_VERSION; }

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw std::logic_error("table " + name + ": row width does not match the header");
  }
  rows.push_back(std::move(row));
}

std::size_t Table::column(std::string_view col) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == col) return i;
  }
  throw std::out_of_range("table " + name + " has no column " + std::string(col));
}

double Table::number(std::size_t row, std::string_view col) const {
  const Cell& c = rows.at(row).at(column(col));
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  throw std::invalid_argument("table " + name + ": column " + std::string(col) + " is not numeric");
}

std::string format_cell(const Cell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  char buf[64];
  std::to_chars_result res{};
  if (const auto* d = std::get_if<double>(&cell)) {
    if (std::isnan(*d)) return "nan";
    res = std::to_chars(buf, buf + sizeof buf, *d);
  } else {
    res = std::to_chars(buf, buf + sizeof buf, std::get<std::int64_t>(cell));
  }
  return std::string(buf, res.ptr);
}

std::string render_csv(const Table& table, const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "# ranslice " << version() << '\n';
  os << "# schema_version = " << kCsvSchemaVersion << '\n';
  os << "# command = " << table.name << '\n';
  os << "# generated_at = " << utc_timestamp() << '\n';
  for (const auto& line : describe(cfg)) os << "# " << line << '\n';
  for (const auto& line : table.notes) os << "# " << line << '\n';
  os << "# measured_columns = ";
  for (std::size_t i = 0; i < table.measured_columns.size(); ++i) {
    os << (i ? "," : "") << table.measured_columns[i];
  }
  os << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
    os << '\n';
  }
  return os.str();
}

std::filesystem::path write_csv(const Table& table, const ExperimentConfig& cfg,
                                const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  const std::filesystem::path path = dir / (table.name + ".csv");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << render_csv(table, cfg);
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
  return path;
}

std::vector<SliceRequest> generate_slices(const SliceGenConfig& gen, int count, double lambda_t,
                                          std::uint64_t seed) {
  gen.validate();
  if (count < 0) throw DomainError("generate_slices: count must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(gen.mean_pct, gen.sigma_pct());
  std::vector<SliceRequest> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    double pct = 0;
    int tries = 0;
    do {
      pct = dist(rng);
      if (++tries > 1'000'000) throw ConfigError("slice_gen: truncation bounds reject every draw");
    } while (!(pct > gen.lower_pct && pct <= gen.upper_pct));
    char id[16];
    std::snprintf(id, sizeof id, "T%02d", i + 1);
    out.push_back({id, lambda_t, pct / 100.0});
  }
  return out;
}

Table run_validate(const ExperimentConfig& cfg) {
  const NetworkParams params = cfg.params();
  const SimConfig sim = cfg.sim_for_mode();
  const PseModel<double> model(params, cfg.admission.solver.specfun);
  Table t;
  t.name = "validate";
  t.columns = {"ratio", "analytic_pse", "mc_mean", "mc_ci95", "rel_error", "within_tolerance",
               "realizations", "window_half_width_m"};
  t.notes.push_back(seed_note("sim", sim.seed));
  for (std::size_t i = 0; i < cfg.validate.ratios.size(); ++i) {
    const double ratio = cfg.validate.ratios[i];
    const double lambda_t = ratio * params.lambda_bs;
    SimConfig run = sim;
    run.seed = experiment_seed(sim.seed, 1, i);
    const double analytic = model(params.p_tot, params.b_tot, lambda_t);
    const PseEstimate mc = estimate_pse(params.p_tot, params.b_tot, lambda_t, params, run);
    const double diff = std::abs(analytic - mc.mean);
    const double rel = analytic > 0.0 ? diff / analytic : (mc.mean > 0.0 ? 1.0 : 0.0);
    const bool ok = diff <= std::max(mc.ci95_half_width, 0.05 * analytic);
    t.add_row({ratio, analytic, mc.mean, mc.ci95_half_width, rel, std::int64_t{ok},
               std::int64_t{mc.n_realizations}, sim.window_half_width});
  }
  return t;
}

Table run_optimality(const ExperimentConfig& cfg) {
  Table t;
  t.name = "optimality";
  t.columns = {"n_tenants",   "threshold_db",       "instance",     "alpha_sum",  "admission_sum_pse",
               "opt_sum_pse", "gap_pct", "admission_admitted", "opt_feasible", "grid_levels"};
  t.notes.push_back(seed_note("slice_gen", cfg.slice_gen.seed));

  struct Job {
    int n;
    std::size_t threshold;
    int instance;
  };
  std::vector<Job> jobs;
  for (int n = 1; n <= cfg.optimality.max_tenants; ++n) {
    for (std::size_t th = 0; th < cfg.optimality.thresholds_db.size(); ++th) {
      for (int k = 0; k < cfg.optimality.instances; ++k) jobs.push_back({n, th, k});
    }
  }
  std::vector<std::vector<Cell>> rows(jobs.size());
  std::vector<int> stalls(jobs.size(), 0);
  parallel_for(jobs.size(), cfg.sim.threads, [&](std::size_t j) {
    const Job& job = jobs[j];
    const double threshold = cfg.optimality.thresholds_db[job.threshold];
    const NetworkParams params = with_thresholds(cfg, threshold);
    const auto seed = experiment_seed(cfg.slice_gen.seed, 2, static_cast<std::uint64_t>(job.n),
                                      static_cast<std::uint64_t>(job.instance));
    const auto requests = generate_slices(cfg.slice_gen, job.n, cfg.slice_gen.lambda_ratio * params.lambda_bs, seed);
    double alpha_sum = 0;
    for (const auto& r : requests) alpha_sum += r.alpha;
    const AdmissionResult admitted = admit(requests, params, cfg.admission);
    const SolveReport opt = brute_force_opt(requests, params, cfg.optimality.grid_levels, cfg.admission.solver);
    const double gap = opt.sum_pse > 0.0 ? 100.0 * (opt.sum_pse - admitted.sum_pse) / opt.sum_pse : 0.0;
    stalls[j] = admitted.stalls;
    rows[j] = {std::int64_t{job.n},
               threshold,
               std::int64_t{job.instance},
               alpha_sum,
               admitted.sum_pse,
               opt.sum_pse,
               gap,
               as_int(admitted.admitted.size()),
               std::int64_t{opt.converged},
               std::int64_t{cfg.optimality.grid_levels}};
  });
  for (std::size_t j = 0; j < rows.size(); ++j) {
    t.add_row(std::move(rows[j]));
    t.solver_stalls += stalls[j];
  }
  return t;
}

Table run_benefits(const ExperimentConfig& cfg) {
  const NetworkParams params = cfg.params();
  const int count = cfg.slice_gen.count;
  const int reps = cfg.slice_gen.replications;
  const double lambda_t = cfg.slice_gen.lambda_ratio * params.lambda_bs;
  Table t;
  t.name = "benefits";
  t.columns = {"n_requests", "mean_admitted", "mean_ratio", "ci95_ratio", "min_ratio", "max_ratio", "replications"};
  t.notes.push_back(seed_note("slice_gen", cfg.slice_gen.seed));

  // ratio[rep][n-1], admitted[rep][n-1]
  std::vector<std::vector<double>> ratio(static_cast<std::size_t>(reps)), admitted(static_cast<std::size_t>(reps));
  std::vector<int> stalls(static_cast<std::size_t>(reps), 0);
  parallel_for(static_cast<std::size_t>(reps), cfg.sim.threads, [&](std::size_t rep) {
    const auto requests = generate_slices(cfg.slice_gen, count, lambda_t, experiment_seed(cfg.slice_gen.seed, 3, rep));
    for (int n = 1; n <= count; ++n) {
      const std::span<const SliceRequest> prefix(requests.data(), static_cast<std::size_t>(n));
      const AdmissionResult r = admit(prefix, params, cfg.admission);
      ratio[rep].push_back(r.gain);
      admitted[rep].push_back(static_cast<double>(r.admitted.size()));
      stalls[rep] += r.stalls;
    }
  });

  t.add_row({std::int64_t{0}, 0.0, 0.0, 0.0, 0.0, 0.0, std::int64_t{reps}});
  for (int n = 1; n <= count; ++n) {
    std::vector<double> rs, as;
    for (std::size_t rep = 0; rep < ratio.size(); ++rep) {
      rs.push_back(ratio[rep][static_cast<std::size_t>(n - 1)]);
      as.push_back(admitted[rep][static_cast<std::size_t>(n - 1)]);
    }
    const Stats r = stats(rs);
    t.add_row({std::int64_t{n}, stats(as).mean, r.mean, r.ci95, r.min, r.max, std::int64_t{reps}});
  }
  for (int s : stalls) t.solver_stalls += s;
  return t;
}

Table run_gains(const ExperimentConfig& cfg) {
  const int reps = cfg.slice_gen.replications;
  Table t;
  t.name = "gains";
  t.columns = {"ratio", "threshold_db", "mean_gain", "gain_pct", "ci95_gain", "min_gain", "max_gain",
               "mean_admitted", "replications"};
  t.notes.push_back(seed_note("slice_gen", cfg.slice_gen.seed));

  const auto& ratios = cfg.gains.ratios;
  const auto& thresholds = cfg.gains.thresholds_db;
  const std::size_t cells = ratios.size() * thresholds.size();
  std::vector<double> gain(cells * static_cast<std::size_t>(reps)), count(gain.size());
  std::vector<int> stalls(gain.size(), 0);
  parallel_for(gain.size(), cfg.sim.threads, [&](std::size_t job) {
    const std::size_t cell = job / static_cast<std::size_t>(reps);
    const std::size_t rep = job % static_cast<std::size_t>(reps);
    const double ratio = ratios[cell / thresholds.size()];
    const NetworkParams params = with_thresholds(cfg, thresholds[cell % thresholds.size()]);
    // Demands depend on the replication only, so every cell sees the same draws.
    const auto requests = generate_slices(cfg.slice_gen, cfg.slice_gen.count, ratio * params.lambda_bs,
                                          experiment_seed(cfg.slice_gen.seed, 4, rep));
    const AdmissionResult r = admit(requests, params, cfg.admission);
    gain[job] = r.gain;
    count[job] = static_cast<double>(r.admitted.size());
    stalls[job] = r.stalls;
  });

  for (std::size_t cell = 0; cell < cells; ++cell) {
    const auto first = gain.begin() + static_cast<std::ptrdiff_t>(cell * static_cast<std::size_t>(reps));
    const Stats g = stats(std::vector<double>(first, first + reps));
    const auto cfirst = count.begin() + static_cast<std::ptrdiff_t>(cell * static_cast<std::size_t>(reps));
    const Stats c = stats(std::vector<double>(cfirst, cfirst + reps));
    t.add_row({ratios[cell / thresholds.size()], thresholds[cell % thresholds.size()], g.mean,
               100.0 * (g.mean - 1.0), g.ci95, g.min, g.max, c.mean, std::int64_t{reps}});
  }
  for (int s : stalls) t.solver_stalls += s;
  return t;
}

Table run_convergence(const ExperimentConfig& cfg) {
  const NetworkParams params = cfg.params();
  const double lambda_t = cfg.slice_gen.lambda_ratio * params.lambda_bs;
  Table t;
  t.name = "convergence";
  t.columns = {"n_tenants", "instance", "dual_iterations", "solves", "admitted", "admission_wall_s", "opt_wall_s"};
  t.measured_columns = {"admission_wall_s", "opt_wall_s"};
  t.notes.push_back(seed_note("slice_gen", cfg.slice_gen.seed));
  // Timings run serially so they are not distorted by sibling jobs.
  for (int n = 1; n <= cfg.convergence.max_tenants; ++n) {
    for (int k = 0; k < cfg.convergence.instances; ++k) {
      const auto requests = generate_slices(cfg.slice_gen, n, lambda_t,
                                            experiment_seed(cfg.slice_gen.seed, 5, static_cast<std::uint64_t>(n),
                                                            static_cast<std::uint64_t>(k)));
      auto start = std::chrono::steady_clock::now();
      const AdmissionResult r = admit(requests, params, cfg.admission);
      const double admission_s = seconds_since(start);
      double opt_s = kNaN;
      if (n <= kMaxBruteForceTenants) {
        start = std::chrono::steady_clock::now();
        (void)brute_force_opt(requests, params, cfg.optimality.grid_levels, cfg.admission.solver);
        opt_s = seconds_since(start);
      }
      t.solver_stalls += r.stalls;
      t.add_row({std::int64_t{n}, std::int64_t{k}, std::int64_t{r.dual_iterations}, std::int64_t{r.solves},
                 as_int(r.admitted.size()), admission_s, opt_s});
    }
  }
  return t;
}

EvalReport run_eval(const ExperimentConfig& cfg, double power, double bandwidth, double lambda_t,
                    bool with_monte_carlo) {
  const NetworkParams params = cfg.params();
  EvalReport r;
  r.power = power;
  r.bandwidth = bandwidth;
  r.lambda_t = lambda_t;
  r.pse = pse(power, bandwidth, lambda_t, params);
  if (with_monte_carlo) r.monte_carlo = estimate_pse(power, bandwidth, lambda_t, params, cfg.sim_for_mode());
  return r;
}

}  // namespace ranslice

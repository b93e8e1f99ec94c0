#include "ranslice/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <system_error>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace ranslice {

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double path_loss_constant(double carrier_hz) {
  const double wavelength = kSpeedOfLight / carrier_hz;
  const double k = 4.0 * std::numbers::pi / wavelength;
  return k * k;
}

double bs_density(double isd_m) { return 1.0 / (std::numbers::pi * isd_m * isd_m); }

NetworkParams NetworkSpec::to_params() const {
  if (!(isd_m > 0.0)) throw ConfigError("network.isd_m must be > 0");
  if (!(carrier_hz > 0.0)) throw ConfigError("network.carrier_hz must be > 0");
  if (!(b_tot_hz > 0.0)) throw ConfigError("network.b_tot_hz must be > 0");
  if (!(beta > 2.0)) throw ConfigError("network.beta must be > 2");
  NetworkParams p;
  p.lambda_bs = bs_density(isd_m);
  p.beta = beta;
  p.kappa = path_loss_constant(carrier_hz);
  p.n0 = dbm_to_watt(n0_dbm_per_hz);
  p.gamma_i = db_to_linear(gamma_i_db);
  p.gamma_a = db_to_linear(gamma_a_db);
  p.b_tot = b_tot_hz;
  p.p_tot = dbm_to_watt(p_tot_dbm);
  try {
    p.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return p;
}

double SliceGenConfig::sigma_pct() const {
  return variance_is_sigma ? variance_pct2 : std::sqrt(variance_pct2);
}

void SliceGenConfig::validate() const {
  if (!(variance_pct2 > 0.0)) throw ConfigError("slice_gen.variance_pct2 must be > 0");
  if (!(lower_pct >= 0.0 && upper_pct > lower_pct && upper_pct <= 100.0)) {
    throw ConfigError("slice_gen bounds must satisfy 0 <= lower_pct < upper_pct <= 100");
  }
  if (count < 1) throw ConfigError("slice_gen.count must be >= 1");
  if (replications < 1) throw ConfigError("slice_gen.replications must be >= 1");
  if (!(lambda_ratio > 0.0)) throw ConfigError("slice_gen.lambda_ratio must be > 0");
}

SimConfig ExperimentConfig::sim_for_mode() const {
  SimConfig s = sim;
  s.n_realizations = full ? validate.full_realizations : validate.quick_realizations;
  return s;
}

void ExperimentConfig::check() const {
  const NetworkParams p = params();
  try {
    sim_for_mode().validate(p);
    admission.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  slice_gen.validate();
  if (validate.quick_realizations < 1 || validate.full_realizations < 1) {
    throw ConfigError("validate realizations must be >= 1");
  }
  if (optimality.grid_levels < 4) throw ConfigError("optimality.grid_levels must be >= 4");
  if (optimality.max_tenants < 1 || optimality.max_tenants > kMaxBruteForceTenants) {
    throw ConfigError("optimality.max_tenants must lie in [1, 6]");
  }
  if (optimality.instances < 1 || convergence.instances < 1) throw ConfigError("instances must be >= 1");
  if (convergence.max_tenants < 1) throw ConfigError("convergence.max_tenants must be >= 1");
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0;
  const char* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    throw ConfigError("config: " + key + " expects a number, got '" + text + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& text) {
  Int v = 0;
  const char* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("config: " + key + " expects an integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("config: " + key + " expects true/false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw ConfigError("config: empty item in " + key);
    out.push_back(parse_double(key, item.substr(first, last - first + 1)));
  }
  if (out.empty()) throw ConfigError("config: " + key + " must not be empty");
  return out;
}

std::string format_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += format_double(xs[i]);
  }
  return out;
}

struct Entry {
  std::string key;
  std::function<void(const std::string&)> set;
  std::function<std::string()> get;
};

Entry real(std::string key, double& field) {
  return {key, [&field, key](const std::string& t) { field = parse_double(key, t); },
          [&field] { return format_double(field); }};
}

template <typename Int>
Entry integer(std::string key, Int& field) {
  return {key, [&field, key](const std::string& t) { field = parse_int<Int>(key, t); },
          [&field] { return std::to_string(field); }};
}

Entry boolean(std::string key, bool& field) {
  return {key, [&field, key](const std::string& t) { field = parse_bool(key, t); },
          [&field] { return std::string(field ? "true" : "false"); }};
}

Entry list(std::string key, std::vector<double>& field) {
  return {key, [&field, key](const std::string& t) { field = parse_list(key, t); },
          [&field] { return format_list(field); }};
}

template <typename Enum>
Entry choice(std::string key, Enum& field, std::vector<std::pair<std::string, Enum>> names) {
  return {key,
          [&field, key, names](const std::string& t) {
            for (const auto& [name, value] : names) {
              if (name == t) {
                field = value;
                return;
              }
            }
            throw ConfigError("config: unknown value '" + t + "' for " + key);
          },
          [&field, names] {
            for (const auto& [name, value] : names) {
              if (value == field) return name;
            }
            return std::string("?");
          }};
}

std::vector<Entry> registry(ExperimentConfig& c) {
  auto& n = c.network;
  auto& s = c.sim;
  auto& so = c.admission.solver;
  auto& g = c.slice_gen;
  return {
      real("network.isd_m", n.isd_m),
      real("network.carrier_hz", n.carrier_hz),
      real("network.p_tot_dbm", n.p_tot_dbm),
      real("network.b_tot_hz", n.b_tot_hz),
      real("network.n0_dbm_per_hz", n.n0_dbm_per_hz),
      real("network.gamma_i_db", n.gamma_i_db),
      real("network.gamma_a_db", n.gamma_a_db),
      real("network.beta", n.beta),
      real("sim.window_half_width", s.window_half_width),
      choice("sim.edge_mode", s.edge_mode, {{"torus", EdgeMode::torus}, {"guard", EdgeMode::guard}}),
      real("sim.guard_margin", s.guard_margin),
      choice("sim.interference", s.interference,
             {{"active_cells", InterferenceModel::active_cells}, {"all_cells", InterferenceModel::all_cells}}),
      integer("sim.seed", s.seed),
      real("solver.mu_tol", so.mu_tol),
      real("solver.zeta_min", so.zeta_min),
      real("solver.nu0", so.nu0),
      integer("solver.max_iters", so.max_iters),
      integer("solver.patience", so.patience),
      integer("solver.inner_max_iters", so.inner_max_iters),
      real("solver.inner_tol", so.inner_tol),
      real("solver.prox_weight", so.prox_weight),
      real("solver.feasibility_tol", so.feasibility_tol),
      real("solver.stall_tol", so.stall_tol),
      real("solver.series_tol", so.specfun.series_tol),
      integer("solver.max_terms", so.specfun.max_terms),
      real("admission.prefilter_alpha", c.admission.prefilter_alpha),
      real("admission.eps_alloc", c.admission.eps_alloc),
      choice("admission.order", c.admission.order,
             {{"ascending_alpha", FillOrder::ascending_alpha}, {"arrival", FillOrder::arrival}}),
      real("slice_gen.mean_pct", g.mean_pct),
      real("slice_gen.variance_pct2", g.variance_pct2),
      boolean("slice_gen.variance_is_sigma", g.variance_is_sigma),
      real("slice_gen.lower_pct", g.lower_pct),
      real("slice_gen.upper_pct", g.upper_pct),
      integer("slice_gen.count", g.count),
      integer("slice_gen.replications", g.replications),
      real("slice_gen.lambda_ratio", g.lambda_ratio),
      integer("slice_gen.seed", g.seed),
      list("validate.ratios", c.validate.ratios),
      integer("validate.quick_realizations", c.validate.quick_realizations),
      integer("validate.full_realizations", c.validate.full_realizations),
      integer("optimality.grid_levels", c.optimality.grid_levels),
      integer("optimality.max_tenants", c.optimality.max_tenants),
      integer("optimality.instances", c.optimality.instances),
      list("optimality.thresholds_db", c.optimality.thresholds_db),
      list("gains.ratios", c.gains.ratios),
      list("gains.thresholds_db", c.gains.thresholds_db),
      integer("convergence.max_tenants", c.convergence.max_tenants),
      integer("convergence.instances", c.convergence.instances),
  };
}

}  // namespace

void apply_config_file(ExperimentConfig& base, const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    if (e.line() == 0) throw IoError("cannot read config " + path + ": " + e.message());
    throw ConfigError("config " + path + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  auto entries = registry(base);
  for (const auto& [section, keys] : tree) {
    if (keys.empty() && !keys.data().empty()) {
      throw ConfigError("config " + path + ": key '" + section + "' outside a section");
    }
    for (const auto& [key, value] : keys) {
      const std::string full_key = section + "." + key;
      bool known = false;
      for (auto& e : entries) {
        if (e.key == full_key) {
          e.set(value.data());
          known = true;
          break;
        }
      }
      if (!known) throw ConfigError("config " + path + ": unknown key '" + full_key + "'");
    }
  }
  base.source = path;
}

ExperimentConfig load_config(const std::string& path) {
  ExperimentConfig cfg;
  apply_config_file(cfg, path);
  cfg.check();
  return cfg;
}

std::vector<std::string> describe(const ExperimentConfig& cfg) {
  ExperimentConfig copy = cfg;
  std::vector<std::string> lines;
  lines.push_back("config.source = " + cfg.source);
  lines.push_back(std::string("config.mode = ") + (cfg.full ? "full" : "quick"));
  for (const auto& e : registry(copy)) lines.push_back(e.key + " = " + e.get());
  const NetworkParams p = cfg.params();
  lines.push_back("derived.lambda_bs = " + format_double(p.lambda_bs));
  lines.push_back("derived.kappa = " + format_double(p.kappa));
  lines.push_back("derived.n0_w_per_hz = " + format_double(p.n0));
  lines.push_back("derived.p_tot_w = " + format_double(p.p_tot));
  lines.push_back("derived.gamma_i = " + format_double(p.gamma_i));
  lines.push_back("derived.gamma_a = " + format_double(p.gamma_a));
  lines.push_back("derived.realizations = " + std::to_string(cfg.sim_for_mode().n_realizations));
  return lines;
}

}  // namespace ranslice

#pragma once

// Experiment configuration in engineering units (dB, dBm, metres, Hz).
// Conversion to the linear SI NetworkParams happens once, in to_params().

#include <cstdint>
#include <string>
#include <vector>

#include "ranslice/admission.hpp"
#include "ranslice/model.hpp"
#include "ranslice/montecarlo.hpp"
#include "ranslice/optimizer.hpp"

namespace ranslice {

inline constexpr double kSpeedOfLight = 3e8;  // m/s, as in the ITU UMi parameter set

double dbm_to_watt(double dbm);
double db_to_linear(double db);
/// Free-space constant (4 pi f_c / c)^2.
double path_loss_constant(double carrier_hz);
/// BS density for an inter-site distance: 1 / (pi ISD^2).
double bs_density(double isd_m);

struct NetworkSpec {
  double isd_m = 200.0;
  double carrier_hz = 2.1e9;
  double p_tot_dbm = 43.0;
  double b_tot_hz = 20e6;
  double n0_dbm_per_hz = -174.0;
  double gamma_i_db = 0.0;
  double gamma_a_db = 0.0;
  double beta = 3.5;

  NetworkParams to_params() const;
};

struct SliceGenConfig {
  double mean_pct = 10.0;
  double variance_pct2 = 5.0;
  bool variance_is_sigma = false;  // read variance_pct2 as a standard deviation
  double lower_pct = 0.0;          // exclusive
  double upper_pct = 50.0;         // inclusive
  int count = 32;
  int replications = 20;
  double lambda_ratio = 100.0;  // per-tenant lambda_T / lambda_BS
  std::uint64_t seed = 2017;

  double sigma_pct() const;
  void validate() const;
};

struct ValidateConfig {
  std::vector<double> ratios{0, 1, 2, 5, 10, 20, 50, 100, 200};
  int quick_realizations = 200;
  int full_realizations = 1000;
};

struct OptimalityConfig {
  int grid_levels = 24;
  int max_tenants = kMaxBruteForceTenants;
  int instances = 3;  // seeded demand draws per (n, threshold)
  std::vector<double> thresholds_db{-5, 0, 5};
};

struct GainsConfig {
  std::vector<double> ratios{50, 200, 500};
  std::vector<double> thresholds_db{-5, 0, 5};
};

struct ConvergenceConfig {
  int max_tenants = 32;
  int instances = 3;
};

struct ExperimentConfig {
  NetworkSpec network;
  SimConfig sim;
  AdmissionConfig admission;
  SliceGenConfig slice_gen;
  ValidateConfig validate;
  OptimalityConfig optimality;
  GainsConfig gains;
  ConvergenceConfig convergence;
  std::string output_dir = "out";
  bool full = false;
  std::string source = "<defaults>";

  NetworkParams params() const { return network.to_params(); }
  /// SimConfig with the realization count of the selected mode.
  SimConfig sim_for_mode() const;
  void check() const;
};

/// Reads an INI file. Unknown sections or keys are errors.
ExperimentConfig load_config(const std::string& path);

/// Applies overrides from an INI file on top of `base`.
void apply_config_file(ExperimentConfig& base, const std::string& path);

/// One "section.key = value" line per resolved setting, in a fixed order.
std::vector<std::string> describe(const ExperimentConfig& cfg);

}  // namespace ranslice

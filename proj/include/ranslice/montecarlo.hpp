#pragma once

// PPP network simulator built from the per-MT definitions only: it never
// calls the closed-form PSE, the load factor or the cell-load pmf.

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "ranslice/model.hpp"

namespace ranslice {

enum class EdgeMode { torus, guard };
enum class InterferenceModel { active_cells, all_cells };

struct SimConfig {
  double window_half_width = 1500.0;  // m, window is [-w, w]^2
  int n_realizations = 200;
  std::uint64_t seed = 1;
  EdgeMode edge_mode = EdgeMode::torus;
  double guard_margin = 0.0;  // m, guard mode only
  InterferenceModel interference = InterferenceModel::active_cells;
  unsigned threads = 1;

  void validate(const NetworkParams& params) const;
};

struct PseEstimate {
  double mean = 0;
  double ci95_half_width = 0;
  int n_realizations = 0;
};

/// Columns are points (x, y) in metres.
using PointSet = Eigen::Matrix<double, 2, Eigen::Dynamic>;

PointSet sample_ppp(double density, double half_width, std::mt19937_64& rng);

struct Geometry {
  double half_width = 0;
  EdgeMode edge_mode = EdgeMode::torus;

  double squared_distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b) const;
};

struct Association {
  Eigen::Index serving = -1;
  double path_loss = 0;  // kappa r0^beta
};

/// Serving BS = minimum path loss; ties go to the lower BS index.
Association associate(const Eigen::Vector2d& mt, const PointSet& bss, const NetworkParams& params,
                      const Geometry& geometry);

/// Per-link quantities for one MT, at unit transmit power per BS.
struct LinkSample {
  double serving_path_loss = 0;  // L0
  double serving_fading = 0;     // h0
  double interference = 0;       // sum_k h_k / L_k over interferers with L_k > L0
};

/// Fading-averaged detection test (P/(n+1)) / L0 >= gamma_A N0 B/(n+1).
bool snr_condition(double serving_path_loss, int n_in_cell, double bandwidth, double power,
                   const NetworkParams& params);

/// Joint decoding and detection event for an MT sharing its cell with
/// n_in_cell - 1 others. Power and bandwidth are split evenly per user.
bool mt_indicator(const LinkSample& link, int n_in_cell, double bandwidth, double power,
                  const NetworkParams& params);

PseEstimate estimate_pse(double power, double bandwidth, double lambda_t, const NetworkParams& params,
                         const SimConfig& sim);

/// Size-biased cell load: probability that a typical MT shares its cell with
/// n others, for n = 0..max_n, with 95% CI half-widths across realizations.
struct CellLoadEstimate {
  std::vector<double> probability;
  std::vector<double> ci95_half_width;
  int n_realizations = 0;
  long total_mts = 0;  // scored MTs summed over realizations
};

CellLoadEstimate estimate_cell_load(double lambda_t, int max_n, const NetworkParams& params,
                                    const SimConfig& sim);

}  // namespace ranslice

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ranslice/config.hpp"

namespace ranslice {

inline constexpr int kCsvSchemaVersion = 1;

std::string_view version();

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> measured_columns;  // wall-clock timings; not reproducible
  std::vector<std::string> notes;             // extra header lines, e.g. seeds
  int solver_stalls = 0;

  void add_row(std::vector<Cell> row);
  /// Index of a column; throws std::out_of_range when absent.
  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::string_view col) const;
};

std::string format_cell(const Cell& cell);

/// Header block ('#' lines) followed by the CSV body.
std::string render_csv(const Table& table, const ExperimentConfig& cfg);

/// Writes <dir>/<table.name>.csv; creates dir. Throws IoError.
std::filesystem::path write_csv(const Table& table, const ExperimentConfig& cfg,
                                const std::filesystem::path& dir);

/// Slice demands: alpha in percent ~ Normal(mean, sigma) truncated to
/// (lower_pct, upper_pct], ids "T01", "T02", ... in arrival order.
std::vector<SliceRequest> generate_slices(const SliceGenConfig& gen, int count, double lambda_t,
                                          std::uint64_t seed);

Table run_validate(const ExperimentConfig& cfg);
Table run_optimality(const ExperimentConfig& cfg);
Table run_benefits(const ExperimentConfig& cfg);
Table run_gains(const ExperimentConfig& cfg);
Table run_convergence(const ExperimentConfig& cfg);

struct EvalReport {
  double power = 0;
  double bandwidth = 0;
  double lambda_t = 0;
  double pse = 0;
  std::optional<PseEstimate> monte_carlo;
};

EvalReport run_eval(const ExperimentConfig& cfg, double power, double bandwidth, double lambda_t,
                    bool with_monte_carlo);

}  // namespace ranslice

#include "ranslice/montecarlo.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ranslice/parallel.hpp"

namespace ranslice {

namespace {

struct Moments {
  double mean = 0;
  double ci95 = 0;
};

// Index-ordered reduction, so the result is independent of the worker count.
Moments summarize(const std::vector<double>& xs) {
  Moments m;
  if (xs.empty()) return m;
  double sum = 0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return m;
  double ss = 0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  const double var = ss / static_cast<double>(xs.size() - 1);
  m.ci95 = 1.96 * std::sqrt(var / static_cast<double>(xs.size()));
  return m;
}

// MTs inside the scoring region. Torus: the whole window; guard: the inner square.
struct Scoring {
  double inner_half_width;
  double area;

  bool contains(const Eigen::Vector2d& p) const {
    return std::abs(p.x()) <= inner_half_width && std::abs(p.y()) <= inner_half_width;
  }
};

Scoring scoring_region(const SimConfig& sim) {
  const double inner = sim.edge_mode == EdgeMode::guard ? sim.window_half_width - sim.guard_margin
                                                        : sim.window_half_width;
  return {inner, 4.0 * inner * inner};
}

struct Cells {
  std::vector<Association> assoc;  // per MT
  std::vector<int> load;           // MTs per BS
};

Cells build_cells(const PointSet& mts, const PointSet& bss, const NetworkParams& params,
                  const Geometry& geometry) {
  Cells cells;
  cells.assoc.resize(static_cast<std::size_t>(mts.cols()));
  cells.load.assign(static_cast<std::size_t>(bss.cols()), 0);
  for (Eigen::Index i = 0; i < mts.cols(); ++i) {
    const Association a = associate(mts.col(i), bss, params, geometry);
    cells.assoc[static_cast<std::size_t>(i)] = a;
    ++cells.load[static_cast<std::size_t>(a.serving)];
  }
  return cells;
}

}  // namespace

void SimConfig::validate(const NetworkParams& params) const {
  params.validate();
  const double min_half_width = 5.0 / std::sqrt(std::numbers::pi * params.lambda_bs);
  if (!(window_half_width >= min_half_width)) {
    std::ostringstream os;
    os << "SimConfig.window_half_width must be >= " << min_half_width << " m (5 cell radii), got "
       << window_half_width;
    throw DomainError(os.str());
  }
  if (n_realizations < 1) throw DomainError("SimConfig.n_realizations must be >= 1");
  if (threads < 1) throw DomainError("SimConfig.threads must be >= 1");
  if (edge_mode == EdgeMode::guard && !(guard_margin >= 0.0 && guard_margin < window_half_width)) {
    throw DomainError("SimConfig.guard_margin must lie in [0, window_half_width)");
  }
}

PointSet sample_ppp(double density, double half_width, std::mt19937_64& rng) {
  if (!(density >= 0.0)) throw DomainError("sample_ppp: density must be >= 0");
  if (!(half_width > 0.0)) throw DomainError("sample_ppp: half_width must be > 0");
  const double mean = density * 4.0 * half_width * half_width;
  if (mean == 0.0) return PointSet(2, 0);
  std::poisson_distribution<long> count_dist(mean);
  std::uniform_real_distribution<double> coord(-half_width, half_width);
  const long count = count_dist(rng);
  PointSet pts(2, count);
  for (long i = 0; i < count; ++i) {
    pts(0, i) = coord(rng);
    pts(1, i) = coord(rng);
  }
  return pts;
}

double Geometry::squared_distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b) const {
  Eigen::Vector2d d = (a - b).cwiseAbs();
  if (edge_mode == EdgeMode::torus) {
    const double side = 2.0 * half_width;
    d = d.cwiseMin(Eigen::Vector2d::Constant(side) - d);
  }
  return d.squaredNorm();
}

Association associate(const Eigen::Vector2d& mt, const PointSet& bss, const NetworkParams& params,
                      const Geometry& geometry) {
  if (bss.cols() == 0) throw DomainError("associate: empty BS set");
  Eigen::Index best = 0;
  double best_d2 = geometry.squared_distance(mt, bss.col(0));
  for (Eigen::Index k = 1; k < bss.cols(); ++k) {
    const double d2 = geometry.squared_distance(mt, bss.col(k));
    if (d2 < best_d2) {
      best_d2 = d2;
      best = k;
    }
  }
  return {best, params.kappa * std::pow(best_d2, params.beta / 2.0)};
}

bool snr_condition(double serving_path_loss, int n_in_cell, double bandwidth, double power,
                   const NetworkParams& params) {
  if (n_in_cell < 1) throw DomainError("snr_condition: n_in_cell must be >= 1");
  if (!(power > 0.0) || !(bandwidth > 0.0)) return false;
  const double users = static_cast<double>(n_in_cell);
  const double received = (power / users) / serving_path_loss;
  const double noise = params.n0 * (bandwidth / users);
  return received / noise >= params.gamma_a;
}

bool mt_indicator(const LinkSample& link, int n_in_cell, double bandwidth, double power,
                  const NetworkParams& params) {
  if (!snr_condition(link.serving_path_loss, n_in_cell, bandwidth, power, params)) return false;
  if (link.interference <= 0.0) return true;
  const double per_user = power / static_cast<double>(n_in_cell);
  const double signal = per_user * link.serving_fading / link.serving_path_loss;
  return signal / (per_user * link.interference) >= params.gamma_i;
}

PseEstimate estimate_pse(double power, double bandwidth, double lambda_t, const NetworkParams& params,
                         const SimConfig& sim) {
  sim.validate(params);
  if (!(power >= 0.0) || !(bandwidth >= 0.0) || !(lambda_t >= 0.0)) {
    throw DomainError("estimate_pse: power, bandwidth and lambda_t must be >= 0");
  }
  const Geometry geometry{sim.window_half_width, sim.edge_mode};
  const Scoring scoring = scoring_region(sim);
  const double rate = std::log2(1.0 + params.gamma_i);
  const bool all_interfere = sim.interference == InterferenceModel::all_cells;

  std::vector<double> per_realization(static_cast<std::size_t>(sim.n_realizations), 0.0);
  parallel_for(per_realization.size(), sim.threads, [&](std::size_t r) {
    std::mt19937_64 rng(stream_seed(sim.seed, r));
    const PointSet bss = sample_ppp(params.lambda_bs, sim.window_half_width, rng);
    const PointSet mts = sample_ppp(lambda_t, sim.window_half_width, rng);
    if (bss.cols() == 0 || mts.cols() == 0) return;
    const Cells cells = build_cells(mts, bss, params, geometry);
    std::exponential_distribution<double> fading(1.0);

    double throughput = 0;
    for (Eigen::Index i = 0; i < mts.cols(); ++i) {
      if (!scoring.contains(mts.col(i))) continue;
      const Association& a = cells.assoc[static_cast<std::size_t>(i)];
      const int n_in_cell = cells.load[static_cast<std::size_t>(a.serving)];
      if (!snr_condition(a.path_loss, n_in_cell, bandwidth, power, params)) continue;

      LinkSample link;
      link.serving_path_loss = a.path_loss;
      link.serving_fading = fading(rng);
      for (Eigen::Index k = 0; k < bss.cols(); ++k) {
        if (k == a.serving) continue;
        if (!all_interfere && cells.load[static_cast<std::size_t>(k)] == 0) continue;
        const double loss =
            params.kappa * std::pow(geometry.squared_distance(mts.col(i), bss.col(k)), params.beta / 2.0);
        if (loss > a.path_loss) link.interference += fading(rng) / loss;
      }
      if (mt_indicator(link, n_in_cell, bandwidth, power, params)) {
        throughput += bandwidth / static_cast<double>(n_in_cell) * rate;
      }
    }
    per_realization[r] = throughput / scoring.area;
  });

  const Moments m = summarize(per_realization);
  return {m.mean, m.ci95, sim.n_realizations};
}

CellLoadEstimate estimate_cell_load(double lambda_t, int max_n, const NetworkParams& params,
                                    const SimConfig& sim) {
  sim.validate(params);
  if (!(lambda_t > 0.0)) throw DomainError("estimate_cell_load: lambda_t must be > 0");
  if (max_n < 0) throw DomainError("estimate_cell_load: max_n must be >= 0");
  const Geometry geometry{sim.window_half_width, sim.edge_mode};
  const Scoring scoring = scoring_region(sim);
  const auto bins = static_cast<std::size_t>(max_n) + 1;

  // Realizations with no scored MT carry no information and are dropped.
  std::vector<std::vector<double>> fractions(static_cast<std::size_t>(sim.n_realizations));
  std::vector<long> scored_counts(fractions.size(), 0);
  parallel_for(fractions.size(), sim.threads, [&](std::size_t r) {
    std::mt19937_64 rng(stream_seed(sim.seed, r));
    const PointSet bss = sample_ppp(params.lambda_bs, sim.window_half_width, rng);
    const PointSet mts = sample_ppp(lambda_t, sim.window_half_width, rng);
    if (bss.cols() == 0 || mts.cols() == 0) return;
    const Cells cells = build_cells(mts, bss, params, geometry);
    std::vector<double> hist(bins, 0.0);
    double scored = 0;
    for (Eigen::Index i = 0; i < mts.cols(); ++i) {
      if (!scoring.contains(mts.col(i))) continue;
      scored += 1.0;
      const int others = cells.load[static_cast<std::size_t>(cells.assoc[static_cast<std::size_t>(i)].serving)] - 1;
      if (others <= max_n) hist[static_cast<std::size_t>(others)] += 1.0;
    }
    if (scored == 0.0) return;
    scored_counts[r] = static_cast<long>(scored);
    for (double& h : hist) h /= scored;
    fractions[r] = std::move(hist);
  });

  CellLoadEstimate out;
  for (long c : scored_counts) out.total_mts += c;
  out.probability.assign(bins, 0.0);
  out.ci95_half_width.assign(bins, 0.0);
  std::vector<double> column;
  for (std::size_t n = 0; n < bins; ++n) {
    column.clear();
    for (const auto& f : fractions) {
      if (!f.empty()) column.push_back(f[n]);
    }
    const Moments m = summarize(column);
    out.probability[n] = m.mean;
    out.ci95_half_width[n] = m.ci95;
    out.n_realizations = static_cast<int>(column.size());
  }
  return out;
}

}  // namespace ranslice

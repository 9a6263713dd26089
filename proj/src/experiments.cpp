#include "wpsim/experiments.hpp"

#include <cmath>
#include <stdexcept>

namespace wpsim {

PredictionGrid PredictionGrid::from_model(const BoostedModel& model,
                                          const GameConfig& cfg) {
  cfg.validate();
  PredictionGrid grid;
  grid.cfg = cfg;
  const int L = cfg.field_length;
  const int T = cfg.plays_per_game;
  grid.values.reserve(static_cast<std::size_t>(T + 1) * static_cast<std::size_t>(L - 1) *
                      static_cast<std::size_t>(2 * T + 1));
  for (int t = 1; t <= T + 1; ++t)
    for (int x = 1; x <= L - 1; ++x)
      for (int s = -T; s <= T; ++s) grid.values.push_back(model.predict(t, x, s));
  return grid;
}

PredictionGrid PredictionGrid::constant(const GameConfig& cfg, double value) {
  cfg.validate();
  PredictionGrid grid;
  grid.cfg = cfg;
  const std::size_t total = static_cast<std::size_t>(cfg.plays_per_game + 1) *
                            static_cast<std::size_t>(cfg.field_length - 1) *
                            static_cast<std::size_t>(2 * cfg.plays_per_game + 1);
  grid.values.assign(total, value);
  return grid;
}

SummaryStat summarize(std::span<const double> values) {
  const auto n = static_cast<double>(values.size());
  if (values.empty()) throw std::invalid_argument("summarize: empty sample");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  if (values.size() == 1) return SummaryStat{mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return SummaryStat{mean, std::sqrt(ss / (n - 1.0) / n)};
}

std::vector<ReplicateResult> bias_variance(const std::vector<PredictionGrid>& models,
                                           const std::vector<PlayDataset>& tests,
                                           const WpTable& table) {
  const std::size_t m_count = models.size();
  if (m_count < 2)
    throw std::invalid_argument("bias_variance: need >= 2 replicates for the variance");
  if (tests.size() != m_count)
    throw std::invalid_argument("bias_variance: models and test sets must be aligned");

  // Cross-replicate mean prediction, element-wise over the state grid.
  PredictionGrid mean_grid = models[0];
  for (std::size_t j = 1; j < m_count; ++j)
    for (std::size_t i = 0; i < mean_grid.values.size(); ++i)
      mean_grid.values[i] += models[j].values[i];
  for (double& v : mean_grid.values) v /= static_cast<double>(m_count);

  std::vector<ReplicateResult> results;
  results.reserve(m_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    const PlayDataset& test = tests[m];
    if (test.empty()) throw std::invalid_argument("bias_variance: empty test set");
    double bias_sq = 0.0, variance = 0.0;
    for (const PlayRow& row : test.rows) {
      const double truth = table.at(row.t, row.x, row.s);
      const double pred = models[m].at(row.t, row.x, row.s);
      const double center = mean_grid.at(row.t, row.x, row.s);
      bias_sq += (truth - pred) * (truth - pred);
      variance += (pred - center) * (pred - center);
    }
    const auto n = static_cast<double>(test.size());
    bias_sq /= n;
    variance /= n;
    results.push_back(ReplicateResult{static_cast<int>(m), bias_sq, variance,
                                      std::sqrt(bias_sq + variance)});
  }
  return results;
}

std::vector<PredictionGrid> fit_replicate_grids(const WpTable& table,
                                                std::int64_t games, int plays_kept,
                                                int replicates,
                                                const BoostConfig& config,
                                                std::uint64_t seed,
                                                const ThreadPool& pool) {
  std::vector<PredictionGrid> grids(static_cast<std::size_t>(replicates));
  pool.parallel_for(static_cast<std::size_t>(replicates), [&](std::size_t m) {
    const PlayDataset data = generate_games(
        games, plays_kept, table, derive_seed(seed, 1, static_cast<std::uint64_t>(m)));
    const BoostedModel model =
        fit(data, config, derive_seed(seed, 2, static_cast<std::uint64_t>(m)));
    grids[m] = PredictionGrid::from_model(model, table.config());
  });
  return grids;
}

CellReport evaluate_cell(const std::string& label, double zeta, std::int64_t games,
                         int plays_kept, const std::vector<PredictionGrid>& models,
                         const std::vector<PlayDataset>& tests, const WpTable& table) {
  const auto replicates = bias_variance(models, tests, table);
  std::vector<double> bias_sq, variance, rmse;
  for (const ReplicateResult& r : replicates) {
    bias_sq.push_back(r.bias_sq);
    variance.push_back(r.variance);
    rmse.push_back(r.rmse);
  }
  CellReport report;
  report.label = label;
  report.zeta = zeta;
  report.games = games;
  report.plays_kept = plays_kept;
  report.replicates = static_cast<int>(models.size());
  report.bias_sq = summarize(bias_sq);
  report.variance = summarize(variance);
  report.rmse = summarize(rmse);
  return report;
}

std::vector<StateBias> bias_by_state(const std::vector<PredictionGrid>& models,
                                     const WpTable& table, int x_fixed,
                                     std::span<const int> times,
                                     std::span<const int> scores) {
  if (models.empty()) throw std::invalid_argument("bias_by_state: no models");
  std::vector<StateBias> out;
  std::vector<double> diffs(models.size());
  for (int t : times)
    for (int s : scores) {
      const double truth = table.at(t, x_fixed, s);
      for (std::size_t m = 0; m < models.size(); ++m)
        diffs[m] = models[m].at(t, x_fixed, s) - truth;
      const SummaryStat stat = summarize(diffs);
      out.push_back(StateBias{t, x_fixed, s, stat.mean, stat.std_error});
    }
  return out;
}

}  // namespace wpsim

#ifndef WPSIM_EXPERIMENTS_HPP
#define WPSIM_EXPERIMENTS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wpsim/dataset.hpp"
#include "wpsim/gbt.hpp"
#include "wpsim/oracle.hpp"
#include "wpsim/thread_pool.hpp"

namespace wpsim {

// A model's prediction cached at every state of the (t, x, s) domain. The
// domain is small, so this turns repeated ensemble prediction into array
// lookups.
struct PredictionGrid {
  GameConfig cfg;
  std::vector<double> values;

  static PredictionGrid from_model(const BoostedModel& model, const GameConfig& cfg);
  static PredictionGrid constant(const GameConfig& cfg, double value);

  double at(int t, int x, int s) const {
    const std::size_t xs = static_cast<std::size_t>(cfg.field_length - 1);
    const std::size_t ss = static_cast<std::size_t>(2 * cfg.plays_per_game + 1);
    return values[(static_cast<std::size_t>(t - 1) * xs + static_cast<std::size_t>(x - 1)) * ss +
                  static_cast<std::size_t>(s + cfg.plays_per_game)];
  }
  double at(const GameState& st) const { return at(st.t, st.x, st.s); }
};

struct ReplicateResult {
  int replicate = 0;
  double bias_sq = 0.0;
  double variance = 0.0;
  double rmse = 0.0;
};

struct SummaryStat {
  double mean = 0.0;
  double std_error = 0.0;  // sample SD / sqrt(n)
};

SummaryStat summarize(std::span<const double> values);

// Squared bias and variance of each replicate estimator against the exact
// table, averaged over that replicate's test points; the variance centers
// on the cross-replicate mean prediction. Requires >= 2 replicates.
std::vector<ReplicateResult> bias_variance(const std::vector<PredictionGrid>& models,
                                           const std::vector<PlayDataset>& tests,
                                           const WpTable& table);

// One grid cell of a campaign: M replicate fits of a (G, K) configuration.
struct CellReport {
  std::string label;
  double zeta = 0.0;
  std::int64_t games = 0;
  int plays_kept = 0;
  int replicates = 0;
  SummaryStat bias_sq, variance, rmse;
};

// M independent (generate, fit, cache-predictions) replicates. Seeds are
// derived per replicate, so output is invariant to the worker count.
std::vector<PredictionGrid> fit_replicate_grids(const WpTable& table,
                                                std::int64_t games, int plays_kept,
                                                int replicates,
                                                const BoostConfig& config,
                                                std::uint64_t seed,
                                                const ThreadPool& pool);

CellReport evaluate_cell(const std::string& label, double zeta, std::int64_t games,
                         int plays_kept, const std::vector<PredictionGrid>& models,
                         const std::vector<PlayDataset>& tests, const WpTable& table);

// Signed bias (mean prediction minus truth) with its standard error on a
// (t, s) grid at a fixed field position.
struct StateBias {
  int t = 0;
  int x = 0;
  int s = 0;
  double bias_mean = 0.0;
  double bias_se = 0.0;
};

std::vector<StateBias> bias_by_state(const std::vector<PredictionGrid>& models,
                                     const WpTable& table, int x_fixed,
                                     std::span<const int> times,
                                     std::span<const int> scores);

}  // namespace wpsim

#endif  // WPSIM_EXPERIMENTS_HPP

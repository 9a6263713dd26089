#include "wpsim/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wpsim {

std::string to_string(ResampleKind kind) {
  switch (kind) {
    case ResampleKind::standard: return "standard";
    case ResampleKind::cluster: return "cluster";
    case ResampleKind::randomized_cluster: return "randomized_cluster";
  }
  throw std::logic_error("unknown ResampleKind");
}

ResampleKind resample_kind_from_string(const std::string& name) {
  if (name == "standard") return ResampleKind::standard;
  if (name == "cluster") return ResampleKind::cluster;
  if (name == "randomized_cluster") return ResampleKind::randomized_cluster;
  throw std::invalid_argument("unknown bootstrap scheme '" + name +
                              "' (expected standard, cluster, or randomized_cluster)");
}

void BootstrapScheme::validate() const {
  if (!(phi > 0.0) || phi > 1.0)
    throw std::invalid_argument("bootstrap fraction must be in (0, 1]");
  if (replicates < 2)
    throw std::invalid_argument("bootstrap replicate count must be >= 2");
}

PlayDataset resample(const PlayDataset& data, const BootstrapScheme& scheme, Rng& rng) {
  scheme.validate();
  if (data.empty()) throw std::invalid_argument("resample: empty dataset");

  PlayDataset out;
  if (scheme.kind == ResampleKind::standard) {
    const auto n = static_cast<std::int64_t>(
        std::llround(static_cast<double>(data.size()) * scheme.phi));
    if (n == 0)
      throw std::invalid_argument("resample: fraction too small for dataset");
    out.rows.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
      PlayRow row = data.rows[static_cast<std::size_t>(
          rng.next_below(static_cast<std::uint64_t>(data.size())))];
      row.game_id = i;  // each resampled row is its own unit
      out.rows.push_back(row);
    }
    return out;
  }

  const auto spans = data.game_spans();
  const auto games = static_cast<std::int64_t>(spans.size());
  const auto draws = static_cast<std::int64_t>(
      std::llround(static_cast<double>(games) * scheme.phi));
  if (draws == 0)
    throw std::invalid_argument("resample: fraction too small for dataset");

  out.rows.reserve(data.size());
  for (std::int64_t j = 0; j < draws; ++j) {
    const auto& [first, count] =
        spans[static_cast<std::size_t>(rng.next_below(static_cast<std::uint64_t>(games)))];
    if (scheme.kind == ResampleKind::cluster) {
      for (std::size_t i = 0; i < count; ++i) {
        PlayRow row = data.rows[first + i];
        row.game_id = j;
        out.rows.push_back(row);
      }
    } else {  // randomized_cluster: as many within-game draws as observed rows
      for (std::size_t i = 0; i < count; ++i) {
        PlayRow row = data.rows[first + static_cast<std::size_t>(rng.next_below(
                                            static_cast<std::uint64_t>(count)))];
        row.game_id = j;
        out.rows.push_back(row);
      }
    }
  }
  return out;
}

std::vector<BoostedModel> fit_bootstrap_ensemble(const PlayDataset& data,
                                                 const BootstrapScheme& scheme,
                                                 const BoostConfig& config,
                                                 std::uint64_t seed,
                                                 const ThreadPool& pool) {
  scheme.validate();
  std::vector<BoostedModel> models(static_cast<std::size_t>(scheme.replicates));
  pool.parallel_for(static_cast<std::size_t>(scheme.replicates), [&](std::size_t b) {
    try {
      Rng rng(derive_seed(seed, 1, static_cast<std::uint64_t>(b)));
      const PlayDataset draw = resample(data, scheme, rng);
      models[b] = fit(draw, config, derive_seed(seed, 2, static_cast<std::uint64_t>(b)));
    } catch (const std::exception& e) {
      throw std::runtime_error("bootstrap replicate " + std::to_string(b) +
                               " failed: " + e.what());
    }
  });
  return models;
}

void IntervalSet::add(const GameState& state, Interval interval) {
  index_[key(state)] = states_.size();
  states_.push_back(state);
  intervals_.push_back(interval);
}

const Interval& IntervalSet::at(const GameState& state) const {
  const auto it = index_.find(key(state));
  if (it == index_.end())
    throw std::out_of_range("IntervalSet: no interval for state (t=" +
                            std::to_string(state.t) + ", x=" + std::to_string(state.x) +
                            ", s=" + std::to_string(state.s) + ")");
  return intervals_[it->second];
}

Interval quantile_interval(std::vector<double> predictions, double alpha) {
  const auto b = static_cast<int>(predictions.size());
  if (b < 2) throw std::invalid_argument("quantile_interval: need >= 2 predictions");
  std::sort(predictions.begin(), predictions.end());
  const int lo_rank = std::max(
      1, static_cast<int>(std::ceil(alpha / 2.0 * static_cast<double>(b + 1))));
  const int hi_rank = std::min(
      b, static_cast<int>(std::floor((1.0 - alpha / 2.0) * static_cast<double>(b + 1))));
  return Interval{predictions[static_cast<std::size_t>(lo_rank - 1)],
                  predictions[static_cast<std::size_t>(hi_rank - 1)]};
}

IntervalSet build_intervals(const std::vector<BoostedModel>& ensemble,
                            const BoostedModel& point_model,
                            const std::vector<GameState>& states, double alpha) {
  if (ensemble.size() < 2)
    throw std::invalid_argument("build_intervals: need >= 2 ensemble members");
  IntervalSet set;
  std::vector<double> preds(ensemble.size());
  for (const GameState& st : states) {
    for (std::size_t b = 0; b < ensemble.size(); ++b)
      preds[b] = ensemble[b].predict(st);
    Interval iv = quantile_interval(preds, alpha);
    const double point = point_model.predict(st);
    if (point < 0.025) iv.lower = 0.0;
    if (point > 0.975) iv.upper = 1.0;
    set.add(st, iv);
  }
  return set;
}

CoverageResult evaluate_coverage(const IntervalSet& intervals, const PlayDataset& test) {
  if (test.empty()) throw std::invalid_argument("evaluate_coverage: empty test set");
  std::size_t covered = 0;
  double width_sum = 0.0;
  for (const PlayRow& row : test.rows) {
    const Interval& iv = intervals.at(row.state());
    if (row.true_wp >= iv.lower && row.true_wp <= iv.upper) ++covered;
    width_sum += iv.upper - iv.lower;
  }
  const auto n = static_cast<double>(test.size());
  return CoverageResult{static_cast<double>(covered) / n, width_sum / n};
}

std::vector<BinCoverage> binned_coverage(const IntervalSet& intervals,
                                         const PlayDataset& test, int bins) {
  if (bins < 1) throw std::invalid_argument("binned_coverage: bins must be >= 1");
  std::vector<std::size_t> total(static_cast<std::size_t>(bins), 0);
  std::vector<std::size_t> covered(static_cast<std::size_t>(bins), 0);
  for (const PlayRow& row : test.rows) {
    const auto bin = static_cast<std::size_t>(std::min(
        bins - 1, static_cast<int>(row.true_wp * static_cast<double>(bins))));
    const Interval& iv = intervals.at(row.state());
    ++total[bin];
    if (row.true_wp >= iv.lower && row.true_wp <= iv.upper) ++covered[bin];
  }
  std::vector<BinCoverage> out;
  for (int b = 0; b < bins; ++b) {
    const std::size_t n = total[static_cast<std::size_t>(b)];
    if (n == 0) continue;  // reported as absent, not zero
    const double c = static_cast<double>(covered[static_cast<std::size_t>(b)]) /
                     static_cast<double>(n);
    out.push_back(BinCoverage{static_cast<double>(b) / bins,
                              static_cast<double>(b + 1) / bins, n, c,
                              std::sqrt(c * (1.0 - c) / static_cast<double>(n))});
  }
  return out;
}

}  // namespace wpsim

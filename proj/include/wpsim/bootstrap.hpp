#ifndef WPSIM_BOOTSTRAP_HPP
#define WPSIM_BOOTSTRAP_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "wpsim/dataset.hpp"
#include "wpsim/gbt.hpp"
#include "wpsim/thread_pool.hpp"

namespace wpsim {

enum class ResampleKind { standard, cluster, randomized_cluster };

std::string to_string(ResampleKind kind);
ResampleKind resample_kind_from_string(const std::string& name);

// The phi = 1 fractional schemes are the plain bootstraps; the code path is
// shared.
struct BootstrapScheme {
  ResampleKind kind = ResampleKind::randomized_cluster;
  double phi = 1.0;     // fraction of units re-sampled, in (0, 1]
  int replicates = 101; // B

  void validate() const;
};

// standard: round(rows * phi) rows uniformly with replacement.
// cluster: round(G * phi) games uniformly with replacement, each keeping
//   all of its observed rows.
// randomized_cluster: round(G * phi) games uniformly with replacement, then
//   within each chosen game as many rows with replacement as it originally
//   has. Resampled units get fresh sequential game ids so game-level splits
//   downstream stay valid.
PlayDataset resample(const PlayDataset& data, const BootstrapScheme& scheme, Rng& rng);

// B independent resample-and-fit cycles with derived seeds, in replicate
// order regardless of the worker count.
std::vector<BoostedModel> fit_bootstrap_ensemble(const PlayDataset& data,
                                                 const BootstrapScheme& scheme,
                                                 const BoostConfig& config,
                                                 std::uint64_t seed,
                                                 const ThreadPool& pool);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

class IntervalSet {
 public:
  void add(const GameState& state, Interval interval);
  const Interval& at(const GameState& state) const;  // throws if absent
  std::size_t size() const { return intervals_.size(); }
  const std::vector<GameState>& states() const { return states_; }
  const std::vector<Interval>& intervals() const { return intervals_; }

 private:
  static std::int64_t key(const GameState& st) {
    return (static_cast<std::int64_t>(st.t) << 40) ^
           (static_cast<std::int64_t>(st.x) << 20) ^
           (static_cast<std::int64_t>(st.s) + (1 << 19));
  }
  std::vector<GameState> states_;
  std::vector<Interval> intervals_;
  std::unordered_map<std::int64_t, std::size_t> index_;
};

// Order-statistic bounds of B sorted predictions at ranks
// ceil((alpha/2)(B+1)) and floor((1-alpha/2)(B+1)); for B=101, alpha=0.10
// these are exactly the 6th and 96th order statistics.
Interval quantile_interval(std::vector<double> predictions, double alpha);

// Per-state intervals from the ensemble, widened to 0 (resp. 1) where the
// point model predicts below 0.025 (resp. above 0.975).
IntervalSet build_intervals(const std::vector<BoostedModel>& ensemble,
                            const BoostedModel& point_model,
                            const std::vector<GameState>& states,
                            double alpha = 0.10);

struct CoverageResult {
  double coverage = 0.0;    // closed-interval convention
  double mean_width = 0.0;
};

CoverageResult evaluate_coverage(const IntervalSet& intervals, const PlayDataset& test);

struct BinCoverage {
  double lower_edge = 0.0;
  double upper_edge = 0.0;
  std::size_t count = 0;
  double coverage = 0.0;
  double std_error = 0.0;  // binomial SE within the bin
};

// Coverage restricted to rows whose true wp falls in each of `bins`
// equal-width bins over [0, 1]. Empty bins are absent from the result.
std::vector<BinCoverage> binned_coverage(const IntervalSet& intervals,
                                         const PlayDataset& test, int bins = 10);

}  // namespace wpsim

#endif  // WPSIM_BOOTSTRAP_HPP

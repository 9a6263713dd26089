#ifndef WPSIM_GBT_HPP
#define WPSIM_GBT_HPP

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <utility>
#include <vector>

#include "wpsim/dataset.hpp"
#include "wpsim/rng.hpp"

namespace wpsim {

struct BoostConfig {
  int max_depth = 4;
  double learning_rate = 0.1;
  int max_rounds = 1000;
  int early_stopping_rounds = 50;
  double min_child_weight = 1.0;
  double row_subsample = 1.0;
  double feature_subsample = 1.0;
  double l2_penalty = 1.0;

  void validate() const;
  bool operator==(const BoostConfig&) const = default;
};

// Binary regression tree over the integer features (t, x, s). A row goes
// left when its feature value is <= the split threshold.
struct TreeNode {
  int feature = -1;  // 0 = t, 1 = x, 2 = s; -1 marks a leaf
  int threshold = 0;
  int left = -1;
  int right = -1;
  double leaf_value = 0.0;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double value(int t, int x, int s) const {
    int i = 0;
    for (;;) {
      const TreeNode& n = nodes[static_cast<std::size_t>(i)];
      if (n.feature < 0) return n.leaf_value;
      const int v = n.feature == 0 ? t : (n.feature == 1 ? x : s);
      i = v <= n.threshold ? n.left : n.right;
    }
  }
};

// Additive ensemble with a logistic link. Fitting is deterministic given
// (data, config, seed); a fitted model is immutable and shareable.
struct BoostedModel {
  double base_score = 0.0;  // log-odds
  std::vector<Tree> trees;
  BoostConfig config;
  std::uint64_t seed = 0;
  bool degenerate = false;  // single-class training data, no trees
  int rounds_used = 0;
  double best_validation_loss = std::numeric_limits<double>::infinity();
  std::vector<double> validation_curve;  // log-loss after each round
  std::vector<double> training_curve;    // log-loss after each round

  double predict(int t, int x, int s) const;
  double predict(const GameState& st) const { return predict(st.t, st.x, st.s); }
};

// Logistic loss pieces shared by training and by the finite-difference
// checks in the tests.
double logistic(double score);
double logistic_loss(double score, int y);
double logistic_gradient(double score, int y);  // d loss / d score
double logistic_hessian(double score, int y);   // d2 loss / d score2

// Partitions games (never rows) 50/50 uniformly at random; the validation
// side gets round(G/2) games. Rejects single-game datasets.
std::pair<PlayDataset, PlayDataset> split_train_validation(const PlayDataset& data,
                                                           Rng& rng);

// Gradient boosting with logistic loss, exact greedy split search, and
// early stopping on a per-fit game-level validation split. Single-class
// data yields the constant base-rate model with `degenerate` set.
BoostedModel fit(const PlayDataset& data, const BoostConfig& config,
                 std::uint64_t seed);

// Returns the grid entry with the smallest validation log-loss; ties break
// to fewer rounds, then smaller depth, then earlier grid position.
BoostConfig tune(const PlayDataset& data, const std::vector<BoostConfig>& grid,
                 std::uint64_t seed);

// depth {3,4,5} x learning rate {0.05, 0.1}, 1000 rounds, patience 50, L2 1.
std::vector<BoostConfig> default_tuning_grid();

// JSON model files; load reproduces predictions bit-exactly.
void save_model(std::ostream& out, const BoostedModel& model);
BoostedModel load_model(std::istream& in);

}  // namespace wpsim

#endif  // WPSIM_GBT_HPP

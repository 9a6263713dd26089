#include "wpsim/gbt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace wpsim {

namespace {

constexpr double kProbFloor = 1e-6;
constexpr double kLossProbFloor = 1e-15;
constexpr double kMinSplitGain = 1e-12;

double clamp_prob(double p, double floor_) {
  return std::min(1.0 - floor_, std::max(floor_, p));
}

int feature_of(const PlayRow& r, int f) { return f == 0 ? r.t : (f == 1 ? r.x : r.s); }

double mean_loss(const std::vector<double>& scores, const std::vector<PlayRow>& rows) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    sum += logistic_loss(scores[i], rows[i].y);
  return sum / static_cast<double>(rows.size());
}

// Canonical row order; fitting is invariant to the permutation of the
// input rows.
void canonicalize(std::vector<PlayRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const PlayRow& a, const PlayRow& b) {
    if (a.game_id != b.game_id) return a.game_id < b.game_id;
    if (a.t != b.t) return a.t < b.t;
    if (a.x != b.x) return a.x < b.x;
    if (a.s != b.s) return a.s < b.s;
    return a.y < b.y;
  });
}

struct TreeBuilder {
  const std::array<std::vector<int>, 3>& bins;
  const std::array<int, 3>& bin_counts;
  const std::array<int, 3>& feature_min;
  const std::vector<double>& grad;
  const std::vector<double>& hess;
  const BoostConfig& config;

  std::vector<std::size_t> order;  // row indices owned by the tree
  std::array<std::vector<double>, 3> hist_g;
  std::array<std::vector<double>, 3> hist_h;
  std::array<std::vector<int>, 3> hist_n;

  Tree build(const std::vector<int>& features) {
    for (int f = 0; f < 3; ++f) {
      hist_g[f].assign(static_cast<std::size_t>(bin_counts[f]), 0.0);
      hist_h[f].assign(static_cast<std::size_t>(bin_counts[f]), 0.0);
      hist_n[f].assign(static_cast<std::size_t>(bin_counts[f]), 0);
    }
    Tree tree;
    tree.nodes.emplace_back();
    grow(tree, 0, 0, order.size(), 0, features);
    return tree;
  }

  void grow(Tree& tree, int node, std::size_t begin, std::size_t end, int depth,
            const std::vector<int>& features) {
    const double lambda = config.l2_penalty;
    double g_sum = 0.0, h_sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      g_sum += grad[order[i]];
      h_sum += hess[order[i]];
    }
    const std::size_t count = end - begin;

    int best_f = -1, best_bin = -1;
    if (depth < config.max_depth && count >= 2) {
      const double parent = g_sum * g_sum / (h_sum + lambda);
      double best_gain = kMinSplitGain;
      for (int f : features) {
        auto& hg = hist_g[static_cast<std::size_t>(f)];
        auto& hh = hist_h[static_cast<std::size_t>(f)];
        auto& hn = hist_n[static_cast<std::size_t>(f)];
        std::fill(hg.begin(), hg.end(), 0.0);
        std::fill(hh.begin(), hh.end(), 0.0);
        std::fill(hn.begin(), hn.end(), 0);
        for (std::size_t i = begin; i < end; ++i) {
          const std::size_t r = order[i];
          const auto b = static_cast<std::size_t>(bins[static_cast<std::size_t>(f)][r]);
          hg[b] += grad[r];
          hh[b] += hess[r];
          hn[b] += 1;
        }
        double gl = 0.0, hl = 0.0;
        std::size_t nl = 0;
        for (int b = 0; b + 1 < bin_counts[static_cast<std::size_t>(f)]; ++b) {
          gl += hg[static_cast<std::size_t>(b)];
          hl += hh[static_cast<std::size_t>(b)];
          nl += static_cast<std::size_t>(hn[static_cast<std::size_t>(b)]);
          if (nl == 0 || nl == count) continue;
          const double hr = h_sum - hl;
          if (hl < config.min_child_weight || hr < config.min_child_weight) continue;
          const double gr = g_sum - gl;
          const double gain =
              0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent);
          if (gain > best_gain) {  // ties keep the first (feature, threshold)
            best_gain = gain;
            best_f = f;
            best_bin = b;
          }
        }
      }
    }

    if (best_f < 0) {
      tree.nodes[static_cast<std::size_t>(node)].feature = -1;
      tree.nodes[static_cast<std::size_t>(node)].leaf_value =
          -config.learning_rate * g_sum / (h_sum + lambda);
      return;
    }

    const auto& fbins = bins[static_cast<std::size_t>(best_f)];
    const auto mid = std::stable_partition(
        order.begin() + static_cast<std::ptrdiff_t>(begin),
        order.begin() + static_cast<std::ptrdiff_t>(end),
        [&](std::size_t r) { return fbins[r] <= best_bin; });
    const auto split_at = static_cast<std::size_t>(mid - order.begin());

    const int left = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    TreeNode& nd = tree.nodes[static_cast<std::size_t>(node)];
    nd.feature = best_f;
    nd.threshold = feature_min[static_cast<std::size_t>(best_f)] + best_bin;
    nd.left = left;
    nd.right = left + 1;
    grow(tree, left, begin, split_at, depth + 1, features);
    grow(tree, left + 1, split_at, end, depth + 1, features);
  }
};

}  // namespace

void BoostConfig::validate() const {
  if (!(learning_rate > 0.0) || learning_rate > 1.0)
    throw std::invalid_argument("learning_rate must be in (0, 1]");
  if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
  if (early_stopping_rounds < 1)
    throw std::invalid_argument("early_stopping_rounds must be >= 1");
  if (min_child_weight < 0.0)
    throw std::invalid_argument("min_child_weight must be >= 0");
  if (!(row_subsample > 0.0) || row_subsample > 1.0)
    throw std::invalid_argument("row_subsample must be in (0, 1]");
  if (!(feature_subsample > 0.0) || feature_subsample > 1.0)
    throw std::invalid_argument("feature_subsample must be in (0, 1]");
  if (l2_penalty < 0.0) throw std::invalid_argument("l2_penalty must be >= 0");
}

double logistic(double score) { return 1.0 / (1.0 + std::exp(-score)); }

double logistic_loss(double score, int y) {
  const double p = clamp_prob(logistic(score), kLossProbFloor);
  return y ? -std::log(p) : -std::log(1.0 - p);
}

double logistic_gradient(double score, int y) { return logistic(score) - y; }

double logistic_hessian(double score, int y) {
  (void)y;
  const double p = logistic(score);
  return std::max(p * (1.0 - p), 1e-16);
}

double BoostedModel::predict(int t, int x, int s) const {
  double score = base_score;
  for (const Tree& tree : trees) score += tree.value(t, x, s);
  return logistic(score);
}

std::pair<PlayDataset, PlayDataset> split_train_validation(const PlayDataset& data,
                                                           Rng& rng) {
  const auto spans = data.game_spans();
  const std::size_t games = spans.size();
  if (games < 2)
    throw std::invalid_argument("split_train_validation: need >= 2 distinct games");

  std::vector<std::size_t> perm(games);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = 0; i + 1 < games; ++i) {
    const auto j = i + rng.next_below(static_cast<std::uint64_t>(games - i));
    std::swap(perm[i], perm[static_cast<std::size_t>(j)]);
  }
  const auto n_valid = static_cast<std::size_t>(
      std::llround(static_cast<double>(games) / 2.0));
  std::vector<char> in_valid(games, 0);
  for (std::size_t i = 0; i < n_valid; ++i) in_valid[perm[i]] = 1;

  PlayDataset train, valid;
  for (std::size_t g = 0; g < games; ++g) {
    auto& dst = in_valid[g] ? valid : train;
    const auto [first, count] = spans[g];
    dst.rows.insert(dst.rows.end(), data.rows.begin() + static_cast<std::ptrdiff_t>(first),
                    data.rows.begin() + static_cast<std::ptrdiff_t>(first + count));
  }
  return {std::move(train), std::move(valid)};
}

BoostedModel fit(const PlayDataset& data, const BoostConfig& config,
                 std::uint64_t seed) {
  config.validate();
  if (data.empty()) throw std::invalid_argument("fit: empty dataset");

  PlayDataset canon;
  canon.rows = data.rows;
  canonicalize(canon.rows);

  BoostedModel model;
  model.config = config;
  model.seed = seed;

  double y_sum = 0.0;
  for (const PlayRow& r : canon.rows) y_sum += r.y;
  const auto n_all = static_cast<double>(canon.rows.size());
  if (y_sum == 0.0 || y_sum == n_all) {
    // Single-class data: constant base-rate model, no trees.
    const double p = clamp_prob(y_sum / n_all, kProbFloor);
    model.base_score = std::log(p / (1.0 - p));
    model.degenerate = true;
    return model;
  }

  Rng split_rng(derive_seed(seed, 1));
  auto [train, valid] = split_train_validation(canon, split_rng);
  const std::vector<PlayRow>& tr = train.rows;
  const std::vector<PlayRow>& va = valid.rows;
  const std::size_t n = tr.size();

  double y_train = 0.0;
  for (const PlayRow& r : tr) y_train += r.y;
  const double base_rate = clamp_prob(y_train / static_cast<double>(n), kProbFloor);
  model.base_score = std::log(base_rate / (1.0 - base_rate));

  std::array<std::vector<int>, 3> bins;
  std::array<int, 3> feature_min{}, feature_max{};
  for (int f = 0; f < 3; ++f) {
    feature_min[static_cast<std::size_t>(f)] = feature_of(tr[0], f);
    feature_max[static_cast<std::size_t>(f)] = feature_of(tr[0], f);
    for (const PlayRow& r : tr) {
      feature_min[static_cast<std::size_t>(f)] =
          std::min(feature_min[static_cast<std::size_t>(f)], feature_of(r, f));
      feature_max[static_cast<std::size_t>(f)] =
          std::max(feature_max[static_cast<std::size_t>(f)], feature_of(r, f));
    }
    bins[static_cast<std::size_t>(f)].resize(n);
    for (std::size_t i = 0; i < n; ++i)
      bins[static_cast<std::size_t>(f)][i] =
          feature_of(tr[i], f) - feature_min[static_cast<std::size_t>(f)];
  }
  std::array<int, 3> bin_counts{};
  for (int f = 0; f < 3; ++f)
    bin_counts[static_cast<std::size_t>(f)] =
        feature_max[static_cast<std::size_t>(f)] -
        feature_min[static_cast<std::size_t>(f)] + 1;

  std::vector<double> score(n, model.base_score);
  std::vector<double> vscore(va.size(), model.base_score);
  std::vector<double> grad(n), hess(n);

  Rng subsample_rng(derive_seed(seed, 2));
  double best_loss = mean_loss(vscore, va);  // round 0: base score only
  int best_round = 0;
  int rounds_since_best = 0;

  TreeBuilder builder{bins, bin_counts, feature_min, grad, hess, config, {}, {}, {}, {}};

  std::vector<std::size_t> all_rows(n);
  std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});
  std::vector<int> all_features{0, 1, 2};

  for (int round = 1; round <= config.max_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      grad[i] = logistic_gradient(score[i], tr[i].y);
      hess[i] = logistic_hessian(score[i], tr[i].y);
    }

    builder.order = all_rows;
    if (config.row_subsample < 1.0) {
      const auto m = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::floor(
                 static_cast<double>(n) * config.row_subsample)));
      for (std::size_t i = 0; i < m; ++i) {
        const auto j = i + subsample_rng.next_below(static_cast<std::uint64_t>(n - i));
        std::swap(builder.order[i], builder.order[static_cast<std::size_t>(j)]);
      }
      builder.order.resize(m);
      std::sort(builder.order.begin(), builder.order.end());
    }

    std::vector<int> features = all_features;
    if (config.feature_subsample < 1.0) {
      const auto k = std::max<std::size_t>(
          1, static_cast<std::size_t>(
                 std::llround(3.0 * config.feature_subsample)));
      for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + subsample_rng.next_below(static_cast<std::uint64_t>(3 - i));
        std::swap(features[i], features[static_cast<std::size_t>(j)]);
      }
      features.resize(k);
      std::sort(features.begin(), features.end());
    }

    model.trees.push_back(builder.build(features));
    const Tree& tree = model.trees.back();
    for (std::size_t i = 0; i < n; ++i)
      score[i] += tree.value(tr[i].t, tr[i].x, tr[i].s);
    for (std::size_t j = 0; j < va.size(); ++j)
      vscore[j] += tree.value(va[j].t, va[j].x, va[j].s);

    model.training_curve.push_back(mean_loss(score, tr));
    const double vloss = mean_loss(vscore, va);
    model.validation_curve.push_back(vloss);

    if (vloss < best_loss) {
      best_loss = vloss;
      best_round = round;
      rounds_since_best = 0;
    } else if (++rounds_since_best >= config.early_stopping_rounds) {
      break;
    }
  }

  model.trees.resize(static_cast<std::size_t>(best_round));
  model.rounds_used = best_round;
  model.best_validation_loss = best_loss;
  return model;
}

BoostConfig tune(const PlayDataset& data, const std::vector<BoostConfig>& grid,
                 std::uint64_t seed) {
  if (grid.empty()) throw std::invalid_argument("tune: empty grid");
  std::size_t best = 0;
  double best_loss = std::numeric_limits<double>::infinity();
  int best_rounds = 0, best_depth = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const BoostedModel m = fit(data, grid[i], seed);
    const bool better =
        m.best_validation_loss < best_loss ||
        (m.best_validation_loss == best_loss &&
         (m.rounds_used < best_rounds ||
          (m.rounds_used == best_rounds && grid[i].max_depth < best_depth)));
    if (i == 0 || better) {
      best = i;
      best_loss = m.best_validation_loss;
      best_rounds = m.rounds_used;
      best_depth = grid[i].max_depth;
    }
  }
  return grid[best];
}

std::vector<BoostConfig> default_tuning_grid() {
  std::vector<BoostConfig> grid;
  for (int depth : {3, 4, 5})
    for (double lr : {0.05, 0.1}) {
      BoostConfig c;
      c.max_depth = depth;
      c.learning_rate = lr;
      c.max_rounds = 1000;
      c.early_stopping_rounds = 50;
      c.l2_penalty = 1.0;
      grid.push_back(c);
    }
  return grid;
}

namespace {

using nlohmann::json;

json config_to_json(const BoostConfig& c) {
  return json{{"max_depth", c.max_depth},
              {"learning_rate", c.learning_rate},
              {"max_rounds", c.max_rounds},
              {"early_stopping_rounds", c.early_stopping_rounds},
              {"min_child_weight", c.min_child_weight},
              {"row_subsample", c.row_subsample},
              {"feature_subsample", c.feature_subsample},
              {"l2_penalty", c.l2_penalty}};
}

BoostConfig config_from_json(const json& j) {
  BoostConfig c;
  c.max_depth = j.at("max_depth").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.max_rounds = j.at("max_rounds").get<int>();
  c.early_stopping_rounds = j.at("early_stopping_rounds").get<int>();
  c.min_child_weight = j.at("min_child_weight").get<double>();
  c.row_subsample = j.at("row_subsample").get<double>();
  c.feature_subsample = j.at("feature_subsample").get<double>();
  c.l2_penalty = j.at("l2_penalty").get<double>();
  return c;
}

}  // namespace

void save_model(std::ostream& out, const BoostedModel& model) {
  json trees = json::array();
  for (const Tree& t : model.trees) {
    json nodes = json::array();
    for (const TreeNode& n : t.nodes)
      nodes.push_back(json{n.feature, n.threshold, n.left, n.right, n.leaf_value});
    trees.push_back(std::move(nodes));
  }
  json j{{"format_version", 1},
         {"base_score", model.base_score},
         {"seed", model.seed},
         {"degenerate", model.degenerate},
         {"rounds_used", model.rounds_used},
         {"config", config_to_json(model.config)},
         {"trees", std::move(trees)}};
  if (std::isfinite(model.best_validation_loss))
    j["best_validation_loss"] = model.best_validation_loss;
  out << j.dump(2) << '\n';
}

BoostedModel load_model(std::istream& in) {
  json j;
  in >> j;
  if (j.at("format_version").get<int>() != 1)
    throw std::runtime_error("model file: unsupported format version");
  BoostedModel m;
  m.base_score = j.at("base_score").get<double>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.degenerate = j.at("degenerate").get<bool>();
  m.rounds_used = j.at("rounds_used").get<int>();
  m.config = config_from_json(j.at("config"));
  if (j.contains("best_validation_loss"))
    m.best_validation_loss = j.at("best_validation_loss").get<double>();
  for (const json& tj : j.at("trees")) {
    Tree t;
    for (const json& nj : tj) {
      TreeNode n;
      n.feature = nj.at(0).get<int>();
      n.threshold = nj.at(1).get<int>();
      n.left = nj.at(2).get<int>();
      n.right = nj.at(3).get<int>();
      n.leaf_value = nj.at(4).get<double>();
      t.nodes.push_back(n);
    }
    m.trees.push_back(std::move(t));
  }
  return m;
}

}  // namespace wpsim

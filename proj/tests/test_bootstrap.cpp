#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "wpsim/bootstrap.hpp"
#include "wpsim/oracle.hpp"

using namespace wpsim;

namespace {

const WpTable& table56() {
  static const WpTable table(GameConfig{4, 56});
  return table;
}

// rows of one game serialized without its game_id, for set membership
std::string game_key(const PlayDataset& d, std::size_t first, std::size_t count) {
  std::string key;
  for (std::size_t i = 0; i < count; ++i) {
    const PlayRow& r = d.rows[first + i];
    key += std::to_string(r.t) + ',' + std::to_string(r.x) + ',' +
           std::to_string(r.s) + ',' + std::to_string(r.y) + ';';
  }
  return key;
}

}  // namespace

TEST_CASE("scheme names round-trip") {
  for (ResampleKind k : {ResampleKind::standard, ResampleKind::cluster,
                         ResampleKind::randomized_cluster})
    CHECK(resample_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(resample_kind_from_string("jackknife"), std::invalid_argument);
}

TEST_CASE("standard resampling draws round(N*phi) rows") {
  const PlayDataset data = generate_games(10, 1, table56(), 3);
  Rng rng(1);
  const PlayDataset full = resample(data, {ResampleKind::standard, 1.0, 2}, rng);
  CHECK(full.size() == 10);
  CHECK(full.game_ids().size() == 10);  // each row its own unit
  const PlayDataset frac = resample(data, {ResampleKind::standard, 0.35, 2}, rng);
  CHECK(frac.size() == 4);  // round(3.5)
}

TEST_CASE("cluster resampling keeps whole games intact") {
  const PlayDataset data = generate_games(40, 3, table56(), 5);

  std::set<std::string> originals;
  for (const auto& [first, count] : data.game_spans())
    originals.insert(game_key(data, first, count));

  Rng rng(9);
  const PlayDataset out = resample(data, {ResampleKind::cluster, 0.5, 2}, rng);
  const auto spans = out.game_spans();
  CHECK(spans.size() == 20);  // round(40 * 0.5)
  for (const auto& [first, count] : spans)
    CHECK(originals.count(game_key(out, first, count)) == 1);  // clusters never mixed
  // fresh sequential ids
  const auto ids = out.game_ids();
  for (std::size_t i = 0; i < ids.size(); ++i)
    CHECK(ids[i] == static_cast<std::int64_t>(i));
}

TEST_CASE("randomized cluster draws within the chosen game") {
  const PlayDataset data = generate_games(30, 4, table56(), 11);
  Rng rng(2);
  const PlayDataset out = resample(data, {ResampleKind::randomized_cluster, 1.0, 2}, rng);
  CHECK(out.game_ids().size() == 30);
  for (const auto& [first, count] : out.game_spans()) {
    CHECK(count == 4);  // as many draws as the source game's rows
    for (std::size_t i = 0; i < count; ++i)
      CHECK(out.rows[first + i].y == out.rows[first].y);  // same source game
  }
}

TEST_CASE("fractional counts and edge errors") {
  CHECK_THROWS_AS(([&] {
                    const PlayDataset d = generate_games(1, 1, table56(), 1);
                    Rng rng(1);
                    resample(d, {ResampleKind::cluster, 0.1, 2}, rng);
                  })(),
                  std::invalid_argument);
  Rng rng(1);
  PlayDataset empty;
  CHECK_THROWS_AS(resample(empty, {ResampleKind::standard, 1.0, 2}, rng),
                  std::invalid_argument);
  const PlayDataset d = generate_games(5, 1, table56(), 1);
  CHECK_THROWS_AS(resample(d, {ResampleKind::standard, 0.0, 2}, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(resample(d, {ResampleKind::standard, 1.0, 1}, rng),
                  std::invalid_argument);
}

TEST_CASE("quantile interval matches the order-statistic rule") {
  std::vector<double> preds;
  for (int k = 0; k <= 100; ++k) preds.push_back(0.01 * k);
  const Interval iv = quantile_interval(preds, 0.10);
  CHECK(iv.lower == 0.01 * 5);   // 6th order statistic
  CHECK(iv.upper == 0.01 * 95);  // 96th order statistic
  CHECK_THROWS_AS(quantile_interval({0.5}, 0.10), std::invalid_argument);
}

TEST_CASE("interval widening at extreme point estimates") {
  const GameConfig cfg{4, 56};
  std::vector<BoostedModel> low(3), high(3), mid(3);
  for (int i = 0; i < 3; ++i) {
    low[static_cast<std::size_t>(i)].base_score = -5.0 - i;   // predictions near 0
    high[static_cast<std::size_t>(i)].base_score = 5.0 + i;   // predictions near 1
    mid[static_cast<std::size_t>(i)].base_score = 0.1 * i;    // interior
  }
  const std::vector<GameState> states{GameState{1, 2, 0}};

  const IntervalSet a = build_intervals(low, low[0], states);
  CHECK(a.at(states[0]).lower == 0.0);

  const IntervalSet b = build_intervals(high, high[0], states);
  CHECK(b.at(states[0]).upper == 1.0);

  const IntervalSet c = build_intervals(mid, mid[0], states);
  CHECK(c.at(states[0]).lower > 0.0);
  CHECK(c.at(states[0]).upper < 1.0);

  // degenerate ensemble with interior point model keeps [p, p]
  std::vector<BoostedModel> flat(3);
  const IntervalSet d = build_intervals(flat, flat[0], states);
  CHECK(d.at(states[0]).lower == d.at(states[0]).upper);
}

TEST_CASE("coverage hand example") {
  IntervalSet set;
  set.add(GameState{1, 1, 0}, Interval{0.2, 0.4});
  set.add(GameState{2, 1, 0}, Interval{0.6, 0.7});
  set.add(GameState{3, 1, 0}, Interval{0.85, 1.0});
  PlayDataset test;
  test.rows.push_back(PlayRow{0, 1, 1, 0, 1, 0.3});
  test.rows.push_back(PlayRow{1, 2, 1, 0, 1, 0.5});
  test.rows.push_back(PlayRow{2, 3, 1, 0, 1, 0.9});
  const CoverageResult r = evaluate_coverage(set, test);
  CHECK(r.coverage == doctest::Approx(2.0 / 3.0));
  CHECK(r.mean_width == doctest::Approx(0.15));
}

TEST_CASE("coverage closed-interval conventions") {
  IntervalSet everything;
  everything.add(GameState{1, 1, 0}, Interval{0.0, 1.0});
  IntervalSet exact;
  exact.add(GameState{1, 1, 0}, Interval{0.25, 0.25});
  PlayDataset test;
  test.rows.push_back(PlayRow{0, 1, 1, 0, 1, 0.25});
  CHECK(evaluate_coverage(everything, test).coverage == 1.0);
  CHECK(evaluate_coverage(everything, test).mean_width == 1.0);
  CHECK(evaluate_coverage(exact, test).coverage == 1.0);
  CHECK(evaluate_coverage(exact, test).mean_width == 0.0);
  CHECK_THROWS_AS(evaluate_coverage(exact, PlayDataset{}), std::invalid_argument);
  CHECK_THROWS_AS(exact.at(GameState{9, 1, 0}), std::out_of_range);
}

TEST_CASE("binned coverage splits by the true value and skips empty bins") {
  IntervalSet set;
  set.add(GameState{1, 1, 0}, Interval{0.0, 1.0});
  set.add(GameState{2, 1, 0}, Interval{0.9, 0.95});
  PlayDataset test;
  for (int i = 0; i < 4; ++i) test.rows.push_back(PlayRow{i, 1, 1, 0, 1, 0.2});
  for (int i = 0; i < 4; ++i) test.rows.push_back(PlayRow{4 + i, 2, 1, 0, 1, 0.7});
  const auto bins = binned_coverage(set, test, 2);
  REQUIRE(bins.size() == 2);
  CHECK(bins[0].lower_edge == 0.0);
  CHECK(bins[0].count == 4);
  CHECK(bins[0].coverage == 1.0);
  CHECK(bins[1].lower_edge == 0.5);
  CHECK(bins[1].count == 4);
  CHECK(bins[1].coverage == 0.0);

  const auto ten = binned_coverage(set, test, 10);
  REQUIRE(ten.size() == 2);  // eight empty bins absent
  CHECK(ten[0].lower_edge == doctest::Approx(0.2));
  CHECK(ten[1].lower_edge == doctest::Approx(0.7));
}

TEST_CASE("bootstrap ensemble is deterministic and varied") {
  const PlayDataset data = generate_games(60, 2, table56(), 21);
  const BoostConfig cfg;
  const ThreadPool serial(1);
  const ThreadPool wide(4);
  const BootstrapScheme scheme{ResampleKind::randomized_cluster, 1.0, 5};

  const auto a = fit_bootstrap_ensemble(data, scheme, cfg, 31, serial);
  const auto b = fit_bootstrap_ensemble(data, scheme, cfg, 31, wide);
  REQUIRE(a.size() == 5);
  REQUIRE(b.size() == 5);
  bool any_distinct = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (int t = 1; t <= 57; t += 8)
      for (int s = -6; s <= 6; s += 3) {
        CHECK(a[i].predict(t, 2, s) == b[i].predict(t, 2, s));
        if (a[i].predict(t, 2, s) != a[0].predict(t, 2, s)) any_distinct = true;
      }
  }
  CHECK(any_distinct);
}

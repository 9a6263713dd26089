#ifndef WPSIM_DATASET_HPP
#define WPSIM_DATASET_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "wpsim/game.hpp"
#include "wpsim/oracle.hpp"
#include "wpsim/rng.hpp"

namespace wpsim {

// Data-generating recipe: G = round(zeta * T / K) independent games, K
// distinct plays kept per game (half-up rounding; differences are one game).
struct DatasetSpec {
  double zeta = 1.0;       // sample-size parameter, in games-worth of plays
  int plays_per_game = 56; // T
  int plays_kept = 1;      // K, 1 <= K <= T
  int field_length = 4;    // L

  std::int64_t game_count() const;
  GameConfig game_config() const { return GameConfig{field_length, plays_per_game}; }
  void validate() const;
};

struct PlayRow {
  std::int64_t game_id = 0;
  int t = 0;
  int x = 0;
  int s = 0;
  int y = 0;
  double true_wp = 0.0;

  GameState state() const { return GameState{t, x, s}; }
  bool operator==(const PlayRow&) const = default;
};

// Rows are grouped by game_id; within a game they are sorted by t (order
// carries no semantics).
struct PlayDataset {
  std::vector<PlayRow> rows;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }

  // Distinct game_ids in first-appearance order.
  std::vector<std::int64_t> game_ids() const;
  // (first row index, row count) per game, in first-appearance order.
  std::vector<std::pair<std::size_t, std::size_t>> game_spans() const;
};

// Simulates `games` independent games from per-game streams derived from
// (seed, game index) and keeps `plays_kept` distinct plays per game, all
// sharing the game's single win/loss draw. Output is independent of
// scheduling by construction. Game ids are assigned starting at `first_id`.
PlayDataset generate_games(std::int64_t games, int plays_kept, const WpTable& table,
                           std::uint64_t seed, std::int64_t first_id = 0);

PlayDataset generate_dataset(const DatasetSpec& spec, const WpTable& table,
                             std::uint64_t seed);

// M independent out-of-sample test sets, each `games` single-play games
// (K = 1, one independent row per game).
std::vector<PlayDataset> generate_test_sets(int count, std::int64_t games,
                                            const WpTable& table, std::uint64_t seed);

// Header: game_id,t,x,s,y,true_wp. Round-trips bit-exactly.
void write_csv(std::ostream& out, const PlayDataset& data);
PlayDataset read_csv(std::istream& in);

}  // namespace wpsim

#endif  // WPSIM_DATASET_HPP

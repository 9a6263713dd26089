#include "wpsim/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace wpsim {

std::int64_t DatasetSpec::game_count() const {
  return std::llround(zeta * static_cast<double>(plays_per_game) /
                      static_cast<double>(plays_kept));
}

void DatasetSpec::validate() const {
  game_config().validate();
  if (plays_kept < 1 || plays_kept > plays_per_game)
    throw std::invalid_argument("plays_kept must satisfy 1 <= K <= T, got K=" +
                                std::to_string(plays_kept) + " with T=" +
                                std::to_string(plays_per_game));
  if (!(zeta > 0.0) || game_count() < 1)
    throw std::invalid_argument("zeta too small: round(zeta*T/K) must be >= 1");
}

std::vector<std::int64_t> PlayDataset::game_ids() const {
  std::vector<std::int64_t> ids;
  for (const auto& [first, count] : game_spans()) ids.push_back(rows[first].game_id);
  return ids;
}

std::vector<std::pair<std::size_t, std::size_t>> PlayDataset::game_spans() const {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i + 1;
    while (j < rows.size() && rows[j].game_id == rows[i].game_id) ++j;
    spans.emplace_back(i, j - i);
    i = j;
  }
  return spans;
}

PlayDataset generate_games(std::int64_t games, int plays_kept, const WpTable& table,
                           std::uint64_t seed, std::int64_t first_id) {
  const GameConfig cfg = table.config();
  const int T = cfg.plays_per_game;
  if (plays_kept < 1 || plays_kept > T)
    throw std::invalid_argument("generate_games: plays_kept must be in 1..T");
  if (games < 1) throw std::invalid_argument("generate_games: games must be >= 1");

  PlayDataset data;
  data.rows.reserve(static_cast<std::size_t>(games) *
                    static_cast<std::size_t>(plays_kept));
  std::vector<int> picks(static_cast<std::size_t>(T));
  for (std::int64_t g = 0; g < games; ++g) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(g)));
    const GameTrace trace = simulate_game(cfg, rng);
    // K distinct play indices, uniform without replacement (partial
    // Fisher-Yates), then sorted by t for readability.
    for (int t = 0; t < T; ++t) picks[static_cast<std::size_t>(t)] = t;
    for (int k = 0; k < plays_kept; ++k) {
      const auto j = k + static_cast<int>(rng.next_below(
                             static_cast<std::uint64_t>(T - k)));
      std::swap(picks[static_cast<std::size_t>(k)], picks[static_cast<std::size_t>(j)]);
    }
    std::sort(picks.begin(), picks.begin() + plays_kept);
    for (int k = 0; k < plays_kept; ++k) {
      const GameState& st = trace.plays[static_cast<std::size_t>(picks[k])];
      data.rows.push_back(PlayRow{first_id + g, st.t, st.x, st.s, trace.win,
                                  table.at(st)});
    }
  }
  return data;
}

PlayDataset generate_dataset(const DatasetSpec& spec, const WpTable& table,
                             std::uint64_t seed) {
  spec.validate();
  const GameConfig cfg = table.config();
  if (cfg.field_length != spec.field_length ||
      cfg.plays_per_game != spec.plays_per_game)
    throw std::invalid_argument("generate_dataset: table built for different (L, T)");
  return generate_games(spec.game_count(), spec.plays_kept, table, seed);
}

std::vector<PlayDataset> generate_test_sets(int count, std::int64_t games,
                                            const WpTable& table,
                                            std::uint64_t seed) {
  std::vector<PlayDataset> sets;
  sets.reserve(static_cast<std::size_t>(count));
  for (int m = 0; m < count; ++m)
    sets.push_back(
        generate_games(games, 1, table, derive_seed(seed, static_cast<std::uint64_t>(m))));
  return sets;
}

void write_csv(std::ostream& out, const PlayDataset& data) {
  out << "game_id,t,x,s,y,true_wp\n";
  char buf[128];
  for (const PlayRow& r : data.rows) {
    std::snprintf(buf, sizeof buf, "%lld,%d,%d,%d,%d,%.17g\n",
                  static_cast<long long>(r.game_id), r.t, r.x, r.s, r.y, r.true_wp);
    out << buf;
  }
}

PlayDataset read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "game_id,t,x,s,y,true_wp")
    throw std::runtime_error("dataset CSV: missing or unexpected header");
  PlayDataset data;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    PlayRow r;
    long long gid = 0;
    if (std::sscanf(line.c_str(), "%lld,%d,%d,%d,%d,%lf", &gid, &r.t, &r.x, &r.s,
                    &r.y, &r.true_wp) != 6)
      throw std::runtime_error("dataset CSV: malformed row at line " +
                               std::to_string(line_no));
    r.game_id = gid;
    data.rows.push_back(r);
  }
  return data;
}

}  // namespace wpsim

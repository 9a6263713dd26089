#ifndef WPSIM_ORACLE_HPP
#define WPSIM_ORACLE_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "wpsim/game.hpp"
#include "wpsim/rng.hpp"

namespace wpsim {

// Exact win probability wp(t, x, s) for every t in 1..T+1, x in 1..L-1,
// s in -T..T, filled by backward dynamic programming from the terminal
// layer. Immutable once built; safe to share across threads.
//
// Anti-symmetry wp(t,x,s) + wp(t,L-x,-s) = 1 holds exactly: only the
// canonical half of each layer is computed, the other half is stored as the
// complement.
class WpTable {
 public:
  explicit WpTable(const GameConfig& cfg);

  const GameConfig& config() const { return cfg_; }

  bool contains(int t, int x, int s) const {
    return t >= 1 && t <= cfg_.plays_per_game + 1 && x >= 1 &&
           x <= cfg_.field_length - 1 && s >= -cfg_.plays_per_game &&
           s <= cfg_.plays_per_game;
  }

  // Exact stored value; out-of-domain queries are a hard error.
  double at(int t, int x, int s) const;

  double at(const GameState& state) const { return at(state.t, state.x, state.s); }

  std::size_t size() const { return values_.size(); }

  // Columns t,x,s,wp over the full domain.
  void write_csv(std::ostream& out) const;

 private:
  std::size_t index(int t, int x, int s) const {
    const std::size_t xs = static_cast<std::size_t>(cfg_.field_length - 1);
    const std::size_t ss = static_cast<std::size_t>(2 * cfg_.plays_per_game + 1);
    return (static_cast<std::size_t>(t - 1) * xs + static_cast<std::size_t>(x - 1)) * ss +
           static_cast<std::size_t>(s + cfg_.plays_per_game);
  }

  GameConfig cfg_;
  std::vector<double> values_;
};

inline WpTable build_wp_table(const GameConfig& cfg) { return WpTable(cfg); }

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Independent Monte-Carlo cross-check of the table: mean win indicator over
// n simulated completions from `state`, with binomial standard error.
McEstimate mc_estimate_wp(const GameConfig& cfg, const GameState& state,
                          std::int64_t n, Rng& rng);

}  // namespace wpsim

#endif  // WPSIM_ORACLE_HPP

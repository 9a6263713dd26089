#include "wpsim/oracle.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace wpsim {

namespace {

// Layer lookup with the score clamped outside the stored band. A score of
// T+1 (resp. -(T-1)) can only be requested while filling layer t-1 for
// s = +-T; from any play index t >= 1 such a lead can no longer be lost
// within the remaining T+1-t plays, so the value is exactly 1 (resp. 0).
inline double layer_get(const std::vector<double>& layer, int x, int s, int T) {
  if (s > T) return 1.0;
  if (s < -T) return 0.0;
  return layer[static_cast<std::size_t>(x - 1) * static_cast<std::size_t>(2 * T + 1) +
               static_cast<std::size_t>(s + T)];
}

}  // namespace

WpTable::WpTable(const GameConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const int L = cfg_.field_length;
  const int T = cfg_.plays_per_game;
  const std::size_t layers = static_cast<std::size_t>(T) + 1;
  const std::size_t xs = static_cast<std::size_t>(L - 1);
  const std::size_t ss = static_cast<std::size_t>(2 * T + 1);
  const std::size_t total = layers * xs * ss;
  if (total > (std::size_t{1} << 31))
    throw std::invalid_argument("WpTable: domain of " + std::to_string(total) +
                                " states exceeds the dense-storage budget");
  values_.assign(total, 0.0);

  // Terminal layer T+1: win/tie/loss by sign of s.
  for (int x = 1; x <= L - 1; ++x)
    for (int s = -T; s <= T; ++s)
      values_[index(T + 1, x, s)] = s > 0 ? 1.0 : (s == 0 ? 0.5 : 0.0);

  std::vector<double> next(xs * ss);
  for (int t = T; t >= 1; --t) {
    for (int x = 1; x <= L - 1; ++x)
      for (int s = -T; s <= T; ++s)
        next[static_cast<std::size_t>(x - 1) * ss + static_cast<std::size_t>(s + T)] =
            values_[index(t + 1, x, s)];
    // Canonical half first (s > 0, or s = 0 on team one's side of midfield),
    // then the mirrors as exact complements, which makes the anti-symmetry
    // invariant exact instead of accurate to rounding.
    for (int x = 1; x <= L - 1; ++x) {
      for (int s = 0; s <= T; ++s) {
        if (s == 0 && 2 * x > L) continue;
        if (s == 0 && 2 * x == L) {
          values_[index(t, x, s)] = 0.5;
          continue;
        }
        double left, right;
        if (L == 2) {
          // Single interior yardline: both moves are touchdowns.
          left = layer_get(next, L / 2, s + 1, T);
          right = layer_get(next, L / 2, s - 1, T);
        } else if (x == 1) {
          left = layer_get(next, L / 2, s + 1, T);
          right = layer_get(next, x + 1, s, T);
        } else if (x == L - 1) {
          left = layer_get(next, x - 1, s, T);
          right = layer_get(next, L / 2, s - 1, T);
        } else {
          left = layer_get(next, x - 1, s, T);
          right = layer_get(next, x + 1, s, T);
        }
        values_[index(t, x, s)] = 0.5 * (left + right);
      }
    }
    for (int x = 1; x <= L - 1; ++x)
      for (int s = -T; s <= 0; ++s) {
        if (s == 0 && 2 * x <= L) continue;
        values_[index(t, x, s)] = 1.0 - values_[index(t, L - x, -s)];
      }
  }
}

double WpTable::at(int t, int x, int s) const {
  if (!contains(t, x, s))
    throw std::out_of_range("WpTable: state (t=" + std::to_string(t) + ", x=" +
                            std::to_string(x) + ", s=" + std::to_string(s) +
                            ") outside the table domain");
  return values_[index(t, x, s)];
}

void WpTable::write_csv(std::ostream& out) const {
  out << "t,x,s,wp\n";
  char buf[64];
  const int L = cfg_.field_length;
  const int T = cfg_.plays_per_game;
  for (int t = 1; t <= T + 1; ++t)
    for (int x = 1; x <= L - 1; ++x)
      for (int s = -T; s <= T; ++s) {
        std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g\n", t, x, s,
                      values_[index(t, x, s)]);
        out << buf;
      }
}

McEstimate mc_estimate_wp(const GameConfig& cfg, const GameState& state,
                          std::int64_t n, Rng& rng) {
  cfg.validate();
  if (n < 1) throw std::invalid_argument("mc_estimate_wp: n must be >= 1");
  if (state.x < 1 || state.x > cfg.field_length - 1 || state.t < 1 ||
      state.t > cfg.plays_per_game + 1)
    throw std::invalid_argument("mc_estimate_wp: state outside the game domain");
  std::int64_t wins = 0;
  for (std::int64_t i = 0; i < n; ++i) wins += simulate_win_from(cfg, state, rng);
  const double p = static_cast<double>(wins) / static_cast<double>(n);
  return McEstimate{p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

}  // namespace wpsim

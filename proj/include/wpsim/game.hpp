#ifndef WPSIM_GAME_HPP
#define WPSIM_GAME_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "wpsim/rng.hpp"

namespace wpsim {

// One random-walk-football universe: a field of `field_length` yardlines
// (touchdown boundaries at 0 and field_length) and `plays_per_game` plays.
struct GameConfig {
  int field_length = 4;    // even, >= 2
  int plays_per_game = 56; // >= 1

  int midfield() const { return field_length / 2; }

  void validate() const {
    if (field_length < 2 || field_length % 2 != 0)
      throw std::invalid_argument("field_length must be an even integer >= 2, got " +
                                  std::to_string(field_length));
    if (plays_per_game < 1)
      throw std::invalid_argument("plays_per_game must be >= 1, got " +
                                  std::to_string(plays_per_game));
  }
};

// State at the start of a play: play index t (1..T+1), field position x
// (1..L-1), score differential s for team one.
struct GameState {
  int t = 1;
  int x = 0;
  int s = 0;

  bool operator==(const GameState&) const = default;
};

inline GameState initial_state(const GameConfig& cfg) {
  return GameState{1, cfg.midfield(), 0};
}

// One play. The scoring move is the play itself; the next play starts at
// midfield after a touchdown.
inline GameState step(const GameState& state, int xi, const GameConfig& cfg) {
  if (xi != 1 && xi != -1)
    throw std::invalid_argument("step: xi must be +1 or -1");
  if (state.x < 1 || state.x > cfg.field_length - 1)
    throw std::invalid_argument("step: field position " + std::to_string(state.x) +
                                " outside 1.." + std::to_string(cfg.field_length - 1));
  const int moved = state.x + xi;
  if (moved == 0) return GameState{state.t + 1, cfg.midfield(), state.s + 1};
  if (moved == cfg.field_length)
    return GameState{state.t + 1, cfg.midfield(), state.s - 1};
  return GameState{state.t + 1, moved, state.s};
}

// Win indicator for team one; ties go to a fair coin supplied by the caller.
inline int outcome(int final_score, int coin) {
  if (final_score > 0) return 1;
  if (final_score < 0) return 0;
  return coin;
}

struct GameTrace {
  GameConfig config;
  std::vector<GameState> plays;  // states at the start of plays t = 1..T
  int final_score = 0;           // score differential after play T
  int win = 0;                   // y for team one
};

// Generic driver so tests can script the xi stream and the overtime coin.
// `xi_fn()` must yield +1/-1; `coin_fn()` yields {0,1} and is only called on
// a tie.
template <class XiFn, class CoinFn>
GameTrace play_game(const GameConfig& cfg, XiFn&& xi_fn, CoinFn&& coin_fn) {
  cfg.validate();
  GameTrace trace;
  trace.config = cfg;
  trace.plays.reserve(static_cast<std::size_t>(cfg.plays_per_game));
  GameState state = initial_state(cfg);
  for (int t = 1; t <= cfg.plays_per_game; ++t) {
    trace.plays.push_back(state);
    state = step(state, xi_fn(), cfg);
  }
  trace.final_score = state.s;
  trace.win = outcome(trace.final_score, trace.final_score == 0 ? coin_fn() : 0);
  return trace;
}

// One game = one RNG stream: T sign draws, then the overtime coin if needed.
inline GameTrace simulate_game(const GameConfig& cfg, Rng& rng) {
  return play_game(
      cfg, [&rng] { return rng.next_sign(); }, [&rng] { return rng.next_coin(); });
}

// Plays out the remainder of a game from `state` and returns the win
// indicator only. Hot path of the Monte-Carlo oracle cross-check.
inline int simulate_win_from(const GameConfig& cfg, GameState state, Rng& rng) {
  while (state.t <= cfg.plays_per_game) state = step(state, rng.next_sign(), cfg);
  return outcome(state.s, state.s == 0 ? rng.next_coin() : 0);
}

}  // namespace wpsim

#endif  // WPSIM_GAME_HPP

#ifndef WPSIM_CAMPAIGN_HPP
#define WPSIM_CAMPAIGN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "wpsim/gbt.hpp"

namespace wpsim {

// A declarative experiment campaign. Field defaults mirror the common
// setup: L=4, T=56, M replicates against shared (G=10,000, K=1) test sets.
struct CampaignConfig {
  std::string kind;  // oracle-export | bias-variance-vs-K | bias-variance-vs-zeta |
                     // bias-by-state | ess | bootstrap-coverage | binned-coverage
  int field_length = 4;
  int plays_per_game = 56;
  std::vector<double> zetas = {4101.0};
  std::vector<int> k_values = {1, 2, 4, 7, 8, 14, 28, 56};
  std::vector<double> phis = {1.0};
  std::vector<std::string> schemes = {"standard", "cluster", "randomized_cluster"};
  int replicates = 20;             // M
  int bootstrap_replicates = 51;   // B
  std::int64_t test_games = 10000; // games per shared test set (K = 1)
  int bins = 10;
  int x_fixed = 2;                 // field position for bias-by-state
  BoostConfig estimator;
  std::uint64_t seed = 0;
  bool seed_set = false;           // master seed is mandatory, no wall-clock default
  std::string out_dir = "out";
  std::string cache_dir;           // defaults to <out_dir>/cache
  unsigned workers = 1;
  bool full_scale = false;         // gate for paper-scale cost
  std::string curves_csv;          // ess input; defaults to <out_dir>/bias_var_vs_zeta.csv
};

// Static checks only; never runs anything. Returns one message per problem,
// empty when the config is runnable.
std::vector<std::string> validate(const CampaignConfig& config);

// Executes the campaign and writes its CSV artifacts plus manifest.json.
// Reruns with the same config and seed are byte-identical regardless of the
// worker count. Throws on invalid config or mid-run failure.
void run(const CampaignConfig& config);

// JSON round-trip used for --config files and the manifest. Unknown keys
// are an error naming the key.
CampaignConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const CampaignConfig& config);

// FNV-1a 64-bit, used for output checksums and cache keys.
std::uint64_t fnv1a64(const void* data, std::size_t size);

}  // namespace wpsim

#endif  // WPSIM_CAMPAIGN_HPP

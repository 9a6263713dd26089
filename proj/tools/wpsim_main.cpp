#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "wpsim/campaign.hpp"

namespace {

struct CliState {
  std::string config_path;
  wpsim::CampaignConfig config;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Flags beat the config file, which beats defaults. The config file is read
// first so later CLI11 callbacks overwrite its values.
void add_common_options(CLI::App* app, CliState& st) {
  app->add_option("--config", st.config_path, "JSON config file")
      ->check(CLI::ExistingFile)
      ->each([&st](const std::string& path) {
        const std::string kind = st.config.kind;
        st.config = wpsim::config_from_json_text(slurp(path));
        if (st.config.kind.empty()) st.config.kind = kind;
      });

  app->add_option_function<std::uint64_t>(
         "--seed",
         [&st](const std::uint64_t& v) {
           st.config.seed = v;
           st.config.seed_set = true;
         },
         "master seed (required; no wall-clock default)");
  app->add_option("--field-length", st.config.field_length, "field length L");
  app->add_option("--plays-per-game", st.config.plays_per_game, "plays per game T");
  app->add_option("--zeta", st.config.zetas, "zeta grid")->delimiter(',');
  app->add_option("--k", st.config.k_values, "K grid")->delimiter(',');
  app->add_option("--phi", st.config.phis, "resample fraction grid")->delimiter(',');
  app->add_option("--scheme", st.config.schemes, "bootstrap scheme grid")
      ->delimiter(',');
  app->add_option("--replicates", st.config.replicates, "replicates M");
  app->add_option("--bootstrap-replicates", st.config.bootstrap_replicates,
                  "bootstrap replicates B");
  app->add_option("--test-games", st.config.test_games, "games per test set");
  app->add_option("--bins", st.config.bins, "coverage bins");
  app->add_option("--x-fixed", st.config.x_fixed, "field position for bias-by-state");
  app->add_option("--out-dir", st.config.out_dir, "output directory");
  app->add_option("--cache-dir", st.config.cache_dir, "model cache directory");
  app->add_option("--workers", st.config.workers, "worker thread count");
  app->add_flag("--full-scale", st.config.full_scale,
                "confirm a paper-scale (hours-long) run");
  app->add_option("--curves-csv", st.config.curves_csv,
                  "accuracy curves input for the ess kind");

  app->add_option("--max-depth", st.config.estimator.max_depth, "tree depth");
  app->add_option("--learning-rate", st.config.estimator.learning_rate,
                  "boosting learning rate");
  app->add_option("--max-rounds", st.config.estimator.max_rounds, "boosting rounds");
  app->add_option("--early-stopping-rounds", st.config.estimator.early_stopping_rounds,
                  "early stopping patience");
  app->add_option("--l2-penalty", st.config.estimator.l2_penalty, "leaf L2 penalty");
}

int check(const CliState& st, bool quiet_on_success) {
  const auto problems = wpsim::validate(st.config);
  if (problems.empty()) {
    if (!quiet_on_success) std::cout << "config ok\n";
    return 0;
  }
  std::cerr << "invalid campaign config:\n";
  for (const auto& p : problems) std::cerr << "  " << p << '\n';
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Win-probability estimation laboratory for clustered play-by-play data"};
  app.require_subcommand(1);

  CliState st;
  bool run_after_parse = false;

  const struct {
    const char* name;
    const char* help;
  } kinds[] = {
      {"oracle-export", "write the exact win-probability table as CSV"},
      {"bias-variance-vs-K", "bias/variance/RMSE across the K grid at fixed zeta"},
      {"bias-variance-vs-zeta", "accuracy of the three dataset families across zeta"},
      {"bias-by-state", "signed bias on a (t, s) grid at fixed field position"},
      {"ess", "effective sample size from fitted accuracy curves"},
      {"bootstrap-coverage", "interval coverage and width per scheme and phi"},
      {"binned-coverage", "coverage split by true win-probability bins"},
  };
  for (const auto& k : kinds) {
    CLI::App* sub = app.add_subcommand(k.name, k.help);
    add_common_options(sub, st);
    sub->callback([&st, &run_after_parse, name = std::string(k.name)] {
      st.config.kind = name;
      run_after_parse = true;
    });
  }
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "check a config without running anything");
  std::string validate_kind;
  validate_cmd->add_option("--kind", validate_kind, "experiment kind to validate");
  add_common_options(validate_cmd, st);
  validate_cmd->callback([&st, &validate_kind] {
    if (!validate_kind.empty()) st.config.kind = validate_kind;
  });

  CLI11_PARSE(app, argc, argv);

  try {
    if (!run_after_parse) return check(st, false);
    if (int rc = check(st, true); rc != 0) return rc;
    wpsim::run(st.config);
    std::cout << "wrote " << st.config.out_dir << "/manifest.json\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

#include "wpsim/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "wpsim/bootstrap.hpp"
#include "wpsim/dataset.hpp"
#include "wpsim/ess.hpp"
#include "wpsim/experiments.hpp"
#include "wpsim/oracle.hpp"
#include "wpsim/thread_pool.hpp"

namespace wpsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "wpsim 0.1.0";
constexpr int kManifestSchemaVersion = 1;

// Campaigns costing more than this many row-fits (model fits weighted by
// training rows) must be launched with full_scale set.
constexpr double kFullScaleThreshold = 1e11;

// Seed branches; every stream in a campaign descends from
// (master seed, branch, indices...).
enum SeedBranch : std::uint64_t {
  kTestBranch = 1,
  kCellBranch = 2,
  kBootTrainBranch = 3,
  kBootPointBranch = 4,
  kBootEnsembleBranch = 5,
};

const std::set<std::string>& known_kinds() {
  static const std::set<std::string> kinds{
      "oracle-export",        "bias-variance-vs-K", "bias-variance-vs-zeta",
      "bias-by-state",        "ess",                "bootstrap-coverage",
      "binned-coverage"};
  return kinds;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t checksum_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read back " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  return fnv1a64(bytes.data(), bytes.size());
}

// ---- prediction-grid cache -------------------------------------------------

std::string grid_cache_key(const GameConfig& cfg, std::int64_t games, int k,
                           int replicates, const BoostConfig& est,
                           std::uint64_t cell_seed) {
  std::ostringstream ss;
  ss << "grids|v1|" << cfg.field_length << '|' << cfg.plays_per_game << '|' << games
     << '|' << k << '|' << replicates << '|' << cell_seed << '|' << est.max_depth
     << '|' << fmt(est.learning_rate) << '|' << est.max_rounds << '|'
     << est.early_stopping_rounds << '|' << fmt(est.min_child_weight) << '|'
     << fmt(est.row_subsample) << '|' << fmt(est.feature_subsample) << '|'
     << fmt(est.l2_penalty);
  return ss.str();
}

bool load_grids(const fs::path& path, const GameConfig& cfg, int replicates,
                std::vector<PredictionGrid>& grids) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  char magic[4];
  std::int64_t m = 0, size = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&m), sizeof m);
  in.read(reinterpret_cast<char*>(&size), sizeof size);
  if (!in || std::string(magic, 4) != "WPGR" || m != replicates) return false;
  grids.assign(static_cast<std::size_t>(m), PredictionGrid{});
  for (auto& g : grids) {
    g.cfg = cfg;
    g.values.resize(static_cast<std::size_t>(size));
    in.read(reinterpret_cast<char*>(g.values.data()),
            static_cast<std::streamsize>(sizeof(double) * g.values.size()));
  }
  return static_cast<bool>(in);
}

void save_grids(const fs::path& path, const std::vector<PredictionGrid>& grids) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  const std::int64_t m = static_cast<std::int64_t>(grids.size());
  const std::int64_t size = static_cast<std::int64_t>(grids[0].values.size());
  out.write("WPGR", 4);
  out.write(reinterpret_cast<const char*>(&m), sizeof m);
  out.write(reinterpret_cast<const char*>(&size), sizeof size);
  for (const auto& g : grids)
    out.write(reinterpret_cast<const char*>(g.values.data()),
              static_cast<std::streamsize>(sizeof(double) * g.values.size()));
  if (!out) throw std::runtime_error("cannot write cache file " + path.string());
}

std::vector<PredictionGrid> cached_replicate_grids(
    const WpTable& table, std::int64_t games, int k, int replicates,
    const BoostConfig& est, std::uint64_t cell_seed, const ThreadPool& pool,
    const std::string& cache_dir) {
  const std::string key =
      grid_cache_key(table.config(), games, k, replicates, est, cell_seed);
  const fs::path path =
      fs::path(cache_dir) / (hex64(fnv1a64(key.data(), key.size())) + ".grids");
  std::vector<PredictionGrid> grids;
  if (load_grids(path, table.config(), replicates, grids)) return grids;
  grids = fit_replicate_grids(table, games, k, replicates, est, cell_seed, pool);
  save_grids(path, grids);
  return grids;
}

// ---- config <-> json -------------------------------------------------------

json estimator_to_json(const BoostConfig& c) {
  return json{{"max_depth", c.max_depth},
              {"learning_rate", c.learning_rate},
              {"max_rounds", c.max_rounds},
              {"early_stopping_rounds", c.early_stopping_rounds},
              {"min_child_weight", c.min_child_weight},
              {"row_subsample", c.row_subsample},
              {"feature_subsample", c.feature_subsample},
              {"l2_penalty", c.l2_penalty}};
}

json config_to_json(const CampaignConfig& c) {
  return json{{"kind", c.kind},
              {"field_length", c.field_length},
              {"plays_per_game", c.plays_per_game},
              {"zetas", c.zetas},
              {"k_values", c.k_values},
              {"phis", c.phis},
              {"schemes", c.schemes},
              {"replicates", c.replicates},
              {"bootstrap_replicates", c.bootstrap_replicates},
              {"test_games", c.test_games},
              {"bins", c.bins},
              {"x_fixed", c.x_fixed},
              {"estimator", estimator_to_json(c.estimator)},
              {"seed", c.seed},
              {"out_dir", c.out_dir},
              {"cache_dir", c.cache_dir},
              {"workers", c.workers},
              {"full_scale", c.full_scale},
              {"curves_csv", c.curves_csv}};
}

template <class T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

CampaignConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  static const std::set<std::string> known{
      "kind",        "field_length", "plays_per_game", "zetas",
      "k_values",    "phis",         "schemes",        "replicates",
      "bootstrap_replicates", "test_games", "bins",    "x_fixed",
      "estimator",   "seed",         "out_dir",        "cache_dir",
      "workers",     "full_scale",   "curves_csv"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key))
      throw std::invalid_argument("config: unknown field '" + key + "'");
  if (j.contains("estimator")) {
    static const std::set<std::string> est_known{
        "max_depth",     "learning_rate",     "max_rounds",
        "early_stopping_rounds", "min_child_weight", "row_subsample",
        "feature_subsample",     "l2_penalty"};
    for (const auto& [key, value] : j.at("estimator").items())
      if (!est_known.count(key))
        throw std::invalid_argument("config: unknown field 'estimator." + key + "'");
  }

  CampaignConfig c;
  take(j, "kind", c.kind);
  take(j, "field_length", c.field_length);
  take(j, "plays_per_game", c.plays_per_game);
  take(j, "zetas", c.zetas);
  take(j, "k_values", c.k_values);
  take(j, "phis", c.phis);
  take(j, "schemes", c.schemes);
  take(j, "replicates", c.replicates);
  take(j, "bootstrap_replicates", c.bootstrap_replicates);
  take(j, "test_games", c.test_games);
  take(j, "bins", c.bins);
  take(j, "x_fixed", c.x_fixed);
  if (j.contains("seed")) {
    c.seed = j.at("seed").get<std::uint64_t>();
    c.seed_set = true;
  }
  take(j, "out_dir", c.out_dir);
  take(j, "cache_dir", c.cache_dir);
  take(j, "workers", c.workers);
  take(j, "full_scale", c.full_scale);
  take(j, "curves_csv", c.curves_csv);
  if (j.contains("estimator")) {
    const json& e = j.at("estimator");
    take(e, "max_depth", c.estimator.max_depth);
    take(e, "learning_rate", c.estimator.learning_rate);
    take(e, "max_rounds", c.estimator.max_rounds);
    take(e, "early_stopping_rounds", c.estimator.early_stopping_rounds);
    take(e, "min_child_weight", c.estimator.min_child_weight);
    take(e, "row_subsample", c.estimator.row_subsample);
    take(e, "feature_subsample", c.estimator.feature_subsample);
    take(e, "l2_penalty", c.estimator.l2_penalty);
  }
  return c;
}

std::string config_to_json_text(const CampaignConfig& config) {
  return config_to_json(config).dump(2);
}

std::vector<std::string> validate(const CampaignConfig& c) {
  std::vector<std::string> problems;
  if (!known_kinds().count(c.kind))
    problems.push_back("kind: unknown experiment kind '" + c.kind + "'");
  if (!c.seed_set) problems.push_back("seed: master seed is mandatory");
  if (c.field_length < 2 || c.field_length % 2 != 0)
    problems.push_back("field_length: must be an even integer >= 2");
  if (c.plays_per_game < 1) problems.push_back("plays_per_game: must be >= 1");
  const bool uses_zeta = c.kind != "oracle-export";
  const bool uses_k = c.kind == "bias-variance-vs-K";
  const bool uses_bootstrap =
      c.kind == "bootstrap-coverage" || c.kind == "binned-coverage";
  if (uses_zeta) {
    if (c.zetas.empty()) problems.push_back("zetas: grid must be non-empty");
    for (double z : c.zetas)
      if (!(z > 0.0)) {
        problems.push_back("zetas: values must be positive");
        break;
      }
  }
  if (uses_k) {
    if (c.k_values.empty()) problems.push_back("k_values: grid must be non-empty");
    for (int k : c.k_values)
      if (k < 1 || k > c.plays_per_game) {
        problems.push_back("k_values: K=" + std::to_string(k) +
                           " violates 1 <= K <= T=" + std::to_string(c.plays_per_game));
        break;
      }
  }
  if (uses_bootstrap) {
    if (c.phis.empty()) problems.push_back("phis: grid must be non-empty");
    for (double phi : c.phis)
      if (!(phi > 0.0) || phi > 1.0) {
        problems.push_back("phis: fraction must be in (0,1]");
        break;
      }
    if (c.schemes.empty()) problems.push_back("schemes: grid must be non-empty");
    for (const std::string& s : c.schemes) {
      try {
        resample_kind_from_string(s);
      } catch (const std::exception& e) {
        problems.push_back(std::string("schemes: ") + e.what());
        break;
      }
    }
  }
  if (c.replicates < 2) problems.push_back("replicates: M must be >= 2");
  if (c.bootstrap_replicates < 2)
    problems.push_back("bootstrap_replicates: B must be >= 2");
  if (c.test_games < 1) problems.push_back("test_games: must be >= 1");
  if (c.bins < 1) problems.push_back("bins: must be >= 1");
  if (c.x_fixed < 1 || c.x_fixed > c.field_length - 1)
    problems.push_back("x_fixed: must be in 1..L-1");
  if (c.workers < 1) problems.push_back("workers: must be >= 1");
  try {
    c.estimator.validate();
  } catch (const std::exception& e) {
    problems.push_back(std::string("estimator: ") + e.what());
  }
  return problems;
}

namespace {

double estimated_row_fits(const CampaignConfig& c) {
  const double T = c.plays_per_game;
  const double M = c.replicates;
  const double B = c.bootstrap_replicates;
  double cost = 0.0;
  if (c.kind == "bias-variance-vs-K") {
    for (int k : c.k_values) {
      (void)k;
      cost += M * c.zetas.front() * T;
    }
  } else if (c.kind == "bias-variance-vs-zeta") {
    for (double z : c.zetas) cost += M * (z + z * T + z * T);
  } else if (c.kind == "bias-by-state") {
    cost = M * c.zetas.front() * T;
  } else if (c.kind == "bootstrap-coverage") {
    cost = static_cast<double>(c.schemes.size()) * static_cast<double>(c.phis.size()) *
           M * (B + 1) * c.zetas.front() * T;
  } else if (c.kind == "binned-coverage") {
    cost = M * (B + 1) * c.zetas.front() * T;
  }
  return cost;
}

struct OutputWriter {
  fs::path dir;
  std::map<std::string, std::uint64_t> checksums;

  void write(const std::string& name, const std::string& contents) {
    fs::create_directories(dir);
    const fs::path path = dir / name;
    {
      std::ofstream out(path, std::ios::binary);
      out << contents;
      if (!out) throw std::runtime_error("cannot write " + path.string());
    }
    checksums[name] = checksum_file(path);
  }

  void write_manifest(const CampaignConfig& config) {
    const std::string config_text = config_to_json_text(config);
    json files = json::object();
    for (const auto& [name, sum] : checksums) files[name] = hex64(sum);
    json manifest{{"schema_version", kManifestSchemaVersion},
                  {"tool_version", kToolVersion},
                  {"kind", config.kind},
                  {"seed", config.seed},
                  {"config", config_to_json(config)},
                  {"config_hash",
                   hex64(fnv1a64(config_text.data(), config_text.size()))},
                  {"files", std::move(files)}};
    const fs::path path = dir / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    out << manifest.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + path.string());
  }
};

std::vector<GameState> unique_states(const PlayDataset& data) {
  std::vector<GameState> states;
  std::set<std::tuple<int, int, int>> seen;
  for (const PlayRow& r : data.rows)
    if (seen.insert({r.t, r.x, r.s}).second) states.push_back(r.state());
  return states;
}

std::string cell_csv_fields(const CellReport& r) {
  std::ostringstream ss;
  ss << fmt(r.bias_sq.mean) << ',' << fmt(r.bias_sq.std_error) << ','
     << fmt(r.variance.mean) << ',' << fmt(r.variance.std_error) << ','
     << fmt(r.rmse.mean) << ',' << fmt(r.rmse.std_error);
  return ss.str();
}

void run_oracle_export(const CampaignConfig&, const WpTable& table,
                       OutputWriter& out) {
  std::ostringstream ss;
  table.write_csv(ss);
  out.write("wp_table.csv", ss.str());
}

void run_bias_variance_vs_k(const CampaignConfig& c, const WpTable& table,
                            const std::vector<PlayDataset>& tests,
                            const ThreadPool& pool, OutputWriter& out) {
  const double zeta = c.zetas.front();
  const double T = c.plays_per_game;
  std::ostringstream csv;
  csv << "K,bias2_mean,bias2_se,var_mean,var_se,rmse_mean,rmse_se\n";
  for (std::size_t i = 0; i < c.k_values.size(); ++i) {
    const int k = c.k_values[i];
    const std::int64_t games = std::llround(zeta * T / k);
    const auto grids = cached_replicate_grids(
        table, games, k, c.replicates, c.estimator,
        derive_seed(c.seed, kCellBranch, 0, i), pool, c.cache_dir);
    const CellReport report =
        evaluate_cell("K=" + std::to_string(k), zeta, games, k, grids, tests, table);
    csv << k << ',' << cell_csv_fields(report) << '\n';
  }
  out.write("bias_var_vs_K.csv", csv.str());
}

void run_bias_variance_vs_zeta(const CampaignConfig& c, const WpTable& table,
                               const std::vector<PlayDataset>& tests,
                               const ThreadPool& pool, OutputWriter& out) {
  const double T = c.plays_per_game;
  struct Family {
    const char* label;
    std::int64_t games;
    int k;
  };
  std::ostringstream csv;
  csv << "family,zeta,games,K,bias2_mean,bias2_se,var_mean,var_se,rmse_mean,rmse_se\n";
  for (std::size_t zi = 0; zi < c.zetas.size(); ++zi) {
    const double zeta = c.zetas[zi];
    const Family families[] = {
        {"G=zeta K=1", std::llround(zeta), 1},
        {"G=zeta K=T", std::llround(zeta), c.plays_per_game},
        {"G=zeta*T K=1", std::llround(zeta * T), 1},
    };
    for (std::size_t fi = 0; fi < 3; ++fi) {
      const Family& fam = families[fi];
      const auto grids = cached_replicate_grids(
          table, fam.games, fam.k, c.replicates, c.estimator,
          derive_seed(c.seed, kCellBranch, zi, fi), pool, c.cache_dir);
      const CellReport report =
          evaluate_cell(fam.label, zeta, fam.games, fam.k, grids, tests, table);
      csv << fam.label << ',' << fmt(zeta) << ',' << fam.games << ',' << fam.k << ','
          << cell_csv_fields(report) << '\n';
    }
  }
  out.write("bias_var_vs_zeta.csv", csv.str());
}

void run_bias_by_state(const CampaignConfig& c, const WpTable& table,
                       const std::vector<PlayDataset>&, const ThreadPool& pool,
                       OutputWriter& out) {
  const double zeta = c.zetas.front();
  const std::int64_t games = std::llround(zeta);
  const auto grids = cached_replicate_grids(
      table, games, c.plays_per_game, c.replicates, c.estimator,
      derive_seed(c.seed, kCellBranch, 0, 0), pool, c.cache_dir);
  std::vector<int> times(static_cast<std::size_t>(c.plays_per_game));
  for (int t = 1; t <= c.plays_per_game; ++t) times[static_cast<std::size_t>(t - 1)] = t;
  const std::vector<int> scores{-2, -1, 0, 1, 2};
  const auto rows = bias_by_state(grids, table, c.x_fixed, times, scores);
  std::ostringstream csv;
  csv << "t,s,x,bias_mean,bias_se\n";
  for (const StateBias& r : rows)
    csv << r.t << ',' << r.s << ',' << r.x << ',' << fmt(r.bias_mean) << ','
        << fmt(r.bias_se) << '\n';
  out.write("bias_by_state.csv", csv.str());
}

void run_ess(const CampaignConfig& c, OutputWriter& out) {
  const fs::path curves = c.curves_csv.empty()
                              ? fs::path(c.out_dir) / "bias_var_vs_zeta.csv"
                              : fs::path(c.curves_csv);
  std::ifstream in(curves);
  if (!in)
    throw std::runtime_error("ess: cannot open accuracy curves at " + curves.string() +
                             " (run bias-variance-vs-zeta first or pass curves_csv)");
  std::string line;
  if (!std::getline(in, line) ||
      line != "family,zeta,games,K,bias2_mean,bias2_se,var_mean,var_se,rmse_mean,rmse_se")
    throw std::runtime_error("ess: unexpected header in " + curves.string());
  std::vector<std::pair<double, double>> k1_points, kt_points;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string family, field;
    std::getline(ls, family, ',');
    std::vector<double> nums;
    while (std::getline(ls, field, ',')) nums.push_back(std::stod(field));
    if (nums.size() != 9)
      throw std::runtime_error("ess: malformed row in " + curves.string());
    const double zeta = nums[0], rmse_mean = nums[7];
    if (family == "G=zeta*T K=1") k1_points.emplace_back(zeta, rmse_mean);
    if (family == "G=zeta K=T") kt_points.emplace_back(zeta, rmse_mean);
  }
  const BiexpFit k1 = fit_biexponential(k1_points);
  const BiexpFit kt = fit_biexponential(kt_points);

  std::ostringstream csv;
  csv << "zeta,zeta_prime,ratio\n";
  for (double zeta : c.zetas) {
    const EssResult r = effective_sample_size(k1, kt, zeta);
    csv << fmt(r.zeta) << ',' << fmt(r.zeta_prime) << ',' << fmt(r.ratio) << '\n';
  }
  out.write("ess_curve.csv", csv.str());
}

struct CoverageCell {
  std::string scheme;
  double phi = 0.0;
  SummaryStat coverage, width;
};

CoverageCell coverage_cell(const CampaignConfig& c, const WpTable& table,
                           const std::vector<PlayDataset>& tests,
                           const ThreadPool& pool, ResampleKind kind, double phi,
                           std::size_t scheme_index, std::size_t phi_index,
                           std::vector<std::vector<BinCoverage>>* bins_out) {
  const std::int64_t games = std::llround(c.zetas.front());
  BootstrapScheme scheme{kind, phi, c.bootstrap_replicates};
  std::vector<double> coverages, widths;
  for (int m = 0; m < c.replicates; ++m) {
    const auto mm = static_cast<std::uint64_t>(m);
    const PlayDataset train = generate_games(
        games, c.plays_per_game, table, derive_seed(c.seed, kBootTrainBranch, mm));
    const BoostedModel point_model =
        fit(train, c.estimator, derive_seed(c.seed, kBootPointBranch, mm));
    const auto ensemble = fit_bootstrap_ensemble(
        train, scheme, c.estimator,
        derive_seed(c.seed, kBootEnsembleBranch, scheme_index, phi_index, mm), pool);
    const IntervalSet intervals =
        build_intervals(ensemble, point_model, unique_states(tests[static_cast<std::size_t>(m)]));
    const CoverageResult result =
        evaluate_coverage(intervals, tests[static_cast<std::size_t>(m)]);
    coverages.push_back(result.coverage);
    widths.push_back(result.mean_width);
    if (bins_out)
      bins_out->push_back(
          binned_coverage(intervals, tests[static_cast<std::size_t>(m)], c.bins));
  }
  CoverageCell cell;
  cell.scheme = to_string(kind);
  cell.phi = phi;
  cell.coverage = summarize(coverages);
  cell.width = summarize(widths);
  return cell;
}

void run_bootstrap_coverage(const CampaignConfig& c, const WpTable& table,
                            const std::vector<PlayDataset>& tests,
                            const ThreadPool& pool, OutputWriter& out) {
  std::ostringstream csv;
  csv << "scheme,phi,B,coverage_mean,coverage_2se,width_mean,width_2se\n";
  for (std::size_t si = 0; si < c.schemes.size(); ++si)
    for (std::size_t pi = 0; pi < c.phis.size(); ++pi) {
      const CoverageCell cell =
          coverage_cell(c, table, tests, pool, resample_kind_from_string(c.schemes[si]),
                        c.phis[pi], si, pi, nullptr);
      csv << cell.scheme << ',' << fmt(cell.phi) << ',' << c.bootstrap_replicates << ','
          << fmt(cell.coverage.mean) << ',' << fmt(2.0 * cell.coverage.std_error) << ','
          << fmt(cell.width.mean) << ',' << fmt(2.0 * cell.width.std_error) << '\n';
    }
  out.write("boot_coverage.csv", csv.str());
}

void run_binned_coverage(const CampaignConfig& c, const WpTable& table,
                         const std::vector<PlayDataset>& tests, const ThreadPool& pool,
                         OutputWriter& out) {
  std::vector<std::vector<BinCoverage>> per_replicate;
  coverage_cell(c, table, tests, pool, resample_kind_from_string(c.schemes.front()),
                c.phis.front(), 0, 0, &per_replicate);

  // Mean and SE across replicates of the per-bin coverages; a bin empty in
  // some replicate just contributes fewer values.
  std::map<int, std::vector<double>> by_bin;
  for (const auto& bins : per_replicate)
    for (const BinCoverage& b : bins)
      by_bin[static_cast<int>(std::lround(b.lower_edge * c.bins))].push_back(b.coverage);
  std::ostringstream csv;
  csv << "bin_lo,bin_hi,coverage,se\n";
  for (const auto& [bin, values] : by_bin) {
    const SummaryStat stat = summarize(values);
    csv << fmt(static_cast<double>(bin) / c.bins) << ','
        << fmt(static_cast<double>(bin + 1) / c.bins) << ',' << fmt(stat.mean) << ','
        << fmt(stat.std_error) << '\n';
  }
  out.write("binned_coverage.csv", csv.str());
}

}  // namespace

void run(const CampaignConfig& user_config) {
  CampaignConfig c = user_config;
  if (c.cache_dir.empty()) c.cache_dir = (fs::path(c.out_dir) / "cache").string();
  const auto problems = validate(c);
  if (!problems.empty()) {
    std::string message = "invalid campaign config:";
    for (const auto& p : problems) message += "\n  " + p;
    throw std::invalid_argument(message);
  }
  const double cost = estimated_row_fits(c);
  if (cost > kFullScaleThreshold && !c.full_scale)
    throw std::runtime_error(
        "campaign estimated at " + fmt(cost) +
        " row-fits (model fits weighted by training rows); this is full-paper "
        "scale and may run for hours. Re-run with full_scale=true to confirm.");

  const GameConfig game_cfg{c.field_length, c.plays_per_game};
  const WpTable table(game_cfg);
  const ThreadPool pool(c.workers);
  OutputWriter out{fs::path(c.out_dir), {}};

  const bool needs_tests = c.kind == "bias-variance-vs-K" ||
                           c.kind == "bias-variance-vs-zeta" ||
                           c.kind == "bootstrap-coverage" ||
                           c.kind == "binned-coverage";
  std::vector<PlayDataset> tests;
  if (needs_tests)
    tests = generate_test_sets(c.replicates, c.test_games, table,
                               derive_seed(c.seed, kTestBranch));

  if (c.kind == "oracle-export")
    run_oracle_export(c, table, out);
  else if (c.kind == "bias-variance-vs-K")
    run_bias_variance_vs_k(c, table, tests, pool, out);
  else if (c.kind == "bias-variance-vs-zeta")
    run_bias_variance_vs_zeta(c, table, tests, pool, out);
  else if (c.kind == "bias-by-state")
    run_bias_by_state(c, table, tests, pool, out);
  else if (c.kind == "ess")
    run_ess(c, out);
  else if (c.kind == "bootstrap-coverage")
    run_bootstrap_coverage(c, table, tests, pool, out);
  else if (c.kind == "binned-coverage")
    run_binned_coverage(c, table, tests, pool, out);
  else
    throw std::logic_error("unhandled campaign kind " + c.kind);

  out.write_manifest(c);
}

}  // namespace wpsim

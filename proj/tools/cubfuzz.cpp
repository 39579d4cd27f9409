#include <charconv>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cubfuzz/config.hpp"
#include "cubfuzz/pipeline.hpp"

namespace {

struct CliOptions {
  std::string data;
  std::string config_path;
  std::string out = ".";
  std::vector<std::string> systems;
  std::string weights;
  std::string shelter;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int m = 0, ip = 0, lb = 0, ub = 0;
  std::string file_a, file_b;
};

void add_common_options(CLI::App* sub, CliOptions& o, bool needs_data) {
  if (needs_data)
    sub->add_option("--data", o.data, "ratings CSV (header of item names, cells 1..m or NA)")
        ->required();
  sub->add_option("--config", o.config_path, "JSON configuration file");
  sub->add_option("--out", o.out, "output directory (default: current)");
  sub->add_option("--system", o.systems,
                  "fuzzy system, repeatable: cub_fuzzy, spline, empirical");
  sub->add_option("--weights", o.weights,
                  "weight scheme (uncertainty, membership, uniform) or a custom weight file");
  sub->add_option("--shelter", o.shelter, "shelter mode: none, auto, or a category number");
  sub->add_option("--alpha", o.alpha, "LRT level for retaining the shelter effect");
  sub->add_option("--seed", o.seed, "random seed (overrides config and CUBFUZZ_SEED)");
  sub->add_option("--m", o.m, "number of categories");
  sub->add_option("--ip", o.ip, "indifference point (default (m+1)/2 for odd m)");
  sub->add_option("--lb", o.lb, "lower crisp bound (default 1)");
  sub->add_option("--ub", o.ub, "upper crisp bound (default m)");
}

std::uint64_t parse_env_seed(const char* text) {
  std::uint64_t value = 0;
  const std::string s(text);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::runtime_error("CUBFUZZ_SEED='" + s + "' is not an unsigned integer");
  return value;
}

cubfuzz::AnalysisConfig assemble_config(const CLI::App* sub, const CliOptions& o) {
  using namespace cubfuzz;
  AnalysisConfig cfg;
  if (const char* env = std::getenv("CUBFUZZ_SEED")) cfg.seed = parse_env_seed(env);
  if (!o.config_path.empty()) cfg = load_config(o.config_path, std::move(cfg));

  if (sub->count("--m")) cfg.scale.m = o.m;
  if (sub->count("--ip")) cfg.scale.ip = o.ip;
  if (sub->count("--lb")) cfg.scale.lb = o.lb;
  if (sub->count("--ub")) cfg.scale.ub = o.ub;
  if (sub->count("--alpha")) {
    if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw std::runtime_error("--alpha must lie in (0,1)");
    cfg.alpha = o.alpha;
  }
  if (sub->count("--seed")) cfg.seed = o.seed;
  if (!o.systems.empty()) {
    cfg.systems.clear();
    for (const std::string& name : o.systems)
      cfg.systems.push_back(fuzzy_system_from_string(name));
  }
  if (sub->count("--shelter")) {
    if (o.shelter == "none") {
      cfg.shelter = ShelterMode::none;
    } else if (o.shelter == "auto") {
      cfg.shelter = ShelterMode::automatic;
    } else {
      int c = 0;
      const auto [ptr, ec] = std::from_chars(o.shelter.data(), o.shelter.data() + o.shelter.size(), c);
      if (ec != std::errc() || ptr != o.shelter.data() + o.shelter.size())
        throw std::runtime_error("--shelter must be none, auto or a category number, got '" +
                                 o.shelter + "'");
      cfg.shelter = ShelterMode::fixed;
      cfg.shelter_c = c;
    }
  }
  if (sub->count("--weights")) {
    if (o.weights == "uncertainty") cfg.weights = WeightScheme::uncertainty;
    else if (o.weights == "membership") cfg.weights = WeightScheme::membership;
    else if (o.weights == "uniform") cfg.weights = WeightScheme::uniform;
    else {
      cfg.weights = WeightScheme::custom;
      cfg.weights_path = o.weights;
    }
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CUB mixture models and intuitionistic fuzzy evaluation of ordinal rating data"};
  app.require_subcommand(1);
  CliOptions o;

  CLI::App* fit = app.add_subcommand("fit", "fit CUB models per item");
  add_common_options(fit, o, true);
  CLI::App* fuzzy = app.add_subcommand("fuzzy", "per-category (mu, nu, u) profiles per item");
  add_common_options(fuzzy, o, true);
  CLI::App* aggregate =
      app.add_subcommand("aggregate", "item weights, per-item aggregates and composite indicators");
  add_common_options(aggregate, o, true);
  CLI::App* report = app.add_subcommand("report", "full pipeline: fit, fuzzy and aggregate");
  add_common_options(report, o, true);
  CLI::App* simulate = app.add_subcommand("simulate", "draw seeded CUB samples to CSV");
  add_common_options(simulate, o, false);
  CLI::App* distance =
      app.add_subcommand("distance", "normalized Hamming distance between two IFS CSV files");
  distance->add_option("file_a", o.file_a, "first IFS CSV (columns mu, nu, u)")->required();
  distance->add_option("file_b", o.file_b, "second IFS CSV (columns mu, nu, u)")->required();
  distance->add_option("--out", o.out, "output directory (default: current)");

  CLI11_PARSE(app, argc, argv);

  try {
    cubfuzz::RunOutcome rc;
    if (fit->parsed()) {
      rc = cubfuzz::cmd_fit(assemble_config(fit, o), o.data, o.out);
    } else if (fuzzy->parsed()) {
      rc = cubfuzz::cmd_fuzzy(assemble_config(fuzzy, o), o.data, o.out);
    } else if (aggregate->parsed()) {
      rc = cubfuzz::cmd_aggregate(assemble_config(aggregate, o), o.data, o.out);
    } else if (report->parsed()) {
      rc = cubfuzz::cmd_report(assemble_config(report, o), o.data, o.out);
    } else if (simulate->parsed()) {
      rc = cubfuzz::cmd_simulate(assemble_config(simulate, o), o.out);
    } else {
      rc = cubfuzz::cmd_distance(o.file_a, o.file_b, o.out);
    }
    return rc.ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

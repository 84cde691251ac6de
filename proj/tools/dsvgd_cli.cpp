#include "dsvgd/experiment.hpp"

#include "CLI11.hpp"

#include <Eigen/Core>

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

void apply_thread_env() {
  const char* env = std::getenv("DSVGD_THREADS");
  if (!env) return;
  const int n = std::atoi(env);
  if (n > 0) Eigen::setNbThreads(n);
}

int report(const dsvgd::ExperimentResult& result, const std::string& out_dir) {
  if (result.status != "ok") {
    std::cerr << "error: " << result.error << "\n";
    return 1;
  }
  int last_round = 0;
  for (const auto& row : result.rows) last_round = std::max(last_round, row.round);
  for (const auto& row : result.rows) {
    if (row.round != last_round) continue;
    std::cout << "round " << row.round << " agent " << row.agent << " " << row.metric << " = "
              << dsvgd::format_double(row.value) << "\n";
  }
  if (!out_dir.empty()) std::cout << "results written to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_env();

  CLI::App app{"Distributed Stein variational inference simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment described by a config file");
  std::string config_path;
  run->add_option("--config", config_path, "key = value config file")
      ->required()
      ->check(CLI::ExistingFile);
  long long seed = -1;
  run->add_option("--seed", seed, "override the config seed");
  std::string out_dir;
  run->add_option("--out", out_dir, "output directory for results.csv and manifest.json");
  long max_rows = 0;
  run->add_option("--max-rows", max_rows, "cap the dataset row count");
  std::vector<std::string> overrides;
  run->add_option("--set", overrides, "extra key=value config overrides");

  auto* toy = app.add_subcommand("toy", "Run the canned 1-D toy problem and emit KDE curves");
  std::string protocol;
  toy->add_option("--protocol", protocol, "protocol to run")
      ->required()
      ->check(CLI::IsMember({"dsvgd", "udsvgd", "pvi1", "svgd", "sgld", "dsgld"}));
  std::string toy_out = "toy_out";
  toy->add_option("--out", toy_out, "output directory");
  long long toy_seed = 0;
  toy->add_option("--seed", toy_seed, "random seed");
  long toy_particles = 100;
  toy->add_option("--particles", toy_particles, "number of particles");
  long toy_rounds = 10;
  toy->add_option("--rounds", toy_rounds, "number of rounds");
  long toy_steps = 200;
  toy->add_option("--steps", toy_steps, "transport steps per round");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      dsvgd::ExperimentConfig cfg = dsvgd::ExperimentConfig::from_file(config_path);
      for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
          std::cerr << "error: --set expects key=value, got '" << kv << "'\n";
          return 1;
        }
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
      }
      if (seed >= 0) cfg.set("seed", std::to_string(seed));
      if (!out_dir.empty()) cfg.set("out", out_dir);
      if (max_rows > 0) cfg.set("dataset.max_rows", std::to_string(max_rows));
      return report(dsvgd::run_experiment(cfg), cfg.get_string("out", ""));
    }
    return report(dsvgd::run_toy_demo(protocol, toy_out, static_cast<std::uint64_t>(toy_seed),
                                      toy_particles, toy_rounds, toy_steps),
                  toy_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oobcov/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output;
  int trials = 0;
  long long seed = -1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_path, "JSON config file");
  cmd->add_option("-s,--set", c.overrides, "Override a field, e.g. --set estimation.snapshots=40");
  cmd->add_option("-o,--output", c.output, "CSV output path (sidecar gets .json appended)");
  cmd->add_option("-t,--trials", c.trials, "Trials per sweep point");
  cmd->add_option("--seed", c.seed, "Master seed");
}

oobcov::ExperimentConfig resolve(const Common& c) {
  oobcov::ExperimentConfig cfg;
  if (!c.config_path.empty()) cfg = oobcov::load_config(c.config_path);
  cfg = oobcov::apply_overrides(cfg, c.overrides);
  if (!c.output.empty()) cfg.run.output = c.output;
  if (c.trials > 0) cfg.run.trials = c.trials;
  if (c.seed >= 0) cfg.run.seed = static_cast<std::uint64_t>(c.seed);
  cfg.validate();
  return cfg;
}

int run(oobcov::Experiment e, const Common& c) {
  const auto cfg = resolve(c);
  const auto rows = oobcov::run_experiment(cfg, e);
  std::ofstream csv(cfg.run.output, std::ios::binary);
  if (!csv) {
    std::cerr << "cannot open " << cfg.run.output << "\n";
    return kExitConfig;
  }
  oobcov::write_csv(csv, rows);
  std::ofstream side(cfg.run.output + ".json", std::ios::binary);
  side << oobcov::sidecar_json(cfg, e).dump(2) << "\n";
  std::cerr << oobcov::experiment_name(e) << ": " << rows.size() << " rows -> " << cfg.run.output << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Out-of-band aided mmWave covariance estimation experiments"};
  app.require_subcommand(1);

  std::vector<std::pair<CLI::App*, oobcov::Experiment>> experiments;
  std::vector<Common> commons(oobcov::all_experiments().size() + 2);
  std::size_t slot = 0;
  for (auto e : oobcov::all_experiments()) {
    auto* cmd = app.add_subcommand(oobcov::experiment_name(e), "Run the " + oobcov::experiment_name(e) + " sweep");
    add_common(cmd, commons[slot++]);
    experiments.push_back({cmd, e});
  }

  auto* validate = app.add_subcommand("validate-config", "Check a config and print the resolved JSON");
  Common& vc = commons[slot++];
  add_common(validate, vc);

  auto* jrho = app.add_subcommand("sweep-jrho", "Pick J_rho by mean LW-DCOMP efficiency");
  Common& jc = commons[slot++];
  add_common(jrho, jc);
  std::vector<double> candidates;
  jrho->add_option("--candidates", candidates, "Candidate values (default: estimation.j_rho_candidates)");

  CLI11_PARSE(app, argc, argv);

  try {
    for (std::size_t i = 0; i < experiments.size(); ++i) {
      if (experiments[i].first->parsed()) return run(experiments[i].second, commons[i]);
    }
    if (validate->parsed()) {
      std::cout << nlohmann::json(resolve(vc)).dump(2) << "\n";
      return 0;
    }
    if (jrho->parsed()) {
      const auto cfg = resolve(jc);
      const auto res = oobcov::sweep_j_rho(cfg, candidates.empty() ? cfg.estimation.j_rho_candidates : candidates);
      std::cout << "j_rho,mean_eta_lw_dcomp\n";
      for (std::size_t i = 0; i < res.candidates.size(); ++i)
        std::cout << res.candidates[i] << ',' << res.mean_eta[i] << "\n";
      std::cout << "best," << res.best << "\n";
      return 0;
    }
  } catch (const oobcov::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == oobcov::ErrorCode::ConfigError ? kExitConfig : kExitNumeric;
  }
  return 0;
}

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <sys/wait.h>

#include <oobcov/harness.hpp>

using namespace oobcov;

namespace {

std::string error_message(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
    return e.what();
  }
  FAIL("expected ConfigError");
  return {};
}

std::string csv_of(const ExperimentConfig& cfg, Experiment e) {
  std::ostringstream out;
  write_csv(out, run_experiment(cfg, e));
  return out.str();
}

#ifdef OOBCOV_CLI_PATH
int run_cli(const std::string& args) {
  const std::string cmd = std::string(OOBCOV_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

}  // namespace

TEST_CASE("config json round trip") {
  ExperimentConfig cfg;
  cfg.system.n_rx = 32;
  cfg.channel.mode = Congruence::congruent;
  cfg.estimation.pas = PasKind::uniform;
  cfg.estimation.stop_norm = StopNorm::frobenius;
  cfg.run.seed = 12345678901234ULL;
  const nlohmann::json j = cfg;
  const ExperimentConfig back = config_from_json(j);
  CHECK(nlohmann::json(back) == j);
  CHECK(back.system.n_rx == 32);
  CHECK(back.estimation.stop_norm == StopNorm::frobenius);
  CHECK(back.run.seed == 12345678901234ULL);

  const ExperimentConfig partial = config_from_json(nlohmann::json::parse(R"({"system": {"k": 256}})"));
  CHECK(partial.system.k == 256);
  CHECK(partial.system.n_rx == ExperimentConfig{}.system.n_rx);
}

TEST_CASE("config rejects unknown fields and bad enums") {
  CHECK(error_message([] { config_from_json(nlohmann::json::parse(R"({"system": {"bogus": 1}})")); })
            .find("system.bogus") != std::string::npos);
  CHECK(error_message([] { config_from_json(nlohmann::json::parse(R"({"extra": {}})")); }).find("extra") !=
        std::string::npos);
  CHECK(error_message([] {
          config_from_json(nlohmann::json::parse(R"({"estimation": {"stop_norm": "max"}})"));
        }).find("estimation.stop_norm") != std::string::npos);
  CHECK(error_message([] { config_from_json(nlohmann::json::parse(R"({"system": {"k": "many"}})")); })
            .find("system") != std::string::npos);
  CHECK(error_message([] { load_config("/nonexistent/config.json"); }).find("cannot open") != std::string::npos);
}

TEST_CASE("config overrides") {
  const ExperimentConfig base;
  const ExperimentConfig c = apply_overrides(
      base, {"estimation.snapshots=40", "run.output=out.csv", "channel.mode=congruent",
             "snr_loss.antennas=[8,32]", "channel.two_cluster.as_deg=2.5"});
  CHECK(c.estimation.snapshots == 40);
  CHECK(c.run.output == "out.csv");
  CHECK(c.channel.mode == Congruence::congruent);
  CHECK(c.snr_loss.antennas == std::vector<int>{8, 32});
  CHECK(c.channel.two_cluster.as_deg == 2.5);
  CHECK(base.estimation.snapshots == 30);
  CHECK(error_message([&] { apply_overrides(base, {"estimation.nope=1"}); }).find("estimation.nope") !=
        std::string::npos);
  CHECK_THROWS_AS(apply_overrides(base, {"novalue"}), Error);
}

TEST_CASE("validate names the offending field") {
  ExperimentConfig ok;
  ok.validate();
  const auto path_of = [](auto mutate) {
    ExperimentConfig c;
    mutate(c);
    return error_message([&] { c.validate(); });
  };
  CHECK(path_of([](ExperimentConfig& c) { c.system.n_rx = 0; }).find("system.n_rx") != std::string::npos);
  CHECK(path_of([](ExperimentConfig& c) { c.system.m_rx = 2; }).find("system.m_rx") != std::string::npos);
  CHECK(path_of([](ExperimentConfig& c) { c.estimation.j_rho = 1.5; }).find("estimation.j_rho") !=
        std::string::npos);
  CHECK(path_of([](ExperimentConfig& c) { c.estimation.snapshots = 600; }).find("estimation.snapshots") !=
        std::string::npos);
  CHECK(path_of([](ExperimentConfig& c) { c.channel.distances_m = {}; }).find("channel.distances_m") !=
        std::string::npos);
  CHECK(path_of([](ExperimentConfig& c) { c.system.k = 0; }).find("system.k") != std::string::npos);
}

TEST_CASE("link budget") {
  const SystemConfig s;
  const LinkBudget mm = mmwave_link(s, 90.0);
  const LinkBudget sub6 = sub6_link(s, 90.0);
  CHECK(mm.snr_db == doctest::Approx(6.6875916109495682).epsilon(1e-12));
  CHECK(sub6.snr_db == doctest::Approx(27.064180521210991).epsilon(1e-12));
  CHECK(mm.noise_var == doctest::Approx(std::pow(10.0, -mm.snr_db / 10.0)));
  // Pathloss exponent 3: a decade of distance costs 30 dB.
  CHECK(mmwave_link(s, 900.0).snr_db == doctest::Approx(mm.snr_db - 30.0).epsilon(1e-12));
  CHECK_THROWS_AS(mmwave_link(s, 0.0), Error);
}

TEST_CASE("splitmix64 and trial seeds") {
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  std::set<std::uint64_t> seen;
  for (int t = 0; t < 100; ++t)
    for (double v : {5.0, 6.0, -0.0, 0.0}) seen.insert(trial_seed(1, Experiment::fig4_cluster_count, v, t));
  CHECK(seen.size() == 400);
  CHECK(trial_seed(1, Experiment::fig4_cluster_count, 5.0, 0) != trial_seed(1, Experiment::fig5_eta_separation, 5.0, 0));
  CHECK(trial_seed(1, Experiment::fig4_cluster_count, 5.0, 0) != trial_seed(2, Experiment::fig4_cluster_count, 5.0, 0));
  CHECK(trial_seed(7, Experiment::fig8_snr_bound, 3.0, 9) == trial_seed(7, Experiment::fig8_snr_bound, 3.0, 9));
}

TEST_CASE("accumulator") {
  Accumulator empty;
  CHECK(empty.count() == 0);
  CHECK(empty.stderr_of_mean() == 0.0);

  Rng rng(1);
  std::normal_distribution<double> n(3.0, 2.0);
  std::vector<double> xs;
  Accumulator a;
  for (int i = 0; i < 1000; ++i) {
    xs.push_back(1e8 + n(rng));
    a.add(xs.back());
  }
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  CHECK(a.mean() == doctest::Approx(mean).epsilon(1e-14));
  CHECK(a.stderr_of_mean() == doctest::Approx(std::sqrt(ss / 999.0 / 1000.0)).epsilon(1e-8));

  Accumulator small, large;
  for (int i = 0; i < 100; ++i) small.add(n(rng));
  for (int i = 0; i < 10000; ++i) large.add(n(rng));
  CHECK(small.stderr_of_mean() / large.stderr_of_mean() == doctest::Approx(10.0).epsilon(0.2));
}

TEST_CASE("experiment names") {
  for (Experiment e : all_experiments()) CHECK(parse_experiment(experiment_name(e)) == e);
  CHECK(all_experiments().size() == 6);
  CHECK_THROWS_AS(parse_experiment("fig9"), Error);
}

TEST_CASE("csv output is deterministic and thread independent") {
  ExperimentConfig cfg;
  cfg.run.trials = 3;
  cfg.channel.two_cluster.separations_deg = {5, 12, 20};
  const std::string a = csv_of(cfg, Experiment::fig4_cluster_count);
  const std::string b = csv_of(cfg, Experiment::fig4_cluster_count);
  CHECK(a == b);
  ::setenv("OOBCOV_THREADS", "3", 1);
  CHECK(thread_count() == 3);
  const std::string c = csv_of(cfg, Experiment::fig4_cluster_count);
  ::unsetenv("OOBCOV_THREADS");
  CHECK(thread_count() == 1);
  CHECK(a == c);
  CHECK(a.rfind("experiment,sweep_name,sweep_value,metric,mean,stderr,trials,seed\n", 0) == 0);

  cfg.run.seed = 2;
  CHECK(csv_of(cfg, Experiment::fig4_cluster_count) != a);
}

TEST_CASE("rows are sorted and complete") {
  ExperimentConfig cfg;
  cfg.run.trials = 2;
  cfg.snr_loss.antennas = {8};
  cfg.snr_loss.snr_db = {10, 0};
  cfg.snr_loss.mc_trials = 5;
  const auto rows = run_experiment(cfg, Experiment::fig8_snr_bound);
  REQUIRE(!rows.empty());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const bool ordered = rows[i - 1].sweep_value < rows[i].sweep_value ||
                         (rows[i - 1].sweep_value == rows[i].sweep_value && rows[i - 1].metric < rows[i].metric);
    CHECK(ordered);
  }
  std::set<std::string> metrics;
  for (const auto& r : rows) {
    metrics.insert(r.metric);
    CHECK(r.trials == 2);
    CHECK(std::isfinite(r.mean));
  }
  CHECK(metrics.count("gamma_digital_n8") == 1);
  CHECK(metrics.count("bound_holds_n8") == 1);
}

TEST_CASE("sidecar carries the resolved config") {
  ExperimentConfig cfg;
  cfg.run.trials = 7;
  const auto j = sidecar_json(cfg, Experiment::fig6_eta_distance);
  CHECK(j.at("experiment") == "fig6_eta_distance");
  CHECK(j.at("config").at("run").at("trials") == 7);
  CHECK(config_from_json(j.at("config")).run.trials == 7);
}

TEST_CASE("two cluster building blocks") {
  ExperimentConfig cfg;
  const auto truth = two_cluster_truth(cfg, deg2rad(5), deg2rad(25));
  CHECK(truth.size() == cfg.system.n_rx);
  CHECK(truth.is_hermitian());
  CHECK(truth.is_psd());
  CHECK(truth.mat().trace().real() == doctest::Approx(cfg.system.n_rx).epsilon(1e-10));

  const auto gen = two_cluster_gen(cfg, 0.1, 0.4);
  CHECK(gen.mode == Congruence::congruent);
  CHECK(gen.fixed_aoas == std::vector<double>{0.1, 0.4});
  CHECK(gen.fixed_powers.size() == 2);
  CHECK(gen.fixed_powers[0] == gen.fixed_powers[1]);
}

TEST_CASE("sweep_j_rho") {
  ExperimentConfig cfg;
  cfg.run.trials = 1;
  const auto one = sweep_j_rho(cfg, {0.9});
  REQUIRE(one.candidates.size() == 1);
  CHECK(one.best == 0.9);
  CHECK(one.mean_eta[0] >= 0.0);
  CHECK(one.mean_eta[0] <= 1.0);

  const auto two = sweep_j_rho(cfg, {0.9, 0.5});
  CHECK(two.candidates == std::vector<double>{0.5, 0.9});
  CHECK(two.mean_eta[1] == one.mean_eta[0]);

  CHECK_THROWS_AS(sweep_j_rho(cfg, {}), Error);
  CHECK_THROWS_AS(sweep_j_rho(cfg, {0.0}), Error);
  CHECK_THROWS_AS(sweep_j_rho(cfg, {1.2}), Error);
}

#ifdef OOBCOV_CLI_PATH
TEST_CASE("cli exit codes") {
  CHECK(run_cli("validate-config") == 0);
  CHECK(run_cli("validate-config --set system.n_rx=0") == 2);
  CHECK(run_cli("validate-config --set system.bogus=1") == 2);
  CHECK(run_cli("validate-config -c /nonexistent.json") == 2);
  CHECK(run_cli("no-such-command") != 0);

  const std::string out = "/tmp/oobcov_cli_test.csv";
  REQUIRE(run_cli("fig4_cluster_count -t 2 -s channel.two_cluster.separations_deg=[5,10] -o " + out) == 0);
  std::ifstream in(out);
  std::string header;
  std::getline(in, header);
  CHECK(header == "experiment,sweep_name,sweep_value,metric,mean,stderr,trials,seed");
  std::ifstream side(out + ".json");
  CHECK(side.good());
}
#endif

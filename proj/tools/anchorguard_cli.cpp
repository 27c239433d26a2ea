// anchorguard command line.
//
//   anchorguard run    --scenario <file> --out <csv> [--seed N] [--trials N] [--malicious LIST]
//                      [--sigma F] [--epsilon F] [--alpha F] [--quiet]
//   anchorguard deploy --scenario <file> --out <network file> [--seed N]
//   anchorguard detect --network <file> --out <csv> [--scenario <file>] [--sigma F] [--epsilon F]
//                      [--alpha F] [--seed N]
//
// Exit codes: 0 success, 2 parse/validation error, 3 run failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "anchorguard/anchorguard.hpp"

namespace {

using namespace anchorguard;

constexpr int kExitUsage = 2;
constexpr int kExitFailure = 3;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("short write to " + path);
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> malicious;
  std::optional<double> sigma;
  std::optional<double> epsilon;
  std::optional<double> alpha;

  void apply(ScenarioConfig& cfg) const {
    if (seed) cfg.master_seed = *seed;
    if (trials) cfg.trials = *trials;
    if (malicious) {
      cfg.n_malicious.clear();
      for (auto item : detail::parse_list(*malicious, 0, "--malicious"))
        cfg.n_malicious.push_back(detail::parse_number<int>(item, 0, "--malicious"));
    }
    if (sigma) cfg.ranging.sigma = *sigma;
    if (epsilon) cfg.epsilon = *epsilon;
    if (alpha) cfg.alpha = *alpha;
    validate(cfg);
  }
};

ScenarioConfig load_scenario(const std::optional<std::string>& path, const Overrides& o) {
  ScenarioConfig cfg = path ? parse_scenario(read_file(*path)) : ScenarioConfig{};
  o.apply(cfg);
  return cfg;
}

int cmd_run(const std::string& scenario, const std::string& out, const Overrides& o, bool quiet) {
  const ScenarioConfig cfg = load_scenario(scenario, o);
  const auto rows = run_sweep(cfg);
  write_file(out, emit_csv(rows));
  if (!quiet) {
    for (const MetricsRecord& r : rows) {
      if (!r.summary) continue;
      std::cerr << "n_malicious=" << r.n_malicious << ' ' << to_string(r.method);
      if (r.skipped) {
        std::cerr << " all trials skipped\n";
        continue;
      }
      std::cerr << " mean_error=" << r.mean_error << "m precision=" << r.precision << " recall=" << r.recall
                << " detect_ms=" << r.detect_ms << '\n';
    }
  }
  return 0;
}

int cmd_deploy(const std::string& scenario, const std::string& out, const Overrides& o) {
  const ScenarioConfig cfg = load_scenario(scenario, o);
  const std::uint64_t seed = trial_seed(cfg.master_seed, 0);
  Rng deploy_rng = stream_rng(seed, Stream::Deploy);
  DeploymentOptions opt;
  opt.comm_radius = cfg.comm_radius;
  Network net = deploy({cfg.area_w, cfg.area_h}, cfg.n_nodes, deploy_rng, opt);
  Rng attack_rng = stream_rng(seed, Stream::Attack);
  AttackSpec spec;
  spec.n_malicious = cfg.n_malicious.front();
  spec.displacement = UniformRadial{cfg.displacement_min, cfg.displacement_max};
  const auto attacked = compromise(net, spec, attack_rng).first;
  write_file(out, write_network(attacked, cfg.master_seed));
  return 0;
}

int cmd_detect(const std::string& network, const std::optional<std::string>& scenario, const std::string& out,
               const Overrides& o) {
  const ScenarioConfig cfg = load_scenario(scenario, o);
  NetworkFixture fx = read_network(read_file(network));
  Network& net = fx.network;
  const std::uint64_t seed = trial_seed(cfg.master_seed, 0);
  Rng calib_rng = stream_rng(seed, Stream::Calibrate);
  net.references = build_references(pre_attack(net), cfg.ranging, cfg.calibration_rounds, calib_rng);
  Rng detect_rng = stream_rng(seed, Stream::Detect);
  const MethodOutcomes outcome = detect_and_confirm(net, cfg.effective_epsilon(), cfg.ranging,
                                                    chi2_cutoff(cfg.alpha), cfg.variance_floor, detect_rng);
  const GroundTruth truth = ground_truth_of(net);
  const auto rows = score_methods(net, truth, outcome, cfg.methods, 0, seed, static_cast<int>(truth.malicious_ids.size()));
  write_file(out, emit_csv(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Malicious anchor detection simulator"};
  app.require_subcommand(1);

  Overrides o;
  std::string scenario, out, network;
  std::optional<std::string> detect_scenario;
  bool quiet = false;

  auto add_noise_flags = [&](CLI::App* sub) {
    sub->add_option("--sigma", o.sigma, "Ranging noise standard deviation");
    sub->add_option("--epsilon", o.epsilon, "Comparison tolerance in metres");
    sub->add_option("--alpha", o.alpha, "Significance level of the Mahalanobis cutoff");
    sub->add_option("--seed", o.seed, "Master seed");
  };

  auto* run = app.add_subcommand("run", "Run a malicious-count sweep and write metrics CSV");
  run->add_option("--scenario", scenario, "Scenario file")->required();
  run->add_option("--out", out, "Output CSV path")->required();
  run->add_option("--trials", o.trials, "Trials per sweep point");
  run->add_option("--malicious", o.malicious, "Malicious counts, e.g. 4,8,12");
  run->add_flag("--quiet", quiet, "Suppress the summary on stderr");
  add_noise_flags(run);

  auto* dep = app.add_subcommand("deploy", "Deploy (and attack) one network and write a fixture");
  dep->add_option("--scenario", scenario, "Scenario file")->required();
  dep->add_option("--out", out, "Output network fixture path")->required();
  dep->add_option("--seed", o.seed, "Master seed");

  auto* det = app.add_subcommand("detect", "Run detection on a stored network fixture");
  det->add_option("--network", network, "Network fixture")->required();
  det->add_option("--out", out, "Output CSV path")->required();
  det->add_option("--scenario", detect_scenario, "Scenario file for detection parameters");
  add_noise_flags(det);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(scenario, out, o, quiet);
    if (*dep) return cmd_deploy(scenario, out, o);
    if (*det) return cmd_detect(network, detect_scenario, out, o);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "invalid scenario: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "anchorguard/attack.hpp"
#include "anchorguard/deployment.hpp"
#include "anchorguard/detection.hpp"
#include "anchorguard/mahalanobis.hpp"
#include "anchorguard/random.hpp"
#include "anchorguard/ranging.hpp"

namespace anchorguard {

enum class Method { TrilaterationOnly, TrilaterationMahalanobis };

inline std::string_view to_string(Method m) {
  return m == Method::TrilaterationOnly ? "trilateration_only" : "trilateration_mahalanobis";
}

struct ScenarioConfig {
  double area_w = 600.0;
  double area_h = 600.0;
  int n_nodes = 122;
  std::vector<int> n_malicious{4, 8, 12, 16, 20};
  RangingModel ranging = RangingModel::gaussian(0.0);
  /// Unset means default_epsilon(sigma).
  std::optional<double> epsilon;
  double alpha = 0.05;
  double comm_radius = 150.0;
  int trials = 30;
  std::uint64_t master_seed = 42;
  std::vector<Method> methods{Method::TrilaterationOnly, Method::TrilaterationMahalanobis};
  double displacement_min = 20.0;
  double displacement_max = 60.0;
  int calibration_rounds = 16;
  /// m^2 added to the calibration covariance before inversion.
  double variance_floor = 1e-4;

  double effective_epsilon() const { return epsilon.value_or(default_epsilon(ranging.sigma)); }
};

/// Throws ValidationError naming the first offending field.
inline void validate(const ScenarioConfig& c) {
  auto require = [](bool ok, const char* field, const char* msg) {
    if (!ok) throw ValidationError(field, msg);
  };
  require(c.area_w > 0.0 && std::isfinite(c.area_w), "area_w", "must be positive");
  require(c.area_h > 0.0 && std::isfinite(c.area_h), "area_h", "must be positive");
  require(c.n_nodes >= 4, "n_nodes", "must be at least 4");
  require(!c.n_malicious.empty(), "n_malicious", "sweep list must not be empty");
  for (int m : c.n_malicious) require(m >= 0 && m < c.n_nodes, "n_malicious", "must satisfy 0 <= n_malicious < n_nodes");
  require(c.ranging.sigma >= 0.0 && std::isfinite(c.ranging.sigma), "sigma", "must be non-negative");
  if (c.epsilon) require(*c.epsilon > 0.0 && std::isfinite(*c.epsilon), "epsilon", "must be positive");
  require(c.alpha > 0.0 && c.alpha < 1.0, "alpha", "must be in (0, 1)");
  require(c.comm_radius > 0.0 && std::isfinite(c.comm_radius), "comm_radius", "must be positive");
  require(c.trials >= 1, "trials", "must be at least 1");
  require(!c.methods.empty(), "methods", "must name at least one method");
  require(c.displacement_min >= 0.0, "displacement_min", "must be non-negative");
  require(c.displacement_max >= c.displacement_min, "displacement_max", "must be >= displacement_min");
  require(c.calibration_rounds >= 3, "calibration_rounds", "must be at least 3");
  require(c.variance_floor >= 0.0, "variance_floor", "must be non-negative");
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view text, int line, const std::string& key) {
  text = trim(text);
  T v{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size() || text.empty())
    throw ParseError(line, key, "not a number: '" + std::string(text) + "'");
  return v;
}

/// "[a, b, c]" or a bare scalar.
inline std::vector<std::string_view> parse_list(std::string_view text, int line, const std::string& key) {
  text = trim(text);
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') throw ParseError(line, key, "unterminated list");
    text = text.substr(1, text.size() - 2);
  }
  std::vector<std::string_view> items;
  if (trim(text).empty()) return items;
  std::size_t pos = 0;
  while (true) {
    const auto comma = text.find(',', pos);
    const auto item = trim(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (item.empty()) throw ParseError(line, key, "empty list item");
    items.push_back(item);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return items;
}

inline RangingKind parse_ranging(std::string_view v, int line) {
  if (v == "exact") return RangingKind::Exact;
  if (v == "gaussian") return RangingKind::GaussianAdditive;
  if (v == "lognormal") return RangingKind::LogNormalMultiplicative;
  throw ParseError(line, "ranging", "expected exact, gaussian or lognormal");
}

inline Method parse_method(std::string_view v, int line) {
  if (v == "trilateration_only") return Method::TrilaterationOnly;
  if (v == "trilateration_mahalanobis") return Method::TrilaterationMahalanobis;
  throw ParseError(line, "methods", "unknown method '" + std::string(v) + "'");
}

}  // namespace detail

/// Flat key=value document, '#' comments, lists as [a, b, c]. Unknown and
/// repeated keys are rejected; missing keys keep their defaults.
inline ScenarioConfig parse_scenario(std::string_view document) {
  ScenarioConfig c;
  std::set<std::string> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= document.size()) {
    const auto nl = document.find('\n', pos);
    std::string_view line = document.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? document.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "", "expected key=value");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "", "missing key");
    if (!seen.insert(key).second) throw ParseError(line_no, key, "duplicate key");
    if (value.empty()) throw ParseError(line_no, key, "missing value");

    using detail::parse_number;
    if (key == "area_w") c.area_w = parse_number<double>(value, line_no, key);
    else if (key == "area_h") c.area_h = parse_number<double>(value, line_no, key);
    else if (key == "n_nodes") c.n_nodes = parse_number<int>(value, line_no, key);
    else if (key == "n_malicious") {
      c.n_malicious.clear();
      for (auto item : detail::parse_list(value, line_no, key)) c.n_malicious.push_back(parse_number<int>(item, line_no, key));
    } else if (key == "ranging") c.ranging.kind = detail::parse_ranging(value, line_no);
    else if (key == "sigma") c.ranging.sigma = parse_number<double>(value, line_no, key);
    else if (key == "epsilon") c.epsilon = parse_number<double>(value, line_no, key);
    else if (key == "alpha") c.alpha = parse_number<double>(value, line_no, key);
    else if (key == "comm_radius") c.comm_radius = parse_number<double>(value, line_no, key);
    else if (key == "trials") c.trials = parse_number<int>(value, line_no, key);
    else if (key == "seed") c.master_seed = parse_number<std::uint64_t>(value, line_no, key);
    else if (key == "methods") {
      c.methods.clear();
      for (auto item : detail::parse_list(value, line_no, key)) c.methods.push_back(detail::parse_method(item, line_no));
    } else if (key == "displacement_min") c.displacement_min = parse_number<double>(value, line_no, key);
    else if (key == "displacement_max") c.displacement_max = parse_number<double>(value, line_no, key);
    else if (key == "calibration_rounds") c.calibration_rounds = parse_number<int>(value, line_no, key);
    else if (key == "variance_floor") c.variance_floor = parse_number<double>(value, line_no, key);
    else throw ParseError(line_no, key, "unknown key");
  }
  validate(c);
  return c;
}

struct MetricsRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  Method method = Method::TrilaterationOnly;
  int n_malicious = 0;
  double mean_error = 0.0;
  double max_error = 0.0;
  double precision = 1.0;
  double recall = 1.0;
  double detect_ms = 0.0;
  /// Trial could not be run (deployment failure); metrics are meaningless.
  bool skipped = false;
  /// Mean over the non-skipped trials of one (n_malicious, method) cell.
  bool summary = false;
};

inline std::uint64_t trial_seed(std::uint64_t master_seed, int trial_index) {
  return derive_seed(master_seed, {static_cast<std::uint64_t>(trial_index)});
}

// Stream tags under a trial seed.
enum class Stream : std::uint64_t { Deploy = 1, Calibrate = 2, Attack = 3, Detect = 4 };

inline constexpr int kTimingRepeats = 5;

inline Rng stream_rng(std::uint64_t seed, Stream s) { return make_rng(seed, {static_cast<std::uint64_t>(s)}); }

struct Classification {
  double precision = 1.0;
  double recall = 1.0;
};

/// Empty flagged set counts as no false claims (precision 1); empty ground
/// truth counts as full recall.
inline Classification classify(const std::set<NodeId>& flagged, const std::set<NodeId>& malicious) {
  std::size_t hits = 0;
  for (NodeId id : flagged) hits += malicious.contains(id) ? 1 : 0;
  Classification c;
  if (!flagged.empty()) c.precision = static_cast<double>(hits) / static_cast<double>(flagged.size());
  if (!malicious.empty()) c.recall = static_cast<double>(hits) / static_cast<double>(malicious.size());
  return c;
}

struct LocalizationError {
  double mean = 0.0;
  double max = 0.0;
};

/// Network-wide localization error of the system's belief about each anchor:
/// `corrected` positions where the method overrides the advertised one, the
/// advertised position everywhere else.
inline LocalizationError localization_error(const Network& net, const std::map<NodeId, Point2>& corrected) {
  LocalizationError e;
  if (net.nodes.empty()) return e;
  for (const AnchorNode& n : net.nodes) {
    const auto it = corrected.find(n.id);
    const Point2 belief = it == corrected.end() ? n.reported_pos : it->second;
    const double err = distance(belief, n.true_pos);
    e.mean += err;
    e.max = std::max(e.max, err);
  }
  e.mean /= static_cast<double>(net.nodes.size());
  return e;
}

inline GroundTruth ground_truth_of(const Network& net) {
  GroundTruth t;
  for (const AnchorNode& n : net.nodes)
    if (n.compromised) {
      t.malicious_ids.insert(n.id);
      t.original_positions[n.id] = n.true_pos;
    }
  return t;
}

/// Timed outcome of both detection methods on one attacked network.
struct MethodOutcomes {
  DetectionReport report;
  std::vector<MahalanobisScore> scores;
  double confirm_ms = 0.0;
};

inline MethodOutcomes detect_and_confirm(const Network& attacked, double epsilon, const RangingModel& model,
                                         double cutoff, double variance_floor, Rng& rng) {
  MethodOutcomes out;
  out.report = run_detection(attacked, epsilon, model, rng);
  const auto start = std::chrono::steady_clock::now();
  out.scores = confirm_suspects(attacked, out.report, cutoff, variance_floor);
  out.confirm_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

/// One metrics row per requested method.
inline std::vector<MetricsRecord> score_methods(const Network& attacked, const GroundTruth& truth,
                                                const MethodOutcomes& o, const std::vector<Method>& methods,
                                                int trial, std::uint64_t seed, int n_malicious) {
  std::vector<MetricsRecord> rows;
  for (Method m : methods) {
    std::set<NodeId> flagged;
    std::map<NodeId, Point2> corrected;
    if (m == Method::TrilaterationOnly) {
      flagged = o.report.flagged_ids;
      for (const SuspectRecord& s : o.report.suspects) corrected[s.anchor_id] = s.observed_pos;
    } else {
      for (std::size_t k = 0; k < o.report.suspects.size(); ++k) {
        if (!o.scores[k].outlier) continue;
        const SuspectRecord& s = o.report.suspects[k];
        flagged.insert(s.anchor_id);
        corrected[s.anchor_id] = s.reference_pos;
      }
    }
    const Classification c = classify(flagged, truth.malicious_ids);
    const LocalizationError e = localization_error(attacked, corrected);
    MetricsRecord r;
    r.trial = trial;
    r.seed = seed;
    r.method = m;
    r.n_malicious = n_malicious;
    r.mean_error = e.mean;
    r.max_error = e.max;
    r.precision = c.precision;
    r.recall = c.recall;
    r.detect_ms = o.report.elapsed_ms + (m == Method::TrilaterationMahalanobis ? o.confirm_ms : 0.0);
    rows.push_back(r);
  }
  return rows;
}

/// Everything a trial produces, for callers that need more than the CSV rows.
struct TrialOutcome {
  Network attacked;
  GroundTruth truth;
  MethodOutcomes methods;
  std::vector<MetricsRecord> records;
};

/// Deploy, calibrate, attack, detect and confirm for one trial. Deployment
/// and attack failures yield a single skipped record.
inline TrialOutcome run_trial_detailed(const ScenarioConfig& cfg, int trial_index, int n_malicious) {
  const std::uint64_t seed = trial_seed(cfg.master_seed, trial_index);
  TrialOutcome out;
  try {
    Rng deploy_rng = stream_rng(seed, Stream::Deploy);
    DeploymentOptions opt;
    opt.comm_radius = cfg.comm_radius;
    Network net = deploy({cfg.area_w, cfg.area_h}, cfg.n_nodes, deploy_rng, opt);
    Rng calib_rng = stream_rng(seed, Stream::Calibrate);
    net.references = build_references(net, cfg.ranging, cfg.calibration_rounds, calib_rng);

    Rng attack_rng = stream_rng(seed, Stream::Attack);
    AttackSpec spec;
    spec.n_malicious = n_malicious;
    spec.displacement = UniformRadial{cfg.displacement_min, cfg.displacement_max};
    auto [attacked, truth] = compromise(net, spec, attack_rng);
    out.attacked = std::move(attacked);
    out.truth = std::move(truth);
  } catch (const DeploymentFailure&) {
    out.records.push_back({trial_index, seed, cfg.methods.front(), n_malicious, 0, 0, 0, 0, 0, true, false});
    return out;
  } catch (const InvalidSpec&) {
    out.records.push_back({trial_index, seed, cfg.methods.front(), n_malicious, 0, 0, 0, 0, 0, true, false});
    return out;
  }

  const double epsilon = cfg.effective_epsilon();
  const double cutoff = chi2_cutoff(cfg.alpha);
  // Detection is a pure function of its stream, so every repetition yields
  // the same report; the fastest repetition filters scheduler noise.
  for (int rep = 0; rep < kTimingRepeats; ++rep) {
    Rng detect_rng = stream_rng(seed, Stream::Detect);
    MethodOutcomes o = detect_and_confirm(out.attacked, epsilon, cfg.ranging, cutoff, cfg.variance_floor, detect_rng);
    if (rep == 0) {
      out.methods = std::move(o);
    } else {
      out.methods.report.elapsed_ms = std::min(out.methods.report.elapsed_ms, o.report.elapsed_ms);
      out.methods.confirm_ms = std::min(out.methods.confirm_ms, o.confirm_ms);
    }
  }
  out.records = score_methods(out.attacked, out.truth, out.methods, cfg.methods, trial_index, seed, n_malicious);
  return out;
}

inline std::vector<MetricsRecord> run_trial(const ScenarioConfig& cfg, int trial_index, int n_malicious) {
  return run_trial_detailed(cfg, trial_index, n_malicious).records;
}

inline std::vector<MetricsRecord> run_trial(const ScenarioConfig& cfg, int trial_index) {
  return run_trial(cfg, trial_index, cfg.n_malicious.front());
}

/// Data rows ordered by (n_malicious, trial, method), then one summary row
/// per (n_malicious, method) holding means over non-skipped trials.
inline std::vector<MetricsRecord> run_sweep(const ScenarioConfig& cfg) {
  validate(cfg);
  std::vector<MetricsRecord> rows;
  std::vector<MetricsRecord> summaries;
  for (int n : cfg.n_malicious) {
    std::vector<MetricsRecord> cell;
    for (int t = 0; t < cfg.trials; ++t) {
      for (MetricsRecord& r : run_trial(cfg, t, n)) {
        rows.push_back(r);
        if (!r.skipped) cell.push_back(r);
      }
    }
    for (Method m : cfg.methods) {
      MetricsRecord s;
      s.summary = true;
      s.trial = -1;
      s.seed = cfg.master_seed;
      s.method = m;
      s.n_malicious = n;
      int count = 0;
      s.precision = s.recall = 0.0;
      for (const MetricsRecord& r : cell) {
        if (r.method != m) continue;
        ++count;
        s.mean_error += r.mean_error;
        s.max_error += r.max_error;
        s.precision += r.precision;
        s.recall += r.recall;
        s.detect_ms += r.detect_ms;
      }
      if (count == 0) {
        s.skipped = true;
      } else {
        const double k = 1.0 / count;
        s.mean_error *= k;
        s.max_error *= k;
        s.precision *= k;
        s.recall *= k;
        s.detect_ms *= k;
      }
      summaries.push_back(s);
    }
  }
  rows.insert(rows.end(), summaries.begin(), summaries.end());
  return rows;
}

inline constexpr std::string_view kCsvHeader =
    "trial,seed,method,n_malicious,mean_error_m,max_error_m,precision,recall,detect_ms";

namespace detail {
inline std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}
}  // namespace detail

/// Summary rows carry "mean" in the trial column, skipped trials carry
/// "skipped" in the method column with empty metrics.
inline std::string emit_csv(const std::vector<MetricsRecord>& records) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const MetricsRecord& r : records) {
    os << (r.summary ? std::string("mean") : std::to_string(r.trial)) << ',' << r.seed << ',';
    if (r.skipped) {
      os << "skipped," << r.n_malicious << ",,,,,\n";
      continue;
    }
    os << to_string(r.method) << ',' << r.n_malicious << ',' << detail::g6(r.mean_error) << ','
       << detail::g6(r.max_error) << ',' << detail::g6(r.precision) << ',' << detail::g6(r.recall) << ','
       << detail::g6(r.detect_ms) << '\n';
  }
  return os.str();
}

inline std::string sweep_csv(const ScenarioConfig& cfg) { return emit_csv(run_sweep(cfg)); }

}  // namespace anchorguard

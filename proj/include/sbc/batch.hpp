#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sbc/driver.hpp"

namespace sbc {

/// Settings that override the per-instance-kind defaults; names follow the CLI flags.
struct ConfigOverrides {
  std::optional<Relaxation> relaxation;
  std::optional<BranchRule> rule;
  std::optional<double> gap;
  std::optional<int> node_limit;
  std::optional<double> time_limit;
  std::optional<int> max_depth;
  std::optional<unsigned> seed;
  std::optional<int> threads;

  void apply(SolverConfig& cfg) const;
};

enum class InstanceKind { boxqp, acopf, qcqp };
std::string to_string(InstanceKind k);
InstanceKind parse_instance_kind(const std::string& s);
/// ".m" is a MATPOWER case, ".json" a CQCQP instance, anything else a spar BoxQP file.
InstanceKind infer_instance_kind(const std::string& path);

struct BatchInstance {
  std::string name;
  InstanceKind kind = InstanceKind::boxqp;
  std::string path;
};

struct BatchConfig {
  std::string name;
  ConfigOverrides overrides;
};

struct Manifest {
  std::vector<BatchInstance> instances;
  std::vector<BatchConfig> configs;
  /// Instance runs executed concurrently.
  int workers = 1;
};

/// JSON manifest; relative instance paths are resolved against base_dir. See docs/instance_format.md.
Manifest parse_manifest(const std::string& text, const std::string& base_dir = ".");
Manifest load_manifest(const std::string& path);

/// Default configuration of an instance kind (BoxQP: sdp+rlt at 0.01%; others: SolverConfig{}).
SolverConfig default_config(InstanceKind k);

/// Loads and solves one instance with the kind's defaults plus the overrides.
SearchResult solve_instance(const BatchInstance& inst, const ConfigOverrides& o, std::ostream* events = nullptr);

struct BatchRun {
  std::string instance;
  std::string config;
  /// False when loading or solving threw; error holds the message.
  bool ok = false;
  std::string error;
  SearchResult result;

  [[nodiscard]] bool solved() const { return ok && result.status == SearchStatus::optimal; }
};

/// Means over the runs this configuration solved; NaN when it solved none.
struct ConfigSummary {
  std::string config;
  int runs = 0;
  int solved = 0;
  double mean_time = 0.0;
  double mean_nodes = 0.0;
  double mean_depth = 0.0;
  double mean_lbtime = 0.0;
  double mean_ubtime = 0.0;
};

struct ProfilePoint {
  double log2_ratio = 0.0;
  double fraction = 0.0;
};

/// Right-continuous step function: fraction of instances within 2^x of the best, starting at x = 0.
struct ProfileCurve {
  std::string config;
  std::vector<ProfilePoint> points;

  /// Step value at x.
  [[nodiscard]] double at(double log2_ratio) const;
};

/// metric[i][c] is configuration c's measure on instance i, nullopt when unsolved. Values below
/// floor are raised to it so zero timings give finite ratios.
std::vector<ProfileCurve> performance_profile(const std::vector<std::string>& configs,
                                              const std::vector<std::vector<std::optional<double>>>& metric,
                                              double floor = 0.0);

struct BatchReport {
  std::vector<std::string> instances;
  std::vector<std::string> configs;
  /// Instance-major: runs[i * configs.size() + c].
  std::vector<BatchRun> runs;
  std::vector<ConfigSummary> summaries;
  std::vector<ProfileCurve> time_profile;
  std::vector<ProfileCurve> node_profile;
};

/// Summaries and profiles from finished runs (time floor 1e-6 s, node floor 1).
BatchReport summarize(const std::vector<std::string>& instances, const std::vector<std::string>& configs,
                      std::vector<BatchRun> runs);

/// Runs every instance under every configuration; failures are recorded and the batch continues.
BatchReport run_batch(const Manifest& m);

std::string batch_report_json(const BatchReport& r);
/// metric,config,log2_ratio,fraction rows for the time and nodes profiles.
std::string profile_csv(const BatchReport& r);
/// One row per run with the run-report fields.
std::string runs_csv(const BatchReport& r);

}  // namespace sbc

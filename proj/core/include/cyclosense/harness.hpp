#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cyclosense/detector.hpp"
#include "cyclosense/signal.hpp"

namespace cyclosense {

enum class Method {
  kClassicOracle,
  kOmp,
  kSober,
  kHadesSym,
  kHadesAsy,
  kSoberOracle,
  kHadesOracle,
};

std::string method_name(Method method);
std::optional<Method> parse_method(const std::string& name);
bool is_oracle(Method method);
bool is_sparse(Method method);

/// Full Monte-Carlo sweep description. Parsed from flat key = value text
/// with an explicit schema version; unknown keys are rejected.
struct ExperimentPlan {
  int schema_version = 1;
  SignalModel model = SignalModel::bpsk(8);
  int n = 4000;
  int m_avail = 1000;
  std::vector<int> delays = {1, 2, 3, 4};
  std::vector<double> snr_grid = {-4.0, -2.0, 0.0, 2.0, 4.0};
  std::vector<double> pfa_grid = {0.01, 0.03, 0.05, 0.10};
  std::vector<double> c_r_grid = {0.05, 0.10, 0.15, 0.25, 0.40};
  std::vector<Method> methods = {Method::kClassicOracle, Method::kOmp,
                                 Method::kSober, Method::kHadesSym,
                                 Method::kHadesAsy};
  int trials = 500;
  std::uint64_t seed = 20240915;
  int window_length = 201;
  double kaiser_alpha = 10.0;
  /// 0 selects the default ceil(n / (2 * n_sym)).
  int greedy_iterations = 0;
  int hades_iterations = 3;
  double h0_noise_power = 1.0;

  int greedy_iterations_effective() const;
  SensingConfig sensing_config(double c_r) const;
  void validate() const;
  std::string canonical_text() const;

  static ExperimentPlan from_config_text(const std::string& text);
  /// CI-sized profile: n = 1000, m = 250, reduced grids.
  static ExperimentPlan fast_profile();
};

/// Scalar outcome of a single pipeline run.
struct TrialOutcome {
  bool ok = true;
  std::string error;
  double statistic = 0.0;
  int dof = 0;
  int k_recovered = -1;  // folded into {1..n/2}; -1 when nothing recovered
  bool full_support_match = false;
  double abs_index_error = 0.0;
  double mse_overall = std::numeric_limits<double>::quiet_NaN();
  double mse_spikes = std::numeric_limits<double>::quiet_NaN();
};

/// Immutable per-plan context shared across trials (dictionaries, reference
/// CA matrices, true supports).
struct SweepContext;

struct Scenario {
  bool h1 = true;
  double snr_db = 0.0;
  double c_r = 0.15;
};

TrialOutcome run_trial(const ExperimentPlan& plan, const SweepContext& ctx,
                       Method method, const Scenario& scenario, int trial);

/// One aggregated grid point, mirroring the sweep CSV schema.
struct MetricRecord {
  std::string method;
  double snr_db = std::numeric_limits<double>::quiet_NaN();
  double pfa_nominal = std::numeric_limits<double>::quiet_NaN();
  double c_r = std::numeric_limits<double>::quiet_NaN();
  double pd = std::numeric_limits<double>::quiet_NaN();
  double pfa_empirical = std::numeric_limits<double>::quiet_NaN();
  double hitrate = std::numeric_limits<double>::quiet_NaN();
  double hitrate_full_support = std::numeric_limits<double>::quiet_NaN();
  double mean_abs_index_error = std::numeric_limits<double>::quiet_NaN();
  double mse_overall = std::numeric_limits<double>::quiet_NaN();
  double mse_spikes = std::numeric_limits<double>::quiet_NaN();
  int trials = 0;
};

/// Aggregated trial batch for one (method, scenario) cell.
struct CellStats {
  int trials = 0;
  int errors = 0;
  std::vector<int> detections;  // per pfa in plan.pfa_grid
  double hitrate = 0.0;
  double hitrate_full = 0.0;
  double mean_abs_index_error = 0.0;
  double mse_overall = 0.0;
  double mse_spikes = 0.0;
};

class Sweep {
 public:
  explicit Sweep(const ExperimentPlan& plan);
  ~Sweep();

  const ExperimentPlan& plan() const { return plan_; }
  const SweepContext& context() const { return *ctx_; }

  /// Runs `plan.trials` independent trials of one cell, parallelized over
  /// the worker pool (CYCLOSENSE_THREADS overrides the size).
  CellStats run_cell(Method method, const Scenario& scenario) const;

  std::vector<MetricRecord> detection_rate_records() const;      // figure 1+2
  std::vector<MetricRecord> pfa_calibration_records() const;     // figure 3
  std::vector<MetricRecord> support_metric_records() const;      // figure 4
  std::vector<MetricRecord> mse_records() const;                 // figure 5

  /// Runs the whole plan and writes the per-figure CSV files plus
  /// manifest.json into out_dir. Returns the written file names.
  std::vector<std::string> write_outputs(
      const std::filesystem::path& out_dir) const;

 private:
  ExperimentPlan plan_;
  std::unique_ptr<SweepContext> ctx_;
  mutable std::map<std::pair<std::string, std::string>, CellStats> cache_;
};

/// Worker-pool map over [0, count); worker count from CYCLOSENSE_THREADS or
/// hardware concurrency. Results must be written into per-index slots.
void parallel_for(int count, const std::function<void(int)>& body);

int worker_count();

}  // namespace cyclosense

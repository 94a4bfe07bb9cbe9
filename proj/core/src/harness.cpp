#include "cyclosense/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cyclosense/dictionary.hpp"
#include "cyclosense/io.hpp"
#include "cyclosense/rng.hpp"
#include "cyclosense/version.hpp"

namespace cyclosense {

namespace {

constexpr const char* kMethodNames[] = {
    "classic-oracle", "omp",          "sober",       "hades-sym",
    "hades-asy",      "sober-oracle", "hades-oracle"};

std::vector<double> parse_double_list(const std::string& value,
                                      const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw std::invalid_argument("config: bad number in '" + key + "'");
    }
  }
  if (out.empty())
    throw std::invalid_argument("config: empty list for '" + key + "'");
  return out;
}

std::vector<int> parse_int_list(const std::string& value,
                                const std::string& key) {
  std::vector<int> out;
  for (double v : parse_double_list(value, key)) {
    const int i = static_cast<int>(std::llround(v));
    if (static_cast<double>(i) != v)
      throw std::invalid_argument("config: '" + key + "' needs integers");
    out.push_back(i);
  }
  return out;
}

int parse_int(const std::string& value, const std::string& key) {
  const auto list = parse_int_list(value, key);
  if (list.size() != 1)
    throw std::invalid_argument("config: '" + key + "' needs one integer");
  return list.front();
}

double parse_double_value(const std::string& value, const std::string& key) {
  const auto list = parse_double_list(value, key);
  if (list.size() != 1)
    throw std::invalid_argument("config: '" + key + "' needs one number");
  return list.front();
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += io::format_double(values[i]);
  }
  return out;
}

std::string join_ints(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

double closest_to(const std::vector<double>& grid, double target) {
  double best = grid.front();
  for (double v : grid) {
    if (std::abs(v - target) < std::abs(best - target)) best = v;
  }
  return best;
}

}  // namespace

std::string method_name(Method method) {
  return kMethodNames[static_cast<int>(method)];
}

std::optional<Method> parse_method(const std::string& name) {
  for (int i = 0; i < 7; ++i) {
    if (name == kMethodNames[i]) return static_cast<Method>(i);
  }
  return std::nullopt;
}

bool is_oracle(Method method) {
  return method == Method::kClassicOracle || method == Method::kSoberOracle ||
         method == Method::kHadesOracle;
}

bool is_sparse(Method method) { return method != Method::kClassicOracle; }

int ExperimentPlan::greedy_iterations_effective() const {
  if (greedy_iterations > 0) return std::min(greedy_iterations, m_avail);
  const int by_symbol =
      static_cast<int>(std::ceil(static_cast<double>(n) /
                                 (2.0 * static_cast<double>(model.n_sym))));
  return std::min(std::max(1, by_symbol), m_avail);
}

SensingConfig ExperimentPlan::sensing_config(double c_r) const {
  SensingConfig cfg;
  cfg.n = n;
  cfg.m_avail = m_avail;
  cfg.delays = delays;
  cfg.c_r = c_r;
  return cfg;
}

void ExperimentPlan::validate() const {
  if (schema_version != 1)
    throw std::invalid_argument("plan: unsupported schema_version");
  if (model.n_sym < 1) throw std::invalid_argument("plan: n_sym must be >= 1");
  if (model.sigma_a2 <= 0.0)
    throw std::invalid_argument("plan: sigma_a2 must be positive");
  if (n < 2 || n % model.n_sym != 0)
    throw std::invalid_argument("plan: n must be a positive multiple of n_sym");
  if (m_avail < model.n_sym)
    throw std::invalid_argument("plan: m must be at least n_sym");
  if (trials < 1) throw std::invalid_argument("plan: trials must be >= 1");
  if (methods.empty()) throw std::invalid_argument("plan: no methods");
  if (snr_grid.empty() || pfa_grid.empty() || c_r_grid.empty())
    throw std::invalid_argument("plan: grids must not be empty");
  for (double pfa : pfa_grid) {
    if (!(pfa > 0.0 && pfa < 1.0))
      throw std::invalid_argument("plan: pfa values must lie in (0, 1)");
  }
  for (double c_r : c_r_grid) sensing_config(c_r).validate();
  for (int d : delays) {
    if (d > model.n_sym)
      throw std::invalid_argument(
          "plan: delays must not exceed n_sym (the asymptotic reference "
          "vanishes beyond the symbol length)");
  }
  if (window_length < 1 || window_length % 2 == 0)
    throw std::invalid_argument("plan: window_length must be odd and >= 1");
  if (kaiser_alpha < 0.0)
    throw std::invalid_argument("plan: kaiser_alpha must be nonnegative");
  if (hades_iterations < 1)
    throw std::invalid_argument("plan: hades_iterations must be >= 1");
  if (greedy_iterations < 0)
    throw std::invalid_argument("plan: greedy_iterations must be >= 0");
  if (h0_noise_power <= 0.0)
    throw std::invalid_argument("plan: h0_noise_power must be positive");
  if (window_length >= m_avail)
    throw std::invalid_argument(
        "plan: window_length must be below the classic CA size m");
}

std::string ExperimentPlan::canonical_text() const {
  std::string methods_text;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (i) methods_text += ',';
    methods_text += method_name(methods[i]);
  }
  std::string out;
  out += "schema_version = " + std::to_string(schema_version) + "\n";
  out += "modulation = bpsk\n";
  out += "n_sym = " + std::to_string(model.n_sym) + "\n";
  out += "d_phi = " + io::format_double(model.d_phi) + "\n";
  out += "sigma_a2 = " + io::format_double(model.sigma_a2) + "\n";
  out += "n = " + std::to_string(n) + "\n";
  out += "m = " + std::to_string(m_avail) + "\n";
  out += "delays = " + join_ints(delays) + "\n";
  out += "snr_db = " + join_doubles(snr_grid) + "\n";
  out += "pfa = " + join_doubles(pfa_grid) + "\n";
  out += "c_r = " + join_doubles(c_r_grid) + "\n";
  out += "methods = " + methods_text + "\n";
  out += "trials = " + std::to_string(trials) + "\n";
  out += "seed = " + std::to_string(seed) + "\n";
  out += "window_length = " + std::to_string(window_length) + "\n";
  out += "kaiser_alpha = " + io::format_double(kaiser_alpha) + "\n";
  out += "greedy_iterations = " + std::to_string(greedy_iterations) + "\n";
  out += "hades_iterations = " + std::to_string(hades_iterations) + "\n";
  out += "h0_noise_power = " + io::format_double(h0_noise_power) + "\n";
  return out;
}

ExperimentPlan ExperimentPlan::from_config_text(const std::string& text) {
  ExperimentPlan plan;
  bool saw_schema = false;
  bool saw_d_phi = false;
  int n_sym = plan.model.n_sym;
  double d_phi = 0.0;
  for (const auto& [key, value] : io::parse_key_values(text)) {
    if (key == "schema_version") {
      plan.schema_version = parse_int(value, key);
      saw_schema = true;
    } else if (key == "modulation") {
      if (value != "bpsk")
        throw std::invalid_argument("config: unsupported modulation '" +
                                    value + "'");
    } else if (key == "n_sym") {
      n_sym = parse_int(value, key);
    } else if (key == "d_phi") {
      d_phi = parse_double_value(value, key);
      saw_d_phi = true;
    } else if (key == "sigma_a2") {
      plan.model.sigma_a2 = parse_double_value(value, key);
    } else if (key == "n") {
      plan.n = parse_int(value, key);
    } else if (key == "m") {
      plan.m_avail = parse_int(value, key);
    } else if (key == "delays") {
      plan.delays = parse_int_list(value, key);
    } else if (key == "snr_db") {
      plan.snr_grid = parse_double_list(value, key);
    } else if (key == "pfa") {
      plan.pfa_grid = parse_double_list(value, key);
    } else if (key == "c_r") {
      plan.c_r_grid = parse_double_list(value, key);
    } else if (key == "methods") {
      plan.methods.clear();
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const auto method = parse_method(item);
        if (!method)
          throw std::invalid_argument("config: unknown method '" + item + "'");
        plan.methods.push_back(*method);
      }
      if (plan.methods.empty())
        throw std::invalid_argument("config: empty method list");
    } else if (key == "trials") {
      plan.trials = parse_int(value, key);
    } else if (key == "seed") {
      plan.seed = static_cast<std::uint64_t>(std::stoull(value));
    } else if (key == "window_length") {
      plan.window_length = parse_int(value, key);
    } else if (key == "kaiser_alpha") {
      plan.kaiser_alpha = parse_double_value(value, key);
    } else if (key == "greedy_iterations") {
      plan.greedy_iterations = parse_int(value, key);
    } else if (key == "hades_iterations") {
      plan.hades_iterations = parse_int(value, key);
    } else if (key == "h0_noise_power") {
      plan.h0_noise_power = parse_double_value(value, key);
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  if (!saw_schema)
    throw std::invalid_argument("config: schema_version is required");
  plan.model = SignalModel::bpsk(n_sym);
  if (saw_d_phi) plan.model.d_phi = d_phi;
  plan.validate();
  return plan;
}

ExperimentPlan ExperimentPlan::fast_profile() {
  ExperimentPlan plan;
  plan.n = 1000;
  plan.m_avail = 250;
  plan.snr_grid = {-4.0, 0.0, 4.0};
  plan.c_r_grid = {0.10, 0.15, 0.25};
  plan.trials = 200;
  plan.validate();
  return plan;
}

struct SweepContext {
  std::vector<StructureDictionary> sym_dicts;
  std::vector<StructureDictionary> asy_dicts;
  CaMatrix reference;
  std::vector<int> spike_rows;
  std::vector<int> oracle_support;
  CaMatrix classic_reference;
  std::vector<int> classic_spike_rows;
  bool classic_reference_valid = false;
  int j_true = 0;
  int classic_k_test = 0;
  SpectralWindow window_full{{1.0}};
};

namespace {

std::vector<int> nonzero_rows(const CaMatrix& ca) {
  std::vector<int> rows;
  for (int k = 1; k < ca.n; ++k) {
    for (int l = 0; l < ca.n_delays(); ++l) {
      if (std::abs(ca.at(k, l)) > 1e-12) {
        rows.push_back(k);
        break;
      }
    }
  }
  return rows;
}

std::unique_ptr<SweepContext> build_context(const ExperimentPlan& plan) {
  auto ctx = std::make_unique<SweepContext>();
  ctx->j_true = plan.n / plan.model.n_sym;
  ctx->classic_k_test = static_cast<int>(
      std::llround(static_cast<double>(plan.m_avail) /
                   static_cast<double>(plan.model.n_sym)));
  ctx->reference = asymptotic_ca_matrix(plan.model, plan.n, plan.delays);
  ctx->spike_rows = nonzero_rows(ctx->reference);
  ctx->oracle_support.push_back(0);
  ctx->oracle_support.insert(ctx->oracle_support.end(),
                             ctx->spike_rows.begin(), ctx->spike_rows.end());
  if (plan.m_avail % plan.model.n_sym == 0) {
    ctx->classic_reference =
        asymptotic_ca_matrix(plan.model, plan.m_avail, plan.delays);
    ctx->classic_spike_rows = nonzero_rows(ctx->classic_reference);
    ctx->classic_reference_valid = true;
  }
  const StructureDictionary sym = build_symmetry_dictionary(plan.n);
  for (std::size_t l = 0; l < plan.delays.size(); ++l) {
    ctx->sym_dicts.push_back(sym);
    ctx->asy_dicts.push_back(build_asymptotic_dictionary(
        plan.n, plan.delays[l], plan.model.sigma_a2));
  }
  ctx->window_full = SpectralWindow::kaiser(plan.window_length,
                                            plan.kaiser_alpha);
  return ctx;
}

double matrix_mse(const CaMatrix& estimate, const CaMatrix& reference) {
  double acc = 0.0;
  for (int k = 0; k < reference.n; ++k) {
    for (int l = 0; l < reference.n_delays(); ++l) {
      acc += std::norm(estimate.at(k, l) - reference.at(k, l));
    }
  }
  return acc / (static_cast<double>(reference.n) *
                static_cast<double>(reference.n_delays()));
}

double spike_mse(const CaMatrix& estimate, const CaMatrix& reference,
                 const std::vector<int>& spike_rows) {
  if (spike_rows.empty()) return 0.0;
  double acc = 0.0;
  for (int k : spike_rows) {
    for (int l = 0; l < reference.n_delays(); ++l) {
      acc += std::norm(estimate.at(k, l) - reference.at(k, l));
    }
  }
  return acc / (static_cast<double>(spike_rows.size()) *
                static_cast<double>(reference.n_delays()));
}

/// Largest legal smoothing window for the consecutive-prefix CA: the
/// configured length, shrunk (odd) to fit below the prefix size.
SpectralWindow small_block_window(const ExperimentPlan& plan,
                                  const SensingConfig& cfg) {
  int limit = cfg.consecutive_count() - 1;
  if (limit % 2 == 0) --limit;
  const int length = std::min(plan.window_length, limit);
  if (length < 1)
    throw std::invalid_argument(
        "sparse TDT: consecutive prefix too small for any window");
  return SpectralWindow::kaiser(length, plan.kaiser_alpha);
}

}  // namespace

TrialOutcome run_trial(const ExperimentPlan& plan, const SweepContext& ctx,
                       Method method, const Scenario& scenario, int trial) {
  TrialOutcome outcome;
  // Infinite SNR (noise-free runs) is clamped for the stream key only.
  const double snr_key = std::clamp(scenario.snr_db, -1e6, 1e6);
  const std::uint64_t grid_key =
      mix_seed(scenario.h1 ? 1 : 2,
               scenario.h1
                   ? static_cast<std::uint64_t>(
                         std::llround(snr_key * 1000.0) + (1LL << 32))
                   : 0,
               is_sparse(method)
                   ? static_cast<std::uint64_t>(
                         std::llround(scenario.c_r * 10000.0))
                   : 0);
  const std::uint64_t base =
      mix_seed(plan.seed, static_cast<std::uint64_t>(method), grid_key,
               static_cast<std::uint64_t>(trial));
  try {
    SampleRecord record;
    if (scenario.h1) {
      record = generate_signal(plan.model, static_cast<std::size_t>(plan.n),
                               mix_seed(base, 101));
      record = add_awgn(record, scenario.snr_db, mix_seed(base, 102));
    } else {
      record = generate_h0(static_cast<std::size_t>(plan.n),
                           plan.h0_noise_power, mix_seed(base, 102));
    }

    if (method == Method::kClassicOracle) {
      const std::span<const cplx> block(record.samples.data(),
                                        static_cast<std::size_t>(plan.m_avail));
      const CaMatrix ca = classical_ca(block, plan.delays);
      const TestResult result =
          tdt_statistic(ca, ctx.classic_k_test, ctx.window_full);
      outcome.statistic = result.statistic;
      outcome.dof = result.dof;
      outcome.k_recovered = ctx.classic_k_test;
      outcome.abs_index_error = 0.0;
      outcome.full_support_match = true;
      if (ctx.classic_reference_valid && scenario.h1) {
        outcome.mse_overall = matrix_mse(ca, ctx.classic_reference);
        outcome.mse_spikes =
            spike_mse(ca, ctx.classic_reference, ctx.classic_spike_rows);
      }
      return outcome;
    }

    const SensingConfig cfg = plan.sensing_config(scenario.c_r);
    const DelayProductMatrix products =
        delay_product_matrix(record.samples, plan.delays);
    const SamplingMask mask = build_mask(cfg, mix_seed(base, 103));
    const DelayProductMatrix pu = undersample(products, mask);
    const MeasurementOperator op(mask, plan.delays);

    RecoveryState state;
    switch (method) {
      case Method::kOmp:
        state = omp_estimate(pu, op, plan.greedy_iterations_effective());
        break;
      case Method::kSober:
        state = somp_estimate(pu, op, plan.greedy_iterations_effective());
        break;
      case Method::kHadesSym:
        state = hades_estimate(pu, op, plan.hades_iterations, ctx.sym_dicts);
        break;
      case Method::kHadesAsy:
        state = hades_estimate(pu, op, plan.hades_iterations, ctx.asy_dicts);
        break;
      case Method::kSoberOracle:
      case Method::kHadesOracle:
        state = oracle_estimate(pu, op, ctx.oracle_support);
        break;
      default:
        throw std::logic_error("run_trial: unhandled method");
    }

    const SpectralWindow window = small_block_window(plan, cfg);
    const TestResult result =
        sparse_tdt_statistic(pu, mask, state, cfg, window);
    outcome.statistic = result.statistic;
    outcome.dof = result.dof;

    const std::optional<int> recovered =
        is_oracle(method) ? std::optional<int>(ctx.j_true)
                          : primary_cycle_frequency(state, plan.n);
    if (recovered) {
      outcome.k_recovered = *recovered;
      outcome.abs_index_error =
          std::abs(static_cast<double>(*recovered - ctx.j_true));
    } else {
      outcome.k_recovered = -1;
      outcome.abs_index_error = static_cast<double>(plan.n) / 2.0;
    }

    std::set<int> non_dc(state.support.begin(), state.support.end());
    non_dc.erase(0);
    outcome.full_support_match =
        non_dc == std::set<int>(ctx.spike_rows.begin(), ctx.spike_rows.end());

    if (scenario.h1) {
      outcome.mse_overall = matrix_mse(state.estimate, ctx.reference);
      outcome.mse_spikes =
          spike_mse(state.estimate, ctx.reference, ctx.spike_rows);
    }
  } catch (const std::exception& e) {
    outcome.ok = false;
    outcome.error = e.what();
    outcome.statistic = 0.0;
    outcome.k_recovered = -1;
    outcome.abs_index_error = static_cast<double>(plan.n) / 2.0;
    outcome.full_support_match = false;
  }
  return outcome;
}

int worker_count() {
  if (const char* env = std::getenv("CYCLOSENSE_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_for(int count, const std::function<void(int)>& body) {
  const int workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

Sweep::Sweep(const ExperimentPlan& plan) : plan_(plan) {
  plan_.validate();
  ctx_ = build_context(plan_);
}

Sweep::~Sweep() = default;

CellStats Sweep::run_cell(Method method, const Scenario& scenario) const {
  std::string key = method_name(method);
  key += scenario.h1 ? "|h1|" : "|h0|";
  key += io::format_double(scenario.snr_db) + "|" +
         io::format_double(scenario.c_r);
  const auto cached = cache_.find({key, ""});
  if (cached != cache_.end()) return cached->second;

  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(plan_.trials));
  parallel_for(plan_.trials, [&](int i) {
    outcomes[static_cast<std::size_t>(i)] =
        run_trial(plan_, *ctx_, method, scenario, i);
  });

  CellStats stats;
  stats.trials = plan_.trials;
  stats.detections.assign(plan_.pfa_grid.size(), 0);
  const int dof = 2 * static_cast<int>(plan_.delays.size());
  std::vector<double> thresholds;
  thresholds.reserve(plan_.pfa_grid.size());
  for (double pfa : plan_.pfa_grid)
    thresholds.push_back(chi2_threshold(pfa, dof));

  int hit = 0;
  int full = 0;
  double index_error = 0.0;
  double mse_sum = 0.0;
  double spike_sum = 0.0;
  int mse_count = 0;
  for (const auto& outcome : outcomes) {
    if (!outcome.ok) ++stats.errors;
    for (std::size_t p = 0; p < thresholds.size(); ++p) {
      if (outcome.ok && outcome.statistic > thresholds[p])
        ++stats.detections[p];
    }
    if (outcome.k_recovered == ctx_->j_true ||
        (method == Method::kClassicOracle &&
         outcome.k_recovered == ctx_->classic_k_test)) {
      ++hit;
    }
    if (outcome.full_support_match) ++full;
    index_error += outcome.abs_index_error;
    if (std::isfinite(outcome.mse_overall)) {
      mse_sum += outcome.mse_overall;
      spike_sum += outcome.mse_spikes;
      ++mse_count;
    }
  }
  stats.hitrate = static_cast<double>(hit) / plan_.trials;
  stats.hitrate_full = static_cast<double>(full) / plan_.trials;
  stats.mean_abs_index_error = index_error / plan_.trials;
  if (mse_count > 0) {
    stats.mse_overall = mse_sum / mse_count;
    stats.mse_spikes = spike_sum / mse_count;
  } else {
    stats.mse_overall = std::numeric_limits<double>::quiet_NaN();
    stats.mse_spikes = std::numeric_limits<double>::quiet_NaN();
  }
  cache_.emplace(std::make_pair(key, std::string()), stats);
  return stats;
}

namespace {

Scenario h1_scenario(const ExperimentPlan& plan, Method method, double snr,
                     double c_r) {
  Scenario s;
  s.h1 = true;
  s.snr_db = snr;
  s.c_r = is_sparse(method) ? c_r : plan.c_r_grid.front();
  return s;
}

Scenario h0_scenario(const ExperimentPlan& plan, Method method, double c_r) {
  Scenario s;
  s.h1 = false;
  s.snr_db = 0.0;
  s.c_r = is_sparse(method) ? c_r : plan.c_r_grid.front();
  return s;
}

}  // namespace

std::vector<MetricRecord> Sweep::detection_rate_records() const {
  std::vector<MetricRecord> records;
  for (Method method : plan_.methods) {
    for (double snr : plan_.snr_grid) {
      for (double c_r : plan_.c_r_grid) {
        const CellStats stats =
            run_cell(method, h1_scenario(plan_, method, snr, c_r));
        for (std::size_t p = 0; p < plan_.pfa_grid.size(); ++p) {
          MetricRecord rec;
          rec.method = method_name(method);
          rec.snr_db = snr;
          rec.c_r = c_r;
          rec.pfa_nominal = plan_.pfa_grid[p];
          rec.pd = static_cast<double>(stats.detections[p]) / stats.trials;
          rec.trials = stats.trials;
          records.push_back(std::move(rec));
        }
      }
    }
  }
  return records;
}

std::vector<MetricRecord> Sweep::pfa_calibration_records() const {
  std::vector<MetricRecord> records;
  for (Method method : plan_.methods) {
    for (double c_r : plan_.c_r_grid) {
      const CellStats stats = run_cell(method, h0_scenario(plan_, method, c_r));
      for (std::size_t p = 0; p < plan_.pfa_grid.size(); ++p) {
        MetricRecord rec;
        rec.method = method_name(method);
        rec.c_r = c_r;
        rec.pfa_nominal = plan_.pfa_grid[p];
        rec.pfa_empirical =
            static_cast<double>(stats.detections[p]) / stats.trials;
        rec.trials = stats.trials;
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

std::vector<MetricRecord> Sweep::support_metric_records() const {
  std::vector<MetricRecord> records;
  const double c_r_ref = closest_to(plan_.c_r_grid, 0.15);
  for (Method method : plan_.methods) {
    for (double snr : plan_.snr_grid) {
      const CellStats stats =
          run_cell(method, h1_scenario(plan_, method, snr, c_r_ref));
      MetricRecord rec;
      rec.method = method_name(method);
      rec.snr_db = snr;
      rec.c_r = c_r_ref;
      rec.hitrate = stats.hitrate;
      rec.hitrate_full_support = stats.hitrate_full;
      rec.mean_abs_index_error = stats.mean_abs_index_error;
      rec.trials = stats.trials;
      records.push_back(std::move(rec));
    }
  }
  return records;
}

std::vector<MetricRecord> Sweep::mse_records() const {
  std::vector<MetricRecord> records;
  const double c_r_ref = closest_to(plan_.c_r_grid, 0.15);
  for (Method method : plan_.methods) {
    for (double snr : plan_.snr_grid) {
      const CellStats stats =
          run_cell(method, h1_scenario(plan_, method, snr, c_r_ref));
      MetricRecord rec;
      rec.method = method_name(method);
      rec.snr_db = snr;
      rec.c_r = c_r_ref;
      rec.mse_overall = stats.mse_overall;
      rec.mse_spikes = stats.mse_spikes;
      rec.trials = stats.trials;
      records.push_back(std::move(rec));
    }
  }
  return records;
}

namespace {

const char* kCsvHeader =
    "method,snr_db,pfa_nominal,c_r,pd,pfa_empirical,hitrate,"
    "hitrate_full_support,mean_abs_index_error,mse_overall,mse_spikes,trials";

std::string csv_field(double value) {
  return std::isfinite(value) ? io::format_double(value) : std::string();
}

std::string record_row(const MetricRecord& rec) {
  std::string row = rec.method;
  row += ',' + csv_field(rec.snr_db);
  row += ',' + csv_field(rec.pfa_nominal);
  row += ',' + csv_field(rec.c_r);
  row += ',' + csv_field(rec.pd);
  row += ',' + csv_field(rec.pfa_empirical);
  row += ',' + csv_field(rec.hitrate);
  row += ',' + csv_field(rec.hitrate_full_support);
  row += ',' + csv_field(rec.mean_abs_index_error);
  row += ',' + csv_field(rec.mse_overall);
  row += ',' + csv_field(rec.mse_spikes);
  row += ',' + std::to_string(rec.trials);
  return row;
}

void write_records(const std::filesystem::path& path,
                   const std::vector<MetricRecord>& records) {
  std::string text = kCsvHeader;
  text += '\n';
  for (const auto& rec : records) {
    text += record_row(rec);
    text += '\n';
  }
  io::write_text_file(path, text);
}

}  // namespace

std::vector<std::string> Sweep::write_outputs(
    const std::filesystem::path& out_dir) const {
  std::filesystem::create_directories(out_dir);

  const std::vector<MetricRecord> cube = detection_rate_records();
  const double fig1_snr = closest_to(plan_.snr_grid, 0.0);

  std::vector<MetricRecord> fig1;
  for (const auto& rec : cube) {
    if (rec.snr_db == fig1_snr) fig1.push_back(rec);
  }

  // Figure 2: best detection rate over the c_r grid per (method, snr, pfa).
  std::vector<MetricRecord> fig2;
  for (Method method : plan_.methods) {
    for (double snr : plan_.snr_grid) {
      for (double pfa : plan_.pfa_grid) {
        const MetricRecord* best = nullptr;
        for (const auto& rec : cube) {
          if (rec.method != method_name(method) || rec.snr_db != snr ||
              rec.pfa_nominal != pfa)
            continue;
          if (!best || rec.pd > best->pd) best = &rec;
        }
        if (best) fig2.push_back(*best);
      }
    }
  }

  const std::vector<MetricRecord> fig3 = pfa_calibration_records();
  const std::vector<MetricRecord> fig4 = support_metric_records();
  const std::vector<MetricRecord> fig5 = mse_records();

  const std::vector<std::pair<std::string, const std::vector<MetricRecord>*>>
      files = {{"fig1_detection_vs_cr.csv", &fig1},
               {"fig2_detection_vs_snr.csv", &fig2},
               {"fig3_pfa_calibration.csv", &fig3},
               {"fig4_support_metrics.csv", &fig4},
               {"fig5_mse.csv", &fig5}};
  std::vector<std::string> names;
  nlohmann::json manifest;
  manifest["schema_version"] = plan_.schema_version;
  manifest["config"] = plan_.canonical_text();
  manifest["config_hash"] = io::fnv1a_hex(plan_.canonical_text());
  manifest["seed"] = plan_.seed;
  manifest["version"] = kVersionString;
  manifest["columns"] = kCsvHeader;
  nlohmann::json file_list = nlohmann::json::array();
  for (const auto& [name, records] : files) {
    write_records(out_dir / name, *records);
    names.push_back(name);
    nlohmann::json entry;
    entry["name"] = name;
    entry["rows"] = records->size();
    file_list.push_back(entry);
  }
  manifest["files"] = file_list;
  io::write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  names.push_back("manifest.json");
  return names;
}

}  // namespace cyclosense

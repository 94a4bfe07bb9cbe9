// Command-line harness for blind compressive cyclostationary spectrum
// sensing: signal simulation, single-shot detection, Monte-Carlo sweeps,
// and a numerical self-verification suite.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <string>

#include <CLI11.hpp>

#include "cyclosense/detector.hpp"
#include "cyclosense/dictionary.hpp"
#include "cyclosense/harness.hpp"
#include "cyclosense/io.hpp"
#include "cyclosense/recovery.hpp"
#include "cyclosense/rng.hpp"
#include "cyclosense/selfcheck.hpp"
#include "cyclosense/version.hpp"

namespace cs = cyclosense;

namespace {

struct SimulateOptions {
  int n = 4000;
  int n_sym = 8;
  double sigma_a2 = 1.0;
  double snr_db = std::numeric_limits<double>::infinity();
  bool h0 = false;
  double noise_power = 1.0;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "bin";
};

int run_simulate(const SimulateOptions& opt) {
  cs::SampleRecord record;
  if (opt.h0) {
    record = cs::generate_h0(static_cast<std::size_t>(opt.n), opt.noise_power,
                             opt.seed);
  } else {
    const cs::SignalModel model = cs::SignalModel::bpsk(opt.n_sym);
    record = cs::generate_signal(model, static_cast<std::size_t>(opt.n),
                                 cs::mix_seed(opt.seed, 1));
    record = cs::add_awgn(record, opt.snr_db, cs::mix_seed(opt.seed, 2));
  }
  if (opt.format == "csv") {
    cs::io::write_iq_csv(opt.out, record);
  } else {
    cs::io::write_iq_binary(opt.out, record);
  }
  std::cout << "wrote " << record.size() << " samples to " << opt.out << "\n";
  return 0;
}

struct DetectOptions {
  std::string in;
  std::string method = "hades-sym";
  double pfa = 0.05;
  int m = 0;  // 0: n / 4
  double c_r = 0.15;
  std::vector<int> delays = {1, 2, 3, 4};
  int k_test = 0;  // oracle methods
  std::uint64_t seed = 1;
  int window_length = 201;
  double kaiser_alpha = 10.0;
  int n_iter = 0;
  int hades_iter = 3;
  int n_sym = 8;  // oracle support shape
};

cs::SampleRecord load_record(const std::string& path) {
  if (path.size() > 4 && path.substr(path.size() - 4) == ".csv")
    return cs::io::read_iq_csv(path);
  return cs::io::read_iq_binary(path);
}

int run_detect(const DetectOptions& opt) {
  const cs::SampleRecord record = load_record(opt.in);
  const int n = static_cast<int>(record.size());
  const auto method = cs::parse_method(opt.method);
  if (!method) throw CLI::ValidationError("unknown method " + opt.method);

  cs::TestResult result;
  if (*method == cs::Method::kClassicOracle) {
    if (opt.k_test < 1)
      throw CLI::ValidationError("classic-oracle needs --k-test");
    const auto window =
        cs::SpectralWindow::kaiser(opt.window_length, opt.kaiser_alpha);
    const cs::CaMatrix ca = cs::classical_ca(record.samples, opt.delays);
    result = cs::tdt_statistic(ca, opt.k_test, window);
  } else {
    cs::SensingConfig cfg;
    cfg.n = n;
    cfg.m_avail = opt.m > 0 ? opt.m : n / 4;
    cfg.delays = opt.delays;
    cfg.c_r = opt.c_r;
    cfg.validate();
    const cs::SamplingMask mask = cs::build_mask(cfg, opt.seed);
    const cs::DelayProductMatrix pu = cs::undersample(
        cs::delay_product_matrix(record.samples, cfg.delays), mask);
    const cs::MeasurementOperator op(mask, cfg.delays);

    const int greedy_iter =
        opt.n_iter > 0
            ? opt.n_iter
            : std::min(cfg.m_avail,
                       (n + 2 * opt.n_sym - 1) / (2 * opt.n_sym));
    cs::RecoveryState state;
    switch (*method) {
      case cs::Method::kOmp:
        state = cs::omp_estimate(pu, op, greedy_iter);
        break;
      case cs::Method::kSober:
        state = cs::somp_estimate(pu, op, greedy_iter);
        break;
      case cs::Method::kHadesSym: {
        std::vector<cs::StructureDictionary> dicts(
            cfg.delays.size(), cs::build_symmetry_dictionary(n));
        state = cs::hades_estimate(pu, op, opt.hades_iter, dicts);
        break;
      }
      case cs::Method::kHadesAsy: {
        std::vector<cs::StructureDictionary> dicts;
        for (int d : cfg.delays)
          dicts.push_back(cs::build_asymptotic_dictionary(n, d, 1.0));
        state = cs::hades_estimate(pu, op, opt.hades_iter, dicts);
        break;
      }
      case cs::Method::kSoberOracle:
      case cs::Method::kHadesOracle: {
        if (opt.k_test < 1)
          throw CLI::ValidationError("oracle methods need --k-test");
        std::vector<int> support = {0};
        for (int k = opt.k_test; k < n; k += opt.k_test) support.push_back(k);
        state = cs::oracle_estimate(pu, op, support);
        break;
      }
      default:
        throw CLI::ValidationError("unhandled method");
    }

    int limit = cfg.consecutive_count() - 1;
    if (limit % 2 == 0) --limit;
    const int window_length = std::min(opt.window_length, limit);
    if (window_length < 1)
      throw CLI::ValidationError("consecutive prefix too small for a window");
    const auto window =
        cs::SpectralWindow::kaiser(window_length, opt.kaiser_alpha);
    result = cs::sparse_tdt_statistic(pu, mask, state, cfg, window);
  }
  result = cs::decide(result, opt.pfa);
  std::cout << cs::io::test_result_to_json(result) << "\n";
  return 0;
}

struct SweepOptions {
  std::string config;
  std::string out_dir = "sweep-out";
  int trials = 0;
  std::uint64_t seed = 0;
  bool has_seed = false;
  bool fast = false;
};

int run_sweep(const SweepOptions& opt) {
  cs::ExperimentPlan plan;
  if (!opt.config.empty()) {
    plan = cs::ExperimentPlan::from_config_text(
        cs::io::read_text_file(opt.config));
  } else if (opt.fast) {
    plan = cs::ExperimentPlan::fast_profile();
  } else {
    throw CLI::ValidationError("sweep needs --config or --fast");
  }
  if (opt.fast && !opt.config.empty()) {
    plan.n = 1000;
    plan.m_avail = 250;
  }
  if (opt.trials > 0) plan.trials = opt.trials;
  if (opt.has_seed) plan.seed = opt.seed;
  plan.validate();

  const cs::Sweep sweep(plan);
  const auto files = sweep.write_outputs(opt.out_dir);
  for (const auto& name : files) {
    std::cout << opt.out_dir << "/" << name << "\n";
  }
  return 0;
}

int run_verify(std::uint64_t seed) {
  const auto results = cs::selfcheck::run_selfchecks(seed);
  bool all_pass = true;
  for (const auto& r : results) {
    std::printf("%-34s %s  (value %.3e, bound %.3e)\n", r.name.c_str(),
                r.pass ? "PASS" : "FAIL", r.value, r.bound);
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blind compressive cyclostationary spectrum sensing harness"};
  app.set_version_flag("--version", cs::kVersionString);
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Emit a signal file");
  simulate->add_option("--n", sim.n, "Block size");
  simulate->add_option("--n-sym", sim.n_sym, "Discrete symbol length");
  simulate->add_option("--sigma-a2", sim.sigma_a2, "Average symbol power");
  simulate->add_option("--snr", sim.snr_db, "SNR in dB (default: no noise)");
  simulate->add_flag("--h0", sim.h0, "Emit pure noise instead of a signal");
  simulate->add_option("--power", sim.noise_power, "H0 noise power");
  simulate->add_option("--seed", sim.seed, "PRNG seed");
  simulate->add_option("--out", sim.out, "Output path")->required();
  simulate->add_option("--format", sim.format, "bin or csv")
      ->check(CLI::IsMember({"bin", "csv"}));

  DetectOptions det;
  auto* detect =
      app.add_subcommand("detect", "Single-shot pipeline on an IQ file");
  detect->add_option("--in", det.in, "IQ input (.bin with sidecar, or .csv)")
      ->required();
  detect->add_option("--method", det.method, "Detection method");
  detect->add_option("--pfa", det.pfa, "Nominal false alarm rate");
  detect->add_option("--m", det.m, "Known delay-product elements (0: n/4)");
  detect->add_option("--c-r", det.c_r, "Consecutive sample ratio");
  detect->add_option("--delays", det.delays, "Discrete delays");
  detect->add_option("--k-test", det.k_test, "Cycle frequency (oracle)");
  detect->add_option("--seed", det.seed, "Mask PRNG seed");
  detect->add_option("--window-length", det.window_length, "Kaiser length");
  detect->add_option("--kaiser-alpha", det.kaiser_alpha, "Kaiser parameter");
  detect->add_option("--n-iter", det.n_iter, "Greedy iterations (0: auto)");
  detect->add_option("--hades-iter", det.hades_iter, "HADES iterations");
  detect->add_option("--n-sym", det.n_sym, "Symbol length for defaults");

  SweepOptions swp;
  auto* sweep = app.add_subcommand("sweep", "Run a Monte-Carlo experiment");
  sweep->add_option("--config", swp.config, "Plan config file");
  sweep->add_option("--out-dir", swp.out_dir, "Output directory");
  sweep->add_option("--trials", swp.trials, "Override trial count");
  auto* seed_opt = sweep->add_option("--seed", swp.seed, "Override master seed");
  sweep->add_flag("--fast", swp.fast, "CI profile (n = 1000, m = 250)");

  std::uint64_t verify_seed = 7;
  auto* verify =
      app.add_subcommand("verify", "Run the numerical oracle cross-checks");
  verify->add_option("--seed", verify_seed, "PRNG seed for random checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (detect->parsed()) return run_detect(det);
    if (sweep->parsed()) {
      swp.has_seed = seed_opt->count() > 0;
      return run_sweep(swp);
    }
    if (verify->parsed()) return run_verify(verify_seed);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

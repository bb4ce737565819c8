// ar-bench: generate AR series, run one predictor, sweep the benchmark grid,
// summarize result tables. Talks to the library only through arbench.h.
//
// Exit codes: 0 success, 2 usage/config/data error, 3 numeric divergence.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "arbench/arbench.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitDiverged = 3;

constexpr const char* kDefaultCoeffs = "0.3,-0.4,0.4,-0.5,0.6";

struct SeriesDeleter {
  void operator()(arb_series* s) const { arb_series_free(s); }
};
struct ConfigDeleter {
  void operator()(arb_config* c) const { arb_config_free(c); }
};
struct SweepDeleter {
  void operator()(arb_sweep* s) const { arb_sweep_free(s); }
};
struct StringDeleter {
  void operator()(char* s) const { arb_string_free(s); }
};
using SeriesPtr = std::unique_ptr<arb_series, SeriesDeleter>;
using ConfigPtr = std::unique_ptr<arb_config, ConfigDeleter>;
using SweepPtr = std::unique_ptr<arb_sweep, SweepDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

/// Thrown to unwind to main with an exit code; message goes to stderr.
struct Exit {
  int code;
  std::string message;
};

int exit_code_for(arb_status status) {
  return status == ARB_ERR_DIVERGED ? kExitDiverged : kExitUsage;
}

void check(arb_status status, const std::string& context) {
  if (status == ARB_OK) return;
  throw Exit{exit_code_for(status),
             context + ": " + arb_status_name(status) + ": " + arb_last_error()};
}

std::vector<double> parse_coeffs(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Exit{kExitUsage, "invalid coefficient '" + item + "'"};
    }
  }
  if (out.empty()) throw Exit{kExitUsage, "empty coefficient list"};
  return out;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t seed_or_env(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("AR_BENCH_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Exit{kExitUsage, std::string("AR_BENCH_SEED is not an unsigned integer: ") + env};
    }
  }
  return 0;
}

struct GenerationFlags {
  std::size_t length = 2000;
  std::string coeffs = kDefaultCoeffs;
  double sigma = 0.3;
  double miss = 0.0;
};

void add_generation_flags(CLI::App* cmd, GenerationFlags& g) {
  cmd->add_option("--length", g.length, "Series length")->capture_default_str();
  cmd->add_option("--coeffs", g.coeffs, "Comma-separated AR coefficients")->capture_default_str();
  cmd->add_option("--sigma", g.sigma, "Noise standard deviation")->capture_default_str();
  cmd->add_option("--miss", g.miss, "Missing rate in [0, 1]")->capture_default_str();
}

struct Generated {
  SeriesPtr truth;
  SeriesPtr observed;
};

Generated generate(const GenerationFlags& g, std::size_t protected_prefix, std::uint64_t seed) {
  const auto coeffs = parse_coeffs(g.coeffs);
  arb_series* truth = nullptr;
  check(arb_generate_ar(coeffs.data(), coeffs.size(), g.sigma, g.length, arb_derive_seed(seed, 1), &truth),
        "generate");
  Generated out{SeriesPtr(truth), nullptr};
  arb_series* masked = nullptr;
  check(arb_apply_missing_mask(truth, g.miss, protected_prefix, arb_derive_seed(seed, 2), &masked), "mask");
  out.observed.reset(masked);
  return out;
}

// ---- generate --------------------------------------------------------------

struct GenerateArgs {
  GenerationFlags gen;
  std::optional<std::uint64_t> seed;
  std::string out = "-";
};

int cmd_generate(const GenerateArgs& a) {
  const auto coeffs = parse_coeffs(a.gen.coeffs);
  const Generated g = generate(a.gen, coeffs.size(), seed_or_env(a.seed));
  if (a.out == "-") {
    char* text = nullptr;
    check(arb_series_render(g.observed.get(), &text), "render");
    StringPtr owned(text);
    std::cout << owned.get();
  } else {
    check(arb_series_save(g.observed.get(), a.out.c_str()), "write " + a.out);
  }
  return kExitOk;
}

// ---- run -------------------------------------------------------------------

struct RunArgs {
  std::optional<std::string> input;
  GenerationFlags gen;
  std::string method;
  std::size_t order = 5;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool normalize = false;
  std::optional<double> eta, kf_sigma2, kf_pinit, aerr_b, aerr_eta, aerr_gamma, arls_tol;
  std::optional<std::size_t> aerr_k, arls_iters;
  bool yw_incremental = false;
};

int cmd_run(const RunArgs& a) {
  arb_method method{};
  check(arb_method_from_name(a.method.c_str(), &method), "--method");

  const std::uint64_t seed = seed_or_env(a.seed);
  SeriesPtr truth;
  SeriesPtr observed;
  arb_hyperparams hyper;
  arb_hyperparams_default(&hyper);

  if (a.input) {
    arb_series* loaded = nullptr;
    check(arb_series_load(a.input->c_str(), &loaded), "read " + *a.input);
    observed.reset(loaded);
    if (a.normalize) {
      arb_series* z = nullptr;
      check(arb_zscore_normalize(observed.get(), &z), "normalize");
      observed.reset(z);
    }
    hyper.kf_sigma2 = 0.1;
    hyper.aerr_gamma = -1.0;
  } else {
    Generated g = generate(a.gen, a.order, seed);
    truth = std::move(g.truth);
    observed = std::move(g.observed);
    hyper.kf_sigma2 = std::max(a.gen.sigma * a.gen.sigma, 1e-8);
    hyper.aerr_gamma = a.gen.miss;
  }
  if (a.eta) hyper.ogd_eta = *a.eta;
  if (a.kf_sigma2) hyper.kf_sigma2 = *a.kf_sigma2;
  if (a.kf_pinit) hyper.kf_pinit = *a.kf_pinit;
  if (a.aerr_b) hyper.aerr_radius = *a.aerr_b;
  if (a.aerr_k) hyper.aerr_samples = *a.aerr_k;
  if (a.aerr_eta) hyper.aerr_eta = *a.aerr_eta;
  if (a.aerr_gamma) hyper.aerr_gamma = *a.aerr_gamma;
  if (a.arls_iters) hyper.arls_iters = *a.arls_iters;
  if (a.arls_tol) hyper.arls_tol = *a.arls_tol;
  if (a.yw_incremental) hyper.yw_incremental = 1;

  const std::size_t length = arb_series_length(observed.get());
  const std::size_t capacity = length > a.order ? length - a.order : 0;
  std::vector<double> predictions(capacity);
  std::size_t written = 0;
  const arb_status status = arb_run(method, a.order, &hyper, observed.get(),
                                    arb_derive_seed(seed, 16 + static_cast<std::uint64_t>(method)),
                                    predictions.data(), predictions.size(), &written);
  check(status, std::string("run ") + arb_method_name(method));

  if (a.out) {
    std::ofstream trace(*a.out, std::ios::binary);
    if (!trace) throw Exit{kExitUsage, "cannot open " + *a.out + " for writing"};
    for (std::size_t i = 0; i < written; ++i) trace << format_real(predictions[i]) << '\n';
    if (!trace) throw Exit{kExitUsage, "write failed: " + *a.out};
  }

  double value = 0.0;
  const arb_series* reference = truth ? truth.get() : observed.get();
  check(arb_score_trace(reference, predictions.data(), written, a.order, &value), "score");
  std::cout << "mse=" << format_real(value) << '\n';
  return kExitOk;
}

// ---- sweep -----------------------------------------------------------------

struct SweepArgs {
  std::optional<std::string> config;
  std::string axis;
  std::vector<std::string> values;
  std::string out_dir;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replications;
  std::optional<std::string> methods;
  std::optional<std::string> input;
};

/// Keys assigned in a config file; the library validates the values.
std::vector<std::string> config_file_keys(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> keys;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(b, eq - b);
    key.erase(key.find_last_not_of(" \t") + 1);
    keys.push_back(key);
  }
  return keys;
}

int cmd_sweep(const SweepArgs& a) {
  std::map<std::string, std::string> source;
  arb_config* raw = nullptr;
  if (a.config) {
    check(arb_config_load(a.config->c_str(), &raw), "config");
    for (const auto& k : config_file_keys(*a.config)) source[k] = "config";
  } else {
    check(arb_config_create(&raw), "config");
  }
  ConfigPtr config(raw);

  auto set = [&](const std::string& key, const std::string& value) {
    check(arb_config_set(config.get(), key.c_str(), value.c_str()), "flag for key '" + key + "'");
    source[key] = "flag";
  };
  for (const auto& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Exit{kExitUsage, "--set expects key=value, got '" + kv + "'"};
    set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (a.seed) {
    set("seed", std::to_string(*a.seed));
  } else if (!source.count("seed") && std::getenv("AR_BENCH_SEED")) {
    check(arb_config_set(config.get(), "seed", std::to_string(seed_or_env(std::nullopt)).c_str()),
          "AR_BENCH_SEED");
    source["seed"] = "env";
  }
  if (a.replications) set("replications", std::to_string(*a.replications));
  if (a.methods) set("methods", *a.methods);
  if (a.input) set("input", *a.input);

  std::vector<const char*> values;
  for (const auto& v : a.values) values.push_back(v.c_str());
  arb_sweep* sweep_raw = nullptr;
  check(arb_sweep_run(config.get(), a.axis.c_str(), values.data(), values.size(), a.jobs, &sweep_raw),
        "sweep");
  SweepPtr sweep(sweep_raw);

  for (std::size_t i = 0; i < arb_sweep_rejected_count(sweep.get()); ++i) {
    std::cerr << "rejected " << arb_sweep_rejected(sweep.get(), i) << '\n';
  }

  std::vector<std::string> meta = {"precedence=flag > config > default"};
  for (const auto& [key, origin] : source) meta.push_back("source." + key + "=" + origin);
  std::vector<const char*> meta_ptrs;
  for (const auto& m : meta) meta_ptrs.push_back(m.c_str());
  check(arb_sweep_write(sweep.get(), a.out_dir.c_str(), meta_ptrs.data(), meta_ptrs.size()),
        "write " + a.out_dir);

  char* text = nullptr;
  check(arb_sweep_aggregates_csv(sweep.get(), &text), "aggregates");
  StringPtr owned(text);
  std::cout << owned.get();
  return kExitOk;
}

// ---- report ----------------------------------------------------------------

struct ReportArgs {
  std::string in;
  std::string by = "cell";
};

int cmd_report(const ReportArgs& a) {
  char* text = nullptr;
  check(arb_report(a.in.c_str(), a.by.c_str(), &text), "report");
  StringPtr owned(text);
  std::cout << owned.get();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online AR prediction with missing values: generation, runs, sweeps, reports"};
  app.set_version_flag("--version", arb_version());
  app.require_subcommand(1);

  GenerateArgs gen_args;
  auto* gen = app.add_subcommand("generate", "Write a synthetic AR series (optionally masked)");
  add_generation_flags(gen, gen_args.gen);
  gen->add_option("--seed", gen_args.seed, "Base seed (falls back to AR_BENCH_SEED)");
  gen->add_option("--out", gen_args.out, "Output path, '-' for stdout")->capture_default_str();

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run one method over a series and print mse=<value>");
  run->add_option("--input", run_args.input, "Series file (NaN or empty line = missing)");
  add_generation_flags(run, run_args.gen);
  run->add_option("--method", run_args.method, "yw | kf | ogd | aerr | arls")->required();
  run->add_option("--order", run_args.order, "Prediction order p")->capture_default_str();
  run->add_option("--seed", run_args.seed, "Base seed (falls back to AR_BENCH_SEED)");
  run->add_option("--out", run_args.out, "Trace file, one prediction per line");
  run->add_flag("--normalize", run_args.normalize, "z-score an --input series before running");
  run->add_option("--eta", run_args.eta, "OGD learning rate (0.01)");
  run->add_option("--kf-sigma2", run_args.kf_sigma2, "KF observation noise variance");
  run->add_option("--kf-pinit", run_args.kf_pinit, "KF prior covariance scale (1)");
  run->add_option("--aerr-b", run_args.aerr_b, "AERR ball radius (2)");
  run->add_option("--aerr-k", run_args.aerr_k, "AERR samples per step (10)");
  run->add_option("--aerr-eta", run_args.aerr_eta, "AERR learning rate (0.05)");
  run->add_option("--aerr-gamma", run_args.aerr_gamma, "AERR miss rate; negative estimates it");
  run->add_option("--arls-iters", run_args.arls_iters, "ARLS iteration cap (50)");
  run->add_option("--arls-tol", run_args.arls_tol, "ARLS convergence tolerance (1e-8)");
  run->add_flag("--yw-incremental", run_args.yw_incremental, "YW running-sum autocorrelation");
  for (const char* flag : {"--length", "--coeffs", "--sigma", "--miss"}) {
    run->get_option("--input")->excludes(run->get_option(flag));
  }

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Run a benchmark sweep and write result tables");
  sweep->add_option("--config", sweep_args.config, "Config file (key = value)");
  sweep->add_option("--axis", sweep_args.axis, "missing_rate | length | noise_std | coefficients | p_fit")
      ->required();
  sweep->add_option("--values", sweep_args.values, "Axis values (default: the standard list)");
  sweep->add_option("--out-dir", sweep_args.out_dir, "Output directory")->required();
  sweep->add_option("--jobs", sweep_args.jobs, "Worker threads")->capture_default_str();
  sweep->add_option("--set", sweep_args.sets, "Override a config key (key=value), repeatable");
  sweep->add_option("--seed", sweep_args.seed, "Base seed");
  sweep->add_option("--replications", sweep_args.replications, "Series per cell");
  sweep->add_option("--methods", sweep_args.methods, "Comma-separated method list");
  sweep->add_option("--input", sweep_args.input, "Real-data series file");

  ReportArgs report_args;
  auto* rep = app.add_subcommand("report", "Summarize a records.csv file");
  rep->add_option("--in", report_args.in, "records.csv path")->required();
  rep->add_option("--by", report_args.by, "cell | missing_rate | axis_value")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen) return cmd_generate(gen_args);
    if (*run) return cmd_run(run_args);
    if (*sweep) return cmd_sweep(sweep_args);
    if (*rep) return cmd_report(report_args);
  } catch (const Exit& e) {
    std::cerr << "ar-bench: " << e.message << '\n';
    return e.code;
  }
  return kExitUsage;
}

#include "arbench/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include "arbench/arls.hpp"
#include "arbench/error.hpp"
#include "arbench/linalg.hpp"

namespace arbench {

double mse(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size()) {
    throw Error(Errc::LengthMismatch, "mse: " + std::to_string(actual.size()) + " actual vs " +
                                          std::to_string(predicted.size()) + " predicted");
  }
  if (actual.empty()) throw Error(Errc::EmptyInput, "mse: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double d = actual[i] - predicted[i];
    acc += d * d;
  }
  return acc / static_cast<double>(actual.size());
}

double score_trace(const ObservedSeries& truth, std::span<const double> predictions, std::size_t p) {
  if (truth.size() < p || truth.size() - p != predictions.size()) {
    throw Error(Errc::LengthMismatch, "trace length does not match series length minus order");
  }
  std::vector<double> actual;
  std::vector<double> predicted;
  actual.reserve(predictions.size());
  predicted.reserve(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (const Slot& y = truth[p + i]) {
      actual.push_back(*y);
      predicted.push_back(predictions[i]);
    }
  }
  return mse(actual, predicted);
}

RunResult run_method(Method method, const Hyperparams& hyper, const ObservedSeries& series,
                     std::size_t p, std::uint64_t seed) {
  if (is_online(method)) return run_online(method, hyper, series, p, seed);

  const ArlsResult fit = arls_impute(series, p, hyper.arls_iters, hyper.arls_tol);
  RunResult out;
  out.predictions = arls_predictions(fit, p);
  out.resolved = fit.imputed.values();
  return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  std::uint64_t z = base ^ (stream * 0x9E3779B97F4A7C15ULL);
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string_view axis_name(Axis axis) noexcept {
  switch (axis) {
    case Axis::MissingRate: return "missing_rate";
    case Axis::Length: return "length";
    case Axis::NoiseStd: return "noise_std";
    case Axis::Coefficients: return "coefficients";
    case Axis::PFit: return "p_fit";
  }
  return "?";
}

std::optional<Axis> parse_axis(std::string_view name) noexcept {
  for (Axis a : {Axis::MissingRate, Axis::Length, Axis::NoiseStd, Axis::Coefficients, Axis::PFit}) {
    if (axis_name(a) == name) return a;
  }
  return std::nullopt;
}

std::vector<std::string> default_axis_values(Axis axis, const ExperimentConfig& config) {
  switch (axis) {
    case Axis::MissingRate: {
      std::vector<std::string> out;
      for (double m : config.miss_grid) out.push_back(format_real(m));
      return out;
    }
    case Axis::Length:
      return {"1000", "2000", "3000", "4000", "5000"};
    case Axis::NoiseStd:
      return {"0.3", "0.6", "0.9", "1.2", "1.5"};
    case Axis::Coefficients:
      return {"0.3;-0.4;0.4;-0.5;0.6", "-0.4;0.4;-0.5;0.3;0.6", "0.3;0.0;0.5;0.3;-0.2",
              "0.1;0.7;0.7;0.0;-0.5", "0.1;0.7;0.7;0.0;-0.5"};
    case Axis::PFit:
      return {"1", "2", "3", "4", "5", "10", "20"};
  }
  return {};
}

std::string_view status_name(RecordStatus status) noexcept {
  switch (status) {
    case RecordStatus::Ok: return "OK";
    case RecordStatus::Diverged: return "Diverged";
    case RecordStatus::Failed: return "Failed";
  }
  return "?";
}

namespace {

constexpr std::uint64_t kGenerationStream = 1;
constexpr std::uint64_t kMaskStream = 2;
constexpr std::uint64_t kMethodStreamBase = 16;

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Numeric order when both labels are numbers, text order otherwise.
bool axis_value_less(const std::string& a, const std::string& b) {
  const auto x = parse_double(a);
  const auto y = parse_double(b);
  if (x && y) {
    if (*x != *y) return *x < *y;
    return a < b;
  }
  if (x.has_value() != y.has_value()) return x.has_value();
  return a < b;
}

struct Cell {
  std::string axis;
  std::string axis_value;
  double missing_rate = 0.0;
  ExperimentConfig config;
};

ObservedSeries load_real_series(const std::string& path) {
  return zscore_normalize(read_series_file(path));
}

Hyperparams hyper_for(const ExperimentConfig& cfg, double missing_rate) {
  Hyperparams h = cfg.hyper;
  if (cfg.kf_sigma2) {
    h.kf_sigma2 = *cfg.kf_sigma2;
  } else if (cfg.input) {
    h.kf_sigma2 = kRealDataKfSigma2;
  } else {
    h.kf_sigma2 = std::max(cfg.sigma * cfg.sigma, kMinKfSigma2);
  }
  h.aerr_gamma = cfg.aerr_estimate_gamma ? -1.0 : missing_rate;
  return h;
}

std::vector<ResultRecord> run_task(const Cell& cell, std::size_t series_index, std::uint64_t hash,
                                   const std::optional<ObservedSeries>& real) {
  const ExperimentConfig& cfg = cell.config;
  const std::uint64_t seed_i = cfg.seed ^ static_cast<std::uint64_t>(series_index);

  std::vector<ResultRecord> out;
  auto base_record = [&](Method m) {
    ResultRecord r;
    r.method = m;
    r.config_hash = hash;
    r.axis = cell.axis;
    r.axis_value = cell.axis_value;
    r.missing_rate = cell.missing_rate;
    r.series_index = series_index;
    return r;
  };

  ObservedSeries truth;
  ObservedSeries observed;
  try {
    truth = real ? *real
                 : generate_ar({cfg.coeffs, cfg.sigma}, cfg.length,
                               derive_seed(seed_i, kGenerationStream));
    observed = apply_missing_mask(truth, cell.missing_rate, std::min(cfg.p_fit, truth.size()),
                                  derive_seed(seed_i, kMaskStream));
  } catch (const Error& e) {
    for (Method m : cfg.methods) {
      ResultRecord r = base_record(m);
      r.status = RecordStatus::Failed;
      r.detail = e.what();
      out.push_back(std::move(r));
    }
    return out;
  }

  const Hyperparams hyper = hyper_for(cfg, cell.missing_rate);
  for (Method m : cfg.methods) {
    ResultRecord r = base_record(m);
    try {
      const auto seed = derive_seed(seed_i, kMethodStreamBase + static_cast<std::uint64_t>(m));
      const RunResult run = run_method(m, hyper, observed, cfg.p_fit, seed);
      if (run.diverged) {
        r.status = RecordStatus::Diverged;
        r.detail = run.failure;
      } else {
        r.mse = score_trace(truth, run.predictions, cfg.p_fit);
      }
    } catch (const Error& e) {
      r.status = RecordStatus::Failed;
      r.detail = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ResultRecord> run_cells(const std::vector<Cell>& cells, std::uint64_t hash,
                                    const std::optional<ObservedSeries>& real, unsigned jobs) {
  struct Task {
    std::size_t cell;
    std::size_t series_index;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t i = 1; i <= cells[c].config.replications; ++i) tasks.push_back({c, i});
  }

  std::vector<std::vector<ResultRecord>> outputs(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next.fetch_add(1); k < tasks.size(); k = next.fetch_add(1)) {
      outputs[k] = run_task(cells[tasks[k].cell], tasks[k].series_index, hash, real);
    }
  };
  const unsigned n_threads =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), std::max<std::size_t>(tasks.size(), 1)));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  // Order: cell, method (config order), series index.
  std::vector<ResultRecord> records;
  std::size_t k = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const std::size_t reps = cells[c].config.replications;
    const std::size_t n_methods = cells[c].config.methods.size();
    for (std::size_t m = 0; m < n_methods; ++m) {
      for (std::size_t i = 0; i < reps; ++i) records.push_back(outputs[k + i][m]);
    }
    k += reps;
  }
  return records;
}

std::optional<ObservedSeries> maybe_load(const ExperimentConfig& config) {
  if (!config.input) return std::nullopt;
  return load_real_series(*config.input);
}

struct GroupKey {
  std::string axis;
  std::string axis_value;
  std::optional<double> missing_rate;
  Method method;
};

bool group_less(const GroupKey& a, const GroupKey& b) {
  if (a.axis != b.axis) return a.axis < b.axis;
  if (a.axis_value != b.axis_value) return axis_value_less(a.axis_value, b.axis_value);
  if (a.missing_rate != b.missing_rate) return a.missing_rate < b.missing_rate;
  return method_name(a.method) < method_name(b.method);
}

struct Group {
  GroupKey key;
  std::vector<double> values;
};

std::vector<Group> group_records(std::span<const ResultRecord> records, bool keep_axis_value,
                                 bool keep_missing_rate) {
  auto cmp = [](const GroupKey& a, const GroupKey& b) { return group_less(a, b); };
  std::map<GroupKey, std::vector<double>, decltype(cmp)> groups(cmp);
  for (const ResultRecord& r : records) {
    GroupKey key{r.axis, keep_axis_value ? r.axis_value : std::string(),
                 keep_missing_rate ? std::optional<double>(r.missing_rate) : std::nullopt, r.method};
    auto& values = groups[key];
    if (r.status == RecordStatus::Ok && r.mse) values.push_back(*r.mse);
  }
  std::vector<Group> out;
  out.reserve(groups.size());
  for (auto& [key, values] : groups) out.push_back({key, std::move(values)});
  return out;
}

void summarize(const std::vector<double>& values, Aggregate& agg) {
  agg.n = values.size();
  if (values.empty()) return;
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  agg.mean_mse = mean;
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    agg.std_mse = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
}

std::string opt_real(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

std::string hex64(std::uint64_t v) {
  char buf[17];
  static constexpr char digits[] = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[v & 0xF];
    v >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

std::vector<std::string_view> split_csv_row(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto end = line.find(',', pos);
    out.push_back(line.substr(pos, end == std::string_view::npos ? end : end - pos));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw Error(Errc::Io, "write failed: " + path.string());
}

}  // namespace

std::vector<Aggregate> aggregate(std::span<const ResultRecord> records) {
  std::vector<Aggregate> out;
  for (const Group& g : group_records(records, true, true)) {
    Aggregate agg;
    agg.method = g.key.method;
    agg.axis = g.key.axis;
    agg.axis_value = g.key.axis_value;
    agg.missing_rate = *g.key.missing_rate;
    summarize(g.values, agg);
    out.push_back(std::move(agg));
  }
  return out;
}

std::vector<ResultRecord> run_cell(const ExperimentConfig& config, double missing_rate, unsigned jobs) {
  validate_config(config);
  const auto real = maybe_load(config);
  if (!real && !linalg::is_stationary(config.coeffs)) {
    throw Error(Errc::NonStationary, "coefficients are not stationary");
  }
  Cell cell{std::string(axis_name(Axis::MissingRate)), format_real(missing_rate), missing_rate, config};
  return run_cells({cell}, config_hash(config), real, jobs);
}

SweepResult run_sweep(const ExperimentConfig& config, Axis axis, std::vector<std::string> values,
                      unsigned jobs) {
  validate_config(config);
  SweepResult result;
  result.config = config;
  result.axis = axis;
  result.values = values;

  const auto real = maybe_load(config);
  if (real && axis != Axis::MissingRate && axis != Axis::PFit) {
    throw Error(Errc::Config, "axis " + std::string(axis_name(axis)) + " needs synthetic data");
  }

  const std::string axis_label(axis_name(axis));
  std::vector<Cell> cells;
  for (const std::string& value : values) {
    ExperimentConfig cfg = config;
    std::vector<double> rates = config.miss_grid;
    std::string label = value;
    try {
      switch (axis) {
        case Axis::MissingRate: {
          const auto rate = parse_real_list(value);
          if (rate.size() != 1 || !(rate[0] >= 0.0 && rate[0] < 1.0)) {
            throw Error(Errc::Config, "missing rate must be one value in [0, 1)");
          }
          rates = rate;
          break;
        }
        case Axis::Length: set_config_value(cfg, "length", value); break;
        case Axis::NoiseStd: set_config_value(cfg, "sigma", value); break;
        case Axis::Coefficients: {
          set_config_value(cfg, "coeffs", value);
          label.clear();
          for (std::size_t i = 0; i < cfg.coeffs.size(); ++i) {
            if (i) label += ';';
            label += format_real(cfg.coeffs[i]);
          }
          break;
        }
        case Axis::PFit: set_config_value(cfg, "p_fit", value); break;
      }
      validate_config(cfg);
      if (!real && !linalg::is_stationary(cfg.coeffs)) {
        throw Error(Errc::NonStationary,
                    "companion spectral radius " +
                        format_real(linalg::companion_spectral_radius(cfg.coeffs)) + " >= 1");
      }
    } catch (const Error& e) {
      result.rejected.push_back(value + ": " + std::string(errc_name(e.code())) + ": " + e.what());
      continue;
    }
    for (double rate : rates) cells.push_back({axis_label, label, rate, cfg});
  }

  result.records = run_cells(cells, config_hash(config), real, jobs);
  result.aggregates = aggregate(result.records);
  return result;
}

std::string render_records_csv(std::span<const ResultRecord> records) {
  std::string out(kRecordsHeader);
  out += '\n';
  for (const ResultRecord& r : records) {
    out += method_name(r.method);
    out += ',' + hex64(r.config_hash);
    out += ',' + r.axis;
    out += ',' + r.axis_value;
    out += ',' + format_real(r.missing_rate);
    out += ',' + std::to_string(r.series_index);
    out += ',' + opt_real(r.status == RecordStatus::Ok ? r.mse : std::nullopt);
    out += ',';
    out += status_name(r.status);
    out += '\n';
  }
  return out;
}

std::string render_aggregates_csv(std::span<const Aggregate> aggregates) {
  std::string out(kAggregatesHeader);
  out += '\n';
  for (const Aggregate& a : aggregates) {
    out += method_name(a.method);
    out += ',' + a.axis;
    out += ',' + a.axis_value;
    out += ',' + format_real(a.missing_rate);
    out += ',' + opt_real(a.mean_mse);
    out += ',' + opt_real(a.std_mse);
    out += ',' + std::to_string(a.n);
    out += '\n';
  }
  return out;
}

std::vector<ResultRecord> parse_records_csv(std::string_view text) {
  std::vector<ResultRecord> out;
  std::size_t row = 0;  // file line, header included
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++row;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    auto fail = [&](const std::string& why) -> void {
      throw Error(Errc::ParseError, "records line " + std::to_string(row) + ": " + why);
    };
    if (!header_seen) {
      if (line != kRecordsHeader) fail("unexpected header");
      header_seen = true;
      continue;
    }
    const auto fields = split_csv_row(line);
    if (fields.size() != 8) fail("expected 8 fields, got " + std::to_string(fields.size()));

    ResultRecord r;
    const auto method = parse_method(fields[0]);
    if (!method) fail("unknown method '" + std::string(fields[0]) + "'");
    r.method = *method;

    {
      const auto f = fields[1];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), r.config_hash, 16);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) fail("bad config_hash");
    }
    r.axis = std::string(fields[2]);
    r.axis_value = std::string(fields[3]);
    const auto rate = parse_double(fields[4]);
    if (!rate) fail("bad missing_rate");
    r.missing_rate = *rate;
    {
      const auto f = fields[5];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), r.series_index);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) fail("bad series_index");
    }
    if (fields[7] == "OK") {
      r.status = RecordStatus::Ok;
    } else if (fields[7] == "Diverged") {
      r.status = RecordStatus::Diverged;
    } else if (fields[7] == "Failed") {
      r.status = RecordStatus::Failed;
    } else {
      fail("bad status '" + std::string(fields[7]) + "'");
    }
    if (r.status == RecordStatus::Ok) {
      const auto v = parse_double(fields[6]);
      if (!v || !(*v >= 0.0)) fail("OK row needs a nonnegative mse");
      r.mse = *v;
    } else if (!fields[6].empty()) {
      fail("non-OK row must leave mse blank");
    }
    out.push_back(std::move(r));
  }
  if (!header_seen) throw Error(Errc::ParseError, "records file has no header");
  return out;
}

std::string render_meta(const SweepResult& result, std::span<const std::string> extra_meta) {
  const ExperimentConfig& c = result.config;
  std::string out;
  out += "artifact_version=" ARBENCH_VERSION "\n";
  out += "config_hash=" + hex64(config_hash(c)) + "\n";
  out += "base_seed=" + std::to_string(c.seed) + "\n";
  out += "seed_derivation=series i uses seed XOR i; generation, mask and each method draw from "
         "splitmix64-derived streams of it\n";
  out += "axis=" + std::string(axis_name(result.axis)) + "\n";
  std::string joined;
  for (std::size_t i = 0; i < result.values.size(); ++i) {
    if (i) joined += " | ";
    joined += result.values[i];
  }
  out += "axis_values=" + joined + "\n";
  if (c.input) {
    out += "data_source=file:" + *c.input + "\n";
    out += "normalization=zscore over present values (population std), applied before masking\n";
    out += "generation=absent\n";
  } else {
    out += "data_source=synthetic\n";
    out += "generation=burn-in 500 steps after N(0, sigma^2) initial values\n";
  }
  out += "scoring=MSE over slots p_fit+1..T against pre-mask values, masked slots included\n";
  out += "kf_sigma2_effective=" +
         (c.kf_sigma2 ? format_real(*c.kf_sigma2)
                      : std::string(c.input ? "0.1 (real data default)" : "sigma^2 of the cell")) +
         "\n";
  if (result.axis == Axis::Coefficients) {
    const auto defaults = default_axis_values(Axis::Coefficients, c);
    if (result.values == defaults) {
      out += "note=standard coefficient rows 4 and 5 are identical; both are listed as given\n";
    }
  }
  for (const std::string& r : result.rejected) out += "rejected=" + r + "\n";
  for (const std::string& line : extra_meta) out += line + "\n";
  out += "[config]\n";
  out += render_config(c);
  return out;
}

void write_results(const SweepResult& result, const std::filesystem::path& dir,
                   std::span<const std::string> extra_meta) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::Io, "cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "records.csv", render_records_csv(result.records));
  write_file(dir / "aggregates.csv", render_aggregates_csv(result.aggregates));
  write_file(dir / "meta.txt", render_meta(result, extra_meta));
}

std::optional<ReportBy> parse_report_by(std::string_view name) noexcept {
  if (name == "cell") return ReportBy::Cell;
  if (name == "missing_rate") return ReportBy::MissingRate;
  if (name == "axis_value" || name == "axis") return ReportBy::AxisValue;
  return std::nullopt;
}

std::string report(std::span<const ResultRecord> records, ReportBy by) {
  if (by == ReportBy::Cell) return render_aggregates_csv(aggregate(records));

  const bool by_rate = by == ReportBy::MissingRate;
  std::string out = by_rate ? "method,missing_rate,mean_mse,std_mse,n\n"
                            : "method,axis,axis_value,mean_mse,std_mse,n\n";
  for (const Group& g : group_records(records, !by_rate, by_rate)) {
    Aggregate agg;
    summarize(g.values, agg);
    out += method_name(g.key.method);
    if (by_rate) {
      out += ',' + format_real(*g.key.missing_rate);
    } else {
      out += ',' + g.key.axis + ',' + g.key.axis_value;
    }
    out += ',' + opt_real(agg.mean_mse) + ',' + opt_real(agg.std_mse) + ',' + std::to_string(agg.n) + '\n';
  }
  return out;
}

}  // namespace arbench

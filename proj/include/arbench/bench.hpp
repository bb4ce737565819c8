#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "arbench/config.hpp"
#include "arbench/predictors.hpp"
#include "arbench/series.hpp"

namespace arbench {

/// Mean of squared differences. Throws Error(LengthMismatch) / Error(EmptyInput).
double mse(std::span<const double> actual, std::span<const double> predicted);

/// Scores predictions[i] against truth slot p + i, skipping slots whose truth
/// is unknown. Throws Error(EmptyInput) when nothing is scorable.
double score_trace(const ObservedSeries& truth, std::span<const double> predictions, std::size_t p);

/// Any of the five methods. ARLS imputes offline and then predicts each slot
/// from the preceding p filled values.
RunResult run_method(Method method, const Hyperparams& hyper, const ObservedSeries& series,
                     std::size_t p, std::uint64_t seed);

/// splitmix64 of base mixed with a stream tag.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

enum class Axis { MissingRate, Length, NoiseStd, Coefficients, PFit };

std::string_view axis_name(Axis axis) noexcept;
std::optional<Axis> parse_axis(std::string_view name) noexcept;

/// missing_rate: the config grid; length: 1000..5000; noise_std: 0.3..1.5;
/// coefficients: the five standard coefficient rows; p_fit: 1,2,3,4,5,10,20.
std::vector<std::string> default_axis_values(Axis axis, const ExperimentConfig& config);

enum class RecordStatus { Ok, Diverged, Failed };

std::string_view status_name(RecordStatus status) noexcept;

struct ResultRecord {
  Method method = Method::YW;
  std::uint64_t config_hash = 0;
  std::string axis;
  std::string axis_value;
  double missing_rate = 0.0;
  std::size_t series_index = 0;
  std::optional<double> mse;  // present iff status == Ok
  RecordStatus status = RecordStatus::Ok;
  std::string detail;         // failure message, not persisted
};

struct Aggregate {
  Method method = Method::YW;
  std::string axis;
  std::string axis_value;
  double missing_rate = 0.0;
  std::optional<double> mean_mse;
  std::optional<double> std_mse;  // sample std, needs n >= 2
  std::size_t n = 0;
};

/// Groups OK records by (method, axis, axis_value, missing_rate), summing in
/// record order; sorted by axis value, missing rate, then method name.
std::vector<Aggregate> aggregate(std::span<const ResultRecord> records);

/// All replications of one (config, missing rate) cell. Per-method failures
/// become non-OK records.
std::vector<ResultRecord> run_cell(const ExperimentConfig& config, double missing_rate,
                                   unsigned jobs = 1);

struct SweepResult {
  ExperimentConfig config;
  Axis axis = Axis::MissingRate;
  std::vector<std::string> values;
  std::vector<std::string> rejected;  // "value: reason"
  std::vector<ResultRecord> records;
  std::vector<Aggregate> aggregates;
};

/// Cross product of the axis values with the config's miss grid (or just the
/// grid when the axis is missing_rate). Tasks are distributed over `jobs`
/// threads; output is independent of `jobs`.
SweepResult run_sweep(const ExperimentConfig& config, Axis axis, std::vector<std::string> values,
                      unsigned jobs = 1);

inline constexpr std::string_view kRecordsHeader =
    "method,config_hash,axis,axis_value,missing_rate,series_index,mse,status";
inline constexpr std::string_view kAggregatesHeader =
    "method,axis,axis_value,missing_rate,mean_mse,std_mse,n";

std::string render_records_csv(std::span<const ResultRecord> records);
std::string render_aggregates_csv(std::span<const Aggregate> aggregates);

/// Throws Error(ParseError) naming the file line on malformed input.
std::vector<ResultRecord> parse_records_csv(std::string_view text);

/// Writes records.csv, aggregates.csv and meta.txt under `dir`.
void write_results(const SweepResult& result, const std::filesystem::path& dir,
                   std::span<const std::string> extra_meta = {});

std::string render_meta(const SweepResult& result, std::span<const std::string> extra_meta = {});

enum class ReportBy { Cell, MissingRate, AxisValue };
std::optional<ReportBy> parse_report_by(std::string_view name) noexcept;

/// Per-method mean/std table of `records` grouped by `by`, as CSV text.
/// `cell` output equals aggregates.csv for the same records.
std::string report(std::span<const ResultRecord> records, ReportBy by);

}  // namespace arbench

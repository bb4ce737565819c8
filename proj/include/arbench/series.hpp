#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace arbench {

/// One slot of an observed series: a finite value, or std::nullopt for MISSING.
using Slot = std::optional<double>;

/// Finite sequence of time slots. Present values are always finite.
class ObservedSeries {
 public:
  ObservedSeries() = default;
  explicit ObservedSeries(std::vector<Slot> slots);

  static ObservedSeries complete(std::span<const double> values);

  std::size_t size() const noexcept { return slots_.size(); }
  bool empty() const noexcept { return slots_.empty(); }
  const Slot& operator[](std::size_t i) const { return slots_[i]; }
  bool present(std::size_t i) const { return slots_[i].has_value(); }
  std::span<const Slot> slots() const noexcept { return slots_; }

  std::size_t missing_count() const noexcept;
  bool has_missing() const noexcept { return missing_count() != 0; }

  /// All values; throws Error(InvalidArgument) if any slot is MISSING.
  std::vector<double> values() const;

  friend bool operator==(const ObservedSeries&, const ObservedSeries&) = default;

 private:
  std::vector<Slot> slots_;
};

/// Zero-mean AR(p) generating process.
struct ArProcessParams {
  std::vector<double> coefficients;
  double noise_std = 0.0;

  std::size_t order() const noexcept { return coefficients.size(); }
};

struct GenerateOptions {
  std::size_t burn_in = 500;
  /// Replaces the random initial p values (test hook).
  std::optional<std::vector<double>> initial_values;
};

/// Throws Error(NonStationary) for coefficients whose companion matrix has
/// spectral radius >= 1.
ObservedSeries generate_ar(const ArProcessParams& params, std::size_t length, std::uint64_t seed,
                           const GenerateOptions& options = {});

/// Independently hides each slot at index >= protected_prefix with probability
/// miss_rate. Masks drawn from the same seed are nested across rates.
ObservedSeries apply_missing_mask(const ObservedSeries& series, double miss_rate,
                                  std::size_t protected_prefix, std::uint64_t seed);

/// (x - mean) / std over present values, population std.
ObservedSeries zscore_normalize(const ObservedSeries& series);

struct AutocorrEstimate {
  double mean = 0.0;
  double variance = 0.0;
  std::vector<double> gamma;  // gamma[0] == 1
};

inline constexpr double kMinAutocorrVariance = 1e-12;

/// Autocorrelation estimate over prefix[0, t):
///   mean   = (1/t) sum y
///   var    = (1/(t-1)) sum (y - mean)^2
///   gamma_k = (1/(var (t-k))) sum_{q<t-k} (y_q - mean)(y_{q+k} - mean)
/// Throws Error(ZeroVariance) when var < kMinAutocorrVariance.
AutocorrEstimate estimate_autocorr(std::span<const double> prefix, std::size_t t, std::size_t p);

/// Running-sum version of estimate_autocorr for a growing prefix. Keeps
/// sum y, sum y^2 and the lag-product sums, so each estimate is O(p).
class IncrementalAutocorr {
 public:
  explicit IncrementalAutocorr(std::size_t max_lag);

  void push(double y);
  std::size_t size() const noexcept { return values_.size(); }
  AutocorrEstimate estimate(std::size_t p) const;

 private:
  std::size_t max_lag_;
  std::vector<double> values_;
  double sum_ = 0.0;
  double sum_sq_ = 0.0;
  std::vector<double> lag_products_;  // index k-1: sum_{q} y_q y_{q+k}
};

/// Newline-separated records; `NaN` or an empty line is MISSING, `#` lines are
/// comments, trailing blank lines are dropped.
ObservedSeries parse_series(std::string_view text);

/// Inverse of parse_series: 17 significant digits, `NaN` for MISSING.
std::string render_series(const ObservedSeries& series);

ObservedSeries read_series_file(const std::filesystem::path& path);
void write_series_file(const ObservedSeries& series, const std::filesystem::path& path);

/// 17 significant digits; parses back to the same double.
std::string format_real(double value);

}  // namespace arbench

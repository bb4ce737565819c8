#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arbench/predictors.hpp"

namespace arbench {

/// One benchmark description. Defaults are the standard synthetic setting:
/// L = 2000, sigma = 0.3, alpha = [0.3, -0.4, 0.4, -0.5, 0.6], p_fit = 5,
/// miss in {0, 0.05, ..., 0.3}, 20 replications.
struct ExperimentConfig {
  std::size_t length = 2000;
  double sigma = 0.3;
  std::vector<double> coeffs = {0.3, -0.4, 0.4, -0.5, 0.6};
  std::vector<double> miss_grid = {0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  std::size_t p_fit = 5;
  std::vector<Method> methods = {kAllMethods.begin(), kAllMethods.end()};
  std::size_t replications = 20;
  std::uint64_t seed = 0;
  Hyperparams hyper;
  /// Unset: sigma^2 of the generator on synthetic data, 0.1 on real data.
  std::optional<double> kf_sigma2;
  /// AERR gets the cell's miss rate unless this asks for the running estimate.
  bool aerr_estimate_gamma = false;
  /// Real-data source; replaces generation when set.
  std::optional<std::string> input;
};

inline constexpr double kRealDataKfSigma2 = 0.1;
inline constexpr double kMinKfSigma2 = 1e-8;

/// Keys accepted by set_config_value and parse_config, in canonical order.
const std::vector<std::string_view>& config_keys();

/// Throws Error(Config) naming the key on unknown keys or bad values.
void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Flat `key = value` text; `#` comments and blank lines are skipped.
/// Errors carry the line number.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base);

/// Throws Error(Config) on out-of-range settings.
void validate_config(const ExperimentConfig& config);

/// Canonical `key=value` lines, one per key in config_keys() order.
std::string render_config(const ExperimentConfig& config);

/// FNV-1a 64 of render_config.
std::uint64_t config_hash(const ExperimentConfig& config);

std::vector<double> parse_real_list(std::string_view text);

}  // namespace arbench

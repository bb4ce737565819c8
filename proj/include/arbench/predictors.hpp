#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "arbench/linalg.hpp"
#include "arbench/series.hpp"

namespace arbench {

enum class Method { YW, KF, OGD, AERR, ARLS };

inline constexpr std::array<Method, 5> kAllMethods = {Method::YW, Method::KF, Method::OGD,
                                                      Method::AERR, Method::ARLS};

std::string_view method_name(Method method) noexcept;
/// Case-insensitive.
std::optional<Method> parse_method(std::string_view name) noexcept;
inline bool is_online(Method m) noexcept { return m != Method::ARLS; }

struct Hyperparams {
  double ogd_eta = 0.01;
  double kf_sigma2 = 0.09;
  double kf_pinit = 1.0;
  double aerr_radius = 2.0;
  std::size_t aerr_samples = 10;
  double aerr_eta = 0.05;
  /// Known miss rate; a negative value selects the running-frequency estimate.
  double aerr_gamma = 0.0;
  std::size_t arls_iters = 50;
  double arls_tol = 1e-8;
  bool yw_incremental = false;
};

inline constexpr double kYwRidge = 1e-6;
inline constexpr double kOgdDivergenceBound = 1e6;
inline constexpr double kInitCoeffBound = 0.5;
inline constexpr double kMaxEstimatedGamma = 0.99;

/// Last p values, newest first.
template <class T>
class SlidingWindow {
 public:
  SlidingWindow() = default;
  explicit SlidingWindow(std::vector<T> newest_first) : items_(std::move(newest_first)) {}

  void push(T value) {
    if (items_.empty()) return;
    for (std::size_t i = items_.size() - 1; i > 0; --i) items_[i] = items_[i - 1];
    items_[0] = std::move(value);
  }
  std::size_t size() const noexcept { return items_.size(); }
  const T& operator[](std::size_t i) const { return items_[i]; }
  std::span<const T> items() const noexcept { return items_; }

 private:
  std::vector<T> items_;
};

/// Online Yule-Walker: re-estimates the autocorrelation over the whole resolved
/// prefix every step and solves the Toeplitz system.
class YwPredictor {
 public:
  YwPredictor(std::span<const double> warmup, std::vector<double> initial_coeffs,
              bool incremental = false);

  double predict() const;
  double advance(Slot observation);

  std::size_t order() const noexcept { return coeffs_.size(); }
  std::span<const double> coefficients() const noexcept { return coeffs_; }
  std::span<const double> resolved() const noexcept { return resolved_; }
  /// Estimate behind the latest coefficient update, if any.
  const std::optional<AutocorrEstimate>& last_estimate() const noexcept { return last_estimate_; }
  bool last_step_regularized() const noexcept { return last_regularized_; }

 private:
  std::vector<double> coeffs_;
  std::vector<double> resolved_;
  std::optional<IncrementalAutocorr> accumulator_;
  std::optional<AutocorrEstimate> last_estimate_;
  bool last_regularized_ = false;
};

/// Kalman filter whose hidden state is the coefficient vector (static
/// transition, observation row = last p resolved values).
class KfPredictor {
 public:
  KfPredictor(std::span<const double> warmup, std::vector<double> initial_mean, double obs_noise_var,
              double prior_scale);

  double predict() const;
  double advance(Slot observation);

  std::size_t order() const noexcept { return mean_.size(); }
  std::span<const double> mean() const noexcept { return mean_; }
  const linalg::SquareMatrix& covariance() const noexcept { return cov_; }
  std::span<const double> window() const noexcept { return window_.items(); }
  double obs_noise_var() const noexcept { return obs_noise_var_; }

 private:
  std::vector<double> mean_;
  linalg::SquareMatrix cov_;
  double obs_noise_var_;
  SlidingWindow<double> window_;
};

/// Gradient of 0.5 (y - coeffs.x)^2 with respect to coeffs.
std::vector<double> ogd_gradient(std::span<const double> coeffs, std::span<const double> x, double y);

class OgdPredictor {
 public:
  OgdPredictor(std::span<const double> warmup, std::vector<double> initial_coeffs, double learning_rate);

  double predict() const;
  /// Throws Error(Diverged) once the coefficients leave the finite 1e6 box.
  double advance(Slot observation);

  std::size_t order() const noexcept { return coeffs_.size(); }
  std::span<const double> coefficients() const noexcept { return coeffs_; }
  std::span<const double> window() const noexcept { return window_.items(); }

 private:
  std::vector<double> coeffs_;
  double learning_rate_;
  SlidingWindow<double> window_;
};

/// Everything AERR carries between steps. `raw_window` keeps MISSING slots
/// (used for updates), `filled_window` holds predictions in their place
/// (used for predicting).
struct AerrState {
  std::vector<double> iterate;
  std::vector<double> running_sum;
  std::size_t counter = 0;
  double radius = 2.0;
  double learning_rate = 0.05;
  std::size_t samples = 10;
  double miss_rate = 0.0;
  bool estimate_miss_rate = false;
  std::size_t seen = 0;
  std::size_t missed = 0;
  SlidingWindow<Slot> raw_window;
  SlidingWindow<double> filled_window;

  std::size_t order() const noexcept { return iterate.size(); }
  std::vector<double> averaged_iterate() const;
  double effective_miss_rate() const noexcept;
};

/// Sampled gradient estimate from the raw window (y must be present).
/// Returns the zero vector when the iterate is zero.
std::vector<double> aerr_gradient_estimate(const AerrState& state, double y, std::mt19937_64& rng);

/// v scaled to norm `radius` when it lies outside the ball.
std::vector<double> project_to_ball(std::span<const double> v, double radius);

class AerrPredictor {
 public:
  AerrPredictor(std::span<const double> warmup, std::vector<double> initial_iterate, double radius,
                double learning_rate, std::size_t samples, double miss_rate, std::uint64_t rng_seed);

  double predict() const;
  double advance(Slot observation);

  std::size_t order() const noexcept { return state_.order(); }
  const AerrState& state() const noexcept { return state_; }

 private:
  AerrState state_;
  std::mt19937_64 rng_;
};

using Predictor = std::variant<YwPredictor, KfPredictor, OgdPredictor, AerrPredictor>;

/// Coefficients drawn i.i.d. uniform on [-0.5, 0.5] from `seed`. Throws
/// Error(MissingWarmup) unless warmup holds exactly p present slots.
Predictor predictor_init(Method method, std::size_t p, const Hyperparams& hyper,
                         std::span<const Slot> warmup, std::uint64_t seed);

double predict(const Predictor& predictor);
double advance(Predictor& predictor, Slot observation);
/// Current coefficient estimate: YW/OGD coefficients, KF state mean, AERR averaged iterate.
std::vector<double> coefficients(const Predictor& predictor);

struct RunResult {
  std::vector<double> predictions;  // predictions[i] targets slot p + i
  std::vector<double> resolved;     // series with every MISSING slot filled
  bool diverged = false;
  std::string failure;
};

/// Drives one of the online methods over the series.
RunResult run_online(Method method, const Hyperparams& hyper, const ObservedSeries& series,
                     std::size_t p, std::uint64_t seed);

}  // namespace arbench

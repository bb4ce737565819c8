#include "arbench/predictors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "arbench/error.hpp"

namespace arbench {

std::string_view method_name(Method method) noexcept {
  switch (method) {
    case Method::YW: return "YW";
    case Method::KF: return "KF";
    case Method::OGD: return "OGD";
    case Method::AERR: return "AERR";
    case Method::ARLS: return "ARLS";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
  for (Method m : kAllMethods) {
    const auto canon = method_name(m);
    if (canon.size() == name.size() &&
        std::equal(canon.begin(), canon.end(), name.begin(), [](char a, char b) {
          return a == std::toupper(static_cast<unsigned char>(b));
        })) {
      return m;
    }
  }
  return std::nullopt;
}

namespace {

std::vector<double> newest_first(std::span<const double> oldest_first) {
  return {oldest_first.rbegin(), oldest_first.rend()};
}

}  // namespace

// ---------------------------------------------------------------------------
// YW

YwPredictor::YwPredictor(std::span<const double> warmup, std::vector<double> initial_coeffs,
                         bool incremental)
    : coeffs_(std::move(initial_coeffs)), resolved_(warmup.begin(), warmup.end()) {
  if (coeffs_.size() != warmup.size() || coeffs_.empty()) {
    throw Error(Errc::InvalidArgument, "YW: warmup and coefficients must both have length p > 0");
  }
  if (incremental) {
    accumulator_.emplace(coeffs_.size());
    for (double y : resolved_) accumulator_->push(y);
  }
}

double YwPredictor::predict() const {
  const std::size_t p = coeffs_.size();
  const std::size_t t = resolved_.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < p; ++i) acc += coeffs_[i] * resolved_[t - 1 - i];
  return acc;
}

double YwPredictor::advance(Slot observation) {
  const double prediction = predict();
  const double y = observation.value_or(prediction);
  resolved_.push_back(y);
  if (accumulator_) accumulator_->push(y);

  const std::size_t p = coeffs_.size();
  last_regularized_ = false;
  AutocorrEstimate est;
  try {
    est = accumulator_ ? accumulator_->estimate(p)
                       : estimate_autocorr(resolved_, resolved_.size(), p);
  } catch (const Error& e) {
    if (e.code() == Errc::ZeroVariance) {
      last_estimate_.reset();
      return prediction;
    }
    throw;
  }

  auto r = linalg::SquareMatrix::symmetric_toeplitz(std::span<const double>(est.gamma).first(p));
  const auto rhs = std::span<const double>(est.gamma).subspan(1, p);
  try {
    coeffs_ = linalg::solve_linear_system(r, rhs);
  } catch (const Error& e) {
    if (e.code() != Errc::NearSingular) throw;
    r.add_to_diagonal(kYwRidge);
    last_regularized_ = true;
    try {
      coeffs_ = linalg::solve_linear_system(r, rhs);
    } catch (const Error& retry) {
      if (retry.code() != Errc::NearSingular) throw;
    }
  }
  last_estimate_ = std::move(est);
  return prediction;
}

// ---------------------------------------------------------------------------
// KF

KfPredictor::KfPredictor(std::span<const double> warmup, std::vector<double> initial_mean,
                         double obs_noise_var, double prior_scale)
    : mean_(std::move(initial_mean)),
      cov_(linalg::SquareMatrix::identity(mean_.size(), prior_scale)),
      obs_noise_var_(obs_noise_var),
      window_(newest_first(warmup)) {
  if (mean_.size() != warmup.size() || mean_.empty()) {
    throw Error(Errc::InvalidArgument, "KF: warmup and state must both have length p > 0");
  }
  if (!(obs_noise_var > 0.0) || !std::isfinite(obs_noise_var)) {
    throw Error(Errc::InvalidArgument, "KF: observation noise variance must be positive");
  }
  if (!(prior_scale > 0.0) || !std::isfinite(prior_scale)) {
    throw Error(Errc::InvalidArgument, "KF: covariance prior scale must be positive");
  }
}

double KfPredictor::predict() const { return linalg::dot(window_.items(), mean_); }

double KfPredictor::advance(Slot observation) {
  const std::size_t p = mean_.size();
  const auto h = window_.items();
  const double prediction = linalg::dot(h, mean_);
  const double y = observation.value_or(prediction);

  // G = P H^T / (H P H^T + sigma^2)
  const std::vector<double> pht = cov_.multiply(h);
  const double denom = linalg::dot(h, pht) + obs_noise_var_;
  std::vector<double> gain(p);
  for (std::size_t i = 0; i < p; ++i) gain[i] = pht[i] / denom;

  const double innovation = y - prediction;
  if (innovation != 0.0) {
    for (std::size_t i = 0; i < p; ++i) mean_[i] += gain[i] * innovation;
  }

  // P <- P - G (H P)
  std::vector<double> hp(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p; ++i) acc += h[i] * cov_(i, j);
    hp[j] = acc;
  }
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) cov_(i, j) -= gain[i] * hp[j];
  }
  cov_.symmetrize();

  window_.push(y);
  return prediction;
}

// ---------------------------------------------------------------------------
// OGD

std::vector<double> ogd_gradient(std::span<const double> coeffs, std::span<const double> x, double y) {
  if (coeffs.size() != x.size()) throw Error(Errc::InvalidArgument, "OGD: size mismatch");
  const double residual = y - linalg::dot(coeffs, x);
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = -residual * x[i];
  return g;
}

OgdPredictor::OgdPredictor(std::span<const double> warmup, std::vector<double> initial_coeffs,
                           double learning_rate)
    : coeffs_(std::move(initial_coeffs)), learning_rate_(learning_rate), window_(newest_first(warmup)) {
  if (coeffs_.size() != warmup.size() || coeffs_.empty()) {
    throw Error(Errc::InvalidArgument, "OGD: warmup and coefficients must both have length p > 0");
  }
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw Error(Errc::InvalidArgument, "OGD: learning rate must be finite and nonnegative");
  }
}

double OgdPredictor::predict() const { return linalg::dot(coeffs_, window_.items()); }

double OgdPredictor::advance(Slot observation) {
  const double prediction = predict();
  // An imputed observation has zero residual, so the update is the identity.
  if (observation) {
    const auto g = ogd_gradient(coeffs_, window_.items(), *observation);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= learning_rate_ * g[i];
  }
  window_.push(observation.value_or(prediction));

  const bool finite = std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return std::isfinite(c); });
  if (!finite || linalg::norm_inf(coeffs_) > kOgdDivergenceBound) {
    throw Error(Errc::Diverged, "OGD diverged; lower the learning rate");
  }
  return prediction;
}

// ---------------------------------------------------------------------------
// AERR

std::vector<double> AerrState::averaged_iterate() const {
  std::vector<double> avg(running_sum);
  const double denom = static_cast<double>(counter + 1);
  for (double& v : avg) v /= denom;
  return avg;
}

double AerrState::effective_miss_rate() const noexcept {
  if (!estimate_miss_rate) return miss_rate;
  if (seen == 0) return 0.0;
  return std::clamp(static_cast<double>(missed) / static_cast<double>(seen), 0.0, kMaxEstimatedGamma);
}

std::vector<double> aerr_gradient_estimate(const AerrState& state, double y, std::mt19937_64& rng) {
  const std::size_t p = state.order();
  const double keep = 1.0 - state.effective_miss_rate();
  const double pd = static_cast<double>(p);

  std::vector<double> direction(p, 0.0);
  std::uniform_int_distribution<std::size_t> pick(0, p - 1);
  for (std::size_t j = 0; j < state.samples; ++j) {
    const std::size_t i = pick(rng);
    // A sample landing on a MISSING slot is discarded but still counts in k.
    if (const Slot& v = state.raw_window[i]) direction[i] += pd * *v / keep;
  }
  for (double& d : direction) d /= static_cast<double>(state.samples);

  const double sq_norm = linalg::dot(state.iterate, state.iterate);
  if (sq_norm == 0.0) return std::vector<double>(p, 0.0);

  std::vector<double> weights(p);
  for (std::size_t i = 0; i < p; ++i) weights[i] = state.iterate[i] * state.iterate[i];
  std::discrete_distribution<std::size_t> weighted(weights.begin(), weights.end());
  const std::size_t j = weighted(rng);

  double phi = 0.0;
  if (const Slot& v = state.raw_window[j]) {
    phi = sq_norm * *v / (state.iterate[j] * keep) - y;
  }
  for (double& d : direction) d *= phi;
  return direction;
}

std::vector<double> project_to_ball(std::span<const double> v, double radius) {
  if (!(radius > 0.0)) throw Error(Errc::InvalidArgument, "ball radius must be positive");
  std::vector<double> out(v.begin(), v.end());
  const double norm = linalg::norm2(v);
  if (norm > radius) {
    const double scale = radius / norm;
    for (double& x : out) x *= scale;
  }
  return out;
}

AerrPredictor::AerrPredictor(std::span<const double> warmup, std::vector<double> initial_iterate,
                             double radius, double learning_rate, std::size_t samples,
                             double miss_rate, std::uint64_t rng_seed)
    : rng_(rng_seed) {
  const std::size_t p = warmup.size();
  if (initial_iterate.size() != p || p == 0) {
    throw Error(Errc::InvalidArgument, "AERR: warmup and iterate must both have length p > 0");
  }
  if (!(radius > 0.0) || !(learning_rate > 0.0) || samples == 0) {
    throw Error(Errc::InvalidArgument, "AERR: radius, learning rate and samples must be positive");
  }
  if (!(miss_rate < 1.0)) throw Error(Errc::InvalidArgument, "AERR: miss rate must be < 1");

  state_.iterate = project_to_ball(initial_iterate, radius);
  state_.running_sum = state_.iterate;
  state_.radius = radius;
  state_.learning_rate = learning_rate;
  state_.samples = samples;
  state_.estimate_miss_rate = miss_rate < 0.0;
  state_.miss_rate = state_.estimate_miss_rate ? 0.0 : miss_rate;
  const auto filled = newest_first(warmup);
  state_.filled_window = SlidingWindow<double>(filled);
  state_.raw_window = SlidingWindow<Slot>(std::vector<Slot>(filled.begin(), filled.end()));
}

double AerrPredictor::predict() const {
  const auto avg = state_.averaged_iterate();
  return linalg::dot(avg, state_.filled_window.items());
}

double AerrPredictor::advance(Slot observation) {
  const double prediction = predict();
  ++state_.seen;
  if (!observation) {
    ++state_.missed;
    state_.raw_window.push(std::nullopt);
    state_.filled_window.push(prediction);
    return prediction;
  }

  const double y = *observation;
  const auto g = aerr_gradient_estimate(state_, y, rng_);
  state_.raw_window.push(y);
  state_.filled_window.push(y);

  std::vector<double> v(state_.iterate);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= state_.learning_rate * g[i];
  state_.iterate = project_to_ball(v, state_.radius);
  for (std::size_t i = 0; i < v.size(); ++i) state_.running_sum[i] += state_.iterate[i];
  ++state_.counter;
  return prediction;
}

// ---------------------------------------------------------------------------
// Uniform contract

Predictor predictor_init(Method method, std::size_t p, const Hyperparams& hyper,
                         std::span<const Slot> warmup, std::uint64_t seed) {
  if (p == 0) throw Error(Errc::InvalidArgument, "order must be positive");
  if (warmup.size() != p) {
    throw Error(Errc::MissingWarmup, "warm-up needs exactly " + std::to_string(p) + " slots, got " +
                                         std::to_string(warmup.size()));
  }
  std::vector<double> values;
  values.reserve(p);
  for (std::size_t i = 0; i < p; ++i) {
    if (!warmup[i]) {
      throw Error(Errc::MissingWarmup, "warm-up slot " + std::to_string(i + 1) + " is missing");
    }
    values.push_back(*warmup[i]);
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> init(-kInitCoeffBound, kInitCoeffBound);
  std::vector<double> coeffs(p);
  for (double& c : coeffs) c = init(rng);

  switch (method) {
    case Method::YW:
      return YwPredictor(values, std::move(coeffs), hyper.yw_incremental);
    case Method::KF:
      return KfPredictor(values, std::move(coeffs), hyper.kf_sigma2, hyper.kf_pinit);
    case Method::OGD:
      return OgdPredictor(values, std::move(coeffs), hyper.ogd_eta);
    case Method::AERR:
      return AerrPredictor(values, std::move(coeffs), hyper.aerr_radius, hyper.aerr_eta,
                           hyper.aerr_samples, hyper.aerr_gamma, rng());
    case Method::ARLS:
      break;
  }
  throw Error(Errc::InvalidArgument, "ARLS is an offline method; it has no online predictor");
}

double predict(const Predictor& predictor) {
  return std::visit([](const auto& p) { return p.predict(); }, predictor);
}

double advance(Predictor& predictor, Slot observation) {
  return std::visit([&](auto& p) { return p.advance(observation); }, predictor);
}

std::vector<double> coefficients(const Predictor& predictor) {
  return std::visit(
      [](const auto& p) -> std::vector<double> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, KfPredictor>) {
          return {p.mean().begin(), p.mean().end()};
        } else if constexpr (std::is_same_v<T, AerrPredictor>) {
          return p.state().averaged_iterate();
        } else {
          return {p.coefficients().begin(), p.coefficients().end()};
        }
      },
      predictor);
}

RunResult run_online(Method method, const Hyperparams& hyper, const ObservedSeries& series,
                     std::size_t p, std::uint64_t seed) {
  if (series.size() < p) {
    throw Error(Errc::MissingWarmup, "series shorter than the warm-up of " + std::to_string(p));
  }
  const auto slots = series.slots();
  Predictor predictor = predictor_init(method, p, hyper, slots.first(p), seed);

  RunResult result;
  result.predictions.reserve(series.size() - p);
  result.resolved.reserve(series.size());
  for (std::size_t i = 0; i < p; ++i) result.resolved.push_back(*slots[i]);

  for (std::size_t t = p; t < series.size(); ++t) {
    double prediction = 0.0;
    try {
      prediction = advance(predictor, slots[t]);
    } catch (const Error& e) {
      if (e.code() != Errc::Diverged) throw;
      result.diverged = true;
      result.failure = std::string(method_name(method)) + " at slot " + std::to_string(t + 1) +
                       ": " + e.what();
      return result;
    }
    result.predictions.push_back(prediction);
    result.resolved.push_back(slots[t].value_or(prediction));
  }
  return result;
}

}  // namespace arbench

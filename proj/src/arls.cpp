#include "arbench/arls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "arbench/error.hpp"
#include "arbench/linalg.hpp"

namespace arbench {

std::vector<double> least_squares_fit(std::span<const double> series, std::size_t p) {
  if (p == 0) throw Error(Errc::InvalidArgument, "order must be positive");
  const std::size_t n = series.size();
  if (n < 2 * p + 1) {
    throw Error(Errc::TooShort, "least squares needs at least " + std::to_string(2 * p + 1) +
                                    " values, got " + std::to_string(n));
  }

  linalg::SquareMatrix gram(p);
  std::vector<double> rhs(p, 0.0);
  for (std::size_t t = p; t < n; ++t) {
    for (std::size_t i = 0; i < p; ++i) {
      const double xi = series[t - 1 - i];
      rhs[i] += xi * series[t];
      for (std::size_t j = i; j < p; ++j) gram(i, j) += xi * series[t - 1 - j];
    }
  }
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < i; ++j) gram(i, j) = gram(j, i);
  }

  try {
    return linalg::solve_linear_system(gram, rhs);
  } catch (const Error& e) {
    if (e.code() != Errc::NearSingular) throw;
  }
  gram.add_to_diagonal(kLsRidge);
  return linalg::solve_linear_system(gram, rhs);
}

ArlsResult arls_impute(const ObservedSeries& series, std::size_t p, std::size_t max_iters, double tol) {
  if (p == 0) throw Error(Errc::InvalidArgument, "order must be positive");
  if (max_iters == 0) throw Error(Errc::InvalidArgument, "ARLS needs at least one iteration");
  if (series.size() < p) throw Error(Errc::MissingWarmup, "series shorter than the warm-up");
  for (std::size_t i = 0; i < p; ++i) {
    if (!series.present(i)) {
      throw Error(Errc::MissingWarmup, "slot " + std::to_string(i + 1) + " of the warm-up is missing");
    }
  }
  const std::size_t present = series.size() - series.missing_count();
  if (present < 2 * p + 1) {
    throw Error(Errc::TooShort, "ARLS needs at least " + std::to_string(2 * p + 1) +
                                    " present values, got " + std::to_string(present));
  }

  std::vector<std::size_t> missing;
  std::vector<double> filled(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) {
    if (series.present(t)) {
      filled[t] = *series[t];
    } else {
      filled[t] = 0.0;
      missing.push_back(t);
    }
  }

  ArlsResult result;
  if (missing.empty()) {
    result.coeffs = least_squares_fit(filled, p);
    result.imputed = series;
    result.iterations_run = 1;
    return result;
  }

  std::vector<double> coeffs;
  for (std::size_t iter = 1; iter <= max_iters; ++iter) {
    std::vector<double> next = least_squares_fit(filled, p);

    double value_change = 0.0;
    for (std::size_t t : missing) {
      double v = 0.0;
      for (std::size_t i = 0; i < p; ++i) v += next[i] * filled[t - 1 - i];
      value_change = std::max(value_change, std::abs(v - filled[t]));
      filled[t] = v;
    }

    double coeff_change = std::numeric_limits<double>::infinity();
    if (!coeffs.empty()) {
      coeff_change = 0.0;
      for (std::size_t i = 0; i < p; ++i) coeff_change = std::max(coeff_change, std::abs(next[i] - coeffs[i]));
    }
    coeffs = std::move(next);
    result.iterations_run = iter;
    if (coeff_change < tol && value_change < tol) break;
  }

  result.coeffs = std::move(coeffs);
  result.imputed = ObservedSeries::complete(filled);
  return result;
}

std::vector<double> arls_predictions(const ArlsResult& result, std::size_t p) {
  const auto& slots = result.imputed.slots();
  std::vector<double> out;
  if (slots.size() <= p) return out;
  out.reserve(slots.size() - p);
  for (std::size_t t = p; t < slots.size(); ++t) {
    double v = 0.0;
    for (std::size_t i = 0; i < p; ++i) v += result.coeffs[i] * *slots[t - 1 - i];
    out.push_back(v);
  }
  return out;
}

}  // namespace arbench

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "arbench/series.hpp"

namespace arbench {

inline constexpr double kLsRidge = 1e-8;

/// Ordinary least squares AR(p) fit over t = p..T-1 via the normal equations
/// (newest-first lag ordering). Retries once with a 1e-8 ridge on a
/// near-singular Gram matrix. Throws Error(TooShort) below 2p + 1 values.
std::vector<double> least_squares_fit(std::span<const double> series, std::size_t p);

struct ArlsResult {
  std::vector<double> coeffs;
  ObservedSeries imputed;  // no MISSING slots
  std::size_t iterations_run = 0;
};

/// Alternates an OLS fit on the filled series with a left-to-right re-imputation
/// of every originally missing slot. Missing slots start at 0. Stops after
/// `max_iters` iterations or once both the coefficient change and the imputed
/// value change fall below `tol`.
ArlsResult arls_impute(const ObservedSeries& series, std::size_t p, std::size_t max_iters = 50,
                       double tol = 1e-8);

/// One-step predictions alpha . (filled[t-1], ..., filled[t-p]) for t = p..T-1.
std::vector<double> arls_predictions(const ArlsResult& result, std::size_t p);

}  // namespace arbench

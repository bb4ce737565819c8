#pragma once
// Slow, independent reference implementations used as test oracles.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <vector>

namespace oracle {

/// Largest |root| of z^p - a1 z^(p-1) - ... - ap by Durand-Kerner iteration.
inline double max_root_modulus(const std::vector<double>& a) {
  const std::size_t p = a.size();
  std::vector<std::complex<double>> poly(p + 1);  // monic, highest degree first
  poly[0] = 1.0;
  for (std::size_t i = 0; i < p; ++i) poly[i + 1] = -a[i];
  auto eval = [&](std::complex<double> z) {
    std::complex<double> acc = 0.0;
    for (const auto& c : poly) acc = acc * z + c;
    return acc;
  };
  std::vector<std::complex<double>> roots(p);
  const std::complex<double> seed(0.4, 0.9);
  for (std::size_t i = 0; i < p; ++i) roots[i] = std::pow(seed, static_cast<double>(i));
  for (int iter = 0; iter < 5000; ++iter) {
    double change = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      std::complex<double> denom = 1.0;
      for (std::size_t j = 0; j < p; ++j) {
        if (j != i) denom *= roots[i] - roots[j];
      }
      const auto step = eval(roots[i]) / denom;
      roots[i] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-15) break;
  }
  double r = 0.0;
  for (const auto& z : roots) r = std::max(r, std::abs(z));
  return r;
}

/// Minimum eigenvalue of a symmetric 2x2 or 3x3 matrix in closed form.
inline double min_eigenvalue(const std::vector<std::vector<double>>& m) {
  if (m.size() == 2) {
    const double tr = m[0][0] + m[1][1];
    const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    return tr / 2 - std::sqrt(std::max(0.0, tr * tr / 4 - det));
  }
  // trigonometric solution for symmetric 3x3
  const double p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
  const double q = (m[0][0] + m[1][1] + m[2][2]) / 3;
  if (p1 == 0.0) return std::min({m[0][0], m[1][1], m[2][2]});
  const double p2 = (m[0][0] - q) * (m[0][0] - q) + (m[1][1] - q) * (m[1][1] - q) +
                    (m[2][2] - q) * (m[2][2] - q) + 2 * p1;
  const double p = std::sqrt(p2 / 6);
  double b[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b[i][j] = (m[i][j] - (i == j ? q : 0.0)) / p;
  const double detb = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
                      b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                      b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
  const double r = std::clamp(detb / 2, -1.0, 1.0);
  const double phi = std::acos(r) / 3;
  return q + 2 * p * std::cos(phi + 2 * M_PI / 3);
}

struct Autocorr {
  double mean;
  double variance;
  std::vector<double> gamma;
};

/// Double loop straight from the estimator definition.
inline Autocorr autocorr(const std::vector<double>& y, std::size_t t, std::size_t p) {
  Autocorr out{0.0, 0.0, std::vector<double>(p + 1, 0.0)};
  for (std::size_t i = 0; i < t; ++i) out.mean += y[i];
  out.mean /= static_cast<double>(t);
  for (std::size_t i = 0; i < t; ++i) out.variance += (y[i] - out.mean) * (y[i] - out.mean);
  out.variance /= static_cast<double>(t - 1);
  out.gamma[0] = 1.0;
  for (std::size_t k = 1; k <= p; ++k) {
    double s = 0.0;
    for (std::size_t q = 0; q + k < t; ++q) s += (y[q] - out.mean) * (y[q + k] - out.mean);
    out.gamma[k] = s / (out.variance * static_cast<double>(t - k));
  }
  return out;
}

/// Least squares AR(p) fit via Householder QR on the lagged design matrix,
/// newest lag first. Independent of the normal equations.
inline std::vector<double> least_squares(const std::vector<double>& y, std::size_t p) {
  const std::size_t rows = y.size() - p;
  std::vector<std::vector<double>> a(rows, std::vector<double>(p));
  std::vector<double> b(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t t = r + p;
    for (std::size_t i = 0; i < p; ++i) a[r][i] = y[t - 1 - i];
    b[r] = y[t];
  }
  for (std::size_t k = 0; k < p; ++k) {
    double norm = 0.0;
    for (std::size_t r = k; r < rows; ++r) norm += a[r][k] * a[r][k];
    norm = std::sqrt(norm);
    const double alpha = a[k][k] > 0 ? -norm : norm;
    std::vector<double> v(rows, 0.0);
    for (std::size_t r = k; r < rows; ++r) v[r] = a[r][k];
    v[k] -= alpha;
    double vnorm = 0.0;
    for (std::size_t r = k; r < rows; ++r) vnorm += v[r] * v[r];
    if (vnorm == 0.0) continue;
    for (std::size_t c = k; c < p; ++c) {
      double s = 0.0;
      for (std::size_t r = k; r < rows; ++r) s += v[r] * a[r][c];
      for (std::size_t r = k; r < rows; ++r) a[r][c] -= 2 * s / vnorm * v[r];
    }
    double s = 0.0;
    for (std::size_t r = k; r < rows; ++r) s += v[r] * b[r];
    for (std::size_t r = k; r < rows; ++r) b[r] -= 2 * s / vnorm * v[r];
  }
  std::vector<double> x(p);
  for (std::size_t k = p; k-- > 0;) {
    double s = b[k];
    for (std::size_t c = k + 1; c < p; ++c) s -= a[k][c] * x[c];
    x[k] = s / a[k][k];
  }
  return x;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0,
                                         double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace oracle

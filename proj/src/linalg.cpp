#include "arbench/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "arbench/error.hpp"

namespace arbench {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NearSingular: return "NearSingular";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::NonStationary: return "NonStationary";
    case Errc::DegenerateSeries: return "DegenerateSeries";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::ParseError: return "ParseError";
    case Errc::MissingWarmup: return "MissingWarmup";
    case Errc::Diverged: return "Diverged";
    case Errc::TooShort: return "TooShort";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::Io: return "Io";
    case Errc::Config: return "Config";
  }
  return "Unknown";
}

namespace linalg {

SquareMatrix SquareMatrix::identity(std::size_t order, double scale) {
  SquareMatrix m(order);
  m.add_to_diagonal(scale);
  return m;
}

SquareMatrix SquareMatrix::symmetric_toeplitz(std::span<const double> first_row) {
  const std::size_t n = first_row.size();
  SquareMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = first_row[j - i];
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

std::vector<double> SquareMatrix::multiply(std::span<const double> x) const {
  if (x.size() != order_) {
    throw Error(Errc::InvalidArgument, "matrix-vector size mismatch");
  }
  std::vector<double> out(order_, 0.0);
  for (std::size_t i = 0; i < order_; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < order_; ++j) acc += (*this)(i, j) * x[j];
    out[i] = acc;
  }
  return out;
}

void SquareMatrix::symmetrize() noexcept {
  for (std::size_t i = 0; i < order_; ++i) {
    for (std::size_t j = i + 1; j < order_; ++j) {
      const double v = 0.5 * ((*this)(i, j) + (*this)(j, i));
      (*this)(i, j) = v;
      (*this)(j, i) = v;
    }
  }
}

void SquareMatrix::add_to_diagonal(double value) noexcept {
  for (std::size_t i = 0; i < order_; ++i) (*this)(i, i) += value;
}

double SquareMatrix::asymmetry() const noexcept {
  double worst = 0.0;
  for (std::size_t i = 0; i < order_; ++i) {
    for (std::size_t j = i + 1; j < order_; ++j) {
      worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
    }
  }
  return worst;
}

std::vector<double> solve_linear_system(SquareMatrix a, std::span<const double> b) {
  const std::size_t n = a.order();
  if (b.size() != n) {
    throw Error(Errc::InvalidArgument, "right-hand side length " + std::to_string(b.size()) +
                                           " does not match order " + std::to_string(n));
  }
  std::vector<double> x(b.begin(), b.end());

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot_row = col;
    double pivot_mag = std::abs(a(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double mag = std::abs(a(r, col));
      if (mag > pivot_mag) {
        pivot_mag = mag;
        pivot_row = r;
      }
    }
    if (!(pivot_mag >= kPivotThreshold)) {
      throw Error(Errc::NearSingular,
                  "pivot " + std::to_string(pivot_mag) + " in column " + std::to_string(col));
    }
    if (pivot_row != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(pivot_row, c));
      std::swap(x[col], x[pivot_row]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a(r, col) / a(col, col);
      if (factor == 0.0) continue;
      a(r, col) = 0.0;
      for (std::size_t c = col + 1; c < n; ++c) a(r, c) -= factor * a(col, c);
      x[r] -= factor * x[col];
    }
  }

  for (std::size_t i = n; i-- > 0;) {
    double acc = x[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= a(i, c) * x[c];
    x[i] = acc / a(i, i);
  }
  return x;
}

bool is_positive_semidefinite(const SquareMatrix& a, double tol) {
  if (a.asymmetry() > tol) {
    throw Error(Errc::NotSymmetric, "matrix asymmetry exceeds tolerance");
  }
  const auto n = static_cast<Eigen::Index>(a.order());
  if (n == 0) return true;
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      m(i, j) = 0.5 * (a(i, j) + a(j, i));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff() >= -tol;
}

double companion_spectral_radius(std::span<const double> coefficients) {
  const std::size_t p = coefficients.size();
  if (p == 0) throw Error(Errc::InvalidArgument, "empty coefficient vector");
  if (p == 1) return std::abs(coefficients[0]);

  const auto n = static_cast<Eigen::Index>(p);
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) companion(0, j) = coefficients[j];
  for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double acc = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(std::span<const double> v) noexcept { return std::sqrt(dot(v, v)); }

double norm_inf(std::span<const double> v) noexcept {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace linalg
}  // namespace arbench

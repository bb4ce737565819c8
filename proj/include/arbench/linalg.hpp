#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace arbench::linalg {

/// Dense square matrix, row-major.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t order, double fill = 0.0)
      : order_(order), entries_(order * order, fill) {}

  static SquareMatrix identity(std::size_t order, double scale = 1.0);

  /// R[i][j] = first_row[|i - j|]; both triangles are written from the same
  /// source element so the result is bit-symmetric.
  static SquareMatrix symmetric_toeplitz(std::span<const double> first_row);

  std::size_t order() const noexcept { return order_; }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return entries_[i * order_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) noexcept {
    return entries_[i * order_ + j];
  }

  std::span<const double> entries() const noexcept { return entries_; }

  std::vector<double> multiply(std::span<const double> x) const;

  /// Overwrites with (A + A^T) / 2.
  void symmetrize() noexcept;

  /// Adds `value` to every diagonal entry.
  void add_to_diagonal(double value) noexcept;

  /// Largest |a_ij - a_ji|.
  double asymmetry() const noexcept;

 private:
  std::size_t order_ = 0;
  std::vector<double> entries_;
};

inline constexpr double kPivotThreshold = 1e-12;

/// Solves a x = b by Gaussian elimination with partial pivoting.
/// Throws Error(NearSingular) when a pivot falls below kPivotThreshold in
/// magnitude; the caller decides how to regularize.
std::vector<double> solve_linear_system(SquareMatrix a, std::span<const double> b);

/// True iff the smallest eigenvalue of (a + a^T)/2 is >= -tol.
/// Throws Error(NotSymmetric) when the asymmetry exceeds tol.
bool is_positive_semidefinite(const SquareMatrix& a, double tol);

/// Spectral radius of the companion matrix whose first row holds the AR
/// coefficients. The process is stationary iff the result is < 1.
double companion_spectral_radius(std::span<const double> coefficients);

/// Eigenvalue round-off puts exact unit roots anywhere within a few ulps of 1,
/// so stationarity requires the radius to clear 1 by this margin.
inline constexpr double kUnitRootMargin = 1e-9;

inline bool is_stationary(std::span<const double> coefficients) {
  return companion_spectral_radius(coefficients) < 1.0 - kUnitRootMargin;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double norm2(std::span<const double> v) noexcept;
double norm_inf(std::span<const double> v) noexcept;

}  // namespace arbench::linalg

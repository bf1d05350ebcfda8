#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qtt {

/// Row-major matrix of finite doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  /// Zero matrix.
  DenseMatrix(std::size_t rows, std::size_t cols);
  /// Takes ownership of row-major data; throws DomainError on size mismatch
  /// or non-finite entries.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix identity(std::size_t n);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }

  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
  [[nodiscard]] std::span<double> data() noexcept { return data_; }

  [[nodiscard]] DenseMatrix transposed() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

[[nodiscard]] DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);

/// Thin SVD: left_vectors is rows x r, right_vectors_t is r x cols with
/// r = min(rows, cols); singular values nonincreasing.
struct SvdResult {
  DenseMatrix left_vectors;
  std::vector<double> singular_values;
  DenseMatrix right_vectors_t;
  /// Number of leading singular values at or above noise_floor(sigma_1);
  /// the rest are reported but not trustworthy.
  std::size_t above_noise = 0;
};

/// Backward-stable thin SVD (Householder bidiagonalization, divide and
/// conquer). Throws DomainError on non-finite input and NumericalError if the
/// iteration fails.
[[nodiscard]] SvdResult svd(const DenseMatrix& m);

/// Singular values only, nonincreasing.
[[nodiscard]] std::vector<double> singular_values(const DenseMatrix& m);

/// Left singular vectors (rows x rank) and singular values of a row-major
/// rows x cols block. Wide inputs are first reduced by a Householder LQ
/// factorization so the SVD runs on a rows x rows triangle; the result is
/// backward stable for any aspect ratio.
struct LeftSingularFactor {
  DenseMatrix left_vectors;
  std::vector<double> singular_values;
};
[[nodiscard]] LeftSingularFactor left_singular_factor(std::span<const double> row_major,
                                                      std::size_t rows, std::size_t cols);

/// Smallest r with sqrt(sum_{i>r} sigma_i^2) <= delta. Ties keep the smaller
/// rank. Expects nonincreasing input.
[[nodiscard]] std::size_t eps_rank(std::span<const double> singular_values, double delta);

/// sqrt(sum_{i>r} sigma_i^2) for r = 0..n (length n+1, last entry 0).
[[nodiscard]] std::vector<double> tail_norms(std::span<const double> singular_values);

[[nodiscard]] double spectral_norm(const DenseMatrix& m);
[[nodiscard]] double frobenius_norm(const DenseMatrix& m);

/// Relative tolerance used by min_eigenvalue_symmetric's symmetry guard.
inline constexpr double kSymmetryTolerance = 1e-12;

/// Smallest eigenvalue of (M + M^T)/2. Throws DomainError when M is not
/// square or |M - M^T| exceeds kSymmetryTolerance * max|M|.
[[nodiscard]] double min_eigenvalue_symmetric(const DenseMatrix& m);

/// Singular values below this are noise for a matrix with largest value sigma1.
[[nodiscard]] double noise_floor(double sigma1) noexcept;

}  // namespace qtt

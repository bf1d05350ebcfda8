#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "qttrank/densela.hpp"
#include "qttrank/tensor_train.hpp"

namespace qtt {

enum class ToleranceMode { Relative, Absolute };

[[nodiscard]] std::string_view to_string(ToleranceMode mode) noexcept;
/// Accepts "relative" / "absolute" (case-insensitive); DomainError otherwise.
[[nodiscard]] ToleranceMode parse_tolerance_mode(std::string_view text);

/// Total Frobenius error target for a TT-SVD sweep. The budget is split
/// evenly over the d - 1 truncations:
///
///   Relative: delta = eps * ||input||_F / sqrt(d - 1)
///   Absolute: delta = eps / sqrt(d - 1)
///
/// max_rank, when nonzero, additionally caps every edge rank.
struct TruncationPolicy {
  double eps = 1e-9;
  ToleranceMode mode = ToleranceMode::Relative;
  std::size_t max_rank = 0;

  [[nodiscard]] double per_step_delta(double input_norm, int d) const;

  static TruncationPolicy relative(double eps) { return {eps, ToleranceMode::Relative, 0}; }
  static TruncationPolicy absolute(double eps) { return {eps, ToleranceMode::Absolute, 0}; }
  static TruncationPolicy rank_capped(std::size_t max_rank) {
    return {0.0, ToleranceMode::Absolute, max_rank};
  }
};

/// log2(n) for a power of two n >= 2; DomainError otherwise.
[[nodiscard]] int exact_log2(std::size_t n);

/// 2^s x 2^{d-s} matrix with entry (i, j) = v[(i-1) 2^{d-s} + j] (1-based).
[[nodiscard]] DenseMatrix unfolding(std::span<const double> v, int s);

/// Diagnostics of one sweep: the discarded Frobenius norm at each edge and
/// the per-step threshold that was applied.
struct SweepReport {
  double per_step_delta = 0.0;
  std::vector<double> discarded;  // length d - 1
};

/// Left-to-right TT-SVD of a vector of length 2^d (d >= 2). Every core but
/// the last is left-orthogonal, and in Relative mode
/// ||v - to_full(result)|| <= eps ||v||.
[[nodiscard]] TensorTrain decompose(std::span<const double> v, const TruncationPolicy& policy,
                                    SweepReport* report = nullptr);

/// Right-to-left orthogonalization followed by a truncating left-to-right
/// sweep. Output edge ranks never exceed the input's, and the error contract
/// matches decompose with ||tt|| in place of ||v||.
[[nodiscard]] TensorTrain recompress(const TensorTrain& tt, const TruncationPolicy& policy,
                                     SweepReport* report = nullptr);

struct ReconstructionError {
  double absolute = 0.0;
  double relative = 0.0;
};

/// ||v - to_full(tt)|| and that value divided by ||v||.
[[nodiscard]] ReconstructionError reconstruction_error(std::span<const double> v,
                                                       const TensorTrain& tt);

}  // namespace qtt

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qtt {

/// One order-3 core G(a, i, b) of a quantized tensor train: left rank x 2 x
/// right rank, stored row-major (b fastest, then i, then a).
class TtCore {
 public:
  static constexpr std::size_t kModeSize = 2;

  TtCore() = default;
  /// Throws DomainError on a shape/data mismatch or non-finite entries.
  TtCore(std::size_t left_rank, std::size_t right_rank, std::vector<double> data);

  [[nodiscard]] std::size_t left_rank() const noexcept { return left_; }
  [[nodiscard]] std::size_t right_rank() const noexcept { return right_; }

  [[nodiscard]] double operator()(std::size_t a, std::size_t bit, std::size_t b) const noexcept {
    return data_[(a * kModeSize + bit) * right_ + b];
  }
  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const TtCore&, const TtCore&) = default;

 private:
  std::size_t left_ = 0;
  std::size_t right_ = 0;
  std::vector<double> data_;
};

/// Quantized tensor train representing a vector of length 2^d:
///
///   v(k) = G_1[i_1] G_2[i_2] ... G_d[i_d],   k - 1 = sum_j i_j 2^{d-j}
///
/// so i_1 is the most significant bit of k - 1. With this order the
/// s-th unfolding of the quantized tensor is the 2^s x 2^{d-s} matrix with
/// entries v((i-1) 2^{d-s} + j). Boundary ranks are 1; immutable once built.
class TensorTrain {
 public:
  /// Throws DomainError unless the core chain is consistent with r_0 = r_d = 1.
  explicit TensorTrain(std::vector<TtCore> cores);

  [[nodiscard]] int dims() const noexcept { return static_cast<int>(cores_.size()); }
  [[nodiscard]] const TtCore& core(std::size_t i) const { return cores_.at(i); }
  [[nodiscard]] std::span<const TtCore> cores() const noexcept { return cores_; }
  /// (r_0, r_1, ..., r_d).
  [[nodiscard]] std::vector<std::size_t> ranks() const;
  /// (r_1, ..., r_{d-1}).
  [[nodiscard]] std::vector<std::size_t> edge_ranks() const;
  /// Number of stored parameters.
  [[nodiscard]] std::size_t parameter_count() const noexcept;
  /// 2^d.
  [[nodiscard]] std::uint64_t length() const noexcept { return std::uint64_t{1} << cores_.size(); }

  friend bool operator==(const TensorTrain&, const TensorTrain&) = default;

 private:
  std::vector<TtCore> cores_;
};

/// Maximal rank R and average rank (r_1 + ... + r_{d-1}) / d of a train.
struct RankProfile {
  std::vector<std::size_t> edge_ranks;
  std::size_t max_rank = 1;
  double avg_rank = 0.0;
};

[[nodiscard]] RankProfile rank_profile(const TensorTrain& tt);
[[nodiscard]] RankProfile rank_profile(std::span<const std::size_t> edge_ranks);

/// v(k) for 1 <= k <= 2^d; DomainError otherwise.
[[nodiscard]] double element(const TensorTrain& tt, std::uint64_t k);

/// Largest d that to_full will materialize.
inline constexpr int kMaxFullDims = 26;

/// Dense vector by sequential core contraction. ResourceError above max_dims.
[[nodiscard]] std::vector<double> to_full(const TensorTrain& tt, int max_dims = kMaxFullDims);

/// ||v||_2 through the Gram chain, O(d R^3), without forming v.
[[nodiscard]] double frobenius_norm(const TensorTrain& tt);

/// Elementwise product. Cores are slice-wise Kronecker products, so
/// r_i(result) = r_i(a) * r_i(b) exactly; no rounding is applied.
[[nodiscard]] TensorTrain hadamard(const TensorTrain& a, const TensorTrain& b);

/// Rank-1 train of exp(-beta k). Core j holds the slices (1, exp(-beta 2^{d-j})),
/// with the common factor exp(-beta) folded into core 1. Slices that underflow
/// are clamped to 0 and reported through `underflowed`.
[[nodiscard]] TensorTrain exponential_qtt(double beta, int d, bool* underflowed = nullptr);

/// Rank-1 train with every slice equal to 1 (the all-ones vector).
[[nodiscard]] TensorTrain ones_qtt(int d);

}  // namespace qtt

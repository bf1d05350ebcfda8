#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qtt {

enum class SequenceKind { PowerLaw, DampedPowerLaw, Exponential, Reciprocal };

/// Symbolic description of a positive, strictly decreasing sequence f(k),
/// k = 1, 2, ...
///
///   PowerLaw        f(k) = k^-alpha                  (alpha > 0)
///   DampedPowerLaw  f(k) = k^-alpha * exp(-lambda k) (alpha > 0, lambda > 0)
///   Exponential     f(k) = exp(-beta k)              (beta > 0)
///   Reciprocal      f(k) = 1/k                       (alpha fixed to 1)
///
/// Construction goes through the named factories, which reject parameters
/// outside these ranges with DomainError.
class SequenceSpec {
 public:
  static SequenceSpec power_law(double alpha);
  static SequenceSpec damped_power_law(double alpha, double lambda);
  static SequenceSpec exponential(double beta);
  static SequenceSpec reciprocal();

  [[nodiscard]] SequenceKind kind() const noexcept { return kind_; }
  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] double lambda() const noexcept { return lambda_; }
  [[nodiscard]] double beta() const noexcept { return beta_; }

  /// f(k). Throws DomainError for k < 1.
  [[nodiscard]] double operator()(std::int64_t k) const;

  /// Same as operator() for real arguments x >= 1 (used by integral bounds).
  [[nodiscard]] double at(double x) const noexcept;

  [[nodiscard]] std::string describe() const;

  friend bool operator==(const SequenceSpec&, const SequenceSpec&) = default;

 private:
  SequenceSpec(SequenceKind kind, double alpha, double lambda, double beta)
      : kind_(kind), alpha_(alpha), lambda_(lambda), beta_(beta) {}

  SequenceKind kind_;
  double alpha_;
  double lambda_;
  double beta_;
};

[[nodiscard]] double eval(const SequenceSpec& spec, std::int64_t k);

/// Upper bound on d for dense vectors. 26 is 512 MiB of doubles; callers
/// may raise it up to kHardMaxDims.
struct VectorLimits {
  static constexpr int kDefaultMaxDims = 26;
  static constexpr int kHardMaxDims = 30;
  int max_dims = kDefaultMaxDims;

  static VectorLimits large() { return VectorLimits{kHardMaxDims}; }
};

/// (f(1), ..., f(2^d)). Throws ResourceError when d exceeds the limit.
[[nodiscard]] std::vector<double> generate_vector(const SequenceSpec& spec, int d,
                                                  VectorLimits limits = {});

/// Bytes needed for a dense vector of length 2^d.
[[nodiscard]] std::uint64_t dense_vector_bytes(int d) noexcept;

/// Essential supremum of |g| where g has Fourier coefficients f(k).
/// Summable kinds return sum_k f(k) to relative accuracy rel_tol; Reciprocal
/// (and PowerLaw with alpha = 1) returns pi. PowerLaw with alpha < 1 throws
/// UnsupportedError.
[[nodiscard]] double majorant_M(const SequenceSpec& spec, double rel_tol = 1e-12);

/// Smallest N >= 1 with sqrt(sum_{k>=N} f(k)^2) < eps, using exact partial
/// sums and a rigorous upper bound for the remainder. Throws UnsupportedError
/// when the tail diverges (PowerLaw with alpha <= 1/2).
[[nodiscard]] std::int64_t tail_threshold(const SequenceSpec& spec, double eps);

/// Rigorous bracket [lower, upper] on sum_{k>=n} f(k)^2.
struct TailBracket {
  double lower;
  double upper;
};
[[nodiscard]] TailBracket tail_energy(const SequenceSpec& spec, std::int64_t n);

}  // namespace qtt

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qttrank/densela.hpp"
#include "qttrank/experiment_record.hpp"
#include "qttrank/seqgen.hpp"

namespace qtt {

/// rows x cols Hankel matrix with entry (p, q) = f(p + q - 1), 1-based.
struct HankelSpec {
  std::size_t rows = 0;
  std::size_t cols = 0;
  SequenceSpec sequence = SequenceSpec::reciprocal();
};

/// Square 2^{d-1} x 2^{d-1} sample, used for the PSD and decay checks.
[[nodiscard]] HankelSpec square_hankel(const SequenceSpec& f, int d);

/// (2^d - 2^{d-s} + 1) x 2^{d-s} Hankel matrix that contains the s-th
/// unfolding of (f(1), ..., f(2^d)) as a row subset: unfolding row i sits at
/// Hankel row (i-1) 2^{d-s} + 1.
[[nodiscard]] HankelSpec covering_hankel(const SequenceSpec& f, int d, int s);

inline constexpr std::size_t kDefaultHankelEntryBudget = std::size_t{1} << 26;

/// Dense realization; ResourceError above the entry budget.
[[nodiscard]] DenseMatrix build_hankel(const HankelSpec& h,
                                       std::size_t max_entries = kDefaultHankelEntryBudget);

/// exp(pi^2 / (4 ((d + 2) ln 2 - ln pi))): the geometric decay factor in the
/// singular-value bound for PSD Hankel matrices. Always > 1, decreasing in d.
[[nodiscard]] double q_factor(int d);

/// Outcome of checking sigma_{2k+1} <= 16 q(d)^{-2k+2} sigma_1 on one matrix.
struct BoundReport {
  int d = 0;
  double q_of_d = 0.0;
  std::vector<double> sigma;
  // bound_curve[k] is the bound on sigma_{2k+1}.
  std::vector<double> bound_curve;
  // 1-based singular value indices that exceed their bound above the noise floor.
  std::vector<std::size_t> violations;
  double norm_h = 0.0;
  // Majorant M for the generating sequence, when known.
  std::optional<double> norm_bound_M;
  double min_eigenvalue = 0.0;
  double noise_floor = 0.0;
  // Odd indices actually compared (sigma at or above the noise floor).
  std::size_t compared = 0;
  // min over compared indices of bound / sigma.
  double min_margin = 0.0;
  // Smallest C1 with tail_r(H) <= C1 ||H|| d q^{-r} for every r above noise,
  // and smallest C2 with eps_rank(H, eps) <= C2 d (ln d + ln 1/eps + ln ||H|| + 1)
  // over the reference tolerance grid.
  double c1_hat = 0.0;
  double c2_hat = 0.0;
};

/// Relative tolerance for the PSD precondition of verify_decay_bound.
inline constexpr double kPsdTolerance = 1e-12;

/// Computes all singular values of a square PSD Hankel matrix and compares
/// them with the bound. Throws DomainError when the minimal eigenvalue is
/// below -kPsdTolerance * sigma_1.
[[nodiscard]] BoundReport verify_decay_bound(const DenseMatrix& h, int d,
                                             std::optional<double> majorant = std::nullopt);

/// Smallest r >= 0 with C1 * norm_h * d * q(d)^{-r} <= eps.
[[nodiscard]] std::int64_t rank_bound(double eps, int d, double norm_h, double c1);

/// Tolerances 1e-2 ... 1e-9 used throughout the rank experiments.
[[nodiscard]] std::vector<double> default_eps_grid();

struct ConstantFit {
  double value = 0.0;
  // Index of the observation that attains the maximum.
  std::size_t tight_index = 0;
};

/// Smallest C with R <= C d (ln d + ln(1/eps_abs) + ln M + 1) for every
/// record, where eps_abs is the absolute Frobenius tolerance of the cell and
/// M the sequence majorant. Records that failed are skipped. Throws
/// DomainError when nothing usable remains.
[[nodiscard]] ConstantFit fit_rank_constant(std::span<const ExperimentRecord> records);

/// Smallest C1 consistent with every report (max of the per-report c1_hat).
[[nodiscard]] ConstantFit fit_distance_constant(std::span<const BoundReport> reports);

struct FittedConstants {
  std::optional<ConstantFit> c1;
  std::optional<ConstantFit> c2;
};

/// Both fits at once; either span may be empty but not both.
[[nodiscard]] FittedConstants fit_constants(std::span<const ExperimentRecord> records,
                                            std::span<const BoundReport> reports);

/// Result of checking that an unfolding is a submatrix of its covering
/// Hankel matrix and that its singular values are dominated.
struct SubmatrixCheck {
  bool ok = true;
  std::size_t entries_checked = 0;
  std::vector<double> sigma_unfolding;
  std::vector<double> sigma_hankel;
  std::vector<std::string> failures;
};

/// Requires 2 <= d <= 14 and 1 <= s <= d - 1.
[[nodiscard]] SubmatrixCheck unfolding_submatrix_check(const SequenceSpec& f, int d, int s);

[[nodiscard]] nlohmann::json to_json(const BoundReport& report);

}  // namespace qtt

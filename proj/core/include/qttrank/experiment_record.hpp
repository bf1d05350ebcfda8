#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qttrank/seqgen.hpp"
#include "qttrank/ttsvd.hpp"

namespace qtt {

/// How a measured maximal rank compares with the reference table.
enum class MatchKind { Exact, WithinOne, Mismatch, NoReference };

[[nodiscard]] std::string_view to_string(MatchKind m) noexcept;
[[nodiscard]] MatchKind parse_match_kind(std::string_view text);
[[nodiscard]] MatchKind classify_match(std::size_t measured, std::optional<int> reference) noexcept;

/// One (alpha, lambda, d, eps) grid cell.
struct ExperimentRecord {
  double alpha = 0.0;
  double lambda = 0.0;
  int d = 0;
  double eps = 0.0;
  ToleranceMode mode = ToleranceMode::Relative;
  std::vector<std::size_t> edge_ranks;
  std::size_t max_rank = 0;
  double avg_rank = 0.0;
  double rel_error = 0.0;
  double abs_error = 0.0;
  double input_norm = 0.0;
  double wall_time = 0.0;
  std::optional<int> reference_R;
  std::optional<double> reference_avg;
  MatchKind match = MatchKind::NoReference;
  // rel_error <= eps in Relative mode (abs_error <= eps in Absolute mode).
  bool error_bound_ok = true;
  // Leading edges the tail argument predicts to have rank 1, and whether the
  // measured ranks honour that.
  std::size_t predicted_unit_edges = 0;
  bool saturation_ok = true;
  // Set when the cell threw; numeric fields are then meaningless.
  std::optional<std::string> failure;

  friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

/// Sequence for a cell: alpha > 0, lambda = 0 is k^-alpha; alpha > 0,
/// lambda > 0 is the damped power law; alpha = 0, lambda > 0 is exp(-lambda k).
[[nodiscard]] SequenceSpec sequence_for(double alpha, double lambda);

}  // namespace qtt

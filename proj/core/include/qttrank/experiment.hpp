#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qttrank/experiment_record.hpp"
#include "qttrank/hankel.hpp"
#include "qttrank/seqgen.hpp"
#include "qttrank/ttsvd.hpp"

namespace qtt {

struct CellRequest {
  double alpha = 0.0;
  double lambda = 0.0;
  int d = 0;
  double eps = 0.0;
  ToleranceMode mode = ToleranceMode::Relative;
};

/// Generates the vector, runs TT-SVD, measures ranks and error and attaches
/// the reference entry when one exists (lambda = 0, Relative mode). Failures
/// are recorded in `failure` instead of thrown.
[[nodiscard]] ExperimentRecord run_cell(const CellRequest& request, VectorLimits limits = {});

/// Number of leading edges s = 1, 2, ... whose TT-SVD rank must be 1 because
/// every unfolding row after the first lies beyond the tail threshold for the
/// per-step tolerance delta.
[[nodiscard]] std::size_t predicted_unit_edges(const SequenceSpec& f, int d, double delta);

/// Flat grid configuration (also the schema of the JSON config file).
struct GridConfig {
  std::vector<double> alphas{2.5, 1.5};
  std::vector<double> lambdas{0.0};
  int d_min = 12;
  int d_max = 24;
  int d_step = 2;
  std::vector<double> eps_list = default_eps_grid();
  ToleranceMode mode = ToleranceMode::Relative;
  std::filesystem::path out_dir = ".";
  std::vector<std::string> formats{"csv"};
  int workers = 1;
  bool allow_large_d = false;
};

/// Reads a flat JSON object with any of the keys alphas, lambdas, d_min,
/// d_max, d_step, eps_list, mode, out_dir, formats, workers, allow_large_d.
/// Unknown keys and nested objects are rejected.
[[nodiscard]] GridConfig grid_config_from_json(const nlohmann::json& j);
[[nodiscard]] GridConfig load_grid_config(const std::filesystem::path& path);

/// Cells in table order: alpha, lambda, d descending, eps as listed.
[[nodiscard]] std::vector<CellRequest> grid_cells(const GridConfig& config);

struct GridSummary {
  std::size_t exact = 0;
  std::size_t within_one = 0;
  std::size_t mismatch = 0;
  std::size_t no_reference = 0;
  std::size_t failed = 0;
  std::size_t bound_violations = 0;
  std::size_t saturation_violations = 0;

  [[nodiscard]] std::size_t total() const noexcept {
    return exact + within_one + mismatch + no_reference;
  }
  /// No mismatch, no failed cell, no error-bound violation.
  [[nodiscard]] bool clean() const noexcept {
    return mismatch == 0 && failed == 0 && bound_violations == 0;
  }
};

[[nodiscard]] GridSummary summarize(std::span<const ExperimentRecord> records);

struct GridRun {
  std::vector<ExperimentRecord> records;
  GridSummary summary;
};

/// Runs every cell of the grid on up to config.workers threads. Record order
/// and every numeric result except wall_time are independent of scheduling.
[[nodiscard]] GridRun run_table1(const GridConfig& config);

struct ToleranceSweepPoint {
  double eps = 0.0;
  std::size_t max_rank = 0;
  double avg_rank = 0.0;
  double rel_error = 0.0;
  std::vector<std::size_t> edge_ranks;
};

struct RankSweepPoint {
  std::size_t rank_budget = 0;
  std::size_t max_rank = 0;
  double rel_error = 0.0;
};

struct Figure1Series {
  double alpha = 0.0;
  int d = 0;
  std::vector<ToleranceSweepPoint> tolerance_sweep;
  // Achieved error when every edge rank is capped at 1, 2, ... up to the
  // largest rank seen in the tolerance sweep.
  std::vector<RankSweepPoint> rank_sweep;
};

[[nodiscard]] Figure1Series run_figure1(double alpha, int d,
                                        const std::vector<double>& eps_list = default_eps_grid(),
                                        VectorLimits limits = {});

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least squares y ~ slope x + intercept. r_squared is 1 when y is constant.
[[nodiscard]] LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Growth of R in ln(1/eps) at fixed (alpha, lambda, d).
struct RankGrowth {
  double alpha = 0.0;
  double lambda = 0.0;
  int d = 0;
  LinearFit fit;
  bool nondecreasing = true;
};

/// Average rank against d at fixed (alpha, lambda, eps), d ascending.
struct AvgRankTrend {
  double alpha = 0.0;
  double lambda = 0.0;
  double eps = 0.0;
  std::vector<int> d;
  std::vector<double> avg_rank;
  bool nonincreasing = true;
};

struct ScalingAnalysis {
  std::vector<RankGrowth> growth;
  std::vector<AvgRankTrend> trends;
  ConstantFit c2;
};

[[nodiscard]] ScalingAnalysis analyze_scaling(std::span<const ExperimentRecord> records);

struct RankCurvePoint {
  int d = 0;
  double eps = 0.0;
  std::size_t observed_hankel_rank = 0;
  std::int64_t predicted_rank = 0;
};

struct BoundsRun {
  double alpha = 0.0;
  std::optional<double> majorant;
  std::vector<BoundReport> reports;
  std::vector<ExperimentRecord> records;
  FittedConstants constants;
  std::vector<RankCurvePoint> rank_curves;
  ScalingAnalysis scaling;
};

inline constexpr int kMaxDenseHankelDims = 12;

/// Decay-bound verification, norm vs majorant, and constant fits over
/// k^-alpha for each d in d_list (each <= kMaxDenseHankelDims).
[[nodiscard]] BoundsRun run_bounds(double alpha, const std::vector<int>& d_list,
                                   const std::vector<double>& eps_list = default_eps_grid());

[[nodiscard]] nlohmann::json to_json(const Figure1Series& series);
[[nodiscard]] nlohmann::json to_json(const ScalingAnalysis& analysis);
[[nodiscard]] nlohmann::json to_json(const BoundsRun& run);
[[nodiscard]] nlohmann::json to_json(const GridSummary& summary);

}  // namespace qtt

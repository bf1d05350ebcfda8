#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qttrank/densela.hpp"
#include "qttrank/errors.hpp"
#include "qttrank/experiment.hpp"
#include "qttrank/record_io.hpp"
#include "qttrank/ttsvd.hpp"

namespace qtt {
namespace {

namespace fs = std::filesystem;

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

ExperimentRecord without_time(ExperimentRecord r) {
  r.wall_time = 0.0;
  return r;
}

GridConfig small_grid() {
  GridConfig g;
  g.d_min = 10;
  g.d_max = 14;
  return g;
}

TEST(ExperimentOracle, ReferenceCell) {
  const ExperimentRecord r = run_cell({2.5, 0.0, 20, 1e-6, ToleranceMode::Relative});
  ASSERT_FALSE(r.failure);
  EXPECT_EQ(r.max_rank, 4u);
  EXPECT_NEAR(r.avg_rank, 2.00, 0.15);
  EXPECT_EQ(r.reference_R, 4);
  EXPECT_EQ(r.reference_avg, 2.00);
  EXPECT_EQ(r.match, MatchKind::Exact);
  EXPECT_TRUE(r.error_bound_ok);
  EXPECT_LE(r.rel_error, 1e-6);
  EXPECT_EQ(r.edge_ranks.size(), 19u);
}

TEST(ExperimentOracle, ExponentialCell) {
  for (double eps : {1e-2, 1e-9}) {
    const ExperimentRecord r = run_cell({0.0, 0.3, 14, eps, ToleranceMode::Relative});
    ASSERT_FALSE(r.failure);
    EXPECT_EQ(r.max_rank, 1u);
    EXPECT_LE(r.rel_error, 1e-14);
    EXPECT_EQ(r.match, MatchKind::NoReference);
  }
}

TEST(ExperimentOracle, EmptyGrid) {
  GridConfig g;
  g.d_min = 14;
  g.d_max = 12;
  const GridRun run = run_table1(g);
  EXPECT_TRUE(run.records.empty());
  EXPECT_EQ(run.summary.total(), 0u);
  EXPECT_TRUE(run.summary.clean());
}

TEST(ExperimentOracle, FigureSweeps) {
  const Figure1Series one = run_figure1(1.5, 12, {1e-5});
  ASSERT_EQ(one.tolerance_sweep.size(), 1u);
  const Figure1Series s = run_figure1(1.5, 14);
  ASSERT_EQ(s.tolerance_sweep.size(), 8u);
  ASSERT_FALSE(s.rank_sweep.empty());
  EXPECT_EQ(s.rank_sweep.size(), s.tolerance_sweep.back().max_rank);
  for (std::size_t i = 1; i < s.rank_sweep.size(); ++i) {
    EXPECT_LT(s.rank_sweep[i].rel_error, s.rank_sweep[i - 1].rel_error);
    EXPECT_EQ(s.rank_sweep[i].max_rank, s.rank_sweep[i].rank_budget);
  }
  for (const auto& p : s.tolerance_sweep) EXPECT_LE(p.rel_error, p.eps);
}

TEST(ExperimentOracle, BoundsRun) {
  const BoundsRun run = run_bounds(2.5, {6, 8, 10});
  ASSERT_EQ(run.reports.size(), 3u);
  for (const auto& r : run.reports) EXPECT_TRUE(r.violations.empty()) << r.d;
  ASSERT_TRUE(run.majorant);
  for (const auto& r : run.reports) EXPECT_LE(r.norm_h, *run.majorant);
  ASSERT_TRUE(run.constants.c1);
  ASSERT_TRUE(run.constants.c2);
  for (const auto& p : run.rank_curves) {
    EXPECT_GE(p.predicted_rank, static_cast<std::int64_t>(p.observed_hankel_rank)) << p.d << " " << p.eps;
  }
  EXPECT_EQ(run.records.size(), 24u);
  EXPECT_THROW((void)run_bounds(2.5, {13}), DomainError);
  const nlohmann::json j = to_json(run);
  EXPECT_EQ(j.at("reports").size(), 3u);
}

TEST(Experiment, MatchClassification) {
  EXPECT_EQ(classify_match(5, 5), MatchKind::Exact);
  EXPECT_EQ(classify_match(6, 5), MatchKind::WithinOne);
  EXPECT_EQ(classify_match(4, 5), MatchKind::WithinOne);
  EXPECT_EQ(classify_match(7, 5), MatchKind::Mismatch);
  EXPECT_EQ(classify_match(0, 2), MatchKind::Mismatch);
  EXPECT_EQ(classify_match(3, std::nullopt), MatchKind::NoReference);
  for (MatchKind m : {MatchKind::Exact, MatchKind::WithinOne, MatchKind::Mismatch, MatchKind::NoReference}) {
    EXPECT_EQ(parse_match_kind(to_string(m)), m);
  }
  EXPECT_THROW((void)parse_match_kind("Close"), DomainError);
}

TEST(Experiment, SequenceMapping) {
  EXPECT_EQ(sequence_for(1.5, 0.0), SequenceSpec::power_law(1.5));
  EXPECT_EQ(sequence_for(1.5, 0.2), SequenceSpec::damped_power_law(1.5, 0.2));
  EXPECT_EQ(sequence_for(0.0, 0.2), SequenceSpec::exponential(0.2));
  EXPECT_THROW((void)sequence_for(0.0, 0.0), DomainError);
}

TEST(Experiment, FailedCellsAreRecorded) {
  const ExperimentRecord big = run_cell({2.5, 0.0, 27, 1e-3, ToleranceMode::Relative});
  ASSERT_TRUE(big.failure);
  EXPECT_NE(big.failure->find("MiB"), std::string::npos);
  EXPECT_EQ(big.match, MatchKind::NoReference);
  const ExperimentRecord bad = run_cell({-1.0, 0.0, 8, 1e-3, ToleranceMode::Relative});
  EXPECT_TRUE(bad.failure);
  const std::vector<ExperimentRecord> recs{big, bad};
  const GridSummary s = summarize(recs);
  EXPECT_EQ(s.failed, 2u);
  EXPECT_EQ(s.no_reference, 2u);
  EXPECT_FALSE(s.clean());
}

TEST(Experiment, AbsoluteModeHasNoReference) {
  const ExperimentRecord r = run_cell({2.5, 0.0, 12, 1e-6, ToleranceMode::Absolute});
  ASSERT_FALSE(r.failure);
  EXPECT_EQ(r.match, MatchKind::NoReference);
  EXPECT_LE(r.abs_error, 1e-6);
  EXPECT_TRUE(r.error_bound_ok);
}

TEST(Experiment, GridOrderAndSummaryInvariant) {
  GridConfig g = small_grid();
  g.alphas = {2.5, 1.5};
  const auto cells = grid_cells(g);
  ASSERT_EQ(cells.size(), 2u * 3u * 8u);
  EXPECT_EQ(cells.front().alpha, 2.5);
  EXPECT_EQ(cells.front().d, 14);
  EXPECT_EQ(cells.front().eps, 1e-2);
  EXPECT_EQ(cells[1].eps, 1e-3);
  EXPECT_EQ(cells[8].d, 12);
  EXPECT_EQ(cells.back().alpha, 1.5);
  EXPECT_EQ(cells.back().d, 10);
  EXPECT_EQ(cells.back().eps, 1e-9);
  const GridRun run = run_table1(g);
  EXPECT_EQ(run.summary.total(), run.records.size());
  EXPECT_EQ(run.summary.no_reference, 16u);  // d = 10 is not in the table
}

TEST(ExperimentProperty, DeterministicAcrossWorkerCounts) {
  GridConfig g = small_grid();
  g.workers = 1;
  const GridRun a = run_table1(g);
  g.workers = 3;
  const GridRun b = run_table1(g);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(without_time(a.records[i]), without_time(b.records[i])) << i;
  }
  EXPECT_EQ(a.summary.exact, b.summary.exact);
  EXPECT_EQ(a.summary.within_one, b.summary.within_one);
}

TEST(ExperimentProperty, PredictedUnitEdgesAreRankOneInExactUnfoldings) {
  for (double alpha : {1.5, 2.5}) {
    const auto f = SequenceSpec::power_law(alpha);
    const int d = 12;
    const auto v = generate_vector(f, d);
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double eps : {1e-2, 1e-4, 1e-6}) {
      const double delta = TruncationPolicy::relative(eps).per_step_delta(norm, d);
      const std::size_t n = predicted_unit_edges(f, d, delta);
      for (std::size_t s = 1; s <= n; ++s) {
        const auto sigma = singular_values(unfolding(v, static_cast<int>(s)));
        EXPECT_LE(eps_rank(sigma, delta), 1u) << alpha << " " << eps << " s=" << s;
      }
      const ExperimentRecord r = run_cell({alpha, 0.0, d, eps, ToleranceMode::Relative});
      EXPECT_EQ(r.predicted_unit_edges, n);
      EXPECT_TRUE(r.saturation_ok);
    }
  }
  EXPECT_EQ(predicted_unit_edges(SequenceSpec::power_law(0.5), 10, 1e-3), 0u);
}

TEST(Experiment, LineFit) {
  const std::vector<double> x{0, 1, 2, 3};
  const std::vector<double> y{1, 3, 5, 7};
  const LinearFit f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-15);
  EXPECT_NEAR(f.intercept, 1.0, 1e-15);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-15);
  const std::vector<double> flat{4, 4, 4, 4};
  EXPECT_EQ(fit_line(x, flat).r_squared, 1.0);
  EXPECT_EQ(fit_line(x, flat).slope, 0.0);
  const std::vector<double> noisy{0, 1, 0, 1};
  EXPECT_NEAR(fit_line(x, noisy).r_squared, 0.2, 1e-14);
  EXPECT_THROW((void)fit_line(std::vector<double>{1, 1}, std::vector<double>{0, 1}), DomainError);
  EXPECT_THROW((void)fit_line(std::vector<double>{1}, std::vector<double>{1}), DomainError);
}

TEST(Experiment, ScalingAnalysisOnSyntheticRecords) {
  std::vector<ExperimentRecord> recs;
  for (int d : {12, 14}) {
    for (double eps : {1e-2, 1e-4, 1e-6}) {
      ExperimentRecord r;
      r.alpha = 2.5;
      r.d = d;
      r.eps = eps;
      r.input_norm = 1.0;
      r.max_rank = static_cast<std::size_t>(std::round(-std::log10(eps)));
      r.avg_rank = d == 12 ? 2.0 : 1.5 + (eps < 1e-5 ? 1.0 : 0.0);
      recs.push_back(r);
    }
  }
  const ScalingAnalysis a = analyze_scaling(recs);
  ASSERT_EQ(a.growth.size(), 2u);
  for (const auto& g : a.growth) {
    EXPECT_TRUE(g.nondecreasing);
    EXPECT_NEAR(g.fit.r_squared, 1.0, 1e-12);
    EXPECT_GT(g.fit.slope, 0.0);
  }
  ASSERT_EQ(a.trends.size(), 3u);
  EXPECT_TRUE(a.trends[1].nonincreasing);   // eps = 1e-4: 2.0 -> 1.5
  EXPECT_FALSE(a.trends[0].nonincreasing);  // eps = 1e-6: 2.0 -> 2.5
  EXPECT_GT(a.c2.value, 0.0);
}

TEST(ExperimentConfig, FlatJson) {
  const GridConfig g = grid_config_from_json(nlohmann::json::parse(
      R"({"alphas":[1.5],"lambdas":[0],"d_min":12,"d_max":16,"eps_list":[1e-3],"mode":"absolute",
          "out_dir":"out","formats":["csv","json"],"workers":2})"));
  EXPECT_EQ(g.alphas, std::vector<double>{1.5});
  EXPECT_EQ(g.d_max, 16);
  EXPECT_EQ(g.mode, ToleranceMode::Absolute);
  EXPECT_EQ(g.formats.size(), 2u);
  EXPECT_EQ(g.out_dir, fs::path("out"));
  EXPECT_EQ(grid_cells(g).size(), 3u);
  EXPECT_THROW((void)grid_config_from_json(nlohmann::json::parse(R"({"alpha":[1.5]})")), DomainError);
  EXPECT_THROW((void)grid_config_from_json(nlohmann::json::parse(R"({"grid":{"d_min":3}})")), DomainError);
  EXPECT_THROW((void)grid_config_from_json(nlohmann::json::parse(R"({"d_min":"x"})")), DomainError);
  EXPECT_THROW((void)grid_config_from_json(nlohmann::json::parse(R"({"formats":["xml"]})")), DomainError);
  EXPECT_THROW((void)grid_config_from_json(nlohmann::json::parse(R"({"d_step":0})")), DomainError);
}

TEST(RecordIo, EmptyCsvIsHeaderOnly) {
  std::ostringstream os;
  write_csv(os, {});
  EXPECT_EQ(os.str(), std::string(kCsvHeader) + "\n");
}

TEST(RecordIo, ShortestRoundTripNumbers) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.5), "2.5");
  EXPECT_EQ(format_double(1e-9), "1e-09");
  EXPECT_EQ(format_double(2.0), "2");
  for (double x : {1.0 / 3.0, 3.374040783884351e-10, 4.916666666666667}) {
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
}

TEST(RecordIo, CsvRowLayout) {
  const ExperimentRecord r = run_cell({2.5, 0.0, 12, 1e-3, ToleranceMode::Relative});
  std::ostringstream os;
  write_csv(os, std::vector<ExperimentRecord>{r});
  std::istringstream is(os.str());
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  const auto cells = split(row, ',');
  ASSERT_EQ(cells.size(), 12u);
  EXPECT_EQ(cells[0], "2.5");
  EXPECT_EQ(cells[2], "12");
  EXPECT_EQ(cells[3], "0.001");
  EXPECT_EQ(cells[4], "relative");
  EXPECT_EQ(cells[5], std::to_string(r.max_rank));
  EXPECT_EQ(cells[8], std::to_string(*r.reference_R));
  EXPECT_EQ(split(cells[11], ';').size(), 11u);
}

TEST(RecordIo, JsonRoundTrip) {
  std::vector<ExperimentRecord> recs;
  recs.push_back(run_cell({2.5, 0.0, 12, 1e-6, ToleranceMode::Relative}));
  recs.push_back(run_cell({1.5, 0.01, 10, 1e-4, ToleranceMode::Absolute}));
  recs.push_back(run_cell({2.5, 0.0, 27, 1e-6, ToleranceMode::Relative}));
  std::stringstream buf;
  write_json(buf, recs);
  EXPECT_EQ(read_json_records(buf), recs);
}

TEST(RecordIo, EmitReportsPath) {
  const fs::path bad = "/nonexistent_dir_qttrank/out.csv";
  try {
    emit({}, OutputFormat::Csv, bad);
    FAIL() << "expected failure";
  } catch (const std::ios_base::failure& e) {
    EXPECT_NE(std::string(e.what()).find(bad.string()), std::string::npos);
  }
  EXPECT_THROW((void)parse_output_format("xml"), DomainError);
}

TEST(RecordIo, GoldenSmallGrid) {
  const GridRun run = run_table1(small_grid());
  std::ostringstream os;
  write_csv(os, run.records);
  std::ifstream golden(fs::path(QTTRANK_GOLDEN_DIR) / "table1_d10_14.csv");
  ASSERT_TRUE(golden) << "missing golden file";
  std::istringstream fresh(os.str());
  std::string want, got;
  std::size_t line = 0;
  const std::size_t wall_time_col = 10;
  while (std::getline(golden, want)) {
    ASSERT_TRUE(std::getline(fresh, got)) << "fewer lines than golden at " << line;
    auto w = split(want, ',');
    auto g = split(got, ',');
    ASSERT_EQ(w.size(), g.size()) << line;
    if (line > 0) w[wall_time_col] = g[wall_time_col] = "";
    EXPECT_EQ(w, g) << "line " << line;
    ++line;
  }
  EXPECT_FALSE(std::getline(fresh, got)) << "more lines than golden";
}

}  // namespace
}  // namespace qtt

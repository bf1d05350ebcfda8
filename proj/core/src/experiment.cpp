#include "qttrank/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <thread>
#include <tuple>

#include "qttrank/compensated_sum.hpp"
#include "qttrank/errors.hpp"
#include "qttrank/record_io.hpp"
#include "qttrank/reference_table.hpp"
#include "qttrank/tensor_train.hpp"

namespace qtt {

std::string_view to_string(MatchKind m) noexcept {
  switch (m) {
    case MatchKind::Exact: return "Exact";
    case MatchKind::WithinOne: return "WithinOne";
    case MatchKind::Mismatch: return "Mismatch";
    case MatchKind::NoReference: return "NoReference";
  }
  return "NoReference";
}

MatchKind parse_match_kind(std::string_view text) {
  for (MatchKind m : {MatchKind::Exact, MatchKind::WithinOne, MatchKind::Mismatch, MatchKind::NoReference}) {
    if (text == to_string(m)) return m;
  }
  throw DomainError("unknown match kind '" + std::string(text) + "'");
}

MatchKind classify_match(std::size_t measured, std::optional<int> reference) noexcept {
  if (!reference) return MatchKind::NoReference;
  const auto diff = static_cast<long long>(measured) - static_cast<long long>(*reference);
  if (diff == 0) return MatchKind::Exact;
  if (diff == 1 || diff == -1) return MatchKind::WithinOne;
  return MatchKind::Mismatch;
}

SequenceSpec sequence_for(double alpha, double lambda) {
  if (alpha == 0.0) return SequenceSpec::exponential(lambda);
  if (lambda == 0.0) return SequenceSpec::power_law(alpha);
  return SequenceSpec::damped_power_law(alpha, lambda);
}

std::size_t predicted_unit_edges(const SequenceSpec& f, int d, double delta) {
  if (d < 2 || !(delta > 0.0)) return 0;
  std::int64_t n = 0;
  try {
    n = tail_threshold(f, delta);
  } catch (const UnsupportedError&) {
    return 0;
  } catch (const NumericalError&) {
    return 0;
  }
  // Rows 2.. of the s-th unfolding hold f(k) for k > 2^{d-s}. When that whole
  // range is below the tail threshold the rank-1 truncation already meets delta.
  std::size_t count = 0;
  for (int s = 1; s <= d - 1; ++s) {
    const std::int64_t first_tail_index = (std::int64_t{1} << (d - s)) + 1;
    if (first_tail_index < n) break;
    ++count;
  }
  return count;
}

ExperimentRecord run_cell(const CellRequest& request, VectorLimits limits) {
  ExperimentRecord rec;
  rec.alpha = request.alpha;
  rec.lambda = request.lambda;
  rec.d = request.d;
  rec.eps = request.eps;
  rec.mode = request.mode;
  try {
    const SequenceSpec f = sequence_for(request.alpha, request.lambda);
    const auto start = std::chrono::steady_clock::now();
    const std::vector<double> v = generate_vector(f, request.d, limits);
    SweepReport sweep;
    const TensorTrain tt = decompose(v, TruncationPolicy{request.eps, request.mode, 0}, &sweep);
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const RankProfile profile = rank_profile(tt);
    rec.edge_ranks = profile.edge_ranks;
    rec.max_rank = profile.max_rank;
    rec.avg_rank = profile.avg_rank;

    const ReconstructionError err = reconstruction_error(v, tt);
    rec.abs_error = err.absolute;
    rec.rel_error = err.relative;
    rec.input_norm = compensated_norm(v);
    rec.error_bound_ok =
        request.mode == ToleranceMode::Relative ? err.relative <= request.eps : err.absolute <= request.eps;

    rec.predicted_unit_edges = predicted_unit_edges(f, request.d, sweep.per_step_delta);
    rec.saturation_ok = std::all_of(rec.edge_ranks.begin(),
                                    rec.edge_ranks.begin() + static_cast<std::ptrdiff_t>(rec.predicted_unit_edges),
                                    [](std::size_t r) { return r == 1; });

    if (request.lambda == 0.0 && request.alpha > 0.0 && request.mode == ToleranceMode::Relative) {
      if (const auto cell = ReferenceTable::table1().lookup(request.alpha, request.d, request.eps)) {
        rec.reference_R = cell->max_rank;
        rec.reference_avg = cell->avg_rank;
      }
    }
    rec.match = classify_match(rec.max_rank, rec.reference_R);
  } catch (const std::exception& e) {
    rec.failure = e.what();
    rec.match = MatchKind::NoReference;
    rec.reference_R.reset();
    rec.reference_avg.reset();
  }
  return rec;
}

namespace {

template <class T>
T get_key(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

GridConfig grid_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DomainError("grid config must be a JSON object");
  GridConfig c;
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) throw DomainError("grid config is flat; key '" + key + "' holds an object");
    if (key == "alphas") c.alphas = get_key<std::vector<double>>(j, "alphas");
    else if (key == "lambdas") c.lambdas = get_key<std::vector<double>>(j, "lambdas");
    else if (key == "d_min") c.d_min = get_key<int>(j, "d_min");
    else if (key == "d_max") c.d_max = get_key<int>(j, "d_max");
    else if (key == "d_step") c.d_step = get_key<int>(j, "d_step");
    else if (key == "eps_list") c.eps_list = get_key<std::vector<double>>(j, "eps_list");
    else if (key == "mode") c.mode = parse_tolerance_mode(get_key<std::string>(j, "mode"));
    else if (key == "out_dir") c.out_dir = get_key<std::string>(j, "out_dir");
    else if (key == "formats") c.formats = get_key<std::vector<std::string>>(j, "formats");
    else if (key == "workers") c.workers = get_key<int>(j, "workers");
    else if (key == "allow_large_d") c.allow_large_d = get_key<bool>(j, "allow_large_d");
    else throw DomainError("unknown grid config key '" + key + "'");
  }
  if (c.d_step < 1) throw DomainError("d_step must be >= 1");
  if (c.workers < 1) throw DomainError("workers must be >= 1");
  for (const std::string& f : c.formats) (void)parse_output_format(f);
  return c;
}

GridConfig load_grid_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open grid config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError(path.string() + ": " + e.what());
  }
  return grid_config_from_json(j);
}

std::vector<CellRequest> grid_cells(const GridConfig& config) {
  if (config.d_step < 1) throw DomainError("d_step must be >= 1");
  std::vector<CellRequest> cells;
  for (double alpha : config.alphas)
    for (double lambda : config.lambdas)
      for (int d = config.d_max; d >= config.d_min; d -= config.d_step)
        for (double eps : config.eps_list) cells.push_back({alpha, lambda, d, eps, config.mode});
  return cells;
}

GridSummary summarize(std::span<const ExperimentRecord> records) {
  GridSummary s;
  for (const ExperimentRecord& r : records) {
    switch (r.match) {
      case MatchKind::Exact: ++s.exact; break;
      case MatchKind::WithinOne: ++s.within_one; break;
      case MatchKind::Mismatch: ++s.mismatch; break;
      case MatchKind::NoReference: ++s.no_reference; break;
    }
    if (r.failure) {
      ++s.failed;
      continue;
    }
    if (!r.error_bound_ok) ++s.bound_violations;
    if (!r.saturation_ok) ++s.saturation_violations;
  }
  return s;
}

GridRun run_table1(const GridConfig& config) {
  const std::vector<CellRequest> cells = grid_cells(config);
  const VectorLimits limits = config.allow_large_d ? VectorLimits::large() : VectorLimits{};
  GridRun run;
  run.records.resize(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) run.records[i] = run_cell(cells[i], limits);
  };
  const auto n_workers = static_cast<std::size_t>(std::max(1, config.workers));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < std::min(n_workers, cells.size()); ++w) pool.emplace_back(worker);
    worker();
  }
  run.summary = summarize(run.records);
  return run;
}

Figure1Series run_figure1(double alpha, int d, const std::vector<double>& eps_list, VectorLimits limits) {
  Figure1Series out{alpha, d, {}, {}};
  const SequenceSpec f = SequenceSpec::power_law(alpha);
  const std::vector<double> v = generate_vector(f, d, limits);
  std::size_t largest = 1;
  for (double eps : eps_list) {
    const TensorTrain tt = decompose(v, TruncationPolicy::relative(eps));
    const RankProfile p = rank_profile(tt);
    out.tolerance_sweep.push_back({eps, p.max_rank, p.avg_rank, reconstruction_error(v, tt).relative, p.edge_ranks});
    largest = std::max(largest, p.max_rank);
  }
  if (eps_list.empty()) return out;
  for (std::size_t r = 1; r <= largest; ++r) {
    const TensorTrain tt = decompose(v, TruncationPolicy::rank_capped(r));
    out.rank_sweep.push_back({r, rank_profile(tt).max_rank, reconstruction_error(v, tt).relative});
  }
  return out;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("fit_line needs two or more paired points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("fit_line: x values are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

ScalingAnalysis analyze_scaling(std::span<const ExperimentRecord> records) {
  ScalingAnalysis out;
  // (alpha, lambda, d) -> [(eps, R)], and (alpha, lambda, eps) -> [(d, avg)].
  std::map<std::tuple<double, double, int>, std::vector<std::pair<double, double>>> by_d;
  std::map<std::tuple<double, double, double>, std::vector<std::pair<int, double>>> by_eps;
  for (const ExperimentRecord& r : records) {
    if (r.failure) continue;
    by_d[{r.alpha, r.lambda, r.d}].emplace_back(r.eps, static_cast<double>(r.max_rank));
    by_eps[{r.alpha, r.lambda, r.eps}].emplace_back(r.d, r.avg_rank);
  }
  for (auto& [key, pts] : by_d) {
    if (pts.size() < 2) continue;
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<double> x, y;
    for (const auto& [eps, rank] : pts) {
      x.push_back(std::log(1.0 / eps));
      y.push_back(rank);
    }
    RankGrowth g{std::get<0>(key), std::get<1>(key), std::get<2>(key), {}, true};
    try {
      g.fit = fit_line(x, y);
    } catch (const DomainError&) {
      continue;
    }
    for (std::size_t i = 1; i < y.size(); ++i) g.nondecreasing = g.nondecreasing && y[i] >= y[i - 1];
    out.growth.push_back(g);
  }
  for (auto& [key, pts] : by_eps) {
    if (pts.size() < 2) continue;
    std::sort(pts.begin(), pts.end());
    AvgRankTrend t{std::get<0>(key), std::get<1>(key), std::get<2>(key), {}, {}, true};
    for (const auto& [d, avg] : pts) {
      if (!t.avg_rank.empty()) t.nonincreasing = t.nonincreasing && avg <= t.avg_rank.back();
      t.d.push_back(d);
      t.avg_rank.push_back(avg);
    }
    out.trends.push_back(std::move(t));
  }
  const bool usable = std::any_of(records.begin(), records.end(), [](const auto& r) { return !r.failure; });
  if (usable) out.c2 = fit_rank_constant(records);
  return out;
}

BoundsRun run_bounds(double alpha, const std::vector<int>& d_list, const std::vector<double>& eps_list) {
  for (int d : d_list) {
    if (d < 2 || d > kMaxDenseHankelDims) {
      throw DomainError("run_bounds: d must lie in [2, " + std::to_string(kMaxDenseHankelDims) + "]");
    }
  }
  BoundsRun run;
  run.alpha = alpha;
  const SequenceSpec f = SequenceSpec::power_law(alpha);
  try {
    run.majorant = majorant_M(f);
  } catch (const UnsupportedError&) {
  }
  for (int d : d_list) {
    run.reports.push_back(verify_decay_bound(build_hankel(square_hankel(f, d)), d, run.majorant));
    for (double eps : eps_list) run.records.push_back(run_cell({alpha, 0.0, d, eps, ToleranceMode::Relative}));
  }
  if (run.reports.empty()) return run;
  const bool usable = std::any_of(run.records.begin(), run.records.end(), [](const auto& r) { return !r.failure; });
  run.constants = fit_constants(usable ? std::span<const ExperimentRecord>(run.records)
                                       : std::span<const ExperimentRecord>{},
                                run.reports);
  const double c1 = run.constants.c1 ? run.constants.c1->value : 0.0;
  for (const BoundReport& rep : run.reports) {
    for (double eps : eps_list) {
      const double eps_abs = eps * rep.norm_h;
      RankCurvePoint p{rep.d, eps, eps_rank(rep.sigma, eps_abs), 0};
      if (c1 > 0.0 && rep.norm_h > 0.0) p.predicted_rank = rank_bound(eps_abs, rep.d, rep.norm_h, c1);
      run.rank_curves.push_back(p);
    }
  }
  run.scaling = analyze_scaling(run.records);
  return run;
}

nlohmann::json to_json(const Figure1Series& s) {
  nlohmann::json tol = nlohmann::json::array();
  for (const auto& p : s.tolerance_sweep) {
    tol.push_back({{"eps", p.eps}, {"R", p.max_rank}, {"avg_rank", p.avg_rank},
                   {"rel_error", p.rel_error}, {"edge_ranks", p.edge_ranks}});
  }
  nlohmann::json ranks = nlohmann::json::array();
  for (const auto& p : s.rank_sweep) {
    ranks.push_back({{"rank_budget", p.rank_budget}, {"R", p.max_rank}, {"rel_error", p.rel_error}});
  }
  return {{"alpha", s.alpha}, {"d", s.d}, {"tolerance_sweep", tol}, {"rank_sweep", ranks}};
}

nlohmann::json to_json(const ScalingAnalysis& a) {
  nlohmann::json growth = nlohmann::json::array();
  for (const auto& g : a.growth) {
    growth.push_back({{"alpha", g.alpha}, {"lambda", g.lambda}, {"d", g.d}, {"slope", g.fit.slope},
                      {"intercept", g.fit.intercept}, {"r_squared", g.fit.r_squared},
                      {"nondecreasing", g.nondecreasing}});
  }
  nlohmann::json trends = nlohmann::json::array();
  for (const auto& t : a.trends) {
    trends.push_back({{"alpha", t.alpha}, {"lambda", t.lambda}, {"eps", t.eps}, {"d", t.d},
                      {"avg_rank", t.avg_rank}, {"nonincreasing", t.nonincreasing}});
  }
  return {{"rank_growth", growth},
          {"avg_rank_trends", trends},
          {"C2_hat", {{"value", a.c2.value}, {"tight_index", a.c2.tight_index}}}};
}

nlohmann::json to_json(const BoundsRun& run) {
  nlohmann::json reports = nlohmann::json::array();
  for (const auto& r : run.reports) reports.push_back(to_json(r));
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : run.records) records.push_back(to_json(r));
  nlohmann::json curves = nlohmann::json::array();
  for (const auto& p : run.rank_curves) {
    curves.push_back({{"d", p.d}, {"eps", p.eps}, {"observed_hankel_rank", p.observed_hankel_rank},
                      {"predicted_rank", p.predicted_rank}});
  }
  auto fit = [](const std::optional<ConstantFit>& c) {
    return c ? nlohmann::json{{"value", c->value}, {"tight_index", c->tight_index}} : nlohmann::json(nullptr);
  };
  return {{"alpha", run.alpha},
          {"majorant_M", run.majorant ? nlohmann::json(*run.majorant) : nlohmann::json(nullptr)},
          {"reports", reports},
          {"records", records},
          {"C1_hat", fit(run.constants.c1)},
          {"C2_hat", fit(run.constants.c2)},
          {"rank_curves", curves},
          {"scaling", to_json(run.scaling)}};
}

nlohmann::json to_json(const GridSummary& s) {
  return {{"exact", s.exact},
          {"within_one", s.within_one},
          {"mismatch", s.mismatch},
          {"no_reference", s.no_reference},
          {"failed", s.failed},
          {"bound_violations", s.bound_violations},
          {"saturation_violations", s.saturation_violations},
          {"total", s.total()}};
}

}  // namespace qtt

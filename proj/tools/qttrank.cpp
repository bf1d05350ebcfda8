// qttrank: command-line front end for the QTT rank experiments.
//
// Exit status: 0 on success, 1 when a run finishes with a rank mismatch or a
// failed hard check, 2 on usage or runtime errors.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qttrank/densela.hpp"
#include "qttrank/errors.hpp"
#include "qttrank/experiment.hpp"
#include "qttrank/hankel.hpp"
#include "qttrank/moments.hpp"
#include "qttrank/record_io.hpp"
#include "qttrank/tensor_train.hpp"
#include "qttrank/tt_io.hpp"
#include "qttrank/ttsvd.hpp"

namespace {

namespace fs = std::filesystem;
using qtt::format_double;

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kError = 2;

struct Common {
  std::vector<double> alphas;
  std::vector<double> lambdas;
  std::vector<int> ds;
  std::vector<double> eps;
  std::string mode = "relative";
  std::string format = "csv";
  std::string out;
  int workers = 1;
  bool allow_large_d = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--alpha", c.alphas, "Decay exponent(s)");
  app->add_option("--lambda", c.lambdas, "Exponential damping rate(s)");
  app->add_option("--d", c.ds, "Number of binary digits (vector length 2^d)");
  app->add_option("--eps", c.eps, "Tolerance(s)");
  app->add_option("--mode", c.mode, "Tolerance mode")->check(CLI::IsMember({"relative", "absolute"}, CLI::ignore_case));
  app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--out", c.out, "Output path (directory for table1)");
  app->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
  app->add_flag("--allow-large-d", c.allow_large_d, "Permit d up to 30 (up to 8 GiB per vector)");
}

template <class T>
T single(const std::vector<T>& v, T fallback, const char* name) {
  if (v.empty()) return fallback;
  if (v.size() > 1) throw CLI::ValidationError(std::string("--") + name, "expects a single value here");
  return v.front();
}

qtt::VectorLimits limits_for(const Common& c) {
  return c.allow_large_d ? qtt::VectorLimits::large() : qtt::VectorLimits{};
}

// Writes text to --out, or stdout when no path is given.
void deliver(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary | std::ios::trunc);
  if (!f) throw std::ios_base::failure("cannot open " + c.out + " for writing");
  f << text;
  if (!f) throw std::ios_base::failure("write to " + c.out + " failed");
}

void print_summary(std::ostream& os, const qtt::GridSummary& s) {
  os << "cells " << s.total() << ": exact " << s.exact << ", within-one " << s.within_one << ", mismatch "
     << s.mismatch << ", no-reference " << s.no_reference << "; failed " << s.failed << ", error-bound violations "
     << s.bound_violations << ", saturation violations " << s.saturation_violations << '\n';
}

// ---- decompose -------------------------------------------------------------

struct DecomposeArgs {
  Common c;
  std::size_t max_rank = 0;
  std::string tt_out;
};

int run_decompose(const DecomposeArgs& a) {
  const double alpha = single(a.c.alphas, 2.5, "alpha");
  const double lambda = single(a.c.lambdas, 0.0, "lambda");
  const int d = single(a.c.ds, 12, "d");
  const double eps = single(a.c.eps, 1e-9, "eps");
  const qtt::ToleranceMode mode = qtt::parse_tolerance_mode(a.c.mode);

  const qtt::SequenceSpec f = qtt::sequence_for(alpha, lambda);
  const std::vector<double> v = qtt::generate_vector(f, d, limits_for(a.c));
  const qtt::TensorTrain tt = qtt::decompose(v, qtt::TruncationPolicy{eps, mode, a.max_rank});
  if (!a.tt_out.empty()) qtt::save(a.tt_out, tt);

  const qtt::RankProfile p = qtt::rank_profile(tt);
  const qtt::ReconstructionError err = qtt::reconstruction_error(v, tt);
  const bool ok = a.max_rank != 0 || (mode == qtt::ToleranceMode::Relative ? err.relative <= eps : err.absolute <= eps);

  std::ostringstream os;
  if (a.c.format == "json") {
    nlohmann::json j{{"sequence", f.describe()}, {"d", d}, {"eps", eps}, {"mode", qtt::to_string(mode)},
                     {"edge_ranks", p.edge_ranks}, {"R", p.max_rank}, {"avg_rank", p.avg_rank},
                     {"parameters", tt.parameter_count()}, {"rel_error", err.relative},
                     {"abs_error", err.absolute}, {"error_bound_ok", ok}};
    os << j.dump(2) << '\n';
  } else {
    os << "d,eps,mode,R,avg_rank,parameters,rel_error,abs_error,edge_ranks\n"
       << d << ',' << format_double(eps) << ',' << qtt::to_string(mode) << ',' << p.max_rank << ','
       << format_double(p.avg_rank) << ',' << tt.parameter_count() << ',' << format_double(err.relative) << ','
       << format_double(err.absolute) << ',';
    for (std::size_t i = 0; i < p.edge_ranks.size(); ++i) os << (i ? ";" : "") << p.edge_ranks[i];
    os << '\n';
  }
  deliver(a.c, os.str());
  if (!ok) std::cerr << "error bound violated: " << err.relative << " > " << eps << '\n';
  return ok ? kOk : kCheckFailed;
}

// ---- table1 ----------------------------------------------------------------

struct Table1Args {
  Common c;
  std::string config;
  std::optional<int> d_min;
  std::optional<int> d_max;
  std::optional<int> d_step;
  bool analyze = false;
};

int run_table1_cmd(const Table1Args& a, const CLI::App& app) {
  qtt::GridConfig g = a.config.empty() ? qtt::GridConfig{} : qtt::load_grid_config(a.config);
  if (!a.c.alphas.empty()) g.alphas = a.c.alphas;
  if (!a.c.lambdas.empty()) g.lambdas = a.c.lambdas;
  if (!a.c.eps.empty()) g.eps_list = a.c.eps;
  if (a.c.ds.size() == 1) g.d_min = g.d_max = a.c.ds.front();
  if (a.c.ds.size() > 1) throw CLI::ValidationError("--d", "table1 takes a single d; use --d-min/--d-max for ranges");
  if (a.d_min) g.d_min = *a.d_min;
  if (a.d_max) g.d_max = *a.d_max;
  if (a.d_step) g.d_step = *a.d_step;
  if (app.count("--mode")) g.mode = qtt::parse_tolerance_mode(a.c.mode);
  if (app.count("--workers")) g.workers = a.c.workers;
  if (app.count("--format")) g.formats = {a.c.format};
  if (a.c.allow_large_d) g.allow_large_d = true;
  if (!a.c.out.empty()) g.out_dir = a.c.out;

  const qtt::GridRun run = qtt::run_table1(g);
  fs::create_directories(g.out_dir);
  for (const std::string& name : g.formats) {
    const qtt::OutputFormat fmt = qtt::parse_output_format(name);
    const fs::path path = g.out_dir / ("table1" + std::string(qtt::extension(fmt)));
    qtt::emit(run.records, fmt, path);
    std::cerr << "wrote " << path.string() << '\n';
  }
  if (a.analyze) {
    const qtt::ScalingAnalysis s = qtt::analyze_scaling(run.records);
    const fs::path path = g.out_dir / "scaling.json";
    std::ofstream f(path);
    f << qtt::to_json(s).dump(2) << '\n';
    if (!f) throw std::ios_base::failure("write to " + path.string() + " failed");
    std::cerr << "wrote " << path.string() << '\n';
  }
  for (const auto& r : run.records) {
    if (r.failure) std::cerr << "cell alpha=" << r.alpha << " d=" << r.d << " eps=" << r.eps << " failed: " << *r.failure << '\n';
  }
  print_summary(std::cout, run.summary);
  return run.summary.clean() ? kOk : kCheckFailed;
}

// ---- figure1 ---------------------------------------------------------------

int run_figure1_cmd(const Common& c) {
  const std::vector<double> alphas = c.alphas.empty() ? std::vector<double>{1.5, 2.5} : c.alphas;
  const int d = single(c.ds, 22, "d");
  const std::vector<double> eps = c.eps.empty() ? qtt::default_eps_grid() : c.eps;

  bool ok = true;
  std::vector<qtt::Figure1Series> series;
  for (double alpha : alphas) {
    series.push_back(qtt::run_figure1(alpha, d, eps, limits_for(c)));
    const auto& s = series.back();
    for (const auto& p : s.tolerance_sweep) ok = ok && p.rel_error <= p.eps;
    for (std::size_t i = 1; i < s.rank_sweep.size(); ++i) {
      ok = ok && s.rank_sweep[i].rel_error < s.rank_sweep[i - 1].rel_error;
    }
  }

  std::ostringstream os;
  if (c.format == "json") {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& s : series) j.push_back(qtt::to_json(s));
    os << j.dump(2) << '\n';
  } else {
    os << "alpha,d,sweep,eps,rank_budget,R,avg_rank,rel_error\n";
    for (const auto& s : series) {
      for (const auto& p : s.tolerance_sweep) {
        os << format_double(s.alpha) << ',' << s.d << ",tolerance," << format_double(p.eps) << ",," << p.max_rank
           << ',' << format_double(p.avg_rank) << ',' << format_double(p.rel_error) << '\n';
      }
      for (const auto& p : s.rank_sweep) {
        os << format_double(s.alpha) << ',' << s.d << ",rank,," << p.rank_budget << ',' << p.max_rank << ",,"
           << format_double(p.rel_error) << '\n';
      }
    }
  }
  deliver(c, os.str());
  if (!ok) std::cerr << "figure1: error bound or monotonicity check failed\n";
  return ok ? kOk : kCheckFailed;
}

// ---- bounds ----------------------------------------------------------------

int run_bounds_cmd(const Common& c) {
  const double alpha = single(c.alphas, 2.5, "alpha");
  const std::vector<int> ds = c.ds.empty() ? std::vector<int>{6, 8, 10, 12} : c.ds;
  const std::vector<double> eps = c.eps.empty() ? qtt::default_eps_grid() : c.eps;
  const qtt::BoundsRun run = qtt::run_bounds(alpha, ds, eps);

  bool ok = true;
  for (const auto& r : run.reports) {
    ok = ok && r.violations.empty();
    if (r.norm_bound_M) ok = ok && r.norm_h <= *r.norm_bound_M;
  }
  for (const auto& p : run.rank_curves) ok = ok && static_cast<std::int64_t>(p.observed_hankel_rank) <= p.predicted_rank;
  for (const auto& r : run.records) ok = ok && !r.failure && r.error_bound_ok;

  std::ostringstream os;
  if (c.format == "json") {
    os << qtt::to_json(run).dump(2) << '\n';
  } else {
    os << "alpha,d,q_of_d,norm_H,majorant_M,min_eigenvalue,compared,violations,min_margin,C1_hat\n";
    for (const auto& r : run.reports) {
      os << format_double(alpha) << ',' << r.d << ',' << format_double(r.q_of_d) << ',' << format_double(r.norm_h)
         << ',' << (r.norm_bound_M ? format_double(*r.norm_bound_M) : "") << ',' << format_double(r.min_eigenvalue)
         << ',' << r.compared << ',' << r.violations.size() << ','
         << (std::isfinite(r.min_margin) ? format_double(r.min_margin) : "") << ',' << format_double(r.c1_hat)
         << '\n';
    }
  }
  deliver(c, os.str());
  if (run.constants.c1) std::cerr << "C1_hat = " << run.constants.c1->value << '\n';
  if (run.constants.c2) std::cerr << "C2_hat = " << run.constants.c2->value << '\n';
  if (!ok) std::cerr << "bounds: a hard check failed\n";
  return ok ? kOk : kCheckFailed;
}

// ---- hankel ----------------------------------------------------------------

struct HankelArgs {
  Common c;
  int s = 0;
  std::string matrix_out;
};

int run_hankel_cmd(const HankelArgs& a) {
  const double alpha = single(a.c.alphas, 2.5, "alpha");
  const double lambda = single(a.c.lambdas, 0.0, "lambda");
  const int d = single(a.c.ds, 8, "d");
  const qtt::SequenceSpec f = qtt::sequence_for(alpha, lambda);
  const qtt::HankelSpec spec = a.s > 0 ? qtt::covering_hankel(f, d, a.s) : qtt::square_hankel(f, d);
  const qtt::DenseMatrix h = qtt::build_hankel(spec);

  if (!a.matrix_out.empty()) {
    std::ofstream m(a.matrix_out);
    if (!m) throw std::ios_base::failure("cannot open " + a.matrix_out + " for writing");
    for (std::size_t i = 0; i < h.rows(); ++i) {
      for (std::size_t j = 0; j < h.cols(); ++j) m << (j ? "," : "") << format_double(h(i, j));
      m << '\n';
    }
    if (!m) throw std::ios_base::failure("write to " + a.matrix_out + " failed");
  }

  bool ok = true;
  nlohmann::json j{{"sequence", f.describe()}, {"d", d}, {"rows", spec.rows}, {"cols", spec.cols}};
  if (a.s > 0) {
    j["s"] = a.s;
    const std::vector<double> sigma = qtt::singular_values(h);
    j["sigma"] = sigma;
    j["norm_H"] = sigma.empty() ? 0.0 : sigma.front();
  } else {
    std::optional<double> m;
    try {
      m = qtt::majorant_M(f);
    } catch (const std::invalid_argument&) {
    }
    try {
      const qtt::BoundReport r = qtt::verify_decay_bound(h, d, m);
      j["bound_report"] = qtt::to_json(r);
      j["psd"] = true;
      ok = r.violations.empty() && (!m || r.norm_h <= *m);
    } catch (const qtt::DomainError& e) {
      j["psd"] = false;
      j["psd_error"] = e.what();
      ok = false;
    }
  }

  std::ostringstream os;
  if (a.c.format == "json") {
    os << j.dump(2) << '\n';
  } else {
    os << "key,value\n";
    for (const auto& [k, v] : j.items()) {
      if (v.is_primitive()) os << k << ',' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    }
    if (j.contains("bound_report")) {
      const auto& r = j["bound_report"];
      for (const char* k : {"q_of_d", "norm_H", "norm_bound_M", "min_eigenvalue", "noise_floor", "compared", "min_margin"})
        os << k << ',' << r[k].dump() << '\n';
      os << "violations," << r["violations"].size() << '\n';
    }
  }
  deliver(a.c, os.str());
  return ok ? kOk : kCheckFailed;
}

// ---- moments ---------------------------------------------------------------

struct MomentsArgs {
  Common c;
  int k_max = 100;
  double tolerance = 1e-10;
};

int run_moments_cmd(const MomentsArgs& a) {
  const std::vector<double> alphas = a.c.alphas.empty() ? std::vector<double>{1.0, 1.5, 2.5} : a.c.alphas;
  bool ok = true;
  std::ostringstream os;
  nlohmann::json arr = nlohmann::json::array();
  if (a.c.format == "csv") os << "alpha,k,moment,reference,rel_error\n";
  for (double alpha : alphas) {
    const qtt::MomentCheck m = qtt::run_moment_check(alpha, a.k_max);
    ok = ok && m.passed(a.tolerance);
    if (a.c.format == "json") {
      nlohmann::json j = qtt::to_json(m);
      j["passed"] = m.passed(a.tolerance);
      arr.push_back(std::move(j));
      continue;
    }
    for (int k = 1; k <= m.k_max; ++k) {
      const auto i = static_cast<std::size_t>(k - 1);
      os << format_double(alpha) << ',' << k << ',' << format_double(m.moments[i]) << ','
         << format_double(std::pow(static_cast<double>(k), -alpha)) << ',' << format_double(m.per_k_errors[i]) << '\n';
    }
  }
  if (a.c.format == "json") os << arr.dump(2) << '\n';
  deliver(a.c, os.str());
  return ok ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QTT rank experiments for power-law sequences"};
  app.require_subcommand(1);

  DecomposeArgs dec;
  auto* dec_cmd = app.add_subcommand("decompose", "TT-SVD of one vector; prints its rank profile");
  add_common(dec_cmd, dec.c);
  dec_cmd->add_option("--max-rank", dec.max_rank, "Cap on every edge rank (0 = none)");
  dec_cmd->add_option("--tt-out", dec.tt_out, "Write the train here (.json for JSON, binary otherwise)");

  Table1Args t1;
  auto* t1_cmd = app.add_subcommand("table1", "Rank grid against the reference table");
  add_common(t1_cmd, t1.c);
  t1_cmd->add_option("--config", t1.config, "Flat JSON grid config")->check(CLI::ExistingFile);
  t1_cmd->add_option("--d-min", t1.d_min, "Smallest d");
  t1_cmd->add_option("--d-max", t1.d_max, "Largest d");
  t1_cmd->add_option("--d-step", t1.d_step, "Step between d values")->check(CLI::PositiveNumber);
  t1_cmd->add_flag("--analyze", t1.analyze, "Also write scaling.json (rank growth and average-rank trends)");

  Common f1;
  auto* f1_cmd = app.add_subcommand("figure1", "Tolerance and rank-budget sweeps at fixed d");
  add_common(f1_cmd, f1);

  Common bd;
  auto* bd_cmd = app.add_subcommand("bounds", "Hankel decay bounds, majorant and fitted constants");
  add_common(bd_cmd, bd);

  HankelArgs hk;
  auto* hk_cmd = app.add_subcommand("hankel", "Build and inspect a Hankel sample");
  add_common(hk_cmd, hk.c);
  hk_cmd->add_option("--s", hk.s, "Covering Hankel matrix of unfolding s (default: square sample)");
  hk_cmd->add_option("--matrix-out", hk.matrix_out, "Write the dense matrix as CSV");

  MomentsArgs mo;
  auto* mo_cmd = app.add_subcommand("moments", "Moment-problem quadrature against k^-alpha");
  add_common(mo_cmd, mo.c);
  mo_cmd->add_option("--k-max", mo.k_max, "Largest k")->check(CLI::PositiveNumber);
  mo_cmd->add_option("--tolerance", mo.tolerance, "Pass threshold on the relative error");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kError;
  }

  try {
    if (*dec_cmd) return run_decompose(dec);
    if (*t1_cmd) return run_table1_cmd(t1, *t1_cmd);
    if (*f1_cmd) return run_figure1_cmd(f1);
    if (*bd_cmd) return run_bounds_cmd(bd);
    if (*hk_cmd) return run_hankel_cmd(hk);
    if (*mo_cmd) return run_moments_cmd(mo);
  } catch (const CLI::Error& e) {
    std::cerr << "qttrank: " << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "qttrank: " << e.what() << '\n';
    return kError;
  }
  return kError;
}

#include "qttrank/hankel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "qttrank/errors.hpp"
#include "qttrank/ttsvd.hpp"

namespace qtt {

HankelSpec square_hankel(const SequenceSpec& f, int d) {
  if (d < 1 || d > 40) throw DomainError("square_hankel requires 1 <= d <= 40");
  const std::size_t n = std::size_t{1} << (d - 1);
  return {n, n, f};
}

HankelSpec covering_hankel(const SequenceSpec& f, int d, int s) {
  if (d < 2 || d > 40 || s < 1 || s > d - 1) {
    throw DomainError("covering_hankel requires 2 <= d and 1 <= s <= d - 1");
  }
  const std::size_t block = std::size_t{1} << (d - s);
  return {(std::size_t{1} << d) - block + 1, block, f};
}

DenseMatrix build_hankel(const HankelSpec& h, std::size_t max_entries) {
  if (h.rows == 0 || h.cols == 0) throw DomainError("build_hankel: empty shape");
  if (h.rows > max_entries / h.cols) {
    std::ostringstream os;
    os << "build_hankel: " << h.rows << "x" << h.cols << " exceeds the budget of " << max_entries
       << " entries";
    throw ResourceError(os.str());
  }
  // One evaluation per anti-diagonal.
  std::vector<double> diag(h.rows + h.cols - 1);
  for (std::size_t t = 0; t < diag.size(); ++t) diag[t] = h.sequence(static_cast<std::int64_t>(t + 1));
  std::vector<double> data(h.rows * h.cols);
  for (std::size_t i = 0; i < h.rows; ++i)
    std::copy_n(diag.begin() + static_cast<std::ptrdiff_t>(i), h.cols, data.begin() + static_cast<std::ptrdiff_t>(i * h.cols));
  return DenseMatrix(h.rows, h.cols, std::move(data));
}

double q_factor(int d) {
  if (d < 1) throw DomainError("q_factor requires d >= 1");
  const double denom = 4.0 * ((d + 2) * std::numbers::ln2 - std::log(std::numbers::pi));
  return std::exp(std::numbers::pi * std::numbers::pi / denom);
}

std::vector<double> default_eps_grid() {
  return {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9};
}

BoundReport verify_decay_bound(const DenseMatrix& h, int d, std::optional<double> majorant) {
  if (h.rows() != h.cols()) throw DomainError("verify_decay_bound: matrix must be square");
  BoundReport report;
  report.d = d;
  report.q_of_d = q_factor(d);
  report.norm_bound_M = majorant;
  report.min_eigenvalue = min_eigenvalue_symmetric(h);
  report.sigma = singular_values(h);
  const double sigma1 = report.sigma.empty() ? 0.0 : report.sigma.front();
  report.norm_h = sigma1;
  if (report.min_eigenvalue < -kPsdTolerance * sigma1) {
    std::ostringstream os;
    os << "verify_decay_bound: matrix is not PSD (min eigenvalue " << report.min_eigenvalue
       << ", sigma_1 " << sigma1 << ")";
    throw DomainError(os.str());
  }
  report.noise_floor = noise_floor(sigma1);
  report.min_margin = std::numeric_limits<double>::infinity();

  const double q = report.q_of_d;
  const std::size_t n = report.sigma.size();
  for (std::size_t k = 0; 2 * k + 1 <= n; ++k) {
    const double bound = 16.0 * std::pow(q, 2.0 - 2.0 * static_cast<double>(k)) * sigma1;
    report.bound_curve.push_back(bound);
    const double s = report.sigma[2 * k];
    if (s <= 0.0 || s < report.noise_floor) continue;
    ++report.compared;
    report.min_margin = std::min(report.min_margin, bound / s);
    if (s > bound) report.violations.push_back(2 * k + 1);
  }

  if (sigma1 > 0.0) {
    const std::vector<double> tails = tail_norms(report.sigma);
    for (std::size_t r = 0; r < tails.size(); ++r) {
      if (tails[r] < report.noise_floor) break;
      const double ratio = tails[r] * std::pow(q, static_cast<double>(r)) / (sigma1 * d);
      report.c1_hat = std::max(report.c1_hat, ratio);
    }
    for (double eps : default_eps_grid()) {
      const double denom = d * (std::log(static_cast<double>(d)) + std::log(1.0 / eps) + std::log(sigma1) + 1.0);
      if (denom <= 0.0) continue;
      const double r = static_cast<double>(eps_rank(report.sigma, eps));
      report.c2_hat = std::max(report.c2_hat, r / denom);
    }
  }
  return report;
}

std::int64_t rank_bound(double eps, int d, double norm_h, double c1) {
  if (!(eps > 0.0) || d < 1 || !(norm_h > 0.0) || !(c1 > 0.0)) {
    throw DomainError("rank_bound: all arguments must be positive");
  }
  const double x = std::log(c1 * norm_h * d / eps);
  if (x <= 0.0) return 0;
  return static_cast<std::int64_t>(std::ceil(x / std::log(q_factor(d))));
}

ConstantFit fit_rank_constant(std::span<const ExperimentRecord> records) {
  std::map<std::pair<double, double>, double> majorants;
  ConstantFit fit;
  bool any = false;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const ExperimentRecord& rec = records[i];
    if (rec.failure || rec.d < 1) continue;
    const auto key = std::make_pair(rec.alpha, rec.lambda);
    auto it = majorants.find(key);
    if (it == majorants.end()) {
      it = majorants.emplace(key, majorant_M(sequence_for(rec.alpha, rec.lambda))).first;
    }
    const double eps_abs = rec.mode == ToleranceMode::Relative ? rec.eps * rec.input_norm : rec.eps;
    if (!(eps_abs > 0.0)) continue;
    const double d = rec.d;
    const double denom = d * (std::log(d) + std::log(1.0 / eps_abs) + std::log(it->second) + 1.0);
    if (denom <= 0.0) continue;
    const double ratio = static_cast<double>(rec.max_rank) / denom;
    if (!any || ratio > fit.value) fit = {ratio, i};
    any = true;
  }
  if (!any) throw DomainError("fit_rank_constant: no usable observations");
  return fit;
}

ConstantFit fit_distance_constant(std::span<const BoundReport> reports) {
  if (reports.empty()) throw DomainError("fit_distance_constant: no reports");
  ConstantFit fit{reports[0].c1_hat, 0};
  for (std::size_t i = 1; i < reports.size(); ++i) {
    if (reports[i].c1_hat > fit.value) fit = {reports[i].c1_hat, i};
  }
  return fit;
}

FittedConstants fit_constants(std::span<const ExperimentRecord> records,
                              std::span<const BoundReport> reports) {
  if (records.empty() && reports.empty()) throw DomainError("fit_constants: empty input");
  FittedConstants out;
  if (!reports.empty()) out.c1 = fit_distance_constant(reports);
  if (!records.empty()) out.c2 = fit_rank_constant(records);
  return out;
}

SubmatrixCheck unfolding_submatrix_check(const SequenceSpec& f, int d, int s) {
  if (d < 2 || d > 14 || s < 1 || s > d - 1) {
    throw DomainError("unfolding_submatrix_check requires 2 <= d <= 14 and 1 <= s <= d - 1");
  }
  SubmatrixCheck check;
  const std::vector<double> v = generate_vector(f, d);
  const DenseMatrix a = unfolding(v, s);
  const DenseMatrix h = build_hankel(covering_hankel(f, d, s), std::size_t{1} << 27);
  const std::size_t block = std::size_t{1} << (d - s);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      ++check.entries_checked;
      const double expected = h(i * block, j);
      if (a(i, j) != expected) {
        std::ostringstream os;
        os << "entry (" << i + 1 << "," << j + 1 << ") = " << a(i, j) << " but Hankel ("
           << i * block + 1 << "," << j + 1 << ") = " << expected;
        check.failures.push_back(os.str());
      }
    }

  check.sigma_unfolding = singular_values(a);
  check.sigma_hankel = singular_values(h);
  const double slack = noise_floor(check.sigma_hankel.front());
  for (std::size_t k = 0; k < check.sigma_unfolding.size(); ++k) {
    if (check.sigma_unfolding[k] > check.sigma_hankel[k] + slack) {
      std::ostringstream os;
      os << "sigma_" << k + 1 << "(A) = " << check.sigma_unfolding[k] << " exceeds sigma_" << k + 1
         << "(H) = " << check.sigma_hankel[k];
      check.failures.push_back(os.str());
    }
  }
  check.ok = check.failures.empty();
  return check;
}

nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json j{{"d", r.d},
                   {"q_of_d", r.q_of_d},
                   {"sigma", r.sigma},
                   {"bound_curve", r.bound_curve},
                   {"violations", r.violations},
                   {"norm_H", r.norm_h},
                   {"min_eigenvalue", r.min_eigenvalue},
                   {"noise_floor", r.noise_floor},
                   {"compared", r.compared},
                   {"fitted_constants", {{"C1_hat", r.c1_hat}, {"C2_hat", r.c2_hat}}}};
  j["norm_bound_M"] = r.norm_bound_M ? nlohmann::json(*r.norm_bound_M) : nlohmann::json(nullptr);
  j["min_margin"] = std::isfinite(r.min_margin) ? nlohmann::json(r.min_margin) : nlohmann::json(nullptr);
  return j;
}

}  // namespace qtt

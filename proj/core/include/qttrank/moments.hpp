#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

namespace qtt {

/// Gauss rule: integral ~ sum_i weights[i] * g(nodes[i]).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule for the integral over [0, 1] of y^b g(y) dy, b > -1
/// (Gauss-Jacobi mapped from [-1, 1]).
[[nodiscard]] QuadratureRule gauss_jacobi_unit(int n, double b);

/// n-point rule for the integral over [0, inf) of x^a e^{-x} g(x) dx, a > -1
/// (generalized Gauss-Laguerre).
[[nodiscard]] QuadratureRule gauss_laguerre(int n, double a = 0.0);

/// Integral over u in [0, inf) of u^{alpha-1} e^{-k u} / Gamma(alpha), i.e. the
/// k-th moment int t^{k-1} dmu(t) of the measure
/// dmu = chi_[0,1] (-ln t)^{alpha-1} dt / Gamma(alpha) after u = -ln t.
///
/// The interval is split at u0 = 4/k. [0, u0] uses Gauss-Jacobi weighting for
/// the u^{alpha-1} factor, [u0, inf) a shifted Gauss-Laguerre rule. The node
/// count doubles until successive estimates agree to 1e-14 relative; failure
/// to converge throws NumericalError.
[[nodiscard]] double moment_integral(double alpha, std::int64_t k);

struct MomentCheck {
  double alpha = 0.0;
  int k_max = 0;
  double max_abs_rel_error = 0.0;
  std::vector<double> per_k_errors;  // |moment - k^-alpha| / k^-alpha, k = 1..k_max
  std::vector<double> moments;

  [[nodiscard]] bool passed(double tolerance = 1e-9) const noexcept {
    return max_abs_rel_error <= tolerance;
  }
};

[[nodiscard]] MomentCheck run_moment_check(double alpha, int k_max);

[[nodiscard]] nlohmann::json to_json(const MomentCheck& check);

}  // namespace qtt

#include "qttrank/moments.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "qttrank/errors.hpp"

namespace qtt {

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights mu0 times
// the squared first eigenvector components.
QuadratureRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag,
                            double mu0) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericalError("Golub-Welsch eigensolve failed");
  QuadratureRule rule;
  const auto n = diag.size();
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    rule.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    rule.weights[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
  }
  return rule;
}

class MomentQuadrature {
 public:
  explicit MomentQuadrature(double alpha) : alpha_(alpha), gamma_(std::tgamma(alpha)) {}

  double integrate(std::int64_t k) {
    double previous = estimate(k, kStartNodes);
    for (int n = 2 * kStartNodes; n <= kMaxNodes; n *= 2) {
      const double current = estimate(k, n);
      if (std::abs(current - previous) <= 1e-14 * std::abs(current)) return current;
      previous = current;
    }
    std::ostringstream os;
    os << "moment_integral(alpha=" << alpha_ << ", k=" << k << ") did not converge with "
       << kMaxNodes << " nodes";
    throw NumericalError(os.str());
  }

 private:
  static constexpr int kStartNodes = 16;
  static constexpr int kMaxNodes = 512;
  static constexpr double kSplit = 4.0;

  struct Rules {
    QuadratureRule head;
    QuadratureRule tail;
  };

  const Rules& rules(int n) {
    auto it = std::find_if(cache_.begin(), cache_.end(), [n](const auto& e) { return e.first == n; });
    if (it == cache_.end()) {
      cache_.emplace_back(n, Rules{gauss_jacobi_unit(n, alpha_ - 1.0), gauss_laguerre(n)});
      return cache_.back().second;
    }
    return it->second;
  }

  double estimate(std::int64_t k, int n) {
    const Rules& r = rules(n);
    const double kk = static_cast<double>(k);
    const double u0 = kSplit / kk;
    // [0, u0]: u = u0 y, du = u0 dy, u^{alpha-1} = u0^{alpha-1} y^{alpha-1}.
    double head = 0.0;
    for (std::size_t i = 0; i < r.head.nodes.size(); ++i) {
      head += r.head.weights[i] * std::exp(-kk * u0 * r.head.nodes[i]);
    }
    head *= std::pow(u0, alpha_);
    // [u0, inf): u = u0 + x / k, e^{-k u} = e^{-k u0} e^{-x}.
    double tail = 0.0;
    for (std::size_t i = 0; i < r.tail.nodes.size(); ++i) {
      tail += r.tail.weights[i] * std::pow(u0 + r.tail.nodes[i] / kk, alpha_ - 1.0);
    }
    tail *= std::exp(-kk * u0) / kk;
    return (head + tail) / gamma_;
  }

  double alpha_;
  double gamma_;
  std::vector<std::pair<int, Rules>> cache_;
};

void require_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("moment check requires alpha > 0");
}

}  // namespace

QuadratureRule gauss_jacobi_unit(int n, double b) {
  if (n < 1) throw DomainError("gauss_jacobi_unit requires n >= 1");
  if (!(b > -1.0)) throw DomainError("gauss_jacobi_unit requires b > -1");
  // Monic Jacobi recurrence on [-1, 1] with weight (1+x)^b, a = 0.
  const double a = 0.0;
  const double ab = a + b;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  diag(0) = (b - a) / (ab + 2.0);
  for (int i = 1; i < n; ++i) {
    const double t = 2.0 * i + ab;
    diag(i) = (b * b - a * a) / (t * (t + 2.0));
    const double beta = 4.0 * i * (i + a) * (i + b) * (i + ab) / (t * t * (t + 1.0) * (t - 1.0));
    off(i - 1) = std::sqrt(beta);
  }
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                              std::lgamma(b + 1.0) - std::lgamma(ab + 2.0));
  QuadratureRule rule = golub_welsch(diag, off, mu0);
  // y = (1 + x) / 2 maps the weight (1+x)^b dx to 2^{b+1} y^b dy.
  const double scale = std::pow(2.0, -(b + 1.0));
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    rule.nodes[i] = 0.5 * (1.0 + rule.nodes[i]);
    rule.weights[i] *= scale;
  }
  return rule;
}

QuadratureRule gauss_laguerre(int n, double a) {
  if (n < 1) throw DomainError("gauss_laguerre requires n >= 1");
  if (!(a > -1.0)) throw DomainError("gauss_laguerre requires a > -1");
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int i = 0; i < n; ++i) diag(i) = 2.0 * i + 1.0 + a;
  for (int i = 1; i < n; ++i) off(i - 1) = std::sqrt(i * (i + a));
  return golub_welsch(diag, off, std::tgamma(a + 1.0));
}

double moment_integral(double alpha, std::int64_t k) {
  require_alpha(alpha);
  if (k < 1) throw DomainError("moment_integral requires k >= 1");
  return MomentQuadrature(alpha).integrate(k);
}

MomentCheck run_moment_check(double alpha, int k_max) {
  require_alpha(alpha);
  if (k_max < 1) throw DomainError("run_moment_check requires k_max >= 1");
  MomentQuadrature quad(alpha);
  MomentCheck check;
  check.alpha = alpha;
  check.k_max = k_max;
  for (int k = 1; k <= k_max; ++k) {
    const double m = quad.integrate(k);
    const double exact = std::pow(static_cast<double>(k), -alpha);
    check.moments.push_back(m);
    check.per_k_errors.push_back(std::abs(m - exact) / exact);
  }
  check.max_abs_rel_error = *std::max_element(check.per_k_errors.begin(), check.per_k_errors.end());
  return check;
}

nlohmann::json to_json(const MomentCheck& c) {
  return {{"alpha", c.alpha},
          {"k_max", c.k_max},
          {"max_abs_rel_error", c.max_abs_rel_error},
          {"per_k_errors", c.per_k_errors},
          {"moments", c.moments}};
}

}  // namespace qtt

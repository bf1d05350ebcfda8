#include <gtest/gtest.h>

#include <cmath>

#include "qttrank/errors.hpp"
#include "qttrank/moments.hpp"

namespace qtt {
namespace {

// Integrand of the moment integral on the u-axis.
double density(double alpha, double k, double u) {
  return std::pow(u, alpha - 1) * std::exp(-k * u) / std::tgamma(alpha);
}

// Lower/upper Riemann sums on the two monotone pieces of the integrand
// (rising up to the mode (alpha - 1)/k, falling after it), plus a bound for
// the part beyond U. Valid for alpha >= 1.
struct Bracket {
  double lo;
  double hi;
};
Bracket riemann_bracket(double alpha, double k, int steps) {
  const double mode = (alpha - 1) / k;
  const double cut = 60.0 / k + 4 * mode;
  Bracket b{0.0, 0.0};
  auto piece = [&](double a, double c, bool rising) {
    if (c <= a) return;
    const double h = (c - a) / steps;
    for (int i = 0; i < steps; ++i) {
      const double left = density(alpha, k, a + i * h);
      const double right = density(alpha, k, a + (i + 1) * h);
      b.lo += h * (rising ? left : right);
      b.hi += h * (rising ? right : left);
    }
  };
  piece(0.0, mode, true);
  piece(mode, cut, false);
  // u^{a-1} <= U^{a-1} e^{(a-1)(u-U)/U} for u >= U.
  b.hi += std::pow(cut, alpha - 1) * std::exp(-k * cut) / (k - (alpha - 1) / cut) / std::tgamma(alpha);
  return b;
}

TEST(MomentsOracle, NormalizationAndUniform) {
  for (double alpha : {0.3, 0.5, 1.0, 1.5, 2.5, 7.0}) EXPECT_NEAR(moment_integral(alpha, 1), 1.0, 1e-13) << alpha;
  EXPECT_NEAR(moment_integral(1.0, 2), 0.5, 1e-15);
}

TEST(MomentsOracle, MatchesPowerLaw) {
  for (double alpha : {0.5, 1.0, 1.5, 2.5}) {
    for (int k = 1; k <= 100; ++k) {
      const double exact = std::pow(static_cast<double>(k), -alpha);
      EXPECT_LE(std::abs(moment_integral(alpha, k) - exact), 1e-10 * exact) << alpha << " " << k;
    }
  }
}

TEST(MomentsOracle, RiemannSumsBracketQuadrature) {
  for (double alpha : {1.0, 1.5, 2.5}) {
    for (int k : {1, 3, 17}) {
      const Bracket b = riemann_bracket(alpha, k, 200000);
      const double q = moment_integral(alpha, k);
      EXPECT_LE(b.lo, q) << alpha << " " << k;
      EXPECT_GE(b.hi, q) << alpha << " " << k;
      EXPECT_LT(b.hi - b.lo, 1e-3 * q);
    }
  }
}

TEST(MomentsOracle, CheckExamples) {
  const MomentCheck a = run_moment_check(2.5, 50);
  EXPECT_EQ(a.per_k_errors.size(), 50u);
  EXPECT_LE(a.max_abs_rel_error, 1e-10);
  EXPECT_TRUE(a.passed());
  const MomentCheck b = run_moment_check(1.0, 10);
  EXPECT_LE(b.max_abs_rel_error, 1e-12);
  const MomentCheck c = run_moment_check(1.5, 1);
  ASSERT_EQ(c.per_k_errors.size(), 1u);
  EXPECT_LE(c.per_k_errors[0], 1e-14);
}

TEST(Moments, GaussLaguerreExactOnPolynomials) {
  for (double a : {0.0, 0.5, 1.5}) {
    const QuadratureRule r = gauss_laguerre(6, a);
    for (int j = 0; j <= 11; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], j);
      const double exact = std::tgamma(j + a + 1);
      EXPECT_NEAR(s, exact, 1e-11 * exact) << a << " " << j;
    }
  }
}

TEST(Moments, GaussJacobiExactOnPolynomials) {
  for (double b : {-0.5, 0.0, 1.5}) {
    const QuadratureRule r = gauss_jacobi_unit(6, b);
    for (int j = 0; j <= 11; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], j);
      EXPECT_NEAR(s, 1.0 / (b + j + 1), 1e-13) << b << " " << j;
    }
    for (double y : r.nodes) {
      EXPECT_GT(y, 0.0);
      EXPECT_LT(y, 1.0);
    }
  }
}

TEST(MomentsProperty, StrictlyDecreasing) {
  for (double alpha : {0.5, 1.5, 2.5}) {
    for (int k = 1; k < 60; ++k) EXPECT_GT(moment_integral(alpha, k), moment_integral(alpha, k + 1));
  }
  for (int k : {2, 5, 40}) {
    double prev = INFINITY;
    for (double alpha : {0.5, 1.0, 1.5, 2.0, 2.5}) {
      const double m = moment_integral(alpha, k);
      EXPECT_LT(m, prev);
      prev = m;
    }
  }
}

TEST(Moments, Errors) {
  EXPECT_THROW((void)moment_integral(0.0, 2), DomainError);
  EXPECT_THROW((void)moment_integral(1.5, 0), DomainError);
  EXPECT_THROW((void)run_moment_check(1.5, 0), DomainError);
  EXPECT_THROW((void)gauss_laguerre(0), DomainError);
  EXPECT_THROW((void)gauss_jacobi_unit(4, -1.0), DomainError);
}

TEST(Moments, Json) {
  const nlohmann::json j = to_json(run_moment_check(2.5, 5));
  EXPECT_EQ(j.at("k_max"), 5);
  EXPECT_EQ(j.at("per_k_errors").size(), 5u);
}

}  // namespace
}  // namespace qtt

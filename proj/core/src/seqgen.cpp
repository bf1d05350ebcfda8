#include "qttrank/seqgen.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qttrank/compensated_sum.hpp"
#include "qttrank/errors.hpp"

namespace qtt {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

// f(x)^p = x^{-p*alpha} * exp(-p*rate*x) for every kind; these return the
// exponent pair for a given power p.
struct PowerForm {
  double exponent;  // algebraic decay exponent
  double rate;      // exponential decay rate
};

PowerForm power_form(const SequenceSpec& spec, int p) {
  switch (spec.kind()) {
    case SequenceKind::PowerLaw:
      return {p * spec.alpha(), 0.0};
    case SequenceKind::Reciprocal:
      return {static_cast<double>(p), 0.0};
    case SequenceKind::DampedPowerLaw:
      return {p * spec.alpha(), p * spec.lambda()};
    case SequenceKind::Exponential:
      return {0.0, p * spec.beta()};
  }
  return {0.0, 0.0};
}

struct Bracket {
  double lower;
  double upper;
};

// Bracket on the improper integral of x^{-exponent} e^{-rate x} over [a, inf).
// Upper is +inf when the integral diverges.
Bracket tail_integral(PowerForm form, double a) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (form.rate == 0.0) {
    if (form.exponent <= 1.0) return {inf, inf};
    const double v = std::pow(a, 1.0 - form.exponent) / (form.exponent - 1.0);
    return {v, v};
  }
  if (form.exponent == 0.0) {
    const double v = std::exp(-form.rate * a) / form.rate;
    return {v, v};
  }
  // x^{-e} <= a^{-e} and e^{-rx} <= e^{-ra} on [a, inf) give two upper bounds.
  const double damping = std::exp(-form.rate * a);
  double upper = std::pow(a, -form.exponent) * damping / form.rate;
  if (form.exponent > 1.0) {
    upper = std::min(upper, damping * std::pow(a, 1.0 - form.exponent) / (form.exponent - 1.0));
  }
  return {0.0, upper};
}

double squared(double x) { return x * x; }

}  // namespace

SequenceSpec SequenceSpec::power_law(double alpha) {
  if (!positive_finite(alpha)) throw DomainError("power law requires alpha > 0");
  return SequenceSpec(SequenceKind::PowerLaw, alpha, 0.0, 0.0);
}

SequenceSpec SequenceSpec::damped_power_law(double alpha, double lambda) {
  if (!positive_finite(alpha)) throw DomainError("damped power law requires alpha > 0");
  if (!positive_finite(lambda)) throw DomainError("damped power law requires lambda > 0");
  return SequenceSpec(SequenceKind::DampedPowerLaw, alpha, lambda, 0.0);
}

SequenceSpec SequenceSpec::exponential(double beta) {
  if (!positive_finite(beta)) throw DomainError("exponential requires beta > 0");
  return SequenceSpec(SequenceKind::Exponential, 0.0, 0.0, beta);
}

SequenceSpec SequenceSpec::reciprocal() {
  return SequenceSpec(SequenceKind::Reciprocal, 1.0, 0.0, 0.0);
}

double SequenceSpec::operator()(std::int64_t k) const {
  if (k < 1) throw DomainError("sequence index must be >= 1, got " + std::to_string(k));
  return at(static_cast<double>(k));
}

double SequenceSpec::at(double x) const noexcept {
  switch (kind_) {
    case SequenceKind::PowerLaw:
      return std::pow(x, -alpha_);
    case SequenceKind::DampedPowerLaw:
      return std::pow(x, -alpha_) * std::exp(-lambda_ * x);
    case SequenceKind::Exponential:
      return std::exp(-beta_ * x);
    case SequenceKind::Reciprocal:
      return 1.0 / x;
  }
  return 0.0;
}

std::string SequenceSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case SequenceKind::PowerLaw:
      os << "k^-" << alpha_;
      break;
    case SequenceKind::DampedPowerLaw:
      os << "k^-" << alpha_ << "*exp(-" << lambda_ << "k)";
      break;
    case SequenceKind::Exponential:
      os << "exp(-" << beta_ << "k)";
      break;
    case SequenceKind::Reciprocal:
      os << "1/k";
      break;
  }
  return os.str();
}

double eval(const SequenceSpec& spec, std::int64_t k) { return spec(k); }

std::uint64_t dense_vector_bytes(int d) noexcept {
  return (std::uint64_t{1} << d) * sizeof(double);
}

std::vector<double> generate_vector(const SequenceSpec& spec, int d, VectorLimits limits) {
  if (d < 1) throw DomainError("generate_vector requires d >= 1");
  const int cap = std::min(limits.max_dims, VectorLimits::kHardMaxDims);
  if (d > cap) {
    std::ostringstream os;
    os << "d=" << d << " exceeds the dense limit d_max=" << cap << " (would need "
       << (dense_vector_bytes(d) >> 20) << " MiB for the vector alone)";
    throw ResourceError(os.str());
  }
  const std::size_t n = std::size_t{1} << d;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = spec.at(static_cast<double>(i + 1));
  return v;
}

double majorant_M(const SequenceSpec& spec, double rel_tol) {
  if (!positive_finite(rel_tol)) throw DomainError("majorant_M requires rel_tol > 0");
  if (spec.kind() == SequenceKind::Reciprocal) return std::numbers::pi;
  // k^-1 is the reciprocal sequence; its g(t) = i(pi - t) on (0, 2 pi).
  if (spec.kind() == SequenceKind::PowerLaw && spec.alpha() == 1.0) return std::numbers::pi;
  if (spec.kind() == SequenceKind::PowerLaw && spec.alpha() < 1.0) {
    throw UnsupportedError("majorant_M: k^-alpha with alpha < 1 is not summable");
  }

  // f is convex and decreasing, so with partial sum S_N the tail sum over
  // k > N lies in [int_N f - f(N)/2, int_{N+1/2} f] (trapezoid / midpoint).
  const PowerForm form = power_form(spec, 1);
  constexpr std::int64_t kBlock = 256;
  constexpr std::int64_t kMaxTerms = std::int64_t{1} << 36;
  CompensatedSum partial;
  std::int64_t n = 0;
  while (n < kMaxTerms) {
    for (std::int64_t i = 0; i < kBlock; ++i) partial.add(spec.at(static_cast<double>(++n)));
    const double s = partial.value();
    const Bracket at_n = tail_integral(form, static_cast<double>(n));
    const Bracket at_mid = tail_integral(form, static_cast<double>(n) + 0.5);
    const double lower = s + std::max(0.0, at_n.lower - 0.5 * spec.at(static_cast<double>(n)));
    const double upper = s + at_mid.upper;
    if (upper - lower <= 2.0 * rel_tol * lower) return 0.5 * (lower + upper);
  }
  throw NumericalError("majorant_M: series did not reach rel_tol within 2^36 terms");
}

TailBracket tail_energy(const SequenceSpec& spec, std::int64_t n) {
  if (n < 1) throw DomainError("tail_energy requires n >= 1");
  // Exact terms over a window, then convexity brackets on the remainder.
  constexpr std::int64_t kWindow = 4096;
  const PowerForm form = power_form(spec, 2);
  CompensatedSum partial;
  for (std::int64_t k = n; k < n + kWindow; ++k) partial.add(squared(spec.at(static_cast<double>(k))));
  const double m = static_cast<double>(n + kWindow);
  const double s = partial.value();
  const double lower_rem = std::max(tail_integral(form, m).lower + 0.5 * squared(spec.at(m)),
                                    squared(spec.at(m)));
  const double upper_rem = tail_integral(form, m - 0.5).upper;
  return {s + lower_rem, s + upper_rem};
}

std::int64_t tail_threshold(const SequenceSpec& spec, double eps) {
  if (!positive_finite(eps)) throw DomainError("tail_threshold requires eps > 0");
  if (!std::isfinite(tail_integral(power_form(spec, 2), 2.0).upper)) {
    throw UnsupportedError("tail_threshold: sum of f(k)^2 diverges for " + spec.describe());
  }
  const double target = eps * eps;
  auto below = [&](std::int64_t n) { return tail_energy(spec, n).upper < target; };

  if (below(1)) return 1;
  std::int64_t lo = 1;
  std::int64_t hi = 2;
  while (!below(hi)) {
    lo = hi;
    if (hi > (std::int64_t{1} << 61)) {
      throw NumericalError("tail_threshold: threshold beyond 2^62 for " + spec.describe());
    }
    hi *= 2;
  }
  // Invariant: below(lo) is false, below(hi) is true.
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (below(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace qtt

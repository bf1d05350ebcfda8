#include "qttrank/ttsvd.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cctype>
#include <limits>
#include <cmath>
#include <sstream>
#include <string>

#include "qttrank/compensated_sum.hpp"
#include "qttrank/errors.hpp"

namespace qtt {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Truncation {
  std::size_t rank;
  double discarded;
};

Truncation choose_rank(std::span<const double> sigma, double delta, std::size_t max_rank) {
  const std::vector<double> tails = tail_norms(sigma);
  std::size_t r = eps_rank(sigma, delta);
  // A train edge cannot have rank 0; keeping one more term only lowers the error.
  r = std::max<std::size_t>(r, 1);
  if (max_rank != 0) r = std::min(r, max_rank);
  r = std::min(r, sigma.size());
  return {r, tails[r]};
}

// Core (left, 2, k) from the first k columns of a (2 left) x m matrix U.
TtCore core_from_columns(const DenseMatrix& u, std::size_t left, std::size_t k) {
  std::vector<double> data(left * 2 * k);
  for (std::size_t row = 0; row < left * 2; ++row)
    for (std::size_t b = 0; b < k; ++b) data[row * k + b] = u(row, b);
  return TtCore(left, k, std::move(data));
}

// U_k^T M for a row-major rows x cols block M; returns row-major k x cols.
std::vector<double> project_rows(const DenseMatrix& u, std::size_t k,
                                 std::span<const double> block, std::size_t rows,
                                 std::size_t cols) {
  const auto r = static_cast<Eigen::Index>(rows);
  const auto c = static_cast<Eigen::Index>(cols);
  const auto kk = static_cast<Eigen::Index>(k);
  Eigen::Map<const Eigen::MatrixXd> block_t(block.data(), c, r);  // M^T, column-major
  Eigen::Map<const RowMatrix> u_map(u.data().data(), static_cast<Eigen::Index>(u.rows()),
                                    static_cast<Eigen::Index>(u.cols()));
  std::vector<double> out(k * cols);
  // (U_k^T M)^T = M^T U_k, stored column-major == U_k^T M row-major.
  Eigen::Map<Eigen::MatrixXd>(out.data(), c, kk).noalias() = block_t * u_map.leftCols(kk);
  return out;
}

void require_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw DomainError("decompose: input has non-finite entries");
  }
}

}  // namespace

std::string_view to_string(ToleranceMode mode) noexcept {
  return mode == ToleranceMode::Relative ? "relative" : "absolute";
}

ToleranceMode parse_tolerance_mode(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "relative") return ToleranceMode::Relative;
  if (lower == "absolute") return ToleranceMode::Absolute;
  throw DomainError("unknown tolerance mode '" + std::string(text) + "'");
}

double TruncationPolicy::per_step_delta(double input_norm, int d) const {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw DomainError("TruncationPolicy: eps must be >= 0");
  if (d < 2) return 0.0;
  const double split = std::sqrt(static_cast<double>(d - 1));
  return mode == ToleranceMode::Relative ? eps * input_norm / split : eps / split;
}

int exact_log2(std::size_t n) {
  if (n < 2 || !std::has_single_bit(n)) {
    throw DomainError("length " + std::to_string(n) + " is not a power of two >= 2");
  }
  return std::countr_zero(n);
}

DenseMatrix unfolding(std::span<const double> v, int s) {
  const int d = exact_log2(v.size());
  if (s < 1 || s > d - 1) {
    std::ostringstream os;
    os << "unfolding: s=" << s << " outside [1, " << d - 1 << "]";
    throw DomainError(os.str());
  }
  const std::size_t rows = std::size_t{1} << s;
  const std::size_t cols = std::size_t{1} << (d - s);
  return DenseMatrix(rows, cols, std::vector<double>(v.begin(), v.end()));
}

TensorTrain decompose(std::span<const double> v, const TruncationPolicy& policy,
                      SweepReport* report) {
  const int d = exact_log2(v.size());
  if (d < 2) throw DomainError("decompose requires a vector of length 2^d with d >= 2");
  require_finite(v);
  const double delta = policy.per_step_delta(compensated_norm(v), d);

  std::vector<TtCore> cores;
  cores.reserve(static_cast<std::size_t>(d));
  std::vector<double> discarded;
  std::vector<double> carry(v.begin(), v.end());
  std::size_t rank = 1;
  std::size_t cols = v.size();
  for (int step = 1; step < d; ++step) {
    const std::size_t rows = rank * 2;
    cols /= 2;
    const LeftSingularFactor f = left_singular_factor(carry, rows, cols);
    const Truncation t = choose_rank(f.singular_values, delta, policy.max_rank);
    cores.push_back(core_from_columns(f.left_vectors, rank, t.rank));
    carry = project_rows(f.left_vectors, t.rank, carry, rows, cols);
    discarded.push_back(t.discarded);
    rank = t.rank;
  }
  cores.emplace_back(rank, 1, std::move(carry));

  if (report != nullptr) *report = SweepReport{delta, std::move(discarded)};
  return TensorTrain(std::move(cores));
}

TensorTrain recompress(const TensorTrain& tt, const TruncationPolicy& policy,
                       SweepReport* report) {
  const std::size_t d = static_cast<std::size_t>(tt.dims());
  std::vector<std::size_t> ranks = tt.ranks();
  std::vector<std::vector<double>> data;
  data.reserve(d);
  for (const TtCore& c : tt.cores()) data.emplace_back(c.data().begin(), c.data().end());

  // Right-to-left: core j = L Q with orthonormal rows of Q; L moves left.
  for (std::size_t j = d; j-- > 1;) {
    const auto left = static_cast<Eigen::Index>(ranks[j]);
    const auto rest = static_cast<Eigen::Index>(2 * ranks[j + 1]);
    Eigen::Map<const Eigen::MatrixXd> core_t(data[j].data(), rest, left);  // G^T
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(core_t);
    const Eigen::Index m = std::min(left, rest);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rest, m);
    const Eigen::MatrixXd l = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>().transpose();

    std::vector<double> new_core(static_cast<std::size_t>(m * rest));
    Eigen::Map<Eigen::MatrixXd>(new_core.data(), rest, m) = q;  // Q^T row-major
    const auto prev_rows = static_cast<Eigen::Index>(ranks[j - 1] * 2);
    Eigen::Map<const RowMatrix> prev(data[j - 1].data(), prev_rows, left);
    std::vector<double> new_prev(static_cast<std::size_t>(prev_rows * m));
    Eigen::Map<RowMatrix>(new_prev.data(), prev_rows, m).noalias() = prev * l;
    data[j] = std::move(new_core);
    data[j - 1] = std::move(new_prev);
    ranks[j] = static_cast<std::size_t>(m);
  }

  const double norm = compensated_norm(data[0]);
  const double delta = policy.per_step_delta(norm, static_cast<int>(d));

  std::vector<TtCore> cores;
  cores.reserve(d);
  std::vector<double> discarded;
  for (std::size_t j = 0; j + 1 < d; ++j) {
    const std::size_t rows = ranks[j] * 2;
    const std::size_t cols = ranks[j + 1];
    const LeftSingularFactor f = left_singular_factor(data[j], rows, cols);
    const Truncation t = choose_rank(f.singular_values, delta, policy.max_rank);
    cores.push_back(core_from_columns(f.left_vectors, ranks[j], t.rank));
    // Fold U_k^T G_j into the next core.
    const std::vector<double> coupling = project_rows(f.left_vectors, t.rank, data[j], rows, cols);
    const auto k = static_cast<Eigen::Index>(t.rank);
    const auto next_cols = static_cast<Eigen::Index>(2 * ranks[j + 2]);
    Eigen::Map<const RowMatrix> c_map(coupling.data(), k, static_cast<Eigen::Index>(cols));
    Eigen::Map<const RowMatrix> next(data[j + 1].data(), static_cast<Eigen::Index>(cols), next_cols);
    std::vector<double> merged(static_cast<std::size_t>(k * next_cols));
    Eigen::Map<RowMatrix>(merged.data(), k, next_cols).noalias() = c_map * next;
    data[j + 1] = std::move(merged);
    ranks[j + 1] = t.rank;
    discarded.push_back(t.discarded);
  }
  cores.emplace_back(ranks[d - 1], 1, std::move(data[d - 1]));

  if (report != nullptr) *report = SweepReport{delta, std::move(discarded)};
  return TensorTrain(std::move(cores));
}

ReconstructionError reconstruction_error(std::span<const double> v, const TensorTrain& tt) {
  if (v.size() != tt.length()) {
    std::ostringstream os;
    os << "reconstruction_error: vector length " << v.size() << " vs train length " << tt.length();
    throw DomainError(os.str());
  }
  std::vector<double> diff = to_full(tt, 30);
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = v[i] - diff[i];
  ReconstructionError e;
  e.absolute = compensated_norm(diff);
  const double ref = compensated_norm(v);
  e.relative = ref > 0.0 ? e.absolute / ref
                         : (e.absolute == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  return e;
}

}  // namespace qtt

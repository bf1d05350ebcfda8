#include "qttrank/tensor_train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "qttrank/errors.hpp"

namespace qtt {

TtCore::TtCore(std::size_t left_rank, std::size_t right_rank, std::vector<double> data)
    : left_(left_rank), right_(right_rank), data_(std::move(data)) {
  if (left_ == 0 || right_ == 0) throw DomainError("TtCore: ranks must be positive");
  if (data_.size() != left_ * kModeSize * right_) {
    std::ostringstream os;
    os << "TtCore: " << data_.size() << " entries for shape (" << left_ << ", 2, " << right_
       << ")";
    throw DomainError(os.str());
  }
  for (double x : data_) {
    if (!std::isfinite(x)) throw DomainError("TtCore: non-finite entry");
  }
}

TensorTrain::TensorTrain(std::vector<TtCore> cores) : cores_(std::move(cores)) {
  if (cores_.empty()) throw DomainError("TensorTrain: needs at least one core");
  if (cores_.front().left_rank() != 1 || cores_.back().right_rank() != 1) {
    throw DomainError("TensorTrain: boundary ranks must be 1");
  }
  for (std::size_t i = 0; i + 1 < cores_.size(); ++i) {
    if (cores_[i].right_rank() != cores_[i + 1].left_rank()) {
      std::ostringstream os;
      os << "TensorTrain: core " << i + 1 << " has right rank " << cores_[i].right_rank()
         << " but core " << i + 2 << " has left rank " << cores_[i + 1].left_rank();
      throw DomainError(os.str());
    }
  }
  if (cores_.size() > 63) throw DomainError("TensorTrain: at most 63 binary dimensions");
}

std::vector<std::size_t> TensorTrain::ranks() const {
  std::vector<std::size_t> r;
  r.reserve(cores_.size() + 1);
  r.push_back(1);
  for (const auto& c : cores_) r.push_back(c.right_rank());
  return r;
}

std::vector<std::size_t> TensorTrain::edge_ranks() const {
  std::vector<std::size_t> r;
  for (std::size_t i = 0; i + 1 < cores_.size(); ++i) r.push_back(cores_[i].right_rank());
  return r;
}

std::size_t TensorTrain::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& c : cores_) n += c.data().size();
  return n;
}

RankProfile rank_profile(std::span<const std::size_t> edge_ranks) {
  RankProfile p;
  p.edge_ranks.assign(edge_ranks.begin(), edge_ranks.end());
  if (edge_ranks.empty()) {
    p.max_rank = 1;
    p.avg_rank = 1.0;
    return p;
  }
  p.max_rank = *std::max_element(edge_ranks.begin(), edge_ranks.end());
  const auto sum = std::accumulate(edge_ranks.begin(), edge_ranks.end(), std::size_t{0});
  p.avg_rank = static_cast<double>(sum) / static_cast<double>(edge_ranks.size() + 1);
  return p;
}

RankProfile rank_profile(const TensorTrain& tt) { return rank_profile(tt.edge_ranks()); }

double element(const TensorTrain& tt, std::uint64_t k) {
  const int d = tt.dims();
  if (k < 1 || k > tt.length()) {
    std::ostringstream os;
    os << "element: index " << k << " outside [1, 2^" << d << "]";
    throw DomainError(os.str());
  }
  const std::uint64_t bits = k - 1;
  std::vector<double> row{1.0};
  std::vector<double> next;
  for (int j = 0; j < d; ++j) {
    const TtCore& g = tt.core(static_cast<std::size_t>(j));
    const std::size_t bit = (bits >> (d - 1 - j)) & 1u;
    next.assign(g.right_rank(), 0.0);
    for (std::size_t a = 0; a < g.left_rank(); ++a) {
      const double x = row[a];
      if (x == 0.0) continue;
      for (std::size_t b = 0; b < g.right_rank(); ++b) next[b] += x * g(a, bit, b);
    }
    row.swap(next);
  }
  return row[0];
}

std::vector<double> to_full(const TensorTrain& tt, int max_dims) {
  const int d = tt.dims();
  if (d > max_dims) {
    std::ostringstream os;
    os << "to_full: d=" << d << " exceeds the dense limit " << max_dims << " ("
       << ((std::uint64_t{1} << d) * sizeof(double) >> 20) << " MiB)";
    throw ResourceError(os.str());
  }
  // Rows are prefixes (i_1..i_j) in big-endian order, columns the open rank.
  std::vector<double> prefix{1.0};
  std::size_t rank = 1;
  std::vector<double> next;
  for (const TtCore& g : tt.cores()) {
    const std::size_t count = prefix.size() / rank;
    const std::size_t out_rank = g.right_rank();
    next.assign(count * 2 * out_rank, 0.0);
    for (std::size_t p = 0; p < count; ++p) {
      const double* in = &prefix[p * rank];
      for (std::size_t bit = 0; bit < 2; ++bit) {
        double* out = &next[(p * 2 + bit) * out_rank];
        for (std::size_t a = 0; a < rank; ++a) {
          const double x = in[a];
          for (std::size_t b = 0; b < out_rank; ++b) out[b] += x * g(a, bit, b);
        }
      }
    }
    prefix.swap(next);
    rank = out_rank;
  }
  return prefix;
}

double frobenius_norm(const TensorTrain& tt) {
  // W_j = sum_i G_j[i]^T W_{j-1} G_j[i], W_0 = 1; ||v||^2 = W_d.
  std::vector<double> w{1.0};
  std::size_t rank = 1;
  for (const TtCore& g : tt.cores()) {
    const std::size_t out = g.right_rank();
    std::vector<double> next(out * out, 0.0);
    std::vector<double> tmp(rank * out);
    for (std::size_t bit = 0; bit < 2; ++bit) {
      // tmp = W G[bit]
      std::fill(tmp.begin(), tmp.end(), 0.0);
      for (std::size_t a = 0; a < rank; ++a)
        for (std::size_t c = 0; c < rank; ++c) {
          const double x = w[a * rank + c];
          if (x == 0.0) continue;
          for (std::size_t b = 0; b < out; ++b) tmp[a * out + b] += x * g(c, bit, b);
        }
      // next += G[bit]^T tmp
      for (std::size_t a = 0; a < rank; ++a)
        for (std::size_t b1 = 0; b1 < out; ++b1) {
          const double x = g(a, bit, b1);
          if (x == 0.0) continue;
          for (std::size_t b2 = 0; b2 < out; ++b2) next[b1 * out + b2] += x * tmp[a * out + b2];
        }
    }
    w.swap(next);
    rank = out;
  }
  return std::sqrt(std::max(w[0], 0.0));
}

TensorTrain hadamard(const TensorTrain& a, const TensorTrain& b) {
  if (a.dims() != b.dims()) {
    std::ostringstream os;
    os << "hadamard: dimension mismatch (" << a.dims() << " vs " << b.dims() << ")";
    throw DomainError(os.str());
  }
  std::vector<TtCore> cores;
  cores.reserve(static_cast<std::size_t>(a.dims()));
  for (int j = 0; j < a.dims(); ++j) {
    const TtCore& x = a.core(static_cast<std::size_t>(j));
    const TtCore& y = b.core(static_cast<std::size_t>(j));
    const std::size_t left = x.left_rank() * y.left_rank();
    const std::size_t right = x.right_rank() * y.right_rank();
    std::vector<double> data(left * 2 * right);
    for (std::size_t a1 = 0; a1 < x.left_rank(); ++a1)
      for (std::size_t a2 = 0; a2 < y.left_rank(); ++a2)
        for (std::size_t bit = 0; bit < 2; ++bit)
          for (std::size_t b1 = 0; b1 < x.right_rank(); ++b1)
            for (std::size_t b2 = 0; b2 < y.right_rank(); ++b2) {
              const std::size_t row = a1 * y.left_rank() + a2;
              const std::size_t col = b1 * y.right_rank() + b2;
              data[(row * 2 + bit) * right + col] = x(a1, bit, b1) * y(a2, bit, b2);
            }
    cores.emplace_back(left, right, std::move(data));
  }
  return TensorTrain(std::move(cores));
}

TensorTrain exponential_qtt(double beta, int d, bool* underflowed) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("exponential_qtt requires beta > 0");
  if (d < 1 || d > 63) throw DomainError("exponential_qtt requires 1 <= d <= 63");
  bool clamped = false;
  std::vector<TtCore> cores;
  cores.reserve(static_cast<std::size_t>(d));
  for (int j = 1; j <= d; ++j) {
    const double step = std::ldexp(1.0, d - j);
    double slice = std::exp(-beta * step);
    if (slice < std::numeric_limits<double>::min()) {
      clamped = true;
      slice = 0.0;
    }
    const double lead = (j == 1) ? std::exp(-beta) : 1.0;
    cores.emplace_back(1, 1, std::vector<double>{lead, lead * slice});
  }
  if (underflowed != nullptr) *underflowed = clamped;
  return TensorTrain(std::move(cores));
}

TensorTrain ones_qtt(int d) {
  if (d < 1 || d > 63) throw DomainError("ones_qtt requires 1 <= d <= 63");
  std::vector<TtCore> cores(static_cast<std::size_t>(d), TtCore(1, 1, {1.0, 1.0}));
  return TensorTrain(std::move(cores));
}

}  // namespace qtt

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "qttrank/tensor_train.hpp"

namespace qtt::testing {

/// Train with given edge ranks and N(0,1) entries, deterministic in seed.
inline TensorTrain random_tt(const std::vector<std::size_t>& edge_ranks, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<TtCore> cores;
  const std::size_t d = edge_ranks.size() + 1;
  for (std::size_t j = 0; j < d; ++j) {
    const std::size_t left = j == 0 ? 1 : edge_ranks[j - 1];
    const std::size_t right = j + 1 == d ? 1 : edge_ranks[j];
    std::vector<double> data(left * 2 * right);
    for (double& x : data) x = normal(rng);
    cores.emplace_back(left, right, std::move(data));
  }
  return TensorTrain(std::move(cores));
}

/// Element by explicit bit expansion and a naive chain product.
inline double brute_element(const TensorTrain& tt, std::uint64_t k) {
  const int d = tt.dims();
  std::vector<double> row{1.0};
  for (int j = 0; j < d; ++j) {
    const std::size_t bit = ((k - 1) >> (d - 1 - j)) & 1U;
    const TtCore& c = tt.core(static_cast<std::size_t>(j));
    std::vector<double> next(c.right_rank(), 0.0);
    for (std::size_t a = 0; a < c.left_rank(); ++a)
      for (std::size_t b = 0; b < c.right_rank(); ++b) next[b] += row[a] * c(a, bit, b);
    row = std::move(next);
  }
  return row[0];
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace qtt::testing

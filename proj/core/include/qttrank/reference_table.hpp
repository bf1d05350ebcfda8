#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>

namespace qtt {

struct ReferenceCell {
  double alpha;
  int d;
  double eps;
  int max_rank;
  double avg_rank;
};

/// Published maximal / average QTT ranks of k^-alpha under TT-SVD:
/// alpha in {2.5, 1.5}, d in {12, 14, ..., 30}, eps in {1e-2, ..., 1e-9}.
/// 160 read-only cells in table order (alpha, d descending, eps tightening).
class ReferenceTable {
 public:
  static constexpr std::size_t kCells = 160;

  [[nodiscard]] static const ReferenceTable& table1();

  [[nodiscard]] std::span<const ReferenceCell> cells() const noexcept { return cells_; }
  [[nodiscard]] std::optional<ReferenceCell> lookup(double alpha, int d, double eps) const noexcept;

 private:
  ReferenceTable();
  std::array<ReferenceCell, kCells> cells_{};
};

}  // namespace qtt

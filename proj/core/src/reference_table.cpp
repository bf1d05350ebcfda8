#include "qttrank/reference_table.hpp"

#include <cmath>

namespace qtt {

namespace {

struct Row {
  int d;
  int r[8];
  double avg[8];
};

constexpr double kEps[8] = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9};

constexpr Row kAlpha25[10] = {
    {30, {2, 3, 3, 4, 4, 5, 6, 6}, {1.07, 1.20, 1.33, 1.50, 1.70, 1.97, 2.17, 2.50}},
    {28, {2, 3, 3, 4, 4, 5, 6, 6}, {1.07, 1.21, 1.36, 1.54, 1.75, 2.04, 2.25, 2.61}},
    {26, {2, 3, 3, 4, 4, 5, 6, 6}, {1.08, 1.23, 1.35, 1.58, 1.81, 2.08, 2.35, 2.69}},
    {24, {2, 3, 3, 4, 4, 5, 6, 6}, {1.08, 1.21, 1.38, 1.62, 1.83, 2.12, 2.46, 2.83}},
    {22, {2, 3, 3, 4, 4, 5, 6, 6}, {1.09, 1.23, 1.41, 1.68, 1.91, 2.18, 2.59, 3.00}},
    {20, {2, 3, 3, 4, 4, 5, 6, 6}, {1.10, 1.25, 1.45, 1.75, 2.00, 2.30, 2.75, 3.20}},
    {18, {2, 3, 3, 4, 4, 5, 6, 6}, {1.11, 1.28, 1.44, 1.78, 2.11, 2.44, 2.94, 3.33}},
    {16, {2, 3, 3, 4, 4, 5, 5, 6}, {1.12, 1.31, 1.50, 1.88, 2.25, 2.62, 3.12, 3.62}},
    {14, {2, 3, 3, 4, 4, 5, 5, 6}, {1.14, 1.36, 1.57, 2.00, 2.29, 2.86, 3.29, 3.93}},
    {12, {2, 3, 3, 4, 4, 5, 5, 6}, {1.17, 1.42, 1.67, 2.17, 2.50, 3.17, 3.50, 3.92}},
};

constexpr Row kAlpha15[10] = {
    {30, {3, 3, 4, 5, 5, 6, 6, 7}, {1.30, 1.53, 1.90, 2.30, 2.77, 3.27, 3.80, 4.47}},
    {28, {3, 3, 4, 5, 5, 6, 6, 7}, {1.32, 1.57, 1.96, 2.39, 2.86, 3.43, 4.00, 4.61}},
    {26, {3, 3, 4, 5, 5, 6, 6, 7}, {1.35, 1.62, 2.04, 2.50, 2.96, 3.62, 4.15, 4.69}},
    {24, {3, 3, 4, 5, 5, 6, 6, 7}, {1.33, 1.67, 2.12, 2.54, 3.12, 3.71, 4.29, 4.83}},
    {22, {3, 3, 4, 5, 5, 6, 6, 7}, {1.36, 1.73, 2.23, 2.68, 3.23, 3.91, 4.41, 4.95}},
    {20, {3, 3, 4, 4, 5, 6, 6, 7}, {1.40, 1.75, 2.30, 2.75, 3.45, 4.00, 4.40, 5.00}},
    {18, {3, 3, 4, 4, 5, 6, 6, 7}, {1.44, 1.83, 2.39, 2.94, 3.56, 4.06, 4.50, 5.00}},
    {16, {3, 3, 4, 4, 5, 6, 6, 7}, {1.50, 1.94, 2.56, 3.06, 3.62, 4.12, 4.50, 5.00}},
    {14, {3, 3, 4, 4, 5, 6, 6, 7}, {1.50, 2.00, 2.64, 3.14, 3.71, 4.21, 4.50, 4.93}},
    {12, {2, 3, 4, 4, 5, 6, 6, 7}, {1.50, 2.08, 2.83, 3.17, 3.67, 4.08, 4.33, 4.75}},
};

bool same(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); }

}  // namespace

ReferenceTable::ReferenceTable() {
  std::size_t n = 0;
  for (const auto& [alpha, rows] : {std::pair{2.5, kAlpha25}, std::pair{1.5, kAlpha15}}) {
    for (int i = 0; i < 10; ++i)
      for (int e = 0; e < 8; ++e)
        cells_[n++] = ReferenceCell{alpha, rows[i].d, kEps[e], rows[i].r[e], rows[i].avg[e]};
  }
}

const ReferenceTable& ReferenceTable::table1() {
  static const ReferenceTable table;
  return table;
}

std::optional<ReferenceCell> ReferenceTable::lookup(double alpha, int d, double eps) const noexcept {
  for (const ReferenceCell& c : cells_) {
    if (c.d == d && same(c.alpha, alpha) && same(c.eps, eps)) return c;
  }
  return std::nullopt;
}

}  // namespace qtt

#pragma once

#include <filesystem>
#include <iosfwd>
#include <nlohmann/json.hpp>

#include "qttrank/tensor_train.hpp"

namespace qtt {

// Binary container, all integers and floats little-endian:
//
//   offset 0   char[4]   magic "QTT1"
//   offset 4   uint32    format version (1)
//   offset 8   uint64    d
//   offset 16  uint64    ranks r_0 .. r_d        (d + 1 values)
//   ...        float64   core 1 .. core d, each r_{j-1} * 2 * r_j values in
//                        row-major (a, i, b) order
//
// Round trips are bit-exact.
inline constexpr char kTtMagic[4] = {'Q', 'T', 'T', '1'};
inline constexpr std::uint32_t kTtFormatVersion = 1;

void write_binary(std::ostream& out, const TensorTrain& tt);
[[nodiscard]] TensorTrain read_binary(std::istream& in);

// JSON: {"format": "qtt", "version": 1, "d": d, "ranks": [...],
//        "cores": [[...], ...]} with each core flattened row-major.
[[nodiscard]] nlohmann::json to_json(const TensorTrain& tt);
[[nodiscard]] TensorTrain tensor_train_from_json(const nlohmann::json& j);

/// Chooses JSON for a ".json" extension and the binary container otherwise.
void save(const std::filesystem::path& path, const TensorTrain& tt);
[[nodiscard]] TensorTrain load(const std::filesystem::path& path);

}  // namespace qtt

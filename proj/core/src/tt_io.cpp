#include "qttrank/tt_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "qttrank/errors.hpp"

namespace qtt {

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  std::array<unsigned char, sizeof(T)> bytes{};
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
    throw DomainError("read_binary: truncated tensor train stream");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

std::vector<std::size_t> checked_ranks(std::vector<std::uint64_t> raw, std::uint64_t d) {
  if (raw.size() != d + 1) throw DomainError("tensor train: ranks array must have d + 1 entries");
  std::vector<std::size_t> r(raw.begin(), raw.end());
  for (std::size_t x : r) {
    if (x == 0 || x > (std::size_t{1} << 31)) throw DomainError("tensor train: implausible rank");
  }
  return r;
}

}  // namespace

void write_binary(std::ostream& out, const TensorTrain& tt) {
  out.write(kTtMagic, sizeof kTtMagic);
  put_le<std::uint32_t>(out, kTtFormatVersion);
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(tt.dims()));
  for (std::size_t r : tt.ranks()) put_le<std::uint64_t>(out, r);
  for (const TtCore& core : tt.cores())
    for (double x : core.data()) put_le<double>(out, x);
  if (!out) throw std::ios_base::failure("write_binary: stream write failed");
}

TensorTrain read_binary(std::istream& in) {
  char magic[4];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kTtMagic, sizeof magic) != 0) {
    throw DomainError("read_binary: missing QTT1 magic");
  }
  const auto version = get_le<std::uint32_t>(in);
  if (version != kTtFormatVersion) {
    throw DomainError("read_binary: unsupported format version " + std::to_string(version));
  }
  const auto d = get_le<std::uint64_t>(in);
  if (d == 0 || d > 63) throw DomainError("read_binary: d out of range");
  std::vector<std::uint64_t> raw(d + 1);
  for (auto& r : raw) r = get_le<std::uint64_t>(in);
  const auto ranks = checked_ranks(std::move(raw), d);
  std::vector<TtCore> cores;
  cores.reserve(d);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> data(ranks[j] * 2 * ranks[j + 1]);
    for (double& x : data) x = get_le<double>(in);
    cores.emplace_back(ranks[j], ranks[j + 1], std::move(data));
  }
  return TensorTrain(std::move(cores));
}

nlohmann::json to_json(const TensorTrain& tt) {
  nlohmann::json cores = nlohmann::json::array();
  for (const TtCore& core : tt.cores()) {
    cores.push_back(std::vector<double>(core.data().begin(), core.data().end()));
  }
  return {{"format", "qtt"},
          {"version", kTtFormatVersion},
          {"d", tt.dims()},
          {"ranks", tt.ranks()},
          {"cores", std::move(cores)}};
}

TensorTrain tensor_train_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "qtt") throw DomainError("tensor train json: bad format tag");
    const auto d = j.at("d").get<std::uint64_t>();
    if (d == 0 || d > 63) throw DomainError("tensor train json: d out of range");
    const auto ranks = checked_ranks(j.at("ranks").get<std::vector<std::uint64_t>>(), d);
    const auto& raw_cores = j.at("cores");
    if (raw_cores.size() != d) throw DomainError("tensor train json: expected d cores");
    std::vector<TtCore> cores;
    for (std::size_t i = 0; i < d; ++i) {
      cores.emplace_back(ranks[i], ranks[i + 1], raw_cores[i].get<std::vector<double>>());
    }
    return TensorTrain(std::move(cores));
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("tensor train json: ") + e.what());
  }
}

void save(const std::filesystem::path& path, const TensorTrain& tt) {
  const bool as_json = path.extension() == ".json";
  std::ofstream out(path, as_json ? std::ios::out : std::ios::out | std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
  if (as_json) {
    out << to_json(tt).dump(1) << '\n';
  } else {
    write_binary(out, tt);
  }
  if (!out) throw std::ios_base::failure("failed writing " + path.string());
}

TensorTrain load(const std::filesystem::path& path) {
  const bool as_json = path.extension() == ".json";
  std::ifstream in(path, as_json ? std::ios::in : std::ios::in | std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path.string());
  if (as_json) return tensor_train_from_json(nlohmann::json::parse(in));
  return read_binary(in);
}

}  // namespace qtt

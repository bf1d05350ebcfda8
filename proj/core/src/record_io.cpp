#include "qttrank/record_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <ostream>

#include "qttrank/errors.hpp"

namespace qtt {

OutputFormat parse_output_format(std::string_view text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "json") return OutputFormat::Json;
  throw DomainError("unknown output format '" + std::string(text) + "' (expected csv or json)");
}

std::string_view extension(OutputFormat f) noexcept { return f == OutputFormat::Csv ? ".csv" : ".json"; }

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) throw NumericalError("format_double: conversion failed");
  return {buf.data(), end};
}

void write_csv(std::ostream& out, std::span<const ExperimentRecord> records) {
  out << kCsvHeader << '\n';
  for (const ExperimentRecord& r : records) {
    out << format_double(r.alpha) << ',' << format_double(r.lambda) << ',' << r.d << ','
        << format_double(r.eps) << ',' << to_string(r.mode) << ',' << r.max_rank << ','
        << format_double(r.avg_rank) << ',' << format_double(r.rel_error) << ',';
    if (r.reference_R) out << *r.reference_R;
    out << ',' << to_string(r.match) << ',' << format_double(r.wall_time) << ',';
    for (std::size_t i = 0; i < r.edge_ranks.size(); ++i) out << (i ? ";" : "") << r.edge_ranks[i];
    out << '\n';
  }
}

nlohmann::json to_json(const ExperimentRecord& r) {
  nlohmann::json j{{"alpha", r.alpha},
                   {"lambda", r.lambda},
                   {"d", r.d},
                   {"eps", r.eps},
                   {"mode", to_string(r.mode)},
                   {"edge_ranks", r.edge_ranks},
                   {"R", r.max_rank},
                   {"avg_rank", r.avg_rank},
                   {"rel_error", r.rel_error},
                   {"abs_error", r.abs_error},
                   {"input_norm", r.input_norm},
                   {"wall_time", r.wall_time},
                   {"match", to_string(r.match)},
                   {"error_bound_ok", r.error_bound_ok},
                   {"predicted_unit_edges", r.predicted_unit_edges},
                   {"saturation_ok", r.saturation_ok}};
  j["reference_R"] = r.reference_R ? nlohmann::json(*r.reference_R) : nlohmann::json(nullptr);
  j["reference_avg"] = r.reference_avg ? nlohmann::json(*r.reference_avg) : nlohmann::json(nullptr);
  j["failure"] = r.failure ? nlohmann::json(*r.failure) : nlohmann::json(nullptr);
  return j;
}

ExperimentRecord record_from_json(const nlohmann::json& j) {
  try {
    ExperimentRecord r;
    r.alpha = j.at("alpha").get<double>();
    r.lambda = j.at("lambda").get<double>();
    r.d = j.at("d").get<int>();
    r.eps = j.at("eps").get<double>();
    r.mode = parse_tolerance_mode(j.at("mode").get<std::string>());
    r.edge_ranks = j.at("edge_ranks").get<std::vector<std::size_t>>();
    r.max_rank = j.at("R").get<std::size_t>();
    r.avg_rank = j.at("avg_rank").get<double>();
    r.rel_error = j.at("rel_error").get<double>();
    r.abs_error = j.value("abs_error", 0.0);
    r.input_norm = j.value("input_norm", 0.0);
    r.wall_time = j.value("wall_time", 0.0);
    r.match = parse_match_kind(j.at("match").get<std::string>());
    r.error_bound_ok = j.value("error_bound_ok", true);
    r.predicted_unit_edges = j.value("predicted_unit_edges", std::size_t{0});
    r.saturation_ok = j.value("saturation_ok", true);
    if (j.contains("reference_R") && !j["reference_R"].is_null()) r.reference_R = j["reference_R"].get<int>();
    if (j.contains("reference_avg") && !j["reference_avg"].is_null())
      r.reference_avg = j["reference_avg"].get<double>();
    if (j.contains("failure") && !j["failure"].is_null()) r.failure = j["failure"].get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed experiment record: ") + e.what());
  }
}

void write_json(std::ostream& out, std::span<const ExperimentRecord> records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const ExperimentRecord& r : records) arr.push_back(to_json(r));
  out << arr.dump(2) << '\n';
}

std::vector<ExperimentRecord> read_json_records(std::istream& in) {
  nlohmann::json arr;
  try {
    in >> arr;
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError(std::string("malformed record file: ") + e.what());
  }
  if (!arr.is_array()) throw DomainError("record file must hold a JSON array");
  std::vector<ExperimentRecord> out;
  out.reserve(arr.size());
  for (const auto& j : arr) out.push_back(record_from_json(j));
  return out;
}

void emit(std::span<const ExperimentRecord> records, OutputFormat format, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
  if (format == OutputFormat::Csv) {
    write_csv(out, records);
  } else {
    write_json(out, records);
  }
  out.flush();
  if (!out) throw std::ios_base::failure("write to " + path.string() + " failed");
}

}  // namespace qtt

#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qttrank/experiment_record.hpp"

namespace qtt {

enum class OutputFormat { Csv, Json };

[[nodiscard]] OutputFormat parse_output_format(std::string_view text);
[[nodiscard]] std::string_view extension(OutputFormat f) noexcept;

/// Shortest decimal string that parses back to exactly x.
[[nodiscard]] std::string format_double(double x);

/// CSV column order.
inline constexpr std::string_view kCsvHeader =
    "alpha,lambda,d,eps,mode,R,avg_rank,rel_error,reference_R,match,wall_time,edge_ranks";

/// Header plus one line per record; edge ranks are ';'-separated and an
/// absent reference is an empty field.
void write_csv(std::ostream& out, std::span<const ExperimentRecord> records);

[[nodiscard]] nlohmann::json to_json(const ExperimentRecord& record);
[[nodiscard]] ExperimentRecord record_from_json(const nlohmann::json& j);

void write_json(std::ostream& out, std::span<const ExperimentRecord> records);
[[nodiscard]] std::vector<ExperimentRecord> read_json_records(std::istream& in);

/// Writes records to path in the given format. I/O failures are reported as
/// std::ios_base::failure naming the path.
void emit(std::span<const ExperimentRecord> records, OutputFormat format,
          const std::filesystem::path& path);

}  // namespace qtt

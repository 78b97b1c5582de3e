#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pimllm/sweep.hpp"

namespace pimllm::report {

/// Bumped whenever the column set or order changes.
inline constexpr int kRunRecordSchemaVersion = 1;

enum class Format { CSV, JSON };

Format parse_format(std::string_view text);

/// RunRecord columns in output order.
const std::vector<std::string>& run_record_columns();

/// "%.6g"; the only float formatting used by the emitters.
std::string format_number(double value);

/// Header plus one LF-terminated row per record; fields quoted per RFC 4180
/// only when they contain a comma, quote or line break.
std::string to_csv(const std::vector<sweep::RunRecord>& records);

/// Array of objects keyed by the CSV column names, holding the same printed values.
std::string to_json(const std::vector<sweep::RunRecord>& records);

/// Writes to_csv/to_json output. Throws std::invalid_argument on empty input and
/// std::runtime_error if the path cannot be written.
void emit(const std::vector<sweep::RunRecord>& records, Format format,
          const std::filesystem::path& path);

/// RFC 4180 reader: rows of fields, header included.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

} // namespace pimllm::report

#pragma once

#include "toymodel/trajectory.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace toymodel {

enum class SeriesFormat { Csv, Json };

class IoError : public std::runtime_error {
public:
    IoError(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(path)
    {
    }
    [[nodiscard]] const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Malformed CSV or JSON input.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 17 significant digits, which round-trips every double.
[[nodiscard]] std::string format_real(double value);

/// Columns: t, mass, energy, hs_norm_<s> for every exponent in ascending s,
/// then newton_iters and f_evals when any record carries solver counters,
/// then flags when counters are present or any flag is set.
[[nodiscard]] std::string series_to_csv(const std::vector<DiagnosticsRecord>& records);
[[nodiscard]] std::vector<DiagnosticsRecord> series_from_csv(std::string_view text);

/// {"metadata": ..., "records": [...]} with the same fields as the CSV.
[[nodiscard]] nlohmann::json series_to_json(const std::vector<DiagnosticsRecord>& records,
                                            const nlohmann::json& metadata = nlohmann::json::object());
[[nodiscard]] std::vector<DiagnosticsRecord> series_from_json(const nlohmann::json& doc);

/// Writes atomically: the data goes to a temporary sibling that is renamed
/// over `path`, so a failure never leaves a partial file. Throws IoError.
void write_text_file(const std::string& path, std::string_view text);

void write_series(const std::vector<DiagnosticsRecord>& records, const std::string& path, SeriesFormat format,
                  const nlohmann::json& metadata = nlohmann::json::object());

[[nodiscard]] std::vector<DiagnosticsRecord> read_series(const std::string& path, SeriesFormat format);

/// Prefixes relative paths with $TOYMODEL_OUTPUT_DIR when it is set and non-empty.
[[nodiscard]] std::string resolve_output_path(const std::string& path);

/// A plain table of already formatted cells, for report-shaped outputs.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

[[nodiscard]] std::string table_to_csv(const Table& table);
/// {"metadata": ..., "columns": [...], "rows": [[...]]}; numeric cells stay strings.
[[nodiscard]] nlohmann::json table_to_json(const Table& table, const nlohmann::json& metadata);

}  // namespace toymodel

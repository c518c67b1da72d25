#include "toymodel/series_io.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include <unistd.h>

namespace toymodel {

namespace {

constexpr std::string_view kNormPrefix = "hs_norm_";

// Shortest round-trip spelling, used for column names only.
std::string exponent_label(double s)
{
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, s);
    return std::string(buf, ptr);
}

double parse_cell(std::string_view cell, std::size_t line)
{
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw FormatError("line " + std::to_string(line) + ": bad number '" + std::string(cell) + "'");
    }
    return value;
}

template <class Int>
Int parse_int_cell(std::string_view cell, std::size_t line)
{
    Int value{};
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw FormatError("line " + std::to_string(line) + ": bad integer '" + std::string(cell) + "'");
    }
    return value;
}

std::vector<std::string_view> split_row(std::string_view line)
{
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError(path, "read failed");
    return buf.str();
}

}  // namespace

std::string format_real(double value)
{
    char buf[40];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

std::string series_to_csv(const std::vector<DiagnosticsRecord>& records)
{
    std::set<double> exponents;
    bool has_solver = false;
    bool has_flags = false;
    for (const auto& r : records) {
        for (const auto& [s, v] : r.hs_norms) exponents.insert(s);
        has_solver = has_solver || r.solver.has_value();
        has_flags = has_flags || r.flags != kFlagNone;
    }
    has_flags = has_flags || has_solver;

    std::string out = "t,mass,energy";
    for (double s : exponents) out += "," + std::string(kNormPrefix) + exponent_label(s);
    if (has_solver) out += ",newton_iters,f_evals";
    if (has_flags) out += ",flags";
    out += '\n';

    for (const auto& r : records) {
        out += format_real(r.t) + ',' + format_real(r.mass) + ',' + format_real(r.energy);
        for (double s : exponents) {
            out += ',';
            if (auto it = r.hs_norms.find(s); it != r.hs_norms.end()) out += format_real(it->second);
        }
        if (has_solver) {
            out += ',';
            if (r.solver) out += std::to_string(r.solver->newton_iters) + ',' + std::to_string(r.solver->f_evals);
            else out += ',';
        }
        if (has_flags) out += ',' + std::to_string(r.flags);
        out += '\n';
    }
    return out;
}

std::vector<DiagnosticsRecord> series_from_csv(std::string_view text)
{
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    if (lines.empty()) throw FormatError("missing header");

    const auto header = split_row(lines.front());
    if (header.size() < 3 || header[0] != "t" || header[1] != "mass" || header[2] != "energy") {
        throw FormatError("header must start with t,mass,energy");
    }
    std::vector<double> exponents;
    std::size_t col = 3;
    for (; col < header.size() && header[col].rfind(kNormPrefix, 0) == 0; ++col) {
        exponents.push_back(parse_cell(header[col].substr(kNormPrefix.size()), 1));
    }
    bool has_solver = false;
    bool has_flags = false;
    if (col + 1 < header.size() && header[col] == "newton_iters" && header[col + 1] == "f_evals") {
        has_solver = true;
        col += 2;
    }
    if (col < header.size() && header[col] == "flags") {
        has_flags = true;
        ++col;
    }
    if (col != header.size()) throw FormatError("unexpected column '" + std::string(header[col]) + "'");

    std::vector<DiagnosticsRecord> records;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto cells = split_row(lines[i]);
        if (cells.size() != header.size()) {
            throw FormatError("line " + std::to_string(i + 1) + ": expected " + std::to_string(header.size()) +
                              " cells");
        }
        DiagnosticsRecord r;
        r.t = parse_cell(cells[0], i + 1);
        r.mass = parse_cell(cells[1], i + 1);
        r.energy = parse_cell(cells[2], i + 1);
        std::size_t c = 3;
        for (double s : exponents) {
            if (!cells[c].empty()) r.hs_norms[s] = parse_cell(cells[c], i + 1);
            ++c;
        }
        if (has_solver) {
            if (!cells[c].empty() || !cells[c + 1].empty()) {
                r.solver = StepCounters{parse_int_cell<int>(cells[c], i + 1), parse_int_cell<int>(cells[c + 1], i + 1)};
            }
            c += 2;
        }
        if (has_flags) r.flags = parse_int_cell<std::uint32_t>(cells[c], i + 1);
        records.push_back(std::move(r));
    }
    return records;
}

nlohmann::json series_to_json(const std::vector<DiagnosticsRecord>& records, const nlohmann::json& metadata)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : records) {
        nlohmann::json row{{"t", r.t}, {"mass", r.mass}, {"energy", r.energy}};
        nlohmann::json norms = nlohmann::json::object();
        for (const auto& [s, v] : r.hs_norms) norms[exponent_label(s)] = v;
        row["hs_norms"] = std::move(norms);
        if (r.solver) {
            row["newton_iters"] = r.solver->newton_iters;
            row["f_evals"] = r.solver->f_evals;
        }
        row["flags"] = r.flags;
        rows.push_back(std::move(row));
    }
    return {{"metadata", metadata}, {"records", std::move(rows)}};
}

std::vector<DiagnosticsRecord> series_from_json(const nlohmann::json& doc)
{
    try {
        std::vector<DiagnosticsRecord> records;
        for (const auto& row : doc.at("records")) {
            DiagnosticsRecord r;
            r.t = row.at("t").get<double>();
            r.mass = row.at("mass").get<double>();
            r.energy = row.at("energy").get<double>();
            for (const auto& [label, v] : row.at("hs_norms").items()) {
                r.hs_norms[parse_cell(label, 0)] = v.get<double>();
            }
            if (row.contains("newton_iters")) {
                r.solver = StepCounters{row.at("newton_iters").get<int>(), row.at("f_evals").get<int>()};
            }
            r.flags = row.value("flags", 0u);
            records.push_back(std::move(r));
        }
        return records;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(e.what());
    }
}

void write_text_file(const std::string& path, std::string_view text)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    std::error_code ec;
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path(), ec);
        if (ec) throw IoError(path, "cannot create directory: " + ec.message());
    }
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(path, "cannot open for writing");
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp, ec);
            throw IoError(path, "write failed");
        }
    }
    fs::rename(tmp, target, ec);
    if (ec) {
        std::error_code ignored;
        fs::remove(tmp, ignored);
        throw IoError(path, "rename failed: " + ec.message());
    }
}

void write_series(const std::vector<DiagnosticsRecord>& records, const std::string& path, SeriesFormat format,
                  const nlohmann::json& metadata)
{
    if (format == SeriesFormat::Csv) {
        write_text_file(path, series_to_csv(records));
    } else {
        write_text_file(path, series_to_json(records, metadata).dump(1) + '\n');
    }
}

std::vector<DiagnosticsRecord> read_series(const std::string& path, SeriesFormat format)
{
    const std::string text = read_file(path);
    try {
        if (format == SeriesFormat::Csv) return series_from_csv(text);
        return series_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path, e.what());
    } catch (const FormatError& e) {
        throw IoError(path, e.what());
    }
}

std::string resolve_output_path(const std::string& path)
{
    const char* dir = std::getenv("TOYMODEL_OUTPUT_DIR");
    if (dir == nullptr || *dir == '\0' || std::filesystem::path(path).is_absolute()) return path;
    return (std::filesystem::path(dir) / path).string();
}

std::string table_to_csv(const Table& table)
{
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(table.columns);
    for (const auto& row : table.rows) line(row);
    return out;
}

nlohmann::json table_to_json(const Table& table, const nlohmann::json& metadata)
{
    return {{"metadata", metadata}, {"columns", table.columns}, {"rows", table.rows}};
}

}  // namespace toymodel

#include "pimllm/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace pimllm::report {

namespace {

// A cell is either text, an integer or a real printed with 6 significant digits.
struct Cell {
    enum class Kind { Text, Integer, Real } kind;
    std::string text;
};

Cell text_cell(std::string_view s) { return {Cell::Kind::Text, std::string(s)}; }
Cell int_cell(std::int64_t v) { return {Cell::Kind::Integer, std::to_string(v)}; }
Cell real_cell(double v) { return {Cell::Kind::Real, format_number(v)}; }

std::vector<Cell> row_of(const sweep::RunRecord& rec) {
    const auto& r = rec.report;
    std::vector<Cell> row = {
        int_cell(kRunRecordSchemaVersion),
        text_cell(r.model),
        int_cell(r.context_len),
        text_cell(engine::to_string(r.mode)),
        text_cell(systolic::to_string(rec.dataflow)),
        real_cell(r.tokens_per_s),
        real_cell(r.tokens_per_joule),
        real_cell(r.words_per_battery),
        real_cell(r.gops),
        real_cell(r.gops_per_watt),
        real_cell(r.speedup_vs_tpu),
        real_cell(rec.cost.total_latency()),
        real_cell(rec.cost.total_energy()),
    };
    for (auto c : kAllCategories) {
        row.push_back(real_cell(rec.cost.latency(c)));
        row.push_back(real_cell(rec.cost.energy(c)));
        row.push_back(real_cell(r.breakdown.at(c)));
    }
    return row;
}

std::string quote_csv(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

} // namespace

Format parse_format(std::string_view text) {
    if (text == "csv" || text == "CSV") return Format::CSV;
    if (text == "json" || text == "JSON") return Format::JSON;
    throw std::invalid_argument("unknown format '" + std::string(text) + "' (expected csv or json)");
}

const std::vector<std::string>& run_record_columns() {
    static const std::vector<std::string> columns = [] {
        std::vector<std::string> cols = {
            "schema_version", "model",         "context_len",       "mode",
            "dataflow",       "tokens_per_s",  "tokens_per_joule",  "words_per_battery",
            "gops",           "gops_per_watt", "speedup_vs_tpu",    "latency_s",
            "energy_j",
        };
        for (auto c : kAllCategories) {
            const std::string name(to_string(c));
            cols.push_back("latency_s_" + name);
            cols.push_back("energy_j_" + name);
            cols.push_back("latency_pct_" + name);
        }
        return cols;
    }();
    return columns;
}

std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

std::string to_csv(const std::vector<sweep::RunRecord>& records) {
    std::string out;
    const auto& cols = run_record_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) out += ',';
        out += quote_csv(cols[i]);
    }
    out += '\n';
    for (const auto& rec : records) {
        const auto row = row_of(rec);
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += quote_csv(row[i].text);
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const std::vector<sweep::RunRecord>& records) {
    // ordered_json keeps the CSV column order inside each object.
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    const auto& cols = run_record_columns();
    for (const auto& rec : records) {
        const auto row = row_of(rec);
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            const auto& cell = row[i];
            switch (cell.kind) {
            case Cell::Kind::Text: obj[cols[i]] = cell.text; break;
            case Cell::Kind::Integer: obj[cols[i]] = std::stoll(cell.text); break;
            case Cell::Kind::Real: obj[cols[i]] = std::strtod(cell.text.c_str(), nullptr); break;
            }
        }
        doc.push_back(std::move(obj));
    }
    return doc.dump(2) + "\n";
}

void emit(const std::vector<sweep::RunRecord>& records, Format format,
          const std::filesystem::path& path) {
    if (records.empty()) {
        throw std::invalid_argument("emit: no records");
    }
    const auto body = format == Format::CSV ? to_csv(records) : to_json(records);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out << body;
    out.close();
    if (!out) {
        throw std::runtime_error("failed writing '" + path.string() + "'");
    }
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool field_started = false;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
            continue;
        }
        switch (ch) {
        case '"':
            if (field_started || !field.empty()) {
                throw std::invalid_argument("parse_csv: stray quote inside unquoted field");
            }
            quoted = true;
            field_started = true;
            break;
        case ',':
            end_field();
            break;
        case '\r':
            break;
        case '\n':
            end_field();
            rows.push_back(std::move(row));
            row.clear();
            break;
        default:
            field += ch;
            field_started = true;
        }
    }
    if (quoted) {
        throw std::invalid_argument("parse_csv: unterminated quoted field");
    }
    if (field_started || !row.empty()) {
        end_field();
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace pimllm::report

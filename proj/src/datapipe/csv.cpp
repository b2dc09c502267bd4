#include "elstm/datapipe/csv.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "elstm/error.hpp"

namespace elstm::data {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else if (c != '\r') {
            current.push_back(c);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

bool parse_value(const std::string& field, double& out) {
    const std::string t = trim(field);
    if (t.empty() || t == "NaN" || t == "nan" || t == "NA") {
        out = std::numeric_limits<double>::quiet_NaN();
        return true;
    }
    errno = 0;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size();
}

std::string join_lines(const std::vector<std::size_t>& lines) {
    std::string s;
    const std::size_t shown = std::min<std::size_t>(lines.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) {
        if (i) s += ", ";
        s += std::to_string(lines[i]);
    }
    if (lines.size() > shown) s += ", ... (" + std::to_string(lines.size()) + " total)";
    return s;
}

}  // namespace

std::string format_double(double value) {
    if (std::isnan(value)) return "NaN";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value) break;
    }
    return buf;
}

SensorFrame read_csv(std::istream& in, const CsvSchema& schema, const std::string& source) {
    std::string line;
    if (!std::getline(in, line)) {
        throw IngestError(source + ": empty file (missing header row)");
    }
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
    std::vector<std::string> header = split_fields(line);
    for (auto& h : header) h = trim(h);
    if (header.empty() || header.front() != "timestamp") {
        throw IngestError(source + ": first header column must be 'timestamp'");
    }
    const bool has_label = header.back() == "label";
    if (schema.require_label && !has_label) {
        throw IngestError(source + ": schema requires a 'label' column");
    }
    SensorFrame frame;
    frame.feature_names.assign(header.begin() + 1, header.end() - (has_label ? 1 : 0));
    if (frame.feature_names.empty()) throw IngestError(source + ": header declares no feature columns");
    if (!schema.feature_names.empty() && schema.feature_names != frame.feature_names) {
        throw IngestError(source + ": header features do not match schema (expected " +
                          std::to_string(schema.feature_names.size()) + " named features, got " +
                          std::to_string(frame.feature_names.size()) + ")");
    }
    const std::size_t f = frame.feature_names.size();
    const std::size_t expected_fields = header.size();

    std::vector<double> data;
    std::vector<std::size_t> bad_timestamps;
    std::vector<std::size_t> non_monotonic;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> fields = split_fields(line);
        if (fields.size() != expected_fields) {
            throw IngestError(source + ": line " + std::to_string(line_no) + " has " +
                              std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(expected_fields));
        }
        const auto ts = parse_timestamp(trim(fields[0]));
        if (!ts) {
            bad_timestamps.push_back(line_no);
            continue;
        }
        if (!frame.timestamps.empty() && *ts <= frame.timestamps.back()) non_monotonic.push_back(line_no);
        frame.timestamps.push_back(*ts);
        for (std::size_t c = 0; c < f; ++c) {
            double v = 0.0;
            if (!parse_value(fields[c + 1], v)) {
                throw IngestError(source + ": line " + std::to_string(line_no) + " column '" +
                                  frame.feature_names[c] + "' is not numeric: '" + fields[c + 1] + "'");
            }
            data.push_back(v);
        }
        Label label = Label::unknown;
        if (has_label) {
            const std::string l = trim(fields.back());
            if (l == "0") {
                label = Label::normal;
            } else if (l == "1") {
                label = Label::abnormal;
            } else if (!l.empty()) {
                throw IngestError(source + ": line " + std::to_string(line_no) + " has invalid label '" + l + "'");
            }
        }
        frame.labels.push_back(label);
    }
    if (!bad_timestamps.empty()) {
        throw IngestError(source + ": unparseable timestamps on lines " + join_lines(bad_timestamps));
    }
    if (!non_monotonic.empty()) {
        throw IngestError(source + ": timestamps not strictly increasing on lines " + join_lines(non_monotonic));
    }
    const std::size_t n = frame.timestamps.size();
    frame.values = num::Matrix(n, f, std::move(data));
    return frame;
}

SensorFrame load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open '" + path.string() + "'");
    return read_csv(in, schema, path.string());
}

void write_csv(const SensorFrame& frame, std::ostream& out, bool with_labels) {
    out << "timestamp";
    for (const auto& name : frame.feature_names) out << ',' << name;
    if (with_labels) out << ",label";
    out << '\n';
    for (std::size_t r = 0; r < frame.samples(); ++r) {
        out << format_timestamp(frame.timestamps[r]);
        for (double v : frame.values.row(r)) out << ',' << format_double(v);
        if (with_labels) {
            out << ',';
            if (frame.labels[r] == Label::normal) out << '0';
            if (frame.labels[r] == Label::abnormal) out << '1';
        }
        out << '\n';
    }
}

void write_csv(const SensorFrame& frame, const std::filesystem::path& path, bool with_labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    write_csv(frame, out, with_labels);
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace elstm::data

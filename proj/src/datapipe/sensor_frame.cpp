#include "elstm/datapipe/sensor_frame.hpp"

#include <chrono>
#include <cstdio>

#include "elstm/error.hpp"

namespace elstm::data {

std::string_view to_string(Label label) noexcept {
    switch (label) {
        case Label::normal: return "normal";
        case Label::abnormal: return "abnormal";
        case Label::unknown: return "unknown";
    }
    return "unknown";
}

std::optional<Label> parse_label_name(std::string_view text) noexcept {
    if (text == "normal") return Label::normal;
    if (text == "abnormal") return Label::abnormal;
    if (text == "unknown") return Label::unknown;
    return std::nullopt;
}

std::string format_timestamp(Timestamp t) {
    using namespace std::chrono;
    const sys_seconds tp{seconds{t}};
    const sys_days day = floor<days>(tp);
    const year_month_day ymd{day};
    const hh_mm_ss hms{tp - day};
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:%02ld:%02lldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                  static_cast<long long>(hms.seconds().count()));
    return buf;
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);
    if (text.size() != 19 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
        text[13] != ':' || text[16] != ':') {
        return std::nullopt;
    }
    auto digits = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            if (text[i] < '0' || text[i] > '9') return std::nullopt;
            v = v * 10 + (text[i] - '0');
        }
        return v;
    };
    const auto y = digits(0, 4), mo = digits(5, 2), d = digits(8, 2);
    const auto h = digits(11, 2), mi = digits(14, 2), s = digits(17, 2);
    if (!y || !mo || !d || !h || !mi || !s) return std::nullopt;
    if (*h > 23 || *mi > 59 || *s > 59) return std::nullopt;

    using namespace std::chrono;
    const year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)}, day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) return std::nullopt;
    const sys_seconds tp = sys_days{ymd} + hours{*h} + minutes{*mi} + seconds{*s};
    return tp.time_since_epoch().count();
}

std::vector<std::string> default_feature_names() {
    return {"P_0", "T_0", "P_1", "T_1", "P_2", "T_2", "P_3", "T_3", "P_4", "T_4",
            "P_5", "T_5", "P_6", "T_6", "P_7", "P_8", "P_9", "P_10", "Eff"};
}

void SensorFrame::validate() const {
    const std::size_t n = timestamps.size();
    if (values.rows() != n || labels.size() != n) {
        throw IngestError("SensorFrame: " + std::to_string(n) + " timestamps, " + std::to_string(values.rows()) +
                          " value rows, " + std::to_string(labels.size()) + " labels");
    }
    if (n > 0 && values.cols() != feature_names.size()) {
        throw IngestError("SensorFrame: " + std::to_string(values.cols()) + " value columns but " +
                          std::to_string(feature_names.size()) + " feature names");
    }
    std::string offending;
    for (std::size_t i = 1; i < n; ++i) {
        if (timestamps[i] <= timestamps[i - 1]) {
            if (!offending.empty()) offending += ", ";
            offending += std::to_string(i);
        }
    }
    if (!offending.empty()) {
        throw IngestError("SensorFrame: timestamps not strictly increasing at rows " + offending);
    }
}

SensorFrame SensorFrame::slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > samples()) {
        throw DimensionError("SensorFrame::slice: [" + std::to_string(begin) + ", " + std::to_string(end) +
                             ") out of range for " + std::to_string(samples()) + " samples");
    }
    SensorFrame out;
    out.feature_names = feature_names;
    out.timestamps.assign(timestamps.begin() + begin, timestamps.begin() + end);
    out.labels.assign(labels.begin() + begin, labels.begin() + end);
    const std::size_t f = values.cols();
    std::vector<double> data(values.values().begin() + begin * f, values.values().begin() + end * f);
    out.values = num::Matrix(end - begin, f, std::move(data));
    return out;
}

SensorFrame SensorFrame::select(std::span<const std::size_t> rows) const {
    SensorFrame out;
    out.feature_names = feature_names;
    const std::size_t f = values.cols();
    out.values = num::Matrix(rows.size(), f);
    out.timestamps.reserve(rows.size());
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t r = rows[i];
        if (r >= samples()) throw DimensionError("SensorFrame::select: row " + std::to_string(r) + " out of range");
        out.timestamps.push_back(timestamps[r]);
        out.labels.push_back(labels[r]);
        auto src = values.row(r);
        auto dst = out.values.row(i);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return out;
}

SensorFrame concat(const SensorFrame& first, const SensorFrame& second) {
    if (first.feature_names != second.feature_names) {
        throw DimensionError("concat: feature names differ");
    }
    SensorFrame out = first;
    out.timestamps.insert(out.timestamps.end(), second.timestamps.begin(), second.timestamps.end());
    out.labels.insert(out.labels.end(), second.labels.begin(), second.labels.end());
    std::vector<double> data(first.values.values().begin(), first.values.values().end());
    data.insert(data.end(), second.values.values().begin(), second.values.values().end());
    out.values = num::Matrix(first.samples() + second.samples(), first.features(), std::move(data));
    return out;
}

}  // namespace elstm::data

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "elstm/numkernel/matrix.hpp"

namespace elstm::data {

enum class Label : std::uint8_t { normal, abnormal, unknown };

std::string_view to_string(Label label) noexcept;
std::optional<Label> parse_label_name(std::string_view text) noexcept;

/// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

std::string format_timestamp(Timestamp t);
/// Accepts `YYYY-MM-DDTHH:MM:SS` with an optional trailing `Z`.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// Channel names of the 19-sensor turbine layout (pressures, temperatures, power).
std::vector<std::string> default_feature_names();

/// Timestamped n x F table of sensor readings with a label per sample.
struct SensorFrame {
    std::vector<Timestamp> timestamps;
    num::Matrix values;
    std::vector<std::string> feature_names;
    std::vector<Label> labels;

    std::size_t samples() const noexcept { return timestamps.size(); }
    std::size_t features() const noexcept { return feature_names.size(); }

    /// Checks shape agreement and strictly increasing timestamps; throws IngestError.
    void validate() const;

    SensorFrame slice(std::size_t begin, std::size_t end) const;
    /// Rows at the given (increasing) indices, in that order.
    SensorFrame select(std::span<const std::size_t> rows) const;

    friend bool operator==(const SensorFrame&, const SensorFrame&) = default;
};

/// Row-wise concatenation; feature names must agree.
SensorFrame concat(const SensorFrame& first, const SensorFrame& second);

}  // namespace elstm::data

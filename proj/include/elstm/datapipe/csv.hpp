#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "elstm/datapipe/sensor_frame.hpp"

namespace elstm::data {

/// Expected layout of an input table. An empty `feature_names` accepts
/// whatever the header declares.
struct CsvSchema {
    std::vector<std::string> feature_names;
    bool require_label = false;
};

/// Reads `timestamp,<features...>[,label]`. Empty fields and `NaN` become NaN
/// (clean() removes them); label `0` is normal, `1` abnormal, empty unknown.
/// Unparseable timestamps, header mismatches and non-increasing timestamps
/// raise IngestError listing the offending line numbers.
SensorFrame load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
SensorFrame read_csv(std::istream& in, const CsvSchema& schema = {}, const std::string& source = "<stream>");

/// Writes with round-trip precision, so load_csv(write_csv(f)) == f for finite data.
void write_csv(const SensorFrame& frame, const std::filesystem::path& path, bool with_labels = true);
void write_csv(const SensorFrame& frame, std::ostream& out, bool with_labels = true);

/// Shortest "%.17g" rendering used by every CSV writer in the project.
std::string format_double(double value);

}  // namespace elstm::data

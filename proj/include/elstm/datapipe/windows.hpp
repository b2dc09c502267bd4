#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "elstm/datapipe/sensor_frame.hpp"

namespace elstm::data {

/// First floor(n * train_fraction) samples, then the rest; no shuffling.
std::pair<SensorFrame, SensorFrame> split_chronological(const SensorFrame& frame, double train_fraction);

/// Index of the first sample of the second part of a chronological split.
std::size_t split_point(std::size_t n, double train_fraction);

/// Sliding L x F windows over a frame's samples. Windows share the source
/// matrix; window(i) materializes a copy.
class WindowSet {
public:
    WindowSet() = default;
    WindowSet(const SensorFrame& frame, std::size_t length, std::size_t stride);

    std::size_t size() const noexcept { return starts_.size(); }
    bool empty() const noexcept { return starts_.empty(); }
    std::size_t length() const noexcept { return length_; }
    std::size_t features() const noexcept { return source_ ? source_->cols() : 0; }

    num::Matrix window(std::size_t i) const;
    /// Row `t` of window `i`.
    std::span<const double> row(std::size_t i, std::size_t t) const;
    Label label(std::size_t i) const { return labels_[i]; }
    /// Index (into the source frame) of the last sample of window `i`.
    std::size_t source_index(std::size_t i) const { return starts_[i] + length_ - 1; }
    Timestamp timestamp(std::size_t i) const { return timestamps_[i]; }

    const std::vector<Label>& labels() const noexcept { return labels_; }

    /// Windows [begin, end) as a new set over the same source.
    WindowSet subset(std::size_t begin, std::size_t end) const;

private:
    std::shared_ptr<const num::Matrix> source_;
    std::size_t length_ = 0;
    std::vector<std::size_t> starts_;
    std::vector<Label> labels_;
    std::vector<Timestamp> timestamps_;
};

/// count = floor((n - L) / stride) + 1; each window is labelled with its last sample.
WindowSet make_windows(const SensorFrame& frame, std::size_t length, std::size_t stride = 1);

}  // namespace elstm::data

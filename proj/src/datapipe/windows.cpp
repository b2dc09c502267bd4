#include "elstm/datapipe/windows.hpp"

#include <cmath>

#include "elstm/error.hpp"

namespace elstm::data {

std::size_t split_point(std::size_t n, double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("split: train fraction must lie in (0, 1), got " + std::to_string(train_fraction));
    }
    // The epsilon keeps products such as 0.29 * 100 from flooring to 28.
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction + 1e-9));
}

std::pair<SensorFrame, SensorFrame> split_chronological(const SensorFrame& frame, double train_fraction) {
    const std::size_t n = frame.samples();
    const std::size_t cut = split_point(n, train_fraction);
    if (cut == 0 || cut == n) {
        throw DataQualityError("split: fraction " + std::to_string(train_fraction) + " of " + std::to_string(n) +
                               " samples leaves an empty side");
    }
    return {frame.slice(0, cut), frame.slice(cut, n)};
}

WindowSet::WindowSet(const SensorFrame& frame, std::size_t length, std::size_t stride)
    : source_(std::make_shared<const num::Matrix>(frame.values)), length_(length) {
    const std::size_t n = frame.samples();
    if (length == 0) throw ConfigError("make_windows: window length must be >= 1");
    if (stride == 0) throw ConfigError("make_windows: stride must be >= 1");
    if (length > n) {
        throw DataQualityError("make_windows: window length " + std::to_string(length) + " exceeds " +
                               std::to_string(n) + " samples");
    }
    const std::size_t count = (n - length) / stride + 1;
    starts_.reserve(count);
    labels_.reserve(count);
    timestamps_.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t start = i * stride;
        starts_.push_back(start);
        labels_.push_back(frame.labels[start + length - 1]);
        timestamps_.push_back(frame.timestamps[start + length - 1]);
    }
}

num::Matrix WindowSet::window(std::size_t i) const {
    const std::size_t f = features();
    const auto first = source_->values().begin() + static_cast<std::ptrdiff_t>(starts_.at(i) * f);
    return num::Matrix(length_, f, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(length_ * f)));
}

std::span<const double> WindowSet::row(std::size_t i, std::size_t t) const {
    return source_->row(starts_[i] + t);
}

WindowSet WindowSet::subset(std::size_t begin, std::size_t end) const {
    if (begin > end || end > size()) throw DimensionError("WindowSet::subset: range out of bounds");
    WindowSet out;
    out.source_ = source_;
    out.length_ = length_;
    out.starts_.assign(starts_.begin() + begin, starts_.begin() + end);
    out.labels_.assign(labels_.begin() + begin, labels_.begin() + end);
    out.timestamps_.assign(timestamps_.begin() + begin, timestamps_.begin() + end);
    return out;
}

WindowSet make_windows(const SensorFrame& frame, std::size_t length, std::size_t stride) {
    return WindowSet(frame, length, stride);
}

}  // namespace elstm::data

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "elstm/numkernel/matrix.hpp"

namespace elstm::num {

/// Named collection of parameter matrices. Iteration follows insertion order,
/// which is what makes optimizer updates and serialization deterministic.
class ParamSet {
public:
    struct Entry {
        std::string name;
        Matrix value;
    };

    void add(std::string name, Matrix value);

    bool contains(std::string_view name) const;
    const Matrix& at(std::string_view name) const;
    Matrix& at(std::string_view name);
    std::size_t index_of(std::string_view name) const;

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t scalar_count() const noexcept;

    auto begin() noexcept { return entries_.begin(); }
    auto end() noexcept { return entries_.end(); }
    auto begin() const noexcept { return entries_.begin(); }
    auto end() const noexcept { return entries_.end(); }
    const Entry& entry(std::size_t i) const { return entries_.at(i); }
    Entry& entry(std::size_t i) { return entries_.at(i); }

    /// True when both sets hold the same names, in the same order, with the same shapes.
    bool same_layout(const ParamSet& other) const noexcept;
    static ParamSet zeros_like(const ParamSet& other);

    friend bool operator==(const ParamSet& a, const ParamSet& b);

private:
    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace elstm::num

#include "elstm/numkernel/param_set.hpp"

#include "elstm/error.hpp"

namespace elstm::num {

void ParamSet::add(std::string name, Matrix value) {
    if (index_.contains(name)) {
        throw ConfigError("ParamSet: duplicate parameter name '" + name + "'");
    }
    index_.emplace(name, entries_.size());
    entries_.push_back({std::move(name), std::move(value)});
}

bool ParamSet::contains(std::string_view name) const { return index_.contains(std::string(name)); }

std::size_t ParamSet::index_of(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) {
        throw ConfigError("ParamSet: unknown parameter '" + std::string(name) + "'");
    }
    return it->second;
}

const Matrix& ParamSet::at(std::string_view name) const { return entries_[index_of(name)].value; }

Matrix& ParamSet::at(std::string_view name) { return entries_[index_of(name)].value; }

std::size_t ParamSet::scalar_count() const noexcept {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.value.size();
    return n;
}

bool ParamSet::same_layout(const ParamSet& other) const noexcept {
    if (entries_.size() != other.entries_.size()) return false;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].name != other.entries_[i].name) return false;
        if (!entries_[i].value.same_shape(other.entries_[i].value)) return false;
    }
    return true;
}

ParamSet ParamSet::zeros_like(const ParamSet& other) {
    ParamSet out;
    for (const auto& e : other) out.add(e.name, Matrix(e.value.rows(), e.value.cols()));
    return out;
}

bool operator==(const ParamSet& a, const ParamSet& b) {
    if (a.entries_.size() != b.entries_.size()) return false;
    for (std::size_t i = 0; i < a.entries_.size(); ++i) {
        if (a.entries_[i].name != b.entries_[i].name || !(a.entries_[i].value == b.entries_[i].value)) {
            return false;
        }
    }
    return true;
}

}  // namespace elstm::num

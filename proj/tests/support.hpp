#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "elstm/numkernel/matrix.hpp"

namespace elstm::test {

// Fresh empty directory under the system temp dir, unique per name.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("elstm_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline num::Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& gen, double lo = -1.0,
                                 double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    num::Matrix m(rows, cols);
    for (double& v : m.values()) v = dist(gen);
    return m;
}

}  // namespace elstm::test

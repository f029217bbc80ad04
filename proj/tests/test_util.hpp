#pragma once

#include <filesystem>
#include <string>

#include "freqprin/matrix.hpp"
#include "freqprin/rng.hpp"

namespace testutil {

inline freqprin::Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double scale = 1.0) {
    freqprin::Rng rng(seed);
    freqprin::Matrix m(rows, cols);
    for (double& v : m.data) v = rng.uniform(-scale, scale);
    return m;
}

/// Fresh scratch directory under the build tree.
inline std::string scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::path(FREQPRIN_TEST_TMP) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

}  // namespace testutil

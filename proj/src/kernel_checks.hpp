#pragma once

#include <stdexcept>
#include <string>

#include "freqprin/matrix.hpp"

namespace freqprin::kernels::detail {

inline void check_gemm(std::size_t ar, std::size_t ac, std::size_t br, std::size_t bc,
                       const Matrix& out, const char* name) {
    if (ac != br || out.rows != ar || out.cols != bc)
        throw std::invalid_argument(std::string(name) + ": shape mismatch");
}

}  // namespace freqprin::kernels::detail

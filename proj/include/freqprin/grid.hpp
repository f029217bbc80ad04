#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace freqprin {

/// Uniform grid a = x_0 < x_1 < ... < x_n = b.
struct Grid1D {
    double a = -1.0;
    double b = 1.0;
    std::size_t n = 64;

    Grid1D() = default;
    Grid1D(double a_, double b_, std::size_t n_) : a(a_), b(b_), n(n_) { validate(); }

    void validate() const {
        if (n < 2) throw std::invalid_argument("Grid1D: need at least 2 subintervals");
        if (!(b > a)) throw std::invalid_argument("Grid1D: need a < b");
    }
    double dx() const { return (b - a) / static_cast<double>(n); }
    double point(std::size_t i) const { return i == n ? b : a + static_cast<double>(i) * dx(); }
    std::size_t size() const { return n + 1; }

    std::vector<double> points() const {
        std::vector<double> xs(n + 1);
        for (std::size_t i = 0; i <= n; ++i) xs[i] = point(i);
        return xs;
    }
};

}  // namespace freqprin

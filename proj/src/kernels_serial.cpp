#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "freqprin/kernels.hpp"
#include "kernel_checks.hpp"

namespace freqprin::kernels {

cplx unit_root(std::size_t m, std::size_t n) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(m % n) / static_cast<double>(n);
    return {std::cos(angle), -std::sin(angle)};
}

double sine_pi_ratio(std::size_t m, std::size_t n) {
    const std::size_t r = m % (2 * n);
    return std::sin(std::numbers::pi * static_cast<double>(r) / static_cast<double>(n));
}

namespace serial {

void gemm_abt(const Matrix& a, const Matrix& b, std::span<const double> bias, Matrix& out) {
    detail::check_gemm(a.rows, a.cols, b.cols, b.rows, out, "gemm_abt");
    if (!bias.empty() && bias.size() != b.rows) throw std::invalid_argument("gemm_abt: bias size");
    for (std::size_t s = 0; s < a.rows; ++s) {
        const auto ar = a.row(s);
        for (std::size_t o = 0; o < b.rows; ++o) {
            const auto br = b.row(o);
            double acc = 0.0;
            for (std::size_t i = 0; i < a.cols; ++i) acc += ar[i] * br[i];
            out(s, o) = bias.empty() ? acc : acc + bias[o];
        }
    }
}

void gemm_atb(const Matrix& a, const Matrix& b, Matrix& out) {
    detail::check_gemm(a.cols, a.rows, b.rows, b.cols, out, "gemm_atb");
    for (std::size_t o = 0; o < a.cols; ++o) {
        auto orow = out.row(o);
        std::fill(orow.begin(), orow.end(), 0.0);
        for (std::size_t s = 0; s < a.rows; ++s) {
            const double coef = a(s, o);
            const auto br = b.row(s);
            for (std::size_t i = 0; i < b.cols; ++i) orow[i] += coef * br[i];
        }
    }
}

void gemm_ab(const Matrix& a, const Matrix& b, Matrix& out) {
    detail::check_gemm(a.rows, a.cols, b.rows, b.cols, out, "gemm_ab");
    for (std::size_t s = 0; s < a.rows; ++s) {
        auto orow = out.row(s);
        std::fill(orow.begin(), orow.end(), 0.0);
        for (std::size_t o = 0; o < a.cols; ++o) {
            const double coef = a(s, o);
            const auto br = b.row(o);
            for (std::size_t i = 0; i < b.cols; ++i) orow[i] += coef * br[i];
        }
    }
}

void column_sums(const Matrix& a, std::span<double> out) {
    if (out.size() != a.cols) throw std::invalid_argument("column_sums: size mismatch");
    for (std::size_t c = 0; c < a.cols; ++c) {
        double acc = 0.0;
        for (std::size_t r = 0; r < a.rows; ++r) acc += a(r, c);
        out[c] = acc;
    }
}

void dft_uniform(std::span<const double> values, std::span<cplx> out) {
    const std::size_t n = values.size();
    if (out.size() != n) throw std::invalid_argument("dft_uniform: size mismatch");
    std::vector<cplx> roots(n);
    for (std::size_t m = 0; m < n; ++m) roots[m] = unit_root(m, n);
    for (std::size_t g = 0; g < n; ++g) {
        cplx acc = 0.0;
        std::size_t m = 0;
        for (std::size_t j = 0; j < n; ++j) {
            acc += values[j] * roots[m];
            m += g;
            if (m >= n) m -= n;
        }
        out[g] = acc;
    }
}

void nufft(std::span<const double> nodes, std::span<const double> values, std::span<cplx> out) {
    if (nodes.size() != values.size()) throw std::invalid_argument("nufft: size mismatch");
    for (std::size_t k = 0; k < out.size(); ++k) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            const double t = nodes[j] * static_cast<double>(k);
            const double angle = 2.0 * std::numbers::pi * (t - std::floor(t));
            acc += values[j] * cplx(std::cos(angle), -std::sin(angle));
        }
        out[k] = acc;
    }
}

void jacobi_sweep(std::span<const double> u, std::span<const double> rhs, std::span<double> out) {
    const std::size_t m = u.size();
    if (rhs.size() != m || out.size() != m) throw std::invalid_argument("jacobi_sweep: size mismatch");
    for (std::size_t i = 0; i < m; ++i) {
        const double left = i > 0 ? u[i - 1] : 0.0;
        const double right = i + 1 < m ? u[i + 1] : 0.0;
        out[i] = (left + right + rhs[i]) / 2.0;
    }
}

void sine_coefficients(std::span<const double> err, std::span<double> alpha) {
    const std::size_t n = err.size() + 1;
    if (alpha.size() != err.size()) throw std::invalid_argument("sine_coefficients: size mismatch");
    for (std::size_t k = 1; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t j = 1; j < n; ++j) acc += err[j - 1] * sine_pi_ratio(j * k, n);
        alpha[k - 1] = 2.0 * acc / static_cast<double>(n);
    }
}

void gram_matvec(const Matrix& x, std::span<const double> v, std::span<double> scratch,
                 std::span<double> out) {
    if (v.size() != x.cols || out.size() != x.cols || scratch.size() != x.rows)
        throw std::invalid_argument("gram_matvec: size mismatch");
    for (std::size_t r = 0; r < x.rows; ++r) {
        const auto xr = x.row(r);
        double acc = 0.0;
        for (std::size_t c = 0; c < x.cols; ++c) acc += xr[c] * v[c];
        scratch[r] = acc;
    }
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t r = 0; r < x.rows; ++r) {
        const auto xr = x.row(r);
        const double s = scratch[r];
        for (std::size_t c = 0; c < x.cols; ++c) out[c] += s * xr[c];
    }
}

}  // namespace serial
}  // namespace freqprin::kernels

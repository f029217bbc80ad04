#pragma once

// Data-parallel inner loops used by the network, the transforms, and the
// iterative solvers. Each kernel has a serial reference version and an OpenMP
// version. Both compute every output element with the same summation order,
// so the two variants agree bit for bit regardless of thread count.

#include <complex>
#include <span>

#include "freqprin/matrix.hpp"

namespace freqprin::kernels {

using cplx = std::complex<double>;

namespace serial {

/// out = a * b^T (+ bias broadcast over rows when bias is non-empty).
void gemm_abt(const Matrix& a, const Matrix& b, std::span<const double> bias, Matrix& out);
/// out = a^T * b
void gemm_atb(const Matrix& a, const Matrix& b, Matrix& out);
/// out = a * b
void gemm_ab(const Matrix& a, const Matrix& b, Matrix& out);
/// out[c] = sum_r a(r, c)
void column_sums(const Matrix& a, std::span<double> out);

/// out[g] = sum_j values[j] exp(-2 pi i j g / N), g = 0..N-1.
void dft_uniform(std::span<const double> values, std::span<cplx> out);
/// out[k] = sum_j values[j] exp(-2 pi i nodes[j] k), k = 0..out.size()-1.
void nufft(std::span<const double> nodes, std::span<const double> values, std::span<cplx> out);

/// One Jacobi sweep for the (-1, 2, -1) stencil with zero boundary neighbours.
void jacobi_sweep(std::span<const double> u, std::span<const double> rhs, std::span<double> out);
/// alpha[k-1] = (2/n) sum_j err[j-1] sin(j k pi / n), k = 1..n-1.
void sine_coefficients(std::span<const double> err, std::span<double> alpha);

/// out = X^T (X v); scratch must hold X.rows entries.
void gram_matvec(const Matrix& x, std::span<const double> v, std::span<double> scratch,
                 std::span<double> out);

}  // namespace serial

namespace parallel {

void gemm_abt(const Matrix& a, const Matrix& b, std::span<const double> bias, Matrix& out);
void gemm_atb(const Matrix& a, const Matrix& b, Matrix& out);
void gemm_ab(const Matrix& a, const Matrix& b, Matrix& out);
void column_sums(const Matrix& a, std::span<double> out);
void dft_uniform(std::span<const double> values, std::span<cplx> out);
void nufft(std::span<const double> nodes, std::span<const double> values, std::span<cplx> out);
void jacobi_sweep(std::span<const double> u, std::span<const double> rhs, std::span<double> out);
void sine_coefficients(std::span<const double> err, std::span<double> alpha);
void gram_matvec(const Matrix& x, std::span<const double> v, std::span<double> scratch,
                 std::span<double> out);

}  // namespace parallel

#if defined(FREQPRIN_HAVE_OPENMP)
namespace active = parallel;
#else
namespace active = serial;
#endif

/// Twiddle exp(-2 pi i m / n) for integer m in [0, n).
cplx unit_root(std::size_t m, std::size_t n);
/// sin(m pi / n) with m reduced modulo 2n before the floating-point step.
double sine_pi_ratio(std::size_t m, std::size_t n);

}  // namespace freqprin::kernels

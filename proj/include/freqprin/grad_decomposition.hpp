#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "freqprin/matrix.hpp"
#include "freqprin/mlp.hpp"

namespace freqprin::spectral {

/// Losses of the form L = sum_x l(Y(x)); the energy loss is not pointwise.
enum class PointwiseLoss { mse, cross_entropy, energy };

/// Frequency decomposition of the training gradient on N uniform samples,
/// using the orthonormal basis p_k(x_j) = exp(2 pi i k j / N) / sqrt(N):
///   Y(x_j) = sum_k c_k p_k(x_j),   d_k = sum_j dl/dY(x_j) p_k(x_j),
///   L_k = (dc_k/dtheta) d_k,       sum_k L_k = dL/dtheta.
struct GradDecomposition {
    std::vector<std::size_t> dims;                                         // decomposed output dims
    std::vector<std::vector<std::complex<double>>> d_k;                    // [dim][k], K = N
    std::vector<std::vector<std::vector<std::complex<double>>>> dc_dtheta;  // [dim][k][param]
    std::vector<std::vector<std::complex<double>>> l_k_terms;              // [k][param], summed over dims
    std::vector<double> direct_grad;                                       // flattened dL/dtheta

    /// ||Re(sum_k L_k) - dL/dtheta|| / ||dL/dtheta||
    double real_residual() const;
    /// ||Im(sum_k L_k)|| / ||dL/dtheta||
    double imag_residual() const;
    /// ||L_k||_2 for each k.
    std::vector<double> term_norms() const;
};

/// xs must be equispaced (N x input_dim with input_dim = 1). `targets` has the
/// network's output shape. When `output_dim` is set, only that output
/// dimension's loss derivative is decomposed (and direct_grad is the matching
/// partial gradient); otherwise all output dimensions are summed.
GradDecomposition grad_decomposition(const nn::Mlp& mlp, const Matrix& xs, const Matrix& targets,
                                     PointwiseLoss loss, std::optional<std::size_t> output_dim = std::nullopt);

}  // namespace freqprin::spectral

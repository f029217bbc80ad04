#pragma once

#include <span>
#include <vector>

#include "freqprin/grid.hpp"
#include "freqprin/matrix.hpp"

namespace freqprin::loss {

/// Loss value plus its gradient with respect to the (flattened) outputs.
struct LossValueGrad {
    double value = 0.0;
    std::vector<double> grad;
};

/// sum_i (pred_i - target_i)^2
LossValueGrad mse_loss(std::span<const double> pred, std::span<const double> target);

/// Probabilities below this are clamped inside the logarithms.
inline constexpr double kLogClamp = 1e-12;

/// Per-dimension binary cross entropy summed over samples and output dims:
///   -sum_j sum_x [ y_j log p_j + (1 - y_j) log(1 - p_j) ].
/// Log arguments are clamped to >= kLogClamp; terms with a zero coefficient
/// are dropped (0 log 0 = 0). The gradient is that of the clamped expression.
/// Targets must be 0 or 1 entrywise.
LossValueGrad cross_entropy_loss(const Matrix& probs, const Matrix& onehot);

struct EnergyLossConfig {
    double beta = 10.0;
    Grid1D grid;
};

/// Discrete Dirichlet energy on a uniform grid:
///   dx sum_{i<n} (1/2)((u_{i+1}-u_i)/dx)^2 - dx sum_i g_i u_i + beta (u_0^2 + u_n^2)
LossValueGrad energy_loss(std::span<const double> u, std::span<const double> g, const EnergyLossConfig& cfg);

/// Exact minimiser of energy_loss for fixed g (tridiagonal SPD solve).
/// Throws std::invalid_argument for beta <= 0.
std::vector<double> discrete_energy_minimizer(std::span<const double> g, const EnergyLossConfig& cfg);

}  // namespace freqprin::loss

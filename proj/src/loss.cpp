#include "freqprin/loss.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "freqprin/poisson.hpp"

namespace freqprin::loss {

LossValueGrad mse_loss(std::span<const double> pred, std::span<const double> target) {
    if (pred.size() != target.size()) throw std::invalid_argument("mse_loss: length mismatch");
    LossValueGrad out;
    out.grad.resize(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double r = pred[i] - target[i];
        out.value += r * r;
        out.grad[i] = 2.0 * r;
    }
    return out;
}

LossValueGrad cross_entropy_loss(const Matrix& probs, const Matrix& onehot) {
    if (!probs.same_shape(onehot)) throw std::invalid_argument("cross_entropy_loss: shape mismatch");
    constexpr double kTol = 1e-9;
    for (double p : probs.data)
        if (!(p >= -kTol && p <= 1.0 + kTol))
            throw std::invalid_argument("cross_entropy_loss: probability outside [0,1]: " + std::to_string(p));
    // Targets are binary per output dimension; rows need not be one-hot.
    for (double y : onehot.data)
        if (y != 0.0 && y != 1.0) throw std::invalid_argument("cross_entropy_loss: target entries must be 0 or 1");

    LossValueGrad out;
    out.grad.assign(probs.size(), 0.0);
    for (std::size_t k = 0; k < probs.size(); ++k) {
        const double p = probs.data[k];
        const double y = onehot.data[k];
        if (y != 0.0) {
            if (p > kLogClamp) {
                out.value -= y * std::log(p);
                out.grad[k] -= y / p;
            } else {
                out.value -= y * std::log(kLogClamp);
            }
        }
        if (y != 1.0) {
            const double q = 1.0 - p;
            if (q > kLogClamp) {
                out.value -= (1.0 - y) * std::log(q);
                out.grad[k] += (1.0 - y) / q;
            } else {
                out.value -= (1.0 - y) * std::log(kLogClamp);
            }
        }
    }
    return out;
}

namespace {

void check_energy_inputs(std::size_t u_size, std::size_t g_size, const EnergyLossConfig& cfg) {
    cfg.grid.validate();
    if (cfg.beta < 0.0) throw std::invalid_argument("energy loss: beta must be >= 0");
    if (u_size != cfg.grid.size() || g_size != cfg.grid.size())
        throw std::invalid_argument("energy loss: vector length must equal the grid size");
}

}  // namespace

LossValueGrad energy_loss(std::span<const double> u, std::span<const double> g, const EnergyLossConfig& cfg) {
    check_energy_inputs(u.size(), g.size(), cfg);
    const std::size_t n = cfg.grid.n;
    const double dx = cfg.grid.dx();

    LossValueGrad out;
    out.grad.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double diff = u[i + 1] - u[i];
        out.value += 0.5 * diff * diff / dx;
        out.grad[i] -= diff / dx;
        out.grad[i + 1] += diff / dx;
    }
    for (std::size_t i = 0; i <= n; ++i) {
        out.value -= dx * g[i] * u[i];
        out.grad[i] -= dx * g[i];
    }
    out.value += cfg.beta * (u[0] * u[0] + u[n] * u[n]);
    out.grad[0] += 2.0 * cfg.beta * u[0];
    out.grad[n] += 2.0 * cfg.beta * u[n];
    return out;
}

std::vector<double> discrete_energy_minimizer(std::span<const double> g, const EnergyLossConfig& cfg) {
    check_energy_inputs(g.size(), g.size(), cfg);
    if (!(cfg.beta > 0.0))
        throw std::invalid_argument("discrete_energy_minimizer: beta must be positive (constant mode unpinned)");
    const std::size_t m = cfg.grid.size();
    const double dx = cfg.grid.dx();

    // Hessian of the quadratic: (1/dx) * path-graph Laplacian + 2 beta at the ends.
    std::vector<double> sub(m, -1.0 / dx), diag(m, 2.0 / dx), super(m, -1.0 / dx), rhs(m);
    diag.front() = 1.0 / dx + 2.0 * cfg.beta;
    diag.back() = 1.0 / dx + 2.0 * cfg.beta;
    for (std::size_t i = 0; i < m; ++i) rhs[i] = dx * g[i];
    return poisson::solve_tridiagonal(sub, diag, super, rhs);
}

}  // namespace freqprin::loss

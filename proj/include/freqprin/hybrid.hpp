#pragma once

// Train-then-iterate hybrid: a network trained on the energy loss supplies
// the initial guess for Jacobi or Gauss-Seidel.

#include <cstddef>
#include <string>
#include <vector>

#include "freqprin/poisson.hpp"

namespace freqprin::poisson {

/// Network state at the current training step.
struct DnnState {
    std::size_t step = 0;
    std::vector<double> grid_values;  // Y(x_0) .. Y(x_n)
    double loss = 0.0;
    double wall_ms = 0.0;  // cumulative training time
};

/// Source of training steps for run_hybrid.
class DnnSolverHandle {
public:
    virtual ~DnnSolverHandle() = default;
    virtual DnnState state() = 0;
    virtual void train_step() = 0;
};

/// Relative change of a W-step moving average of the loss, compared against
/// the previous, non-overlapping window.
class PlateauDetector {
public:
    PlateauDetector(std::size_t window, double delta);
    /// Returns true once the plateau criterion holds (and keeps returning true).
    bool push(double loss);
    bool reached() const { return reached_; }

private:
    std::size_t window_;
    double delta_;
    std::vector<double> losses_;
    bool reached_ = false;
};

enum class SwitchRule { fixed_step, plateau };

struct HybridConfig {
    SwitchRule rule = SwitchRule::plateau;
    std::size_t budget = 10000;  // switch step M in fixed mode; step cap in plateau mode
    std::size_t window = 200;
    double delta = 0.01;
    Method method = Method::jacobi;
    double eps = 1e-3;  // absolute target for ||u - u*||_inf
    std::size_t max_iters = 1000000;
    std::size_t record_every = 1;  // stride of phase-2 rows
    bool wall_clock = true;

    void validate() const;
};

struct HybridRow {
    std::string phase;  // "dnn" or the iterative method name
    std::size_t step_or_iter = 0;
    double cum_wall_ms = 0.0;
    double sup_error = 0.0;
};

struct HybridReport {
    std::size_t switch_step = 0;
    bool plateau_detected = false;
    double sup_error_at_switch = 0.0;
    double dnn_wall_ms = 0.0;
    std::size_t post_switch_iters = 0;
    bool reached = false;
    double total_wall_ms = 0.0;
    std::vector<HybridRow> rows;

    std::string to_csv() const;
};

/// Phase 1 trains until step M (fixed) or the loss plateau (capped at M);
/// phase 2 runs the iterative method from the interior network values.
/// Throws DivergenceError if the network output is non-finite at the switch.
HybridReport run_hybrid(const TridiagSystem& system, const ReferenceSolution& reference, DnnSolverHandle& dnn,
                        const HybridConfig& cfg);

}  // namespace freqprin::poisson

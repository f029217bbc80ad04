#include "freqprin/hybrid.hpp"

#include <cmath>
#include <stdexcept>

#include "freqprin/errors.hpp"
#include "freqprin/matrix.hpp"
#include "freqprin/spectral.hpp"

namespace freqprin::poisson {

PlateauDetector::PlateauDetector(std::size_t window, double delta) : window_(window), delta_(delta) {
    if (window_ < 2) throw std::invalid_argument("PlateauDetector: window must be >= 2");
    if (!(delta_ > 0.0)) throw std::invalid_argument("PlateauDetector: delta must be positive");
}

bool PlateauDetector::push(double loss) {
    losses_.push_back(loss);
    if (reached_) return true;
    const std::size_t t = losses_.size();
    if (t < 2 * window_) return false;
    double now = 0.0, prev = 0.0;
    for (std::size_t i = t - window_; i < t; ++i) now += losses_[i];
    for (std::size_t i = t - 2 * window_; i < t - window_; ++i) prev += losses_[i];
    now /= static_cast<double>(window_);
    prev /= static_cast<double>(window_);
    reached_ = std::abs(now - prev) <= delta_ * std::abs(prev);
    return reached_;
}

void HybridConfig::validate() const {
    if (window < 2) throw std::invalid_argument("HybridConfig: window must be >= 2");
    if (!(delta > 0.0)) throw std::invalid_argument("HybridConfig: delta must be positive");
    if (!(eps > 0.0)) throw std::invalid_argument("HybridConfig: eps must be positive");
}

std::string HybridReport::to_csv() const {
    std::string out = "phase,step_or_iter,cum_wall_ms,sup_error\n";
    for (const auto& r : rows)
        out += r.phase + "," + std::to_string(r.step_or_iter) + "," + spectral::format_double(r.cum_wall_ms) + "," +
               spectral::format_double(r.sup_error) + "\n";
    return out;
}

HybridReport run_hybrid(const TridiagSystem& system, const ReferenceSolution& reference, DnnSolverHandle& dnn,
                        const HybridConfig& cfg) {
    cfg.validate();
    const std::size_t n = system.n();
    if (reference.full.size() != n + 1) throw std::invalid_argument("run_hybrid: reference size mismatch");

    HybridReport report;
    PlateauDetector plateau(cfg.window, cfg.delta);
    DnnState state;
    for (;;) {
        state = dnn.state();
        if (state.grid_values.size() != n + 1) throw std::invalid_argument("run_hybrid: network grid size mismatch");
        const double err = sup_distance(state.grid_values, reference.full);
        report.rows.push_back({"dnn", state.step, state.wall_ms, err});
        const bool flat = plateau.push(state.loss);
        const bool stop = state.step >= cfg.budget || (cfg.rule == SwitchRule::plateau && flat);
        if (stop) {
            report.plateau_detected = cfg.rule == SwitchRule::plateau && flat;
            report.switch_step = state.step;
            report.sup_error_at_switch = err;
            break;
        }
        dnn.train_step();
    }
    for (double v : state.grid_values)
        if (!std::isfinite(v))
            throw DivergenceError("run_hybrid: non-finite network output at switch step " +
                                  std::to_string(report.switch_step));
    report.dnn_wall_ms = state.wall_ms;

    // Boundary values are fixed by the iterative scheme; only the interior seeds it.
    std::vector<double> u0(state.grid_values.begin() + 1, state.grid_values.end() - 1);
    IterateOptions opts;
    opts.method = cfg.method;
    opts.max_iters = cfg.max_iters;
    opts.tol = cfg.eps;
    opts.record_every = cfg.record_every;
    opts.wall_clock = cfg.wall_clock;
    const auto run = iterate(system, u0, reference.interior, opts);
    for (const auto& rec : run.records) {
        if (rec.iteration == 0) continue;  // same state as the switch row
        report.rows.push_back({to_string(cfg.method), rec.iteration, report.dnn_wall_ms + rec.wall_ms, rec.sup_error});
    }
    report.post_switch_iters = run.iterations;
    report.reached = run.converged;
    report.total_wall_ms = report.dnn_wall_ms + (run.records.empty() ? 0.0 : run.records.back().wall_ms);
    return report;
}

}  // namespace freqprin::poisson

#include "freqprin/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <optional>
#include <stdexcept>

#include <json.hpp>

#include "freqprin/errors.hpp"
#include "freqprin/grad_decomposition.hpp"
#include "freqprin/loss.hpp"
#include "freqprin/mlp.hpp"
#include "freqprin/mnist.hpp"
#include "freqprin/report.hpp"
#include "freqprin/rng.hpp"

namespace freqprin::experiments {

using spectral::format_double;

std::pair<double, double> target_toy(double x) { return {x >= 0.0 ? 1.0 : 0.0, x <= 0.0 ? 1.0 : 0.0}; }

double RunReport::metric(const std::string& name) const {
    for (const auto& [k, v] : metrics)
        if (k == name) return v;
    throw std::out_of_range("RunReport: no metric '" + name + "'");
}

bool RunReport::has_metric(const std::string& name) const {
    return std::any_of(metrics.begin(), metrics.end(), [&](const auto& kv) { return kv.first == name; });
}

namespace {

// Independent streams derived from the configured seed.
constexpr std::uint64_t kDataStream = 0x5851f42d4c957f2dULL;
constexpr std::uint64_t kShuffleStream = 0x14057b7ef767814fULL;

std::vector<double> linspace(double a, double b, std::size_t count) {
    std::vector<double> xs(count);
    for (std::size_t j = 0; j < count; ++j)
        xs[j] = j + 1 == count ? b : a + (b - a) * static_cast<double>(j) / static_cast<double>(count - 1);
    return xs;
}

nn::Mlp build_network(const ExperimentConfig& cfg, std::size_t in, std::size_t out, nn::OutputActivation act) {
    std::vector<std::size_t> widths{in};
    widths.insert(widths.end(), cfg.hidden_widths.begin(), cfg.hidden_widths.end());
    widths.push_back(out);
    return nn::init_mlp(std::move(widths), cfg.activation, act, nn::InitSpec{cfg.init_mean, cfg.init_std, cfg.seed});
}

nn::LrSchedule schedule_of(const ExperimentConfig& cfg) { return {cfg.lr, cfg.lr_halve_every}; }

spectral::PeakOptions peak_options(const ExperimentConfig& cfg) { return {cfg.peak_max_count, cfg.peak_min_rel}; }

void check_loss(double loss, std::size_t epoch) {
    if (!std::isfinite(loss))
        throw DivergenceError("training diverged: non-finite loss at epoch " + std::to_string(epoch));
}

/// sgd_step with the epoch attached to divergence reports.
void update(nn::Mlp& net, const nn::ParamGrad& grad, double lr, std::size_t epoch) {
    try {
        nn::sgd_step(net, grad, lr);
    } catch (const DivergenceError&) {
        throw DivergenceError("training diverged: non-finite parameters after epoch " + std::to_string(epoch));
    }
}

std::vector<double> df_row(const spectral::Spectrum& model, const spectral::Spectrum& target,
                           const std::vector<std::size_t>& peaks, spectral::Denominator denom) {
    std::vector<double> out;
    out.reserve(peaks.size());
    for (std::size_t g : peaks) out.push_back(spectral::rel_freq_diff(model, target, g, denom));
    return out;
}

void fill_first_passage(RunReport& r, double tau) {
    r.first_passage.clear();
    for (std::size_t g : r.trace->peaks()) r.first_passage.push_back({g, spectral::step_to_threshold(*r.trace, g, tau)});
}

std::vector<double> column(const Matrix& m, std::size_t c) {
    std::vector<double> out(m.rows);
    for (std::size_t r = 0; r < m.rows; ++r) out[r] = m(r, c);
    return out;
}

std::vector<double> with_boundary(std::span<const double> interior) {
    std::vector<double> full;
    full.reserve(interior.size() + 2);
    full.push_back(0.0);
    full.insert(full.end(), interior.begin(), interior.end());
    full.push_back(0.0);
    return full;
}

/// Sine mode whose half-period count matches DFT index g on the n+1 grid points.
std::vector<std::size_t> modes_near_peaks(const std::vector<std::size_t>& peaks, std::size_t n) {
    std::vector<std::size_t> modes;
    for (std::size_t g : peaks) {
        const std::size_t k = std::clamp<std::size_t>(2 * g, 1, n - 1);
        if (std::find(modes.begin(), modes.end(), k) == modes.end()) modes.push_back(k);
    }
    return modes;
}

struct PoissonSetup {
    Grid1D grid;
    poisson::TridiagSystem system;
    poisson::ReferenceSolution reference;
    std::vector<double> xs;
    std::vector<double> g;
    spectral::Spectrum target;
    std::vector<std::size_t> peaks;
};

PoissonSetup poisson_setup(const ExperimentConfig& cfg) {
    PoissonSetup s;
    s.grid = Grid1D(-1.0, 1.0, cfg.n);
    s.system = poisson::assemble_poisson(s.grid, poisson::g_rhs);
    s.reference = poisson::thomas_solve(s.system);
    s.xs = s.grid.points();
    s.g.resize(s.xs.size());
    std::transform(s.xs.begin(), s.xs.end(), s.g.begin(), poisson::g_rhs);
    s.target = spectral::dft_uniform(s.reference.full);
    s.peaks = spectral::pick_peaks(s.target, peak_options(cfg));
    return s;
}

void add_reference_columns(RunReport& r, const PoissonSetup& s) {
    r.grid_columns.emplace_back("x", s.xs);
    r.grid_columns.emplace_back("g", s.g);
    r.grid_columns.emplace_back("u_star", s.reference.full);
}

/// Full-batch gradient descent on the discrete energy of a 1 -> 1 network.
class EnergyTrainer {
public:
    EnergyTrainer(const ExperimentConfig& cfg, const PoissonSetup& setup)
        : net_(build_network(cfg, 1, 1, nn::OutputActivation::identity)),
          inputs_(Matrix::column(setup.xs)),
          g_(setup.g),
          loss_cfg_{cfg.beta, setup.grid},
          schedule_(schedule_of(cfg)),
          clock_(cfg.wall_clock) {}

    std::size_t step() const { return step_; }
    const nn::Mlp& net() const { return net_; }

    /// Outputs and loss at the current parameters.
    const loss::LossValueGrad& evaluate() {
        if (!fwd_) {
            fwd_ = nn::forward(net_, inputs_);
            lv_ = loss::energy_loss(fwd_->outputs.data, g_, loss_cfg_);
            check_loss(lv_.value, step_);
        }
        return lv_;
    }
    const std::vector<double>& outputs() {
        evaluate();
        return fwd_->outputs.data;
    }

    void train_step() {
        const double t0 = clock_.elapsed_ms();
        evaluate();
        const Matrix grad_out = [&] {
            Matrix m(lv_.grad.size(), 1);
            m.data = lv_.grad;
            return m;
        }();
        const auto grad = nn::backprop(net_, fwd_->cache, grad_out);
        fwd_.reset();
        update(net_, grad, nn::lr_at(schedule_, step_), step_);
        ++step_;
        train_ms_ += clock_.elapsed_ms() - t0;
    }

    double train_ms() const { return train_ms_; }

private:
    nn::Mlp net_;
    Matrix inputs_;
    std::vector<double> g_;
    loss::EnergyLossConfig loss_cfg_;
    nn::LrSchedule schedule_;
    poisson::Stopwatch clock_;
    std::optional<nn::ForwardResult> fwd_;
    loss::LossValueGrad lv_;
    std::size_t step_ = 0;
    double train_ms_ = 0.0;
};

/// Drives a live trainer and logs every visited state.
class LoggingHandle : public poisson::DnnSolverHandle {
public:
    LoggingHandle(EnergyTrainer& trainer, std::vector<poisson::DnnState>& log) : trainer_(trainer), log_(log) {}

    poisson::DnnState state() override {
        if (log_.size() == trainer_.step()) {
            const double loss = trainer_.evaluate().value;
            log_.push_back({trainer_.step(), trainer_.outputs(), loss, trainer_.train_ms()});
        }
        return log_.at(trainer_.step());
    }
    void train_step() override {
        state();
        trainer_.train_step();
    }

private:
    EnergyTrainer& trainer_;
    std::vector<poisson::DnnState>& log_;
};

/// Replays a logged trajectory.
class ReplayHandle : public poisson::DnnSolverHandle {
public:
    explicit ReplayHandle(const std::vector<poisson::DnnState>& log) : log_(log) {}
    poisson::DnnState state() override { return log_.at(cur_); }
    void train_step() override {
        if (cur_ + 1 >= log_.size()) throw std::out_of_range("ReplayHandle: trajectory exhausted");
        ++cur_;
    }

private:
    const std::vector<poisson::DnnState>& log_;
    std::size_t cur_ = 0;
};

}  // namespace

// ---------------------------------------------------------------- toy_ce

RunReport run_toy_ce(const ExperimentConfig& cfg) {
    RunReport r;
    r.config = cfg;
    const std::size_t count = cfg.samples;
    const auto xs = linspace(-1.0, 1.0, count);
    Matrix inputs = Matrix::column(xs);
    Matrix targets(count, 2);
    for (std::size_t j = 0; j < count; ++j) {
        const auto [y1, y2] = target_toy(xs[j]);
        targets(j, 0) = y1;
        targets(j, 1) = y2;
    }
    r.target_spectrum = spectral::dft_uniform(column(targets, 0));
    r.peaks = spectral::pick_peaks(r.target_spectrum, peak_options(cfg));
    r.trace.emplace(r.peaks);

    auto net = build_network(cfg, 1, 2, nn::OutputActivation::softmax);
    const auto sched = schedule_of(cfg);
    poisson::Stopwatch clock(cfg.wall_clock);
    double final_loss = 0.0;
    for (std::size_t e = 0;; ++e) {
        auto fwd = nn::forward(net, inputs);
        const auto lv = loss::cross_entropy_loss(fwd.outputs, targets);
        check_loss(lv.value, e);
        final_loss = lv.value;
        if (e % cfg.record_every == 0) {
            const auto model = spectral::dft_uniform(column(fwd.outputs, 0));
            r.trace->append({e / cfg.record_every, e, clock.elapsed_ms(), lv.value,
                             df_row(model, r.target_spectrum, r.peaks, cfg.df_denominator)});
        }
        if (e >= cfg.epochs) break;
        Matrix g(count, 2);
        g.data = lv.grad;
        update(net, nn::backprop(net, fwd.cache, g), nn::lr_at(sched, e), e);
    }
    fill_first_passage(r, cfg.tau);
    r.metrics = {{"final_loss", final_loss}, {"epochs", static_cast<double>(cfg.epochs)},
                 {"train_wall_ms", clock.elapsed_ms()}};
    return r;
}

// ---------------------------------------------------------------- mnist_pca

RunReport run_mnist_pca(const ExperimentConfig& cfg) {
    RunReport r;
    r.config = cfg;
    poisson::Stopwatch clock(cfg.wall_clock);

    data::ImageSet set;
    bool used_synthetic = cfg.synthetic && (cfg.mnist_images.empty() || cfg.mnist_labels.empty());
    if (!used_synthetic) {
        try {
            set = data::load_mnist(cfg.mnist_images, cfg.mnist_labels).head(cfg.samples);
        } catch (const std::exception& e) {
            if (!cfg.synthetic) throw IoError(std::string("MNIST load failed: ") + e.what());
            used_synthetic = true;
        }
    }
    if (used_synthetic) set = data::synthetic_blobs(cfg.samples, cfg.seed ^ kDataStream);
    const std::size_t count = set.size();
    if (count < 2) throw ConfigError("mnist_pca: need at least two images");

    const auto pca = data::pca_project(set.pixels);
    r.projected_x = pca.coords;
    r.projected_labels = set.labels;
    const Matrix onehot = set.onehot();
    const double pca_ms = clock.elapsed_ms();

    const auto nodes = pca.coords;
    r.target_spectrum = spectral::nufft_direct(nodes, column(onehot, 0), cfg.nufft_k);
    r.peaks = spectral::pick_peaks(r.target_spectrum, peak_options(cfg));
    r.trace.emplace(r.peaks);

    auto net = build_network(cfg, set.pixels.cols, 10, nn::OutputActivation::softmax);
    const auto sched = schedule_of(cfg);
    Rng shuffle_rng(cfg.seed ^ kShuffleStream);
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), 0);
    const std::size_t batch = cfg.batch_size == 0 ? count : std::min(cfg.batch_size, count);

    double final_loss = 0.0;
    auto record = [&](std::size_t epoch) {
        const Matrix probs = nn::evaluate(net, set.pixels);
        const double loss = loss::cross_entropy_loss(probs, onehot).value;
        check_loss(loss, epoch);
        final_loss = loss;
        const auto model = spectral::nufft_direct(nodes, column(probs, 0), cfg.nufft_k);
        r.trace->append({epoch / cfg.record_every, epoch, clock.elapsed_ms(), loss,
                         df_row(model, r.target_spectrum, r.peaks, cfg.df_denominator)});
    };

    for (std::size_t e = 0;; ++e) {
        if (e % cfg.record_every == 0) record(e);
        if (e >= cfg.epochs) break;
        for (std::size_t i = count; i > 1; --i) std::swap(order[i - 1], order[shuffle_rng.below(i)]);
        for (std::size_t start = 0; start < count; start += batch) {
            const std::size_t stop = std::min(count, start + batch);
            Matrix xb(stop - start, set.pixels.cols), yb(stop - start, 10);
            for (std::size_t i = start; i < stop; ++i) {
                const auto src = set.pixels.row(order[i]);
                std::copy(src.begin(), src.end(), xb.row(i - start).begin());
                const auto ys = onehot.row(order[i]);
                std::copy(ys.begin(), ys.end(), yb.row(i - start).begin());
            }
            auto fwd = nn::forward(net, xb);
            const auto lv = loss::cross_entropy_loss(fwd.outputs, yb);
            check_loss(lv.value, e);
            Matrix g(xb.rows, 10);
            g.data = lv.grad;
            update(net, nn::backprop(net, fwd.cache, g), nn::lr_at(sched, e), e);
        }
    }
    fill_first_passage(r, cfg.tau);
    r.metrics = {{"samples", static_cast<double>(count)},
                 {"synthetic", used_synthetic ? 1.0 : 0.0},
                 {"pca_eigenvalue", pca.eigenvalue},
                 {"final_loss", final_loss},
                 {"pca_wall_ms", pca_ms},
                 {"total_wall_ms", clock.elapsed_ms()}};
    return r;
}

// ---------------------------------------------------------------- poisson_direct

RunReport run_poisson_direct(const ExperimentConfig& cfg) {
    RunReport r;
    r.config = cfg;
    poisson::Stopwatch clock(cfg.wall_clock);
    const auto s = poisson_setup(cfg);
    r.target_spectrum = s.target;
    r.peaks = s.peaks;
    add_reference_columns(r, s);

    const auto au = s.system.apply(s.reference.interior);
    std::vector<double> resid(au.size());
    for (std::size_t i = 0; i < au.size(); ++i) resid[i] = au[i] - s.system.rhs[i];
    const double rel_resid = poisson::sup_norm(resid) / poisson::sup_norm(s.system.rhs);

    r.metrics = {{"n", static_cast<double>(cfg.n)},
                 {"residual_rel", rel_resid},
                 {"u_star_sup", poisson::sup_norm(s.reference.full)}};
    if (cfg.beta > 0.0) {
        const auto u_energy = loss::discrete_energy_minimizer(s.g, {cfg.beta, s.grid});
        r.metrics.emplace_back("energy_minimizer_sup_distance", poisson::sup_distance(u_energy, s.reference.full));
        r.grid_columns.emplace_back("u_energy", u_energy);
    }
    r.metrics.emplace_back("wall_ms", clock.elapsed_ms());
    return r;
}

// ---------------------------------------------------------------- poisson_jacobi

RunReport run_poisson_jacobi(const ExperimentConfig& cfg) {
    RunReport r;
    r.config = cfg;
    const auto s = poisson_setup(cfg);
    r.target_spectrum = s.target;
    r.peaks = s.peaks;
    add_reference_columns(r, s);
    r.trace.emplace(r.peaks);

    poisson::IterateOptions opts;
    opts.method = cfg.method;
    opts.max_iters = cfg.max_iters;
    opts.tol = cfg.tol;
    opts.track_modes = cfg.track_modes.empty() ? modes_near_peaks(s.peaks, cfg.n) : cfg.track_modes;
    opts.record_every = cfg.record_every;
    opts.wall_clock = cfg.wall_clock;

    poisson::Stopwatch clock(cfg.wall_clock);
    auto record = [&](std::size_t it, std::span<const double> u) {
        const auto full = with_boundary(u);
        const auto model = spectral::dft_uniform(full);
        r.trace->append({it / cfg.record_every, it, clock.elapsed_ms(), poisson::sup_distance(full, s.reference.full),
                         df_row(model, s.target, s.peaks, cfg.df_denominator)});
    };
    const std::vector<double> u0(s.system.unknowns(), 0.0);
    record(0, u0);
    opts.observer = [&](std::size_t it, std::span<const double> u) {
        if (it % cfg.record_every == 0) record(it, u);
    };
    r.iterative = poisson::iterate(s.system, u0, s.reference.interior, opts);
    fill_first_passage(r, cfg.tau);

    r.grid_columns.emplace_back("u_final", with_boundary(r.iterative->solution));
    r.metrics = {{"iterations", static_cast<double>(r.iterative->iterations)},
                 {"converged", r.iterative->converged ? 1.0 : 0.0},
                 {"final_sup_error", r.iterative->records.back().sup_error},
                 {"u_star_sup", poisson::sup_norm(s.reference.full)},
                 {"wall_ms", clock.elapsed_ms()}};
    return r;
}

// ---------------------------------------------------------------- poisson_dnn

RunReport run_poisson_dnn(const ExperimentConfig& cfg) {
    RunReport r;
    r.config = cfg;
    const auto s = poisson_setup(cfg);
    r.target_spectrum = s.target;
    r.peaks = s.peaks;
    add_reference_columns(r, s);
    r.trace.emplace(r.peaks);

    EnergyTrainer trainer(cfg, s);
    poisson::Stopwatch clock(cfg.wall_clock);
    double final_loss = 0.0, final_err = 0.0;
    for (std::size_t e = 0;; ++e) {
        const double loss = trainer.evaluate().value;
        final_loss = loss;
        if (e % cfg.record_every == 0 || e == cfg.epochs) {
            const auto& out = trainer.outputs();
            final_err = poisson::sup_distance(out, s.reference.full);
            const std::size_t step = (e + cfg.record_every - 1) / cfg.record_every;
            const auto model = spectral::dft_uniform(out);
            r.trace->append({step, e, clock.elapsed_ms(), loss, df_row(model, s.target, s.peaks, cfg.df_denominator)});
            r.error_trace.push_back({step, e, final_err});
        }
        if (e >= cfg.epochs) break;
        trainer.train_step();
    }
    fill_first_passage(r, cfg.tau);
    r.grid_columns.emplace_back("u_dnn", trainer.outputs());

    const double sup_star = poisson::sup_norm(s.reference.full);
    r.metrics = {{"final_loss", final_loss},
                 {"final_sup_error", final_err},
                 {"u_star_sup", sup_star},
                 {"final_rel_error", final_err / sup_star},
                 {"train_wall_ms", clock.elapsed_ms()}};
    return r;
}

// ---------------------------------------------------------------- d_jacobi

RunReport run_d_jacobi(const ExperimentConfig& cfg) {
    RunReport r;
    r.config = cfg;
    const auto s = poisson_setup(cfg);
    r.target_spectrum = s.target;
    r.peaks = s.peaks;
    add_reference_columns(r, s);
    const double eps = cfg.eps_rel * poisson::sup_norm(s.reference.full);

    poisson::HybridConfig hc;
    hc.window = cfg.plateau_window;
    hc.delta = cfg.plateau_delta;
    hc.method = cfg.method;
    hc.eps = eps;
    hc.max_iters = cfg.max_iters;
    hc.record_every = cfg.hybrid_record_every;
    hc.wall_clock = cfg.wall_clock;

    // Phase 1 once, logging every state, to locate the plateau.
    EnergyTrainer trainer(cfg, s);
    std::vector<poisson::DnnState> log;
    LoggingHandle live(trainer, log);
    hc.rule = poisson::SwitchRule::plateau;
    hc.budget = cfg.epochs;
    const auto probe = poisson::run_hybrid(s.system, s.reference, live, hc);
    const std::size_t plateau = probe.switch_step;
    const std::size_t early = std::max<std::size_t>(1, static_cast<std::size_t>(cfg.early_fraction * plateau));
    const std::size_t late =
        std::max(plateau + 1, static_cast<std::size_t>(std::ceil(cfg.late_factor * static_cast<double>(plateau))));
    while (trainer.step() < late) live.train_step();
    live.state();

    // Frequency trace over the logged training run.
    r.trace.emplace(r.peaks);
    for (const auto& st : log) {
        if (st.step % cfg.record_every != 0) continue;
        const auto model = spectral::dft_uniform(st.grid_values);
        r.trace->append({st.step / cfg.record_every, st.step, st.wall_ms, st.loss,
                         df_row(model, s.target, s.peaks, cfg.df_denominator)});
    }
    fill_first_passage(r, cfg.tau);

    hc.rule = poisson::SwitchRule::fixed_step;
    const std::pair<const char*, std::size_t> switches[] = {
        {"step0", 0}, {"early", early}, {"plateau", plateau}, {"late", late}};
    for (const auto& [label, step] : switches) {
        ReplayHandle replay(log);
        hc.budget = step;
        r.switches.push_back({label, poisson::run_hybrid(s.system, s.reference, replay, hc)});
    }

    poisson::IterateOptions cold;
    cold.method = cfg.method;
    cold.max_iters = cfg.max_iters;
    cold.tol = eps;
    cold.record_every = cfg.hybrid_record_every;
    cold.wall_clock = cfg.wall_clock;
    r.iterative = poisson::iterate(s.system, std::vector<double>(s.system.unknowns(), 0.0), s.reference.interior, cold);

    r.metrics = {{"eps", eps},
                 {"plateau_detected", probe.plateau_detected ? 1.0 : 0.0},
                 {"plateau_step", static_cast<double>(plateau)},
                 {"early_step", static_cast<double>(early)},
                 {"late_step", static_cast<double>(late)},
                 {"cold_iters", static_cast<double>(r.iterative->iterations)},
                 {"cold_reached", r.iterative->converged ? 1.0 : 0.0}};
    for (const auto& sw : r.switches) {
        r.metrics.emplace_back(sw.label + "_post_iters", static_cast<double>(sw.report.post_switch_iters));
        r.metrics.emplace_back(sw.label + "_reached", sw.report.reached ? 1.0 : 0.0);
        r.metrics.emplace_back(sw.label + "_sup_error_at_switch", sw.report.sup_error_at_switch);
        r.metrics.emplace_back(sw.label + "_total_wall_ms", sw.report.total_wall_ms);
    }
    return r;
}

// ---------------------------------------------------------------- diagnose_grad

RunReport run_diagnose_grad(const ExperimentConfig& cfg) {
    RunReport r;
    r.config = cfg;
    const std::size_t count = cfg.samples;
    std::vector<double> xs(count);
    for (std::size_t j = 0; j < count; ++j) xs[j] = -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(count);
    const Matrix inputs = Matrix::column(xs);
    Matrix targets(count, 1);
    for (std::size_t j = 0; j < count; ++j) targets(j, 0) = target_toy(xs[j]).first;

    const bool ce = cfg.grad_loss == GradLoss::cross_entropy;
    auto net = build_network(cfg, 1, 1, ce ? nn::OutputActivation::sigmoid : nn::OutputActivation::identity);
    const auto sched = schedule_of(cfg);
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
        auto fwd = nn::forward(net, inputs);
        const auto lv = ce ? loss::cross_entropy_loss(fwd.outputs, targets) : loss::mse_loss(fwd.outputs.data, targets.data);
        check_loss(lv.value, e);
        Matrix g(count, 1);
        g.data = lv.grad;
        update(net, nn::backprop(net, fwd.cache, g), nn::lr_at(sched, e), e);
    }

    const auto dec = spectral::grad_decomposition(
        net, inputs, targets, ce ? spectral::PointwiseLoss::cross_entropy : spectral::PointwiseLoss::mse, 0);
    const auto norms = dec.term_norms();
    for (std::size_t k = 0; k < count; ++k) r.grad_terms.push_back({k, std::abs(dec.d_k[0][k]), norms[k]});
    double gnorm = 0.0;
    for (double v : dec.direct_grad) gnorm += v * v;
    r.metrics = {{"real_residual", dec.real_residual()},
                 {"imag_residual", dec.imag_residual()},
                 {"grad_norm", std::sqrt(gnorm)},
                 {"params", static_cast<double>(net.param_count())}};
    return r;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    switch (cfg.experiment) {
        case Experiment::toy_ce: return run_toy_ce(cfg);
        case Experiment::mnist_pca: return run_mnist_pca(cfg);
        case Experiment::poisson_direct: return run_poisson_direct(cfg);
        case Experiment::poisson_jacobi: return run_poisson_jacobi(cfg);
        case Experiment::poisson_dnn: return run_poisson_dnn(cfg);
        case Experiment::d_jacobi: return run_d_jacobi(cfg);
        case Experiment::diagnose_grad: return run_diagnose_grad(cfg);
    }
    throw ConfigError("unknown experiment");
}

// ---------------------------------------------------------------- output

namespace {

std::string iterations_csv(const poisson::IterativeRun& run) {
    std::string out = "iter,wall_ms,sup_error";
    for (std::size_t k : run.tracked_modes) out += ",alpha_" + std::to_string(k);
    out += "\n";
    for (const auto& rec : run.records) {
        out += std::to_string(rec.iteration) + "," + format_double(rec.wall_ms) + "," + format_double(rec.sup_error);
        for (double a : rec.alphas) out += "," + format_double(a);
        out += "\n";
    }
    return out;
}

}  // namespace

std::vector<std::string> emit_csv(const RunReport& r, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());

    std::vector<std::string> written;
    auto put = [&](const std::string& name, const std::string& text) {
        const std::string path = (fs::path(dir) / name).string();
        report::write_text(path, text);
        written.push_back(path);
    };

    put("config.cfg", r.config.to_text());

    if (!r.target_spectrum.coefficients.empty()) {
        std::string t = "gamma,re,im,abs,peak\n";
        for (std::size_t g = 0; g < r.target_spectrum.size(); ++g) {
            const auto c = r.target_spectrum.coefficients[g];
            const bool peak = std::find(r.peaks.begin(), r.peaks.end(), g) != r.peaks.end();
            t += std::to_string(g) + "," + format_double(c.real()) + "," + format_double(c.imag()) + "," +
                 format_double(std::abs(c)) + "," + (peak ? "1" : "0") + "\n";
        }
        put("target_spectrum.csv", t);
    }
    if (r.trace) {
        put("trace.csv", r.trace->to_csv());
        std::string t = "gamma,tau,first_step\n";
        for (const auto& fp : r.first_passage)
            t += std::to_string(fp.gamma) + "," + format_double(r.config.tau) + "," +
                 (fp.step ? std::to_string(*fp.step) : std::string()) + "\n";
        put("first_passage.csv", t);
    }
    if (!r.error_trace.empty()) {
        std::string t = "step,epoch,sup_error\n";
        for (const auto& e : r.error_trace)
            t += std::to_string(e.step) + "," + std::to_string(e.epoch) + "," + format_double(e.sup_error) + "\n";
        put("error_trace.csv", t);
    }
    if (r.iterative) put(r.config.experiment == Experiment::d_jacobi ? "cold_start.csv" : "iterations.csv",
                         iterations_csv(*r.iterative));
    if (!r.switches.empty()) {
        std::string t = "label,switch_step,plateau_detected,sup_error_at_switch,post_switch_iters,reached,dnn_wall_ms,"
                        "total_wall_ms\n";
        for (const auto& sw : r.switches) {
            put("hybrid_" + sw.label + ".csv", sw.report.to_csv());
            const auto& h = sw.report;
            t += sw.label + "," + std::to_string(h.switch_step) + "," + (h.plateau_detected ? "1" : "0") + "," +
                 format_double(h.sup_error_at_switch) + "," + std::to_string(h.post_switch_iters) + "," +
                 (h.reached ? "1" : "0") + "," + format_double(h.dnn_wall_ms) + "," + format_double(h.total_wall_ms) +
                 "\n";
        }
        put("switch_summary.csv", t);
    }
    if (!r.grid_columns.empty()) {
        std::string t;
        for (std::size_t c = 0; c < r.grid_columns.size(); ++c) t += (c ? "," : "") + r.grid_columns[c].first;
        t += "\n";
        const std::size_t rows = r.grid_columns.front().second.size();
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t c = 0; c < r.grid_columns.size(); ++c)
                t += (c ? "," : "") + format_double(r.grid_columns[c].second.at(i));
            t += "\n";
        }
        put("solution.csv", t);
    }
    if (!r.projected_x.empty()) {
        std::string t = "x,label";
        for (int d = 0; d < 10; ++d) t += ",y" + std::to_string(d);
        t += "\n";
        for (std::size_t i = 0; i < r.projected_x.size(); ++i) {
            t += format_double(r.projected_x[i]) + "," + std::to_string(r.projected_labels[i]);
            for (int d = 0; d < 10; ++d) t += d == r.projected_labels[i] ? ",1" : ",0";
            t += "\n";
        }
        put("projected.csv", t);
    }
    if (!r.grad_terms.empty()) {
        std::string t = "k,abs_d_k,norm_l_k\n";
        for (const auto& g : r.grad_terms)
            t += std::to_string(g.k) + "," + format_double(g.abs_d_k) + "," + format_double(g.norm_l_k) + "\n";
        put("grad_decomposition.csv", t);
    }

    nlohmann::ordered_json summary;
    summary["experiment"] = to_string(r.config.experiment);
    summary["seed"] = r.config.seed;
    for (const auto& [k, v] : r.metrics) summary["metrics"][k] = format_double(v);
    summary["peaks"] = r.peaks;
    for (const auto& fp : r.first_passage) {
        nlohmann::ordered_json row;
        row["gamma"] = fp.gamma;
        row["first_step"] = fp.step ? nlohmann::ordered_json(*fp.step) : nlohmann::ordered_json(nullptr);
        summary["first_passage"].push_back(row);
    }
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const auto& w : written) files.push_back(fs::path(w).filename().string());
    files.push_back("summary.json");
    summary["files"] = files;
    put("summary.json", summary.dump(2) + "\n");
    return written;
}

std::vector<std::string> emit_svg(const RunReport& r, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
    std::vector<std::string> written;
    auto put = [&](const std::string& name, const std::string& text) {
        const std::string path = (fs::path(dir) / name).string();
        report::write_text(path, text);
        written.push_back(path);
    };

    if (r.trace) {
        std::vector<report::Series> series;
        for (std::size_t i = 0; i < r.trace->peaks().size(); ++i) {
            report::Series s{"gamma=" + std::to_string(r.trace->peaks()[i]), {}, {}};
            for (const auto& row : r.trace->rows()) {
                s.xs.push_back(static_cast<double>(row.step));
                s.ys.push_back(row.df[i]);
            }
            series.push_back(std::move(s));
        }
        put("trace.svg", report::line_chart_svg({"Relative frequency difference", "recording step", "delta_F", true},
                                                series));
    }
    if (r.iterative) {
        std::vector<report::Series> series;
        report::Series err{"sup error", {}, {}};
        for (const auto& rec : r.iterative->records) {
            err.xs.push_back(static_cast<double>(rec.iteration));
            err.ys.push_back(rec.sup_error);
        }
        series.push_back(std::move(err));
        for (std::size_t m = 0; m < r.iterative->tracked_modes.size(); ++m) {
            report::Series s{"|alpha_" + std::to_string(r.iterative->tracked_modes[m]) + "|", {}, {}};
            for (const auto& rec : r.iterative->records) {
                s.xs.push_back(static_cast<double>(rec.iteration));
                s.ys.push_back(std::abs(rec.alphas[m]));
            }
            series.push_back(std::move(s));
        }
        put("iterations.svg", report::line_chart_svg({"Iterative solver error", "iteration", "magnitude", true}, series));
    }
    if (!r.switches.empty()) {
        // Abscissa: wall time when measured, otherwise steps plus iterations.
        const bool timed = r.config.wall_clock;
        std::vector<report::Series> series;
        for (const auto& sw : r.switches) {
            report::Series s{sw.label, {}, {}};
            for (const auto& row : sw.report.rows) {
                const double x = timed ? row.cum_wall_ms
                                       : static_cast<double>(row.phase == "dnn" ? row.step_or_iter
                                                                                : sw.report.switch_step + row.step_or_iter);
                s.xs.push_back(x);
                s.ys.push_back(row.sup_error);
            }
            series.push_back(std::move(s));
        }
        put("hybrid.svg", report::line_chart_svg({"Hybrid solver error", timed ? "wall time (ms)" : "steps + iterations",
                                                  "sup error", true},
                                                 series));
    }
    if (!r.error_trace.empty()) {
        report::Series s{"sup error", {}, {}};
        for (const auto& e : r.error_trace) {
            s.xs.push_back(static_cast<double>(e.step));
            s.ys.push_back(e.sup_error);
        }
        put("error_trace.svg", report::line_chart_svg({"Network error", "recording step", "sup error", true}, {s}));
    }
    if (!r.grad_terms.empty()) {
        report::Series d{"|d_k|", {}, {}}, l{"||L_k||", {}, {}};
        for (const auto& g : r.grad_terms) {
            d.xs.push_back(static_cast<double>(g.k));
            d.ys.push_back(g.abs_d_k);
            l.xs.push_back(static_cast<double>(g.k));
            l.ys.push_back(g.norm_l_k);
        }
        put("grad_decomposition.svg", report::line_chart_svg({"Gradient by frequency", "k", "magnitude", true}, {d, l}));
    }
    return written;
}

}  // namespace freqprin::experiments

#include "freqprin/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "freqprin/kernels.hpp"
#include "freqprin/rng.hpp"

namespace freqprin::nn {

std::string to_string(Activation a) { return a == Activation::tanh ? "tanh" : "relu"; }

std::string to_string(OutputActivation a) {
    switch (a) {
        case OutputActivation::identity: return "identity";
        case OutputActivation::softmax: return "softmax";
        case OutputActivation::sigmoid: return "sigmoid";
    }
    return "identity";
}

Activation parse_activation(const std::string& s) {
    if (s == "tanh") return Activation::tanh;
    if (s == "relu") return Activation::relu;
    throw std::invalid_argument("unknown activation '" + s + "'");
}

OutputActivation parse_output_activation(const std::string& s) {
    if (s == "identity") return OutputActivation::identity;
    if (s == "softmax") return OutputActivation::softmax;
    if (s == "sigmoid") return OutputActivation::sigmoid;
    throw std::invalid_argument("unknown output activation '" + s + "'");
}

// ---------------------------------------------------------------- ParamGrad

std::size_t ParamGrad::size() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.size() + l.bias.size();
    return n;
}

std::vector<double> ParamGrad::flatten() const {
    std::vector<double> out;
    out.reserve(size());
    for (const auto& l : layers) {
        out.insert(out.end(), l.weights.data.begin(), l.weights.data.end());
        out.insert(out.end(), l.bias.begin(), l.bias.end());
    }
    return out;
}

void ParamGrad::scale(double factor) {
    for (auto& l : layers) {
        for (double& w : l.weights.data) w *= factor;
        for (double& b : l.bias) b *= factor;
    }
}

void ParamGrad::add(const ParamGrad& other) {
    if (other.layers.size() != layers.size()) throw std::invalid_argument("ParamGrad::add: shape mismatch");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        auto& dst = layers[i];
        const auto& src = other.layers[i];
        if (!dst.weights.same_shape(src.weights) || dst.bias.size() != src.bias.size())
            throw std::invalid_argument("ParamGrad::add: shape mismatch");
        for (std::size_t k = 0; k < dst.weights.size(); ++k) dst.weights.data[k] += src.weights.data[k];
        for (std::size_t k = 0; k < dst.bias.size(); ++k) dst.bias[k] += src.bias[k];
    }
}

// ---------------------------------------------------------------- Mlp

Mlp::Mlp(std::vector<std::size_t> widths, Activation hidden, OutputActivation output)
    : widths_(std::move(widths)), hidden_(hidden), output_(output) {
    if (widths_.size() < 2) throw std::invalid_argument("Mlp: need at least input and output widths");
    for (std::size_t w : widths_)
        if (w == 0) throw std::invalid_argument("Mlp: layer widths must be positive");
    layers_.reserve(widths_.size() - 1);
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l)
        layers_.push_back(Layer{Matrix(widths_[l + 1], widths_[l]), std::vector<double>(widths_[l + 1], 0.0)});
}

std::vector<Layer>& Mlp::mutable_layers() {
    ++version_;
    return layers_;
}

std::size_t Mlp::param_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
    return n;
}

std::vector<double> Mlp::flatten() const {
    std::vector<double> out;
    out.reserve(param_count());
    for (const auto& l : layers_) {
        out.insert(out.end(), l.weights.data.begin(), l.weights.data.end());
        out.insert(out.end(), l.bias.begin(), l.bias.end());
    }
    return out;
}

void Mlp::assign(std::span<const double> params) {
    if (params.size() != param_count()) throw std::invalid_argument("Mlp::assign: parameter count mismatch");
    auto it = params.begin();
    for (auto& l : mutable_layers()) {
        std::copy_n(it, l.weights.size(), l.weights.data.begin());
        it += static_cast<std::ptrdiff_t>(l.weights.size());
        std::copy_n(it, l.bias.size(), l.bias.begin());
        it += static_cast<std::ptrdiff_t>(l.bias.size());
    }
}

ParamGrad Mlp::zero_grad() const {
    ParamGrad g;
    g.layers.reserve(layers_.size());
    for (const auto& l : layers_)
        g.layers.push_back(Layer{Matrix(l.weights.rows, l.weights.cols), std::vector<double>(l.bias.size(), 0.0)});
    return g;
}

Mlp init_mlp(std::vector<std::size_t> widths, Activation hidden, OutputActivation output,
             const InitSpec& init) {
    if (widths.empty()) throw std::invalid_argument("init_mlp: empty widths");
    if (!(init.std > 0.0)) throw std::invalid_argument("init_mlp: std must be positive");
    Mlp mlp(std::move(widths), hidden, output);
    Rng rng(init.seed);
    for (auto& l : mlp.mutable_layers()) {
        for (double& w : l.weights.data) w = rng.normal(init.mean, init.std);
        for (double& b : l.bias) b = rng.normal(init.mean, init.std);
    }
    return mlp;
}

// ---------------------------------------------------------------- forward

std::vector<double> softmax(std::span<const double> logits) {
    if (logits.empty()) throw std::invalid_argument("softmax: empty input");
    for (double z : logits)
        if (std::isnan(z)) throw std::invalid_argument("softmax: NaN logit");
    const double top = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - top);
        total += out[i];
    }
    for (double& p : out) p /= total;
    return out;
}

namespace {

void apply_hidden(Activation a, Matrix& m) {
    if (a == Activation::tanh) {
        for (double& v : m.data) v = std::tanh(v);
    } else {
        for (double& v : m.data) v = v > 0.0 ? v : 0.0;
    }
}

void apply_output(OutputActivation a, Matrix& m) {
    switch (a) {
        case OutputActivation::identity: break;
        case OutputActivation::sigmoid:
            for (double& v : m.data) v = 1.0 / (1.0 + std::exp(-v));
            break;
        case OutputActivation::softmax:
            for (std::size_t r = 0; r < m.rows; ++r) {
                auto row = m.row(r);
                const auto p = softmax(row);
                std::copy(p.begin(), p.end(), row.begin());
            }
            break;
    }
}

Matrix layer_forward(const Mlp& mlp, std::size_t l, const Matrix& in) {
    const auto& layer = mlp.layers()[l];
    Matrix z(in.rows, layer.weights.rows);
    kernels::active::gemm_abt(in, layer.weights, layer.bias, z);
    if (l + 1 < mlp.layers().size())
        apply_hidden(mlp.hidden_activation(), z);
    else
        apply_output(mlp.output_activation(), z);
    return z;
}

void check_input(const Mlp& mlp, const Matrix& xs) {
    if (xs.cols != mlp.input_dim())
        throw std::invalid_argument("forward: input dimension " + std::to_string(xs.cols) + " != " +
                                    std::to_string(mlp.input_dim()));
}

}  // namespace

ForwardResult forward(const Mlp& mlp, const Matrix& xs) {
    check_input(mlp, xs);
    ForwardResult res;
    res.cache.owner = &mlp;
    res.cache.version = mlp.version();
    res.cache.post.reserve(mlp.layers().size() + 1);
    res.cache.post.push_back(xs);
    for (std::size_t l = 0; l < mlp.layers().size(); ++l)
        res.cache.post.push_back(layer_forward(mlp, l, res.cache.post.back()));
    res.outputs = res.cache.post.back();
    return res;
}

Matrix evaluate(const Mlp& mlp, const Matrix& xs) {
    check_input(mlp, xs);
    Matrix cur = layer_forward(mlp, 0, xs);
    for (std::size_t l = 1; l < mlp.layers().size(); ++l) cur = layer_forward(mlp, l, cur);
    return cur;
}

// ---------------------------------------------------------------- backprop

ParamGrad backprop(const Mlp& mlp, const ForwardCache& cache, const Matrix& grad_outputs) {
    const std::size_t depth = mlp.layers().size();
    if (cache.owner != &mlp || cache.version != mlp.version() || cache.post.size() != depth + 1)
        throw std::logic_error("backprop: stale or mismatched forward cache");
    const Matrix& out = cache.post.back();
    if (!grad_outputs.same_shape(out)) throw std::invalid_argument("backprop: gradient shape mismatch");

    // delta = dL/dz for the output layer pre-activation.
    Matrix delta = grad_outputs;
    switch (mlp.output_activation()) {
        case OutputActivation::identity: break;
        case OutputActivation::sigmoid:
            for (std::size_t k = 0; k < delta.size(); ++k) {
                const double p = out.data[k];
                delta.data[k] *= p * (1.0 - p);
            }
            break;
        case OutputActivation::softmax:
            for (std::size_t r = 0; r < delta.rows; ++r) {
                auto d = delta.row(r);
                const auto p = out.row(r);
                double dot = 0.0;
                for (std::size_t c = 0; c < d.size(); ++c) dot += d[c] * p[c];
                for (std::size_t c = 0; c < d.size(); ++c) d[c] = p[c] * (d[c] - dot);
            }
            break;
    }

    ParamGrad grad = mlp.zero_grad();
    for (std::size_t l = depth; l-- > 0;) {
        const Matrix& in = cache.post[l];
        kernels::active::gemm_atb(delta, in, grad.layers[l].weights);
        kernels::active::column_sums(delta, grad.layers[l].bias);
        if (l == 0) break;
        Matrix back(delta.rows, in.cols);
        kernels::active::gemm_ab(delta, mlp.layers()[l].weights, back);
        if (mlp.hidden_activation() == Activation::tanh) {
            for (std::size_t k = 0; k < back.size(); ++k) back.data[k] *= 1.0 - in.data[k] * in.data[k];
        } else {
            for (std::size_t k = 0; k < back.size(); ++k)
                if (!(in.data[k] > 0.0)) back.data[k] = 0.0;
        }
        delta = std::move(back);
    }
    return grad;
}

// ---------------------------------------------------------------- updates

void sgd_step(Mlp& mlp, const ParamGrad& grad, double lr) {
    if (!(lr > 0.0)) throw std::invalid_argument("sgd_step: learning rate must be positive");
    const auto& cur = mlp.layers();
    if (grad.layers.size() != cur.size()) throw std::invalid_argument("sgd_step: shape mismatch");
    for (std::size_t l = 0; l < cur.size(); ++l)
        if (!grad.layers[l].weights.same_shape(cur[l].weights) || grad.layers[l].bias.size() != cur[l].bias.size())
            throw std::invalid_argument("sgd_step: shape mismatch");

    bool finite = true;
    auto& layers = mlp.mutable_layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        auto& w = layers[l].weights.data;
        const auto& gw = grad.layers[l].weights.data;
        for (std::size_t k = 0; k < w.size(); ++k) {
            w[k] -= lr * gw[k];
            finite = finite && std::isfinite(w[k]);
        }
        auto& b = layers[l].bias;
        const auto& gb = grad.layers[l].bias;
        for (std::size_t k = 0; k < b.size(); ++k) {
            b[k] -= lr * gb[k];
            finite = finite && std::isfinite(b[k]);
        }
    }
    if (!finite) throw DivergenceError("sgd_step: non-finite parameter after update");
}

double lr_at(const LrSchedule& schedule, std::size_t epoch) {
    if (schedule.halve_every == 0) return schedule.base_lr;
    return std::ldexp(schedule.base_lr, -static_cast<int>(epoch / schedule.halve_every));
}

// ---------------------------------------------------------------- grad_check

double grad_check(const Mlp& mlp, const LossClosure& loss, const GradCheckOptions& opts) {
    const auto analytic = loss(mlp).second.flatten();
    const std::vector<double> base = mlp.flatten();
    if (analytic.size() != base.size()) throw std::invalid_argument("grad_check: gradient size mismatch");

    std::vector<std::size_t> indices(base.size());
    std::iota(indices.begin(), indices.end(), 0);
    if (opts.max_params != 0 && opts.max_params < indices.size()) {
        Rng rng(opts.seed);
        for (std::size_t i = 0; i < opts.max_params; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.below(indices.size() - i));
            std::swap(indices[i], indices[j]);
        }
        indices.resize(opts.max_params);
    }

    Mlp probe = mlp;
    std::vector<double> params = base;
    double worst = 0.0;
    for (std::size_t idx : indices) {
        params[idx] = base[idx] + opts.fd_step;
        probe.assign(params);
        const double up = loss(probe).first;
        params[idx] = base[idx] - opts.fd_step;
        probe.assign(params);
        const double down = loss(probe).first;
        params[idx] = base[idx];
        const double fd = (up - down) / (2.0 * opts.fd_step);
        const double rel = std::abs(analytic[idx] - fd) / (std::abs(analytic[idx]) + std::abs(fd) + 1e-12);
        worst = std::max(worst, rel);
    }
    return worst;
}

}  // namespace freqprin::nn

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "freqprin/errors.hpp"
#include "freqprin/matrix.hpp"

namespace freqprin::nn {

enum class Activation { tanh, relu };
enum class OutputActivation { identity, softmax, sigmoid };

std::string to_string(Activation a);
std::string to_string(OutputActivation a);
Activation parse_activation(const std::string& s);
OutputActivation parse_output_activation(const std::string& s);

struct InitSpec {
    double mean = 0.0;
    double std = 0.1;
    std::uint64_t seed = 0;
};

/// Weights are (fan_out x fan_in); layer l maps widths[l] -> widths[l+1].
struct Layer {
    Matrix weights;
    std::vector<double> bias;
};

/// Gradient with the same layout as the network parameters.
struct ParamGrad {
    std::vector<Layer> layers;

    std::size_t size() const;
    std::vector<double> flatten() const;
    void scale(double factor);
    void add(const ParamGrad& other);
};

class Mlp {
public:
    Mlp(std::vector<std::size_t> widths, Activation hidden, OutputActivation output);

    const std::vector<std::size_t>& widths() const { return widths_; }
    std::size_t input_dim() const { return widths_.front(); }
    std::size_t output_dim() const { return widths_.back(); }
    Activation hidden_activation() const { return hidden_; }
    OutputActivation output_activation() const { return output_; }

    const std::vector<Layer>& layers() const { return layers_; }
    /// Mutable access bumps the version so outstanding forward caches go stale.
    std::vector<Layer>& mutable_layers();

    std::size_t param_count() const;
    /// Parameters in layer order: weights row-major, then biases.
    std::vector<double> flatten() const;
    void assign(std::span<const double> params);

    ParamGrad zero_grad() const;
    std::uint64_t version() const { return version_; }

private:
    std::vector<std::size_t> widths_;
    Activation hidden_;
    OutputActivation output_;
    std::vector<Layer> layers_;
    std::uint64_t version_ = 0;
};

Mlp init_mlp(std::vector<std::size_t> widths, Activation hidden, OutputActivation output,
             const InitSpec& init);

/// Everything backprop needs from one forward pass.
struct ForwardCache {
    const Mlp* owner = nullptr;
    std::uint64_t version = 0;
    /// post[0] is the input batch; post[l+1] is the output of layer l.
    std::vector<Matrix> post;
};

struct ForwardResult {
    Matrix outputs;
    ForwardCache cache;
};

ForwardResult forward(const Mlp& mlp, const Matrix& xs);
/// Forward pass without keeping intermediates.
Matrix evaluate(const Mlp& mlp, const Matrix& xs);

/// Numerically safe softmax (max-subtracted).
std::vector<double> softmax(std::span<const double> logits);

/// Reverse-mode gradient of a scalar loss whose derivative with respect to
/// the network outputs (after the output activation) is `grad_outputs`.
ParamGrad backprop(const Mlp& mlp, const ForwardCache& cache, const Matrix& grad_outputs);

/// theta <- theta - lr * grad. Throws DivergenceError if a parameter becomes
/// non-finite.
void sgd_step(Mlp& mlp, const ParamGrad& grad, double lr);

struct LrSchedule {
    double base_lr = 1e-3;
    std::size_t halve_every = 0;  // 0 = constant
};

double lr_at(const LrSchedule& schedule, std::size_t epoch);

/// Loss value and its analytic parameter gradient at a given network state.
using LossClosure = std::function<std::pair<double, ParamGrad>(const Mlp&)>;

struct GradCheckOptions {
    double fd_step = 1e-6;
    std::size_t max_params = 0;  // 0 = check every parameter
    std::uint64_t seed = 0;
};

/// Max over checked parameters of |analytic - fd| / (|analytic| + |fd| + 1e-12)
/// using central differences.
double grad_check(const Mlp& mlp, const LossClosure& loss, const GradCheckOptions& opts = {});

}  // namespace freqprin::nn

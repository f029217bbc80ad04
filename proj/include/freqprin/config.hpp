#pragma once

// Flat, typed key = value experiment configuration with a fixed schema.
// Unknown keys, duplicate keys and malformed values are rejected.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "freqprin/hybrid.hpp"
#include "freqprin/mlp.hpp"
#include "freqprin/poisson.hpp"
#include "freqprin/spectral.hpp"

namespace freqprin::experiments {

enum class Experiment { toy_ce, mnist_pca, poisson_direct, poisson_jacobi, poisson_dnn, d_jacobi, diagnose_grad };

std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& s);
/// CLI subcommand spelling (dashes instead of underscores).
std::string subcommand_name(Experiment e);

enum class GradLoss { mse, cross_entropy };

struct ExperimentConfig {
    Experiment experiment = Experiment::toy_ce;

    // network and optimiser
    std::vector<std::size_t> hidden_widths{64, 64, 32};
    nn::Activation activation = nn::Activation::tanh;
    double init_mean = 0.0;
    double init_std = 0.1;
    double lr = 2e-4;
    std::size_t lr_halve_every = 0;
    std::size_t batch_size = 0;  // 0 = full batch
    std::size_t epochs = 1000;
    std::uint64_t seed = 1;

    // data
    std::size_t samples = 201;
    std::string mnist_images;
    std::string mnist_labels;
    bool synthetic = false;
    std::size_t nufft_k = 64;

    // Poisson
    std::size_t n = 64;
    double beta = 10.0;

    // spectral diagnostics
    std::size_t record_every = 1;  // epochs (or iterations) per recording step
    std::size_t peak_max_count = 4;
    double peak_min_rel = 0.05;
    spectral::Denominator df_denominator = spectral::Denominator::target;
    double tau = 0.3;

    // iterative solvers
    poisson::Method method = poisson::Method::jacobi;
    std::size_t max_iters = 20000;
    double tol = 1e-10;
    std::vector<std::size_t> track_modes;  // empty = modes nearest the peaks of u*

    // hybrid
    std::size_t plateau_window = 200;
    double plateau_delta = 0.01;
    double eps_rel = 1e-3;
    double early_fraction = 0.25;
    double late_factor = 2.0;
    std::size_t hybrid_record_every = 10;

    // gradient decomposition
    GradLoss grad_loss = GradLoss::mse;

    // output
    bool svg = false;
    bool wall_clock = true;

    /// Throws ConfigError when a field is out of range for this experiment.
    void validate() const;

    /// Resolved key = value snapshot; parsing it reproduces this config.
    std::string to_text() const;
};

/// Schema defaults for an experiment.
ExperimentConfig defaults_for(Experiment e);

/// Applies one key = value assignment. Throws ConfigError.
void set_field(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Applies every assignment in `text` (comments start with '#').
void apply_text(ExperimentConfig& cfg, const std::string& text, const std::string& origin = "<config>");

/// Keys in schema order.
std::vector<std::string> schema_keys();

/// Named presets: full-scale fig2..fig5 and desk-scale desk-*.
std::vector<std::string> preset_names();
/// Preset text; throws ConfigError for unknown names.
const std::string& preset_text(const std::string& name);
/// Experiment a preset belongs to.
Experiment preset_experiment(const std::string& name);

}  // namespace freqprin::experiments

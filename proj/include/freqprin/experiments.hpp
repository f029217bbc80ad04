#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "freqprin/config.hpp"
#include "freqprin/hybrid.hpp"
#include "freqprin/poisson.hpp"
#include "freqprin/spectral.hpp"

namespace freqprin::experiments {

/// Toy classification target: y1 = 1{x >= 0}, y2 = 1{x <= 0}; both are 1 at x = 0.
std::pair<double, double> target_toy(double x);

struct FirstPassage {
    std::size_t gamma = 0;
    std::optional<std::size_t> step;
};

struct ErrorRow {
    std::size_t step = 0;
    std::size_t epoch = 0;
    double sup_error = 0.0;
};

struct SwitchOutcome {
    std::string label;  // step0, early, plateau, late
    poisson::HybridReport report;
};

struct GradTermRow {
    std::size_t k = 0;
    double abs_d_k = 0.0;
    double norm_l_k = 0.0;
};

/// Everything a run produced, kept in memory until emitted.
struct RunReport {
    ExperimentConfig config;

    spectral::Spectrum target_spectrum;
    std::vector<std::size_t> peaks;
    std::optional<spectral::FreqTrace> trace;
    std::vector<FirstPassage> first_passage;

    std::vector<ErrorRow> error_trace;                 // poisson_dnn
    std::optional<poisson::IterativeRun> iterative;    // poisson_jacobi, d_jacobi cold start
    std::vector<SwitchOutcome> switches;               // d_jacobi

    // Grid-valued results (poisson_*): columns x, g, u_star, optional extras.
    std::vector<std::pair<std::string, std::vector<double>>> grid_columns;

    // mnist_pca projected dataset
    std::vector<double> projected_x;
    std::vector<std::uint8_t> projected_labels;

    std::vector<GradTermRow> grad_terms;  // diagnose_grad

    /// Ordered scalar results (final loss, errors, wall times, ...).
    std::vector<std::pair<std::string, double>> metrics;

    double metric(const std::string& name) const;
    bool has_metric(const std::string& name) const;
};

RunReport run_toy_ce(const ExperimentConfig& cfg);
RunReport run_mnist_pca(const ExperimentConfig& cfg);
RunReport run_poisson_direct(const ExperimentConfig& cfg);
RunReport run_poisson_jacobi(const ExperimentConfig& cfg);
RunReport run_poisson_dnn(const ExperimentConfig& cfg);
RunReport run_d_jacobi(const ExperimentConfig& cfg);
RunReport run_diagnose_grad(const ExperimentConfig& cfg);

/// Dispatches on cfg.experiment after validation.
RunReport run_experiment(const ExperimentConfig& cfg);

/// Writes the CSV files (and the resolved config snapshot and summary) into
/// `dir`, creating it if needed. Returns the paths written. Throws IoError.
std::vector<std::string> emit_csv(const RunReport& report, const std::string& dir);
/// Writes static SVG line charts for the traces in `report`.
std::vector<std::string> emit_svg(const RunReport& report, const std::string& dir);

}  // namespace freqprin::experiments

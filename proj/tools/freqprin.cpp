// freqprin: command-line driver for the experiments.
//
//   freqprin toy-ce --preset desk-toy --seeds 3 --out runs/toy
//   freqprin poisson-jacobi --set n=128 --svg
//
// Settings are layered: schema defaults, then --preset, then --config, then
// each --set, then the dedicated flags.

#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "freqprin/config.hpp"
#include "freqprin/errors.hpp"
#include "freqprin/experiments.hpp"
#include "freqprin/report.hpp"

namespace fx = freqprin::experiments;

namespace {

struct Options {
    std::string config_path;
    std::string preset;
    std::string out = "out";
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::size_t seeds = 1;
    std::size_t jobs = 1;
    bool svg = false;
    bool synthetic = false;
    std::string mnist_images;
    std::string mnist_labels;
};

fx::ExperimentConfig resolve(fx::Experiment e, const Options& o) {
    auto cfg = fx::defaults_for(e);
    if (!o.preset.empty()) {
        if (fx::preset_experiment(o.preset) != e)
            throw freqprin::ConfigError("preset '" + o.preset + "' belongs to " +
                                        fx::subcommand_name(fx::preset_experiment(o.preset)));
        fx::apply_text(cfg, fx::preset_text(o.preset), "preset " + o.preset);
    }
    if (!o.config_path.empty()) {
        std::string text;
        try {
            text = freqprin::report::read_text(o.config_path);
        } catch (const freqprin::IoError&) {
            throw freqprin::ConfigError("cannot read config file " + o.config_path);
        }
        fx::apply_text(cfg, text, o.config_path);
    }
    for (const auto& s : o.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw freqprin::ConfigError("--set expects key=value, got '" + s + "'");
        fx::set_field(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    if (cfg.experiment != e)
        throw freqprin::ConfigError("configuration is for " + fx::subcommand_name(cfg.experiment) + ", not " +
                                    fx::subcommand_name(e));
    if (o.seed) cfg.seed = *o.seed;
    if (o.svg) cfg.svg = true;
    if (o.synthetic) cfg.synthetic = true;
    if (!o.mnist_images.empty()) cfg.mnist_images = o.mnist_images;
    if (!o.mnist_labels.empty()) cfg.mnist_labels = o.mnist_labels;
    cfg.validate();
    return cfg;
}

int exit_code_of(const std::exception_ptr& ep) {
    try {
        std::rethrow_exception(ep);
    } catch (const freqprin::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const freqprin::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 4;
    } catch (const freqprin::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return 3;
    } catch (const freqprin::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int run(fx::Experiment e, const Options& o) {
    const auto base = resolve(e, o);
    if (o.seeds == 0) throw freqprin::ConfigError("--seeds must be at least 1");

    std::vector<fx::ExperimentConfig> jobs;
    std::vector<std::string> dirs;
    for (std::size_t i = 0; i < o.seeds; ++i) {
        auto cfg = base;
        cfg.seed = base.seed + i;
        jobs.push_back(cfg);
        dirs.push_back(o.seeds == 1 ? o.out : (std::filesystem::path(o.out) / ("seed_" + std::to_string(cfg.seed))).string());
    }

    std::vector<std::exception_ptr> errors(jobs.size());
    std::mutex print;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < jobs.size();) {
            try {
                const auto rep = fx::run_experiment(jobs[i]);
                auto files = fx::emit_csv(rep, dirs[i]);
                if (jobs[i].svg) {
                    const auto svgs = fx::emit_svg(rep, dirs[i]);
                    files.insert(files.end(), svgs.begin(), svgs.end());
                }
                std::lock_guard lock(print);
                std::cout << fx::subcommand_name(jobs[i].experiment) << " seed " << jobs[i].seed << " -> " << dirs[i]
                          << "\n";
                for (const auto& [k, v] : rep.metrics) std::cout << "  " << k << " = " << v << "\n";
                for (const auto& fp : rep.first_passage)
                    std::cout << "  first_passage gamma=" << fp.gamma << " step="
                              << (fp.step ? std::to_string(*fp.step) : "never") << "\n";
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t nthreads = std::max<std::size_t>(1, std::min(o.jobs, jobs.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (const auto& ep : errors)
        if (ep) return exit_code_of(ep);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frequency-principle experiments: spectral training diagnostics and Poisson solvers"};
    app.require_subcommand(0, 1);
    bool list_presets = false;
    app.add_flag("--list-presets", list_presets, "Print the preset names and exit");

    Options opts;
    std::vector<std::pair<CLI::App*, fx::Experiment>> subs;
    const fx::Experiment all[] = {fx::Experiment::toy_ce,         fx::Experiment::mnist_pca,
                                  fx::Experiment::poisson_direct, fx::Experiment::poisson_jacobi,
                                  fx::Experiment::poisson_dnn,    fx::Experiment::d_jacobi,
                                  fx::Experiment::diagnose_grad};
    for (auto e : all) {
        auto* sub = app.add_subcommand(fx::subcommand_name(e), "Run the " + fx::to_string(e) + " experiment");
        sub->add_option("--config", opts.config_path, "key = value config file");
        sub->add_option("--preset", opts.preset, "Named preset (fig2..fig5, desk-*)");
        sub->add_option("--seed", opts.seed, "Base seed");
        sub->add_option("--seeds", opts.seeds, "Number of consecutive seeds to run")->check(CLI::PositiveNumber);
        sub->add_option("--jobs", opts.jobs, "Seeds run concurrently")->check(CLI::PositiveNumber);
        sub->add_option("--out", opts.out, "Output directory");
        sub->add_option("--set", opts.sets, "Override one config key (key=value)");
        sub->add_flag("--svg", opts.svg, "Also write SVG charts");
        if (e == fx::Experiment::mnist_pca) {
            sub->add_option("--mnist-images", opts.mnist_images, "IDX image file (optionally gzipped)");
            sub->add_option("--mnist-labels", opts.mnist_labels, "IDX label file (optionally gzipped)");
            sub->add_flag("--synthetic", opts.synthetic, "Use synthetic data when MNIST is absent or unreadable");
        }
        subs.emplace_back(sub, e);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (list_presets) {
        for (const auto& p : fx::preset_names()) std::cout << p << "\n";
        return 0;
    }
    for (const auto& [sub, e] : subs) {
        if (!sub->parsed()) continue;
        try {
            return run(e, opts);
        } catch (...) {
            return exit_code_of(std::current_exception());
        }
    }
    std::cerr << app.help();
    return 2;
}

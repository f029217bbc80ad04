#include <algorithm>
#include <utility>

#include "freqprin/config.hpp"
#include "freqprin/errors.hpp"

namespace freqprin::experiments {

namespace {

struct Preset {
    std::string name;
    Experiment experiment;
    std::string text;
};

const std::vector<Preset>& presets() {
    static const std::vector<Preset> table = {
        {"fig2", Experiment::toy_ce,
         "# toy classification, cross entropy, full scale\n"
         "hidden_widths = 400,400,200,100\n"
         "activation = tanh\n"
         "init_std = 0.1\n"
         "lr = 2e-4\n"
         "samples = 201\n"
         "epochs = 20000\n"
         "record_every = 1\n"},
        {"fig3", Experiment::mnist_pca,
         "# MNIST projected on its first principal component, full scale\n"
         "hidden_widths = 400,200\n"
         "activation = tanh\n"
         "init_std = 0.2\n"
         "lr = 1e-5\n"
         "batch_size = 128\n"
         "samples = 10000\n"
         "epochs = 100\n"
         "record_every = 1\n"},
        {"fig4", Experiment::poisson_dnn,
         "# energy-loss network for -u'' = g, full scale\n"
         "hidden_widths = 4000,800\n"
         "activation = relu\n"
         "init_std = 0.05\n"
         "lr = 5e-6\n"
         "lr_halve_every = 10000\n"
         "beta = 10\n"
         "n = 50\n"
         "epochs = 40000\n"
         "record_every = 4\n"
         "tau = 0.2\n"},
        {"fig5", Experiment::d_jacobi,
         "# network warm start followed by Jacobi, full scale\n"
         "hidden_widths = 4000,500,400\n"
         "activation = relu\n"
         "init_std = 0.02\n"
         "lr = 5e-4\n"
         "beta = 10\n"
         "n = 1000\n"
         "epochs = 20000\n"
         "max_iters = 5000000\n"},

        {"desk-toy", Experiment::toy_ce,
         "hidden_widths = 64,64,32\n"
         "activation = tanh\n"
         "init_std = 0.1\n"
         "lr = 2e-4\n"
         "samples = 201\n"
         "epochs = 3000\n"
         "record_every = 10\n"
         "wall_clock = false\n"},
        {"desk-mnist", Experiment::mnist_pca,
         "hidden_widths = 64,32\n"
         "activation = tanh\n"
         "init_std = 0.2\n"
         "lr = 1e-5\n"
         "batch_size = 128\n"
         "samples = 2000\n"
         "epochs = 5\n"
         "synthetic = true\n"
         "wall_clock = false\n"},
        {"desk-direct", Experiment::poisson_direct, "n = 64\nbeta = 10\nwall_clock = false\n"},
        {"desk-jacobi", Experiment::poisson_jacobi,
         "n = 64\n"
         "method = jacobi\n"
         "max_iters = 20000\n"
         "tol = 1e-10\n"
         "record_every = 50\n"
         "wall_clock = false\n"},
        {"desk-poisson", Experiment::poisson_dnn,
         "hidden_widths = 256,64\n"
         "activation = relu\n"
         "init_std = 0.05\n"
         "lr = 1e-2\n"
         "lr_halve_every = 10000\n"
         "beta = 10\n"
         "n = 64\n"
         "epochs = 10000\n"
         "record_every = 4\n"
         "tau = 0.2\n"
         "wall_clock = false\n"},
        {"desk-djacobi", Experiment::d_jacobi,
         "hidden_widths = 256,64\n"
         "activation = relu\n"
         "init_std = 0.05\n"
         "lr = 1e-2\n"
         "lr_halve_every = 10000\n"
         "beta = 10\n"
         "n = 64\n"
         "epochs = 40000\n"
         "record_every = 10\n"
         "plateau_window = 2000\n"
         "plateau_delta = 1e-3\n"
         "wall_clock = false\n"},
        {"desk-grad", Experiment::diagnose_grad,
         "hidden_widths = 16\n"
         "activation = tanh\n"
         "samples = 32\n"
         "epochs = 0\n"
         "wall_clock = false\n"},
    };
    return table;
}

const Preset& find(const std::string& name) {
    const auto& table = presets();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Preset& p) { return p.name == name; });
    if (it == table.end()) throw ConfigError("unknown preset '" + name + "'");
    return *it;
}

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& p : presets()) names.push_back(p.name);
    return names;
}

const std::string& preset_text(const std::string& name) { return find(name).text; }

Experiment preset_experiment(const std::string& name) { return find(name).experiment; }

}  // namespace freqprin::experiments

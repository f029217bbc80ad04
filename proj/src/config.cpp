#include "freqprin/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>

namespace freqprin::experiments {

namespace {

struct NamedExperiment {
    Experiment e;
    const char* name;
};

constexpr NamedExperiment kExperiments[] = {
    {Experiment::toy_ce, "toy_ce"},
    {Experiment::mnist_pca, "mnist_pca"},
    {Experiment::poisson_direct, "poisson_direct"},
    {Experiment::poisson_jacobi, "poisson_jacobi"},
    {Experiment::poisson_dnn, "poisson_dnn"},
    {Experiment::d_jacobi, "d_jacobi"},
    {Experiment::diagnose_grad, "diagnose_grad"},
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& why) {
    throw ConfigError("config key '" + key + "': invalid value '" + value + "' (" + why + ")");
}

double parse_double(const std::string& key, const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) bad_value(key, v, "expected a number");
    return d;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    if (v.empty() || !std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; }))
        bad_value(key, v, "expected a non-negative integer");
    errno = 0;
    const auto u = std::strtoull(v.c_str(), nullptr, 10);
    if (errno == ERANGE) bad_value(key, v, "integer out of range");
    return u;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    bad_value(key, v, "expected true or false");
}

std::vector<std::size_t> parse_list(const std::string& key, const std::string& v) {
    std::vector<std::size_t> out;
    if (v.empty()) return out;
    std::stringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_uint(key, trim(item)));
    return out;
}

std::string join(const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

std::string fmt(double d) { return spectral::format_double(d); }

template <typename Fn>
auto wrap_enum(const std::string& key, const std::string& v, Fn parse) {
    try {
        return parse(v);
    } catch (const std::invalid_argument& e) {
        bad_value(key, v, e.what());
    }
}

struct Field {
    const char* key;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&)> set;
};

#define FP_DOUBLE(name) \
    Field{#name, [](const ExperimentConfig& c) { return fmt(c.name); }, \
          [](ExperimentConfig& c, const std::string& v) { c.name = parse_double(#name, v); }}
#define FP_UINT(name) \
    Field{#name, [](const ExperimentConfig& c) { return std::to_string(c.name); }, \
          [](ExperimentConfig& c, const std::string& v) { c.name = parse_uint(#name, v); }}
#define FP_BOOL(name) \
    Field{#name, [](const ExperimentConfig& c) { return std::string(c.name ? "true" : "false"); }, \
          [](ExperimentConfig& c, const std::string& v) { c.name = parse_bool(#name, v); }}
#define FP_STRING(name) \
    Field{#name, [](const ExperimentConfig& c) { return c.name; }, \
          [](ExperimentConfig& c, const std::string& v) { c.name = v; }}
#define FP_LIST(name) \
    Field{#name, [](const ExperimentConfig& c) { return join(c.name); }, \
          [](ExperimentConfig& c, const std::string& v) { c.name = parse_list(#name, v); }}

const std::vector<Field>& schema() {
    static const std::vector<Field> fields = {
        Field{"experiment", [](const ExperimentConfig& c) { return to_string(c.experiment); },
              [](ExperimentConfig& c, const std::string& v) { c.experiment = wrap_enum("experiment", v, parse_experiment); }},
        FP_LIST(hidden_widths),
        Field{"activation", [](const ExperimentConfig& c) { return nn::to_string(c.activation); },
              [](ExperimentConfig& c, const std::string& v) { c.activation = wrap_enum("activation", v, nn::parse_activation); }},
        FP_DOUBLE(init_mean),
        FP_DOUBLE(init_std),
        FP_DOUBLE(lr),
        FP_UINT(lr_halve_every),
        FP_UINT(batch_size),
        FP_UINT(epochs),
        FP_UINT(seed),
        FP_UINT(samples),
        FP_STRING(mnist_images),
        FP_STRING(mnist_labels),
        FP_BOOL(synthetic),
        FP_UINT(nufft_k),
        FP_UINT(n),
        FP_DOUBLE(beta),
        FP_UINT(record_every),
        FP_UINT(peak_max_count),
        FP_DOUBLE(peak_min_rel),
        Field{"df_denominator", [](const ExperimentConfig& c) { return spectral::to_string(c.df_denominator); },
              [](ExperimentConfig& c, const std::string& v) {
                  c.df_denominator = wrap_enum("df_denominator", v, spectral::parse_denominator);
              }},
        FP_DOUBLE(tau),
        Field{"method", [](const ExperimentConfig& c) { return poisson::to_string(c.method); },
              [](ExperimentConfig& c, const std::string& v) { c.method = wrap_enum("method", v, poisson::parse_method); }},
        FP_UINT(max_iters),
        FP_DOUBLE(tol),
        FP_LIST(track_modes),
        FP_UINT(plateau_window),
        FP_DOUBLE(plateau_delta),
        FP_DOUBLE(eps_rel),
        FP_DOUBLE(early_fraction),
        FP_DOUBLE(late_factor),
        FP_UINT(hybrid_record_every),
        Field{"grad_loss", [](const ExperimentConfig& c) { return std::string(c.grad_loss == GradLoss::mse ? "mse" : "cross_entropy"); },
              [](ExperimentConfig& c, const std::string& v) {
                  if (v == "mse") c.grad_loss = GradLoss::mse;
                  else if (v == "cross_entropy") c.grad_loss = GradLoss::cross_entropy;
                  else bad_value("grad_loss", v, "expected mse or cross_entropy");
              }},
        FP_BOOL(svg),
        FP_BOOL(wall_clock),
    };
    return fields;
}

#undef FP_DOUBLE
#undef FP_UINT
#undef FP_BOOL
#undef FP_STRING
#undef FP_LIST

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError("invalid config: " + msg);
}

}  // namespace

std::string to_string(Experiment e) {
    for (const auto& ne : kExperiments)
        if (ne.e == e) return ne.name;
    return "toy_ce";
}

Experiment parse_experiment(const std::string& s) {
    std::string norm = s;
    std::replace(norm.begin(), norm.end(), '-', '_');
    for (const auto& ne : kExperiments)
        if (norm == ne.name) return ne.e;
    throw std::invalid_argument("unknown experiment '" + s + "'");
}

std::string subcommand_name(Experiment e) {
    std::string s = to_string(e);
    std::replace(s.begin(), s.end(), '_', '-');
    return s;
}

std::vector<std::string> schema_keys() {
    std::vector<std::string> keys;
    for (const auto& f : schema()) keys.emplace_back(f.key);
    return keys;
}

void set_field(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& f : schema()) {
        if (key == f.key) {
            f.set(cfg, value);
            return;
        }
    }
    throw ConfigError("unknown config key '" + key + "'");
}

void apply_text(ExperimentConfig& cfg, const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    std::set<std::string> seen;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = origin + ":" + std::to_string(lineno) + ": ";
        if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
        try {
            set_field(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
}

std::string ExperimentConfig::to_text() const {
    std::string out;
    for (const auto& f : schema()) out += std::string(f.key) + " = " + f.get(*this) + "\n";
    return out;
}

void ExperimentConfig::validate() const {
    require(init_std > 0.0, "init_std must be positive");
    require(lr > 0.0, "lr must be positive");
    require(record_every >= 1, "record_every must be >= 1");
    require(peak_max_count >= 1, "peak_max_count must be >= 1");
    require(peak_min_rel >= 0.0 && peak_min_rel <= 1.0, "peak_min_rel must lie in [0, 1]");
    require(tau > 0.0, "tau must be positive");
    for (std::size_t w : hidden_widths) require(w >= 1, "hidden widths must be positive");

    switch (experiment) {
        case Experiment::toy_ce:
            require(samples >= 2, "samples must be >= 2");
            break;
        case Experiment::mnist_pca:
            require(samples >= 2, "samples must be >= 2");
            require(nufft_k >= 1, "nufft_k must be >= 1");
            require(synthetic || (!mnist_images.empty() && !mnist_labels.empty()),
                    "MNIST paths are required unless synthetic = true");
            break;
        case Experiment::poisson_direct:
            require(n >= 2, "n must be >= 2");
            break;
        case Experiment::poisson_jacobi:
            require(n >= 2, "n must be >= 2");
            require(tol > 0.0, "tol must be positive");
            for (std::size_t k : track_modes) require(k >= 1 && k < n, "track_modes entries must lie in [1, n-1]");
            break;
        case Experiment::poisson_dnn:
            require(n >= 2, "n must be >= 2");
            require(beta > 0.0, "beta must be positive (beta = 0 leaves the constant mode unpinned)");
            break;
        case Experiment::d_jacobi:
            require(n >= 2, "n must be >= 2");
            require(beta > 0.0, "beta must be positive (beta = 0 leaves the constant mode unpinned)");
            require(plateau_window >= 2, "plateau_window must be >= 2");
            require(plateau_delta > 0.0, "plateau_delta must be positive");
            require(eps_rel > 0.0, "eps_rel must be positive");
            require(early_fraction > 0.0 && early_fraction < 1.0, "early_fraction must lie in (0, 1)");
            require(late_factor > 1.0, "late_factor must exceed 1");
            require(hybrid_record_every >= 1, "hybrid_record_every must be >= 1");
            break;
        case Experiment::diagnose_grad:
            require(samples >= 2, "samples must be >= 2");
            break;
    }
}

ExperimentConfig defaults_for(Experiment e) {
    ExperimentConfig c;
    c.experiment = e;
    switch (e) {
        case Experiment::toy_ce:
            break;
        case Experiment::mnist_pca:
            c.hidden_widths = {64, 32};
            c.init_std = 0.2;
            c.lr = 1e-5;
            c.batch_size = 128;
            c.epochs = 20;
            c.samples = 10000;
            break;
        case Experiment::poisson_direct:
            break;
        case Experiment::poisson_jacobi:
            c.record_every = 50;
            break;
        case Experiment::poisson_dnn:
            c.hidden_widths = {256, 64};
            c.activation = nn::Activation::relu;
            c.init_std = 0.05;
            c.lr = 1e-2;
            c.lr_halve_every = 10000;
            c.epochs = 10000;
            c.record_every = 4;
            c.tau = 0.2;
            break;
        case Experiment::d_jacobi:
            c.hidden_widths = {256, 64};
            c.activation = nn::Activation::relu;
            c.init_std = 0.05;
            c.lr = 1e-2;
            c.lr_halve_every = 10000;
            c.epochs = 40000;
            c.record_every = 10;
            c.max_iters = 1000000;
            break;
        case Experiment::diagnose_grad:
            c.hidden_widths = {16};
            c.samples = 32;
            c.epochs = 0;
            break;
    }
    return c;
}

}  // namespace freqprin::experiments

#include <doctest.h>

#include "freqprin/config.hpp"
#include "freqprin/errors.hpp"

using namespace freqprin;
using namespace freqprin::experiments;

TEST_CASE("text assignments override defaults") {
    auto cfg = defaults_for(Experiment::poisson_jacobi);
    apply_text(cfg,
               "# comment line\n"
               "n = 128   # trailing comment\n"
               "method = gauss_seidel\n"
               "track_modes = 1, 2,8\n"
               "tol=1e-8\n");
    CHECK(cfg.n == 128);
    CHECK(cfg.method == poisson::Method::gauss_seidel);
    CHECK(cfg.track_modes == std::vector<std::size_t>{1, 2, 8});
    CHECK(cfg.tol == 1e-8);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("snapshot text reproduces the configuration") {
    for (auto e : {Experiment::toy_ce, Experiment::mnist_pca, Experiment::d_jacobi, Experiment::diagnose_grad}) {
        auto cfg = defaults_for(e);
        cfg.lr = 0.1 + 0.2;  // needs all 17 digits
        cfg.hidden_widths = {7, 3};
        const auto text = cfg.to_text();
        ExperimentConfig back;
        apply_text(back, text);
        CHECK(back.to_text() == text);
        CHECK(back.lr == cfg.lr);
        CHECK(back.experiment == e);
    }
}

TEST_CASE("snapshot lists every schema key once, in order") {
    const auto text = ExperimentConfig{}.to_text();
    std::size_t pos = 0;
    for (const auto& key : schema_keys()) {
        const auto at = text.find("\n" + key + " = ", pos == 0 ? 0 : pos - 1);
        const bool first = text.rfind(key + " = ", 0) == 0;
        CHECK((first || at != std::string::npos));
        pos = first ? 1 : at + 1;
    }
}

TEST_CASE("strict parsing") {
    ExperimentConfig cfg;
    CHECK_THROWS_AS(apply_text(cfg, "no_such_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(apply_text(cfg, "lr = 1\nlr = 2\n"), ConfigError);
    CHECK_THROWS_AS(apply_text(cfg, "lr 0.1\n"), ConfigError);
    CHECK_THROWS_AS(apply_text(cfg, "lr = fast\n"), ConfigError);
    CHECK_THROWS_AS(apply_text(cfg, "epochs = -3\n"), ConfigError);
    CHECK_THROWS_AS(apply_text(cfg, "epochs = 2.5\n"), ConfigError);
    CHECK_THROWS_AS(apply_text(cfg, "svg = maybe\n"), ConfigError);
    CHECK_THROWS_AS(apply_text(cfg, "activation = sigmoid\n"), ConfigError);
    try {
        apply_text(cfg, "lr = 0.1\n\nbeta = x\n", "run.cfg");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("run.cfg:3") != std::string::npos);
    }
}

TEST_CASE("validation") {
    auto cfg = defaults_for(Experiment::poisson_dnn);
    cfg.beta = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = defaults_for(Experiment::d_jacobi);
    cfg.beta = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = defaults_for(Experiment::mnist_pca);
    CHECK_THROWS_AS(cfg.validate(), ConfigError);  // no data source
    cfg.synthetic = true;
    CHECK_NOTHROW(cfg.validate());
    cfg = defaults_for(Experiment::toy_ce);
    cfg.lr = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = defaults_for(Experiment::poisson_jacobi);
    cfg.track_modes = {64};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("experiment names") {
    CHECK(parse_experiment("d-jacobi") == Experiment::d_jacobi);
    CHECK(parse_experiment("poisson_dnn") == Experiment::poisson_dnn);
    CHECK(subcommand_name(Experiment::diagnose_grad) == "diagnose-grad");
    CHECK_THROWS(parse_experiment("fig9"));
}

TEST_CASE("every preset parses and validates") {
    const auto names = preset_names();
    for (const char* want : {"fig2", "fig3", "fig4", "fig5", "desk-toy", "desk-mnist", "desk-poisson", "desk-djacobi"})
        CHECK(std::find(names.begin(), names.end(), want) != names.end());
    for (const auto& name : names) {
        CAPTURE(name);
        auto cfg = defaults_for(preset_experiment(name));
        apply_text(cfg, preset_text(name), name);
        if (cfg.experiment == Experiment::mnist_pca) cfg.synthetic = true;
        CHECK_NOTHROW(cfg.validate());
    }
    CHECK_THROWS_AS(preset_text("fig9"), ConfigError);
}

TEST_CASE("full-scale presets carry the reference settings") {
    auto fig2 = defaults_for(Experiment::toy_ce);
    apply_text(fig2, preset_text("fig2"));
    CHECK(fig2.hidden_widths == std::vector<std::size_t>{400, 400, 200, 100});
    CHECK(fig2.lr == 2e-4);
    CHECK(fig2.init_std == 0.1);
    CHECK(fig2.samples == 201);

    auto fig3 = defaults_for(Experiment::mnist_pca);
    apply_text(fig3, preset_text("fig3"));
    CHECK(fig3.hidden_widths == std::vector<std::size_t>{400, 200});
    CHECK(fig3.batch_size == 128);
    CHECK(fig3.lr == 1e-5);
    CHECK(fig3.init_std == 0.2);
    CHECK(fig3.samples == 10000);

    auto fig4 = defaults_for(Experiment::poisson_dnn);
    apply_text(fig4, preset_text("fig4"));
    CHECK(fig4.hidden_widths == std::vector<std::size_t>{4000, 800});
    CHECK(fig4.lr == 5e-6);
    CHECK(fig4.lr_halve_every == 10000);
    CHECK(fig4.beta == 10.0);
    CHECK(fig4.init_std == 0.05);
    CHECK(fig4.n + 1 == 51);
    CHECK(fig4.record_every == 4);

    auto fig5 = defaults_for(Experiment::d_jacobi);
    apply_text(fig5, preset_text("fig5"));
    CHECK(fig5.hidden_widths == std::vector<std::size_t>{4000, 500, 400});
    CHECK(fig5.n + 1 == 1001);
    CHECK(fig5.lr == 5e-4);
    CHECK(fig5.beta == 10.0);
    CHECK(fig5.init_std == 0.02);
}

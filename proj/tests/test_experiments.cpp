#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "freqprin/errors.hpp"
#include "freqprin/experiments.hpp"
#include "freqprin/report.hpp"
#include "test_util.hpp"

using namespace freqprin;
using namespace freqprin::experiments;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small(Experiment e) {
    auto cfg = defaults_for(e);
    cfg.wall_clock = false;
    cfg.hidden_widths = {12, 8};
    switch (e) {
        case Experiment::toy_ce: cfg.epochs = 20; cfg.samples = 41; break;
        case Experiment::mnist_pca:
            cfg.synthetic = true;
            cfg.samples = 120;
            cfg.epochs = 2;
            cfg.batch_size = 32;
            cfg.nufft_k = 16;
            break;
        case Experiment::poisson_dnn: cfg.epochs = 40; cfg.n = 16; break;
        case Experiment::d_jacobi:
            cfg.epochs = 60;
            cfg.n = 16;
            cfg.plateau_window = 5;
            break;
        case Experiment::poisson_jacobi: cfg.n = 16; break;
        default: break;
    }
    return cfg;
}

std::size_t count_of(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("toy target overlaps at the origin") {
    CHECK(target_toy(0.5) == std::pair{1.0, 0.0});
    CHECK(target_toy(-0.5) == std::pair{0.0, 1.0});
    CHECK(target_toy(0.0) == std::pair{1.0, 1.0});
}

TEST_CASE("zero epochs records only the initial row") {
    auto cfg = small(Experiment::toy_ce);
    cfg.epochs = 0;
    const auto r = run_experiment(cfg);
    REQUIRE(r.trace);
    CHECK(r.trace->rows().size() == 1);
    CHECK(r.trace->rows()[0].step == 0);
}

TEST_CASE("toy run records every record_every epochs") {
    auto cfg = small(Experiment::toy_ce);
    cfg.record_every = 5;
    const auto r = run_experiment(cfg);
    REQUIRE(r.trace);
    CHECK(r.trace->rows().size() == 5);
    CHECK(r.trace->rows().back().epoch == 20);
    CHECK(r.first_passage.size() == r.peaks.size());
    CHECK(r.trace->rows().back().loss < r.trace->rows().front().loss);
}

TEST_CASE("divergence is reported with the epoch") {
    auto cfg = small(Experiment::poisson_dnn);
    cfg.activation = nn::Activation::relu;
    cfg.hidden_widths = {256, 64};
    cfg.lr = 10.0;
    cfg.epochs = 50;
    CHECK_THROWS_WITH_AS(run_experiment(cfg), doctest::Contains("at epoch"), DivergenceError);
}

TEST_CASE("every experiment runs end to end and emits its files") {
    const std::pair<Experiment, std::vector<std::string>> cases[] = {
        {Experiment::toy_ce, {"trace.csv", "first_passage.csv", "target_spectrum.csv"}},
        {Experiment::mnist_pca, {"trace.csv", "projected.csv", "target_spectrum.csv"}},
        {Experiment::poisson_direct, {"solution.csv", "target_spectrum.csv"}},
        {Experiment::poisson_jacobi, {"iterations.csv", "trace.csv", "solution.csv"}},
        {Experiment::poisson_dnn, {"trace.csv", "error_trace.csv", "solution.csv"}},
        {Experiment::d_jacobi,
         {"hybrid_step0.csv", "hybrid_early.csv", "hybrid_plateau.csv", "hybrid_late.csv", "switch_summary.csv",
          "cold_start.csv"}},
        {Experiment::diagnose_grad, {"grad_decomposition.csv"}},
    };
    for (const auto& [e, files] : cases) {
        CAPTURE(to_string(e));
        const auto dir = testutil::scratch_dir("run_" + to_string(e));
        const auto r = run_experiment(small(e));
        emit_csv(r, dir);
        emit_svg(r, dir);
        CHECK(fs::exists(dir + "/config.cfg"));
        CHECK(fs::exists(dir + "/summary.json"));
        for (const auto& f : files) CHECK(fs::exists(dir + "/" + f));

        const auto summary = nlohmann::json::parse(report::read_text(dir + "/summary.json"));
        CHECK(summary["experiment"] == to_string(e));

        // The snapshot reproduces the run.
        ExperimentConfig again;
        apply_text(again, report::read_text(dir + "/config.cfg"));
        const auto dir2 = testutil::scratch_dir("rerun_" + to_string(e));
        emit_csv(run_experiment(again), dir2);
        for (const auto& f : files) CHECK(report::read_text(dir + "/" + f) == report::read_text(dir2 + "/" + f));
    }
}

TEST_CASE("trace CSV re-reads to the in-memory values") {
    const auto dir = testutil::scratch_dir("trace_roundtrip");
    const auto r = run_experiment(small(Experiment::poisson_dnn));
    emit_csv(r, dir);
    const auto back = spectral::FreqTrace::from_csv(report::read_text(dir + "/trace.csv"));
    REQUIRE(back.rows().size() == r.trace->rows().size());
    for (std::size_t i = 0; i < back.rows().size(); ++i) {
        CHECK(back.rows()[i].loss == r.trace->rows()[i].loss);
        CHECK(back.rows()[i].df == r.trace->rows()[i].df);
    }
}

TEST_CASE("trace SVG has one polyline per tracked frequency") {
    const auto dir = testutil::scratch_dir("svg");
    const auto r = run_experiment(small(Experiment::toy_ce));
    const auto files = emit_svg(r, dir);
    const auto svg = report::read_text(dir + "/trace.svg");
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(count_of(svg, "<polyline") == r.peaks.size());
    CHECK(count_of(svg, "<svg") == 1);
    CHECK(count_of(svg, "</svg>") == 1);
    CHECK(svg.find("http") == svg.find("http://www.w3.org/2000/svg"));
}

TEST_CASE("empty trace gives a header-only CSV") {
    RunReport r;
    r.config = defaults_for(Experiment::toy_ce);
    r.trace.emplace(std::vector<std::size_t>{0, 3});
    const auto dir = testutil::scratch_dir("empty");
    emit_csv(r, dir);
    CHECK(report::read_text(dir + "/trace.csv") == "step,epoch,wall_ms,loss,df_0,df_3\n");
}

TEST_CASE("unwritable output directory is an I/O error") {
    const auto dir = testutil::scratch_dir("blocked");
    std::ofstream(dir + "/file") << "x";
    const auto r = run_experiment(small(Experiment::poisson_direct));
    CHECK_THROWS_AS(emit_csv(r, dir + "/file/sub"), IoError);
}

TEST_CASE("d_jacobi switch labels and ordering") {
    const auto r = run_experiment(small(Experiment::d_jacobi));
    REQUIRE(r.switches.size() == 4);
    CHECK(r.switches[0].label == "step0");
    CHECK(r.switches[0].report.switch_step == 0);
    CHECK(r.switches[1].report.switch_step <= r.switches[2].report.switch_step);
    CHECK(r.switches[2].report.switch_step < r.switches[3].report.switch_step);
    CHECK(r.iterative);
    CHECK(r.metric("cold_iters") == static_cast<double>(r.iterative->iterations));
    CHECK_THROWS_AS(r.metric("nope"), std::out_of_range);
}

TEST_CASE("mnist target spectrum does not depend on training") {
    auto a = small(Experiment::mnist_pca);
    auto b = a;
    b.epochs = 0;
    const auto ra = run_experiment(a), rb = run_experiment(b);
    CHECK(ra.target_spectrum.coefficients == rb.target_spectrum.coefficients);
    CHECK(ra.projected_x == rb.projected_x);
}

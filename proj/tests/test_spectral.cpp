#include <doctest.h>

#include <cmath>
#include <numbers>

#include "freqprin/experiments.hpp"
#include "freqprin/spectral.hpp"
#include "test_util.hpp"

using namespace freqprin;
using namespace freqprin::spectral;

namespace {

std::vector<double> toy_y1(std::size_t count) {
    std::vector<double> y(count);
    for (std::size_t j = 0; j < count; ++j) {
        const double x = j + 1 == count ? 1.0 : -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(count - 1);
        y[j] = experiments::target_toy(x).first;
    }
    return y;
}

/// Straightforward double loop with the angle formed directly.
std::vector<cplx> naive_nufft(const std::vector<double>& x, const std::vector<double>& v, std::size_t k_count) {
    std::vector<cplx> out(k_count);
    for (std::size_t k = 0; k < k_count; ++k)
        for (std::size_t j = 0; j < x.size(); ++j)
            out[k] += v[j] * std::polar(1.0, -2.0 * std::numbers::pi * x[j] * static_cast<double>(k));
    return out;
}

TraceRow row(std::size_t step, std::vector<double> df) { return {step, step, 0.0, 0.0, std::move(df)}; }

}  // namespace

TEST_CASE("toy target spectrum against numpy") {
    const auto s = dft_uniform(toy_y1(201));
    REQUIRE(s.size() == 201);
    CHECK(s.coefficients[0].real() == doctest::Approx(101.0).epsilon(1e-14));
    // numpy.fft.fft values
    CHECK(s.coefficients[1].real() == doctest::Approx(-1.4998778569406532).epsilon(1e-11));
    CHECK(s.coefficients[1].imag() == doctest::Approx(63.96335545528838).epsilon(1e-12));
    CHECK(s.amplitude(3) == doctest::Approx(21.328716226381342).epsilon(1e-12));
    CHECK(s.amplitude(7) == doctest::Approx(9.144601305462654).epsilon(1e-12));
    CHECK(pick_peaks(s) == std::vector<std::size_t>{0, 3, 5, 7});
}

TEST_CASE("Parseval holds for the uniform transform") {
    for (std::size_t n : {8u, 64u, 501u}) {
        const auto v = testutil::random_matrix(1, n, n).data;
        const auto s = dft_uniform(v);
        double lhs = 0.0, rhs = 0.0;
        for (double x : v) lhs += x * x;
        for (const auto& c : s.coefficients) rhs += std::norm(c);
        CHECK(std::abs(lhs - rhs / static_cast<double>(n)) < 1e-10 * lhs);
    }
}

TEST_CASE("uniform nodes reduce the nonuniform transform to the DFT") {
    for (std::size_t n : {8u, 64u, 256u}) {
        std::vector<double> x(n);
        for (std::size_t j = 0; j < n; ++j) x[j] = static_cast<double>(j) / static_cast<double>(n);
        const auto v = testutil::random_matrix(1, n, 100 + n).data;
        const auto a = nufft_direct(x, v, n);
        const auto b = dft_uniform(v);
        for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(a.coefficients[k] - b.coefficients[k]) < 1e-10);
    }
}

TEST_CASE("nonuniform transform matches a naive oracle") {
    Rng rng(77);
    std::vector<double> x(300), v(300);
    for (auto& xi : x) xi = rng.uniform();
    x[0] = 0.0;
    x[1] = 1.0;
    for (auto& vi : v) vi = rng.normal();
    const auto got = nufft_direct(x, v, 40);
    const auto want = naive_nufft(x, v, 40);
    for (std::size_t k = 0; k < 40; ++k) CHECK(std::abs(got.coefficients[k] - want[k]) < 1e-10);
}

TEST_CASE("transform preconditions") {
    CHECK_THROWS_AS(dft_uniform(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(nufft_direct(std::vector<double>{0.5}, std::vector<double>{1.0}, 0), std::invalid_argument);
    CHECK_THROWS_AS(nufft_direct(std::vector<double>{1.5}, std::vector<double>{1.0}, 4), std::invalid_argument);
    CHECK_THROWS_AS(nufft_direct(std::vector<double>{0.5, 0.2}, std::vector<double>{1.0}, 4), std::invalid_argument);
}

TEST_CASE("peaks of a pure tone and of a constant") {
    std::vector<double> tone(64), flat(64, 2.0);
    for (std::size_t j = 0; j < 64; ++j) tone[j] = std::sin(2.0 * std::numbers::pi * 3.0 * j / 64.0);
    CHECK(pick_peaks(dft_uniform(tone)) == std::vector<std::size_t>{3});
    CHECK(pick_peaks(dft_uniform(flat)) == std::vector<std::size_t>{0});
}

TEST_CASE("peak selection keeps the largest and sorts them") {
    std::vector<double> v(128);
    const double amp[] = {1.0, 0.5, 0.2, 0.04, 0.3};
    const int freq[] = {2, 9, 20, 30, 40};
    for (std::size_t j = 0; j < 128; ++j)
        for (int i = 0; i < 5; ++i) v[j] += amp[i] * std::cos(2.0 * std::numbers::pi * freq[i] * j / 128.0);
    const auto s = dft_uniform(v);
    CHECK(pick_peaks(s, {4, 0.05}) == std::vector<std::size_t>{2, 9, 20, 40});
    CHECK(pick_peaks(s, {2, 0.05}) == std::vector<std::size_t>{2, 9});
    CHECK(pick_peaks(s, {10, 0.25}) == std::vector<std::size_t>{2, 9, 40});
}

TEST_CASE("relative frequency difference") {
    Spectrum target{{{2.0, 0.0}, {0.0, 0.0}, {1.0, 1.0}}};
    Spectrum model{{{1.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}}};
    CHECK(rel_freq_diff(model, target, 0, Denominator::target) == 0.5);
    CHECK(rel_freq_diff(model, target, 0, Denominator::model) == 1.0);
    CHECK(rel_freq_diff(model, target, 2, Denominator::target) == 0.0);
    CHECK(std::isinf(rel_freq_diff(model, target, 1, Denominator::target)));
    CHECK_THROWS_AS(rel_freq_diff(model, target, 3, Denominator::target), std::out_of_range);
}

TEST_CASE("first passage below the threshold") {
    FreqTrace t({1, 4});
    t.append(row(0, {0.9, 0.95}));
    t.append(row(1, {0.25, 0.8}));
    t.append(row(2, {0.1, 0.3}));
    t.append(row(3, {0.05, 0.29}));
    CHECK(step_to_threshold(t, 1, 0.3) == 1);
    CHECK(step_to_threshold(t, 4, 0.3) == 2);
    CHECK_FALSE(step_to_threshold(t, 4, 0.2).has_value());
    CHECK_THROWS_AS(step_to_threshold(t, 2, 0.3), std::out_of_range);
}

TEST_CASE("trace invariants") {
    FreqTrace t({3});
    t.append(row(2, {0.5}));
    CHECK_THROWS_AS(t.append(row(2, {0.4})), std::invalid_argument);
    CHECK_THROWS_AS(t.append(row(3, {-0.1})), std::invalid_argument);
    CHECK_THROWS_AS(t.append(row(4, {0.1, 0.2})), std::invalid_argument);
}

TEST_CASE("trace CSV keeps 17 significant digits") {
    FreqTrace t({0, 5});
    t.append({0, 0, 1.25, 0.1 + 0.2, {1.0 / 3.0, std::numeric_limits<double>::infinity()}});
    t.append({1, 4, 2.5, 1e-300, {2.0 / 7.0, 6.02214076e23}});
    const auto back = FreqTrace::from_csv(t.to_csv());
    REQUIRE(back.rows().size() == 2);
    CHECK(back.peaks() == t.peaks());
    for (std::size_t r = 0; r < 2; ++r) {
        CHECK(back.rows()[r].step == t.rows()[r].step);
        CHECK(back.rows()[r].epoch == t.rows()[r].epoch);
        CHECK(back.rows()[r].loss == t.rows()[r].loss);
        CHECK(back.rows()[r].df == t.rows()[r].df);
    }
    CHECK(FreqTrace({2}).to_csv() == "step,epoch,wall_ms,loss,df_2\n");
}

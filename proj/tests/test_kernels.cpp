#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#ifdef FREQPRIN_HAVE_OPENMP
#include <omp.h>
#endif

#include "freqprin/kernels.hpp"
#include "test_util.hpp"

using namespace freqprin;
using testutil::random_matrix;

namespace {

struct ThreadScope {
    ThreadScope() {
#ifdef FREQPRIN_HAVE_OPENMP
        saved = omp_get_max_threads();
        omp_set_num_threads(4);
#endif
    }
    ~ThreadScope() {
#ifdef FREQPRIN_HAVE_OPENMP
        omp_set_num_threads(saved);
#endif
    }
    int saved = 1;
};

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
    return random_matrix(1, n, seed).data;
}

}  // namespace

TEST_CASE("parallel gemm variants are bit-identical to the serial ones") {
    ThreadScope threads;
    const auto a = random_matrix(300, 70, 1);
    const auto b = random_matrix(90, 70, 2);
    const auto bias = random_vector(90, 3);
    Matrix s(300, 90), p(300, 90);
    kernels::serial::gemm_abt(a, b, bias, s);
    kernels::parallel::gemm_abt(a, b, bias, p);
    CHECK(s.data == p.data);

    const auto c = random_matrix(300, 40, 4);
    Matrix s2(70, 40), p2(70, 40);
    kernels::serial::gemm_atb(a, c, s2);
    kernels::parallel::gemm_atb(a, c, p2);
    CHECK(s2.data == p2.data);

    const auto d = random_matrix(70, 50, 5);
    Matrix s3(300, 50), p3(300, 50);
    kernels::serial::gemm_ab(a, d, s3);
    kernels::parallel::gemm_ab(a, d, p3);
    CHECK(s3.data == p3.data);

    std::vector<double> cs(70), cp(70);
    kernels::serial::column_sums(a, cs);
    kernels::parallel::column_sums(a, cp);
    CHECK(cs == cp);
}

TEST_CASE("parallel spectral and relaxation kernels match the serial ones") {
    ThreadScope threads;
    const auto v = random_vector(700, 6);
    std::vector<kernels::cplx> s(700), p(700);
    kernels::serial::dft_uniform(v, s);
    kernels::parallel::dft_uniform(v, p);
    CHECK(s == p);

    auto nodes = random_vector(700, 7);
    for (double& x : nodes) x = 0.5 * (x + 1.0);
    std::vector<kernels::cplx> ns(64), np(64);
    kernels::serial::nufft(nodes, v, ns);
    kernels::parallel::nufft(nodes, v, np);
    CHECK(ns == np);

    const auto u = random_vector(40000, 8);
    const auto rhs = random_vector(40000, 9);
    std::vector<double> js(40000), jp(40000);
    kernels::serial::jacobi_sweep(u, rhs, js);
    kernels::parallel::jacobi_sweep(u, rhs, jp);
    CHECK(js == jp);

    const auto err = random_vector(511, 10);
    std::vector<double> as(511), ap(511);
    kernels::serial::sine_coefficients(err, as);
    kernels::parallel::sine_coefficients(err, ap);
    CHECK(as == ap);

    const auto x = random_matrix(200, 300, 11);
    const auto w = random_vector(300, 12);
    std::vector<double> scratch(200), gs(300), gp(300);
    kernels::serial::gram_matvec(x, w, scratch, gs);
    kernels::parallel::gram_matvec(x, w, scratch, gp);
    CHECK(gs == gp);
}

TEST_CASE("gemm_abt agrees with a textbook triple loop") {
    const auto a = random_matrix(5, 3, 21);
    const auto b = random_matrix(4, 3, 22);
    const std::vector<double> bias{0.5, -1.0, 2.0, 0.0};
    Matrix out(5, 4);
    kernels::serial::gemm_abt(a, b, bias, out);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            double acc = bias[j];
            for (std::size_t k = 0; k < 3; ++k) acc += a(i, k) * b(j, k);
            CHECK(out(i, j) == doctest::Approx(acc).epsilon(1e-14));
        }
}

TEST_CASE("kernel shape mismatches are rejected") {
    Matrix a(3, 2), b(4, 3), out(3, 4);
    std::vector<double> bias(4);
    CHECK_THROWS_AS(kernels::serial::gemm_abt(a, b, bias, out), std::invalid_argument);
    CHECK_THROWS_AS(kernels::parallel::gemm_abt(a, b, bias, out), std::invalid_argument);
}

TEST_CASE("dft of a four-point signal") {
    const std::vector<double> v{1.0, 2.0, 0.5, -1.0};
    std::vector<kernels::cplx> out(4);
    kernels::serial::dft_uniform(v, out);
    const kernels::cplx want[] = {{2.5, 0.0}, {0.5, -3.0}, {0.5, 0.0}, {0.5, 3.0}};
    for (int g = 0; g < 4; ++g) CHECK(std::abs(out[g] - want[g]) < 1e-14);
}

TEST_CASE("unit roots and sine table helper") {
    CHECK(std::abs(kernels::unit_root(1, 4) - kernels::cplx(0.0, -1.0)) < 1e-15);
    CHECK(std::abs(kernels::unit_root(7, 7) - kernels::cplx(1.0, 0.0)) < 1e-15);
    CHECK(kernels::sine_pi_ratio(1, 2) == doctest::Approx(1.0));
    CHECK(std::abs(kernels::sine_pi_ratio(64, 64)) < 1e-15);
    CHECK(kernels::sine_pi_ratio(3 + 128, 64) == doctest::Approx(std::sin(3 * std::numbers::pi / 64)));
}

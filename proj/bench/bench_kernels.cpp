// Serial reference kernels against their OpenMP counterparts. Set
// OMP_NUM_THREADS to control the parallel width.

#include <benchmark/benchmark.h>

#include <vector>

#include "freqprin/kernels.hpp"
#include "freqprin/rng.hpp"

using namespace freqprin;
namespace k = freqprin::kernels;

namespace {

Matrix random(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(rows, cols);
    for (double& v : m.data) v = rng.uniform(-1.0, 1.0);
    return m;
}

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
}

// Forward layer shape: batch x fan_in times (fan_out x fan_in)^T.
template <auto Kernel>
void BM_gemm_abt(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = random(n, n, 1), b = random(n, n, 2);
    const auto bias = random_vec(n, 3);
    Matrix out(n, n);
    for (auto _ : state) {
        Kernel(a, b, bias, out);
        benchmark::DoNotOptimize(out.data.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}

template <auto Kernel>
void BM_gemm_atb(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = random(n, n, 1), b = random(n, n, 2);
    Matrix out(n, n);
    for (auto _ : state) {
        Kernel(a, b, out);
        benchmark::DoNotOptimize(out.data.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}

template <auto Kernel>
void BM_dft(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto v = random_vec(n, 4);
    std::vector<k::cplx> out(n);
    for (auto _ : state) {
        Kernel(v, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <auto Kernel>
void BM_nufft(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto nodes = random_vec(n, 5);
    for (double& x : nodes) x = 0.5 * (x + 1.0);
    const auto v = random_vec(n, 6);
    std::vector<k::cplx> out(64);
    for (auto _ : state) {
        Kernel(nodes, v, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <auto Kernel>
void BM_jacobi(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto u = random_vec(n, 7);
    const auto rhs = random_vec(n, 8);
    std::vector<double> next(n);
    for (auto _ : state) {
        Kernel(u, rhs, next);
        u.swap(next);
        benchmark::DoNotOptimize(u.data());
    }
}

template <auto Kernel>
void BM_sine_coefficients(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto err = random_vec(n - 1, 9);
    std::vector<double> alpha(n - 1);
    for (auto _ : state) {
        Kernel(err, alpha);
        benchmark::DoNotOptimize(alpha.data());
    }
}

}  // namespace

BENCHMARK(BM_gemm_abt<k::serial::gemm_abt>)->Name("gemm_abt/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_gemm_abt<k::parallel::gemm_abt>)->Name("gemm_abt/parallel")->Arg(64)->Arg(256);
BENCHMARK(BM_gemm_atb<k::serial::gemm_atb>)->Name("gemm_atb/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_gemm_atb<k::parallel::gemm_atb>)->Name("gemm_atb/parallel")->Arg(64)->Arg(256);
BENCHMARK(BM_dft<k::serial::dft_uniform>)->Name("dft/serial")->Arg(256)->Arg(2048);
BENCHMARK(BM_dft<k::parallel::dft_uniform>)->Name("dft/parallel")->Arg(256)->Arg(2048);
BENCHMARK(BM_nufft<k::serial::nufft>)->Name("nufft/serial")->Arg(10000);
BENCHMARK(BM_nufft<k::parallel::nufft>)->Name("nufft/parallel")->Arg(10000);
BENCHMARK(BM_jacobi<k::serial::jacobi_sweep>)->Name("jacobi/serial")->Arg(1 << 10)->Arg(1 << 16);
BENCHMARK(BM_jacobi<k::parallel::jacobi_sweep>)->Name("jacobi/parallel")->Arg(1 << 10)->Arg(1 << 16);
BENCHMARK(BM_sine_coefficients<k::serial::sine_coefficients>)->Name("sine_coefficients/serial")->Arg(1024);
BENCHMARK(BM_sine_coefficients<k::parallel::sine_coefficients>)->Name("sine_coefficients/parallel")->Arg(1024);

BENCHMARK_MAIN();

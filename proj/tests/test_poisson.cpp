#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "freqprin/poisson.hpp"
#include "test_util.hpp"

using namespace freqprin;
using namespace freqprin::poisson;

namespace {

// Evaluated in extended precision so the measurement adds no rounding of its own.
std::vector<double> residual(const TridiagSystem& s, std::span<const double> u) {
    const std::size_t m = u.size();
    std::vector<double> r(m);
    for (std::size_t i = 0; i < m; ++i) {
        long double au = static_cast<long double>(s.diag[i]) * u[i];
        if (i > 0) au += static_cast<long double>(s.sub[i]) * u[i - 1];
        if (i + 1 < m) au += static_cast<long double>(s.super[i]) * u[i + 1];
        r[i] = static_cast<double>(au - s.rhs[i]);
    }
    return r;
}

}  // namespace

TEST_CASE("hand elimination: n = 4, g = 1") {
    const auto sys = assemble_poisson(Grid1D(-1.0, 1.0, 4), [](double) { return 1.0; });
    const auto ref = thomas_solve(sys);
    REQUIRE(ref.interior.size() == 3);
    CHECK(std::abs(ref.interior[0] - 0.375) < 1e-14);
    CHECK(std::abs(ref.interior[1] - 0.5) < 1e-14);
    CHECK(std::abs(ref.interior[2] - 0.375) < 1e-14);
    CHECK(ref.full.front() == 0.0);
    CHECK(ref.full.back() == 0.0);
}

TEST_CASE("source term and reference solution against an independent solve") {
    CHECK(g_rhs(0.0) == 0.0);
    CHECK(g_rhs(0.5) == doctest::Approx(std::sin(0.5) + 4 * std::sin(2.0) - 8 * std::sin(4.0) + 16 * std::sin(12.0)));

    const Grid1D grid(-1.0, 1.0, 64);
    const auto ref = thomas_solve(assemble_poisson(grid, g_rhs));
    // numpy.linalg.solve on the dense (-1, 2, -1) system
    CHECK(ref.full[16] == doctest::Approx(-0.5358519556213233).epsilon(1e-12));
    CHECK(ref.full[40] == doctest::Approx(0.2103220248020758).epsilon(1e-12));
    CHECK(sup_norm(ref.full) == doctest::Approx(0.5923093591884595).epsilon(1e-12));
}

TEST_CASE("Thomas agrees with dense LU on random diagonally dominant systems") {
    Rng rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t m = 30 + 7 * trial;
        std::vector<double> sub(m), diag(m), super(m), rhs(m);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
        Eigen::VectorXd b(m);
        for (std::size_t i = 0; i < m; ++i) {
            sub[i] = i ? rng.uniform(-1, 1) : 0.0;
            super[i] = i + 1 < m ? rng.uniform(-1, 1) : 0.0;
            diag[i] = 2.5 + rng.uniform();
            rhs[i] = rng.normal();
            A(i, i) = diag[i];
            if (i) A(i, i - 1) = sub[i];
            if (i + 1 < m) A(i, i + 1) = super[i];
            b[i] = rhs[i];
        }
        const auto x = solve_tridiagonal(sub, diag, super, rhs);
        const Eigen::VectorXd y = A.partialPivLu().solve(b);
        for (std::size_t i = 0; i < m; ++i) CHECK(x[i] == doctest::Approx(y[i]).epsilon(1e-12));
    }
}

TEST_CASE("zero pivot is reported") {
    const std::vector<double> sub{0.0, 1.0}, diag{0.0, 1.0}, super{1.0, 0.0}, rhs{1.0, 1.0};
    CHECK_THROWS_AS(solve_tridiagonal(sub, diag, super, rhs), std::runtime_error);
}

TEST_CASE("direct solve residual is at round-off level") {
    for (std::size_t n : {4u, 64u}) {
        const auto sys = assemble_poisson(Grid1D(-1.0, 1.0, n), g_rhs);
        const auto ref = thomas_solve(sys);
        CHECK(sup_norm(residual(sys, ref.interior)) <= 1e-12 * sup_norm(sys.rhs));
    }
    // At n = 1024 merely storing u in doubles costs up to 4 * ulp(u) / 2 in A u.
    const auto sys = assemble_poisson(Grid1D(-1.0, 1.0, 1024), g_rhs);
    const auto ref = thomas_solve(sys);
    const double ulp = std::nextafter(sup_norm(ref.interior), 1.0) - sup_norm(ref.interior);
    CHECK(sup_norm(residual(sys, ref.interior)) <= 2.0 * ulp);
}

TEST_CASE("Jacobi eigenpairs") {
    CHECK(jacobi_eigen(64, 32) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(jacobi_eigen(64, 1) == doctest::Approx(std::cos(std::numbers::pi / 64)));
    CHECK_THROWS_AS(jacobi_eigen(64, 0), std::out_of_range);
    CHECK_THROWS_AS(jacobi_eigen(64, 64), std::out_of_range);

    // One sweep of the homogeneous problem scales an eigenvector by lambda_k.
    const auto sys = assemble_poisson(Grid1D(-1.0, 1.0, 16), [](double) { return 0.0; });
    for (std::size_t k : {1u, 5u, 8u, 15u}) {
        const auto v = jacobi_eigenvector(16, k);
        const auto w = jacobi_step(sys, v);
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(w[i] == doctest::Approx(jacobi_eigen(16, k) * v[i]));
    }
}

TEST_CASE("mode amplitudes invert the sine synthesis") {
    const std::size_t n = 32;
    std::vector<double> err(n - 1, 0.0);
    for (std::size_t j = 1; j < n; ++j)
        err[j - 1] = 0.5 * std::sin(j * 3 * std::numbers::pi / n) - 2.0 * std::sin(j * 20 * std::numbers::pi / n);
    const auto a = mode_amplitudes(err, n);
    REQUIRE(a.size() == n - 1);
    for (std::size_t k = 1; k < n; ++k) {
        const double want = k == 3 ? 0.5 : k == 20 ? -2.0 : 0.0;
        CHECK(std::abs(a[k - 1] - want) < 1e-14);
    }
}

TEST_CASE("halving counts follow the eigenvalues") {
    const ModeAnalysis m(64);
    CHECK(m.halving_count(32) == 1);
    CHECK(m.halving_count(16) == 2);  // cos(pi/4)^2 = 1/2
    CHECK(m.halving_count(1) == static_cast<std::size_t>(std::ceil(std::log(0.5) / std::log(std::cos(std::numbers::pi / 64)))));
    for (std::size_t k = 1; k < 32; ++k) {
        CHECK(m.halving_time(k) > m.halving_time(k + 1));
        CHECK(m.halving_count(k) >= m.halving_count(k + 1));
    }
    // symmetric about n/2
    CHECK(m.halving_count(3) == m.halving_count(61));
}

TEST_CASE("iterate records and stops as configured") {
    const auto sys = assemble_poisson(Grid1D(-1.0, 1.0, 32), g_rhs);
    const auto ref = thomas_solve(sys);
    IterateOptions opts;
    opts.max_iters = 25;
    opts.tol = 0.0;
    opts.record_every = 10;
    opts.track_modes = {2, 4};
    opts.wall_clock = false;
    std::size_t seen = 0;
    opts.observer = [&](std::size_t it, std::span<const double>) { seen = it; };
    const auto run = iterate(sys, std::vector<double>(31, 0.0), ref.interior, opts);
    CHECK(run.iterations == 25);
    CHECK_FALSE(run.converged);
    CHECK(seen == 25);
    std::vector<std::size_t> its;
    for (const auto& r : run.records) its.push_back(r.iteration);
    CHECK(its == std::vector<std::size_t>{0, 10, 20, 25});
    for (const auto& r : run.records) CHECK(r.alphas.size() == 2);
    CHECK(run.records.front().sup_error == doctest::Approx(sup_norm(ref.interior)));
}

TEST_CASE("both smoothers converge; Gauss-Seidel needs fewer sweeps when mode 1 is present") {
    // With the odd source Jacobi never excites mode 1 from a zero start, while
    // the asymmetric Gauss-Seidel sweep does, so an even source is used here.
    const auto sys = assemble_poisson(Grid1D(-1.0, 1.0, 32), [](double) { return 1.0; });
    const auto ref = thomas_solve(sys);
    IterateOptions opts;
    opts.max_iters = 100000;
    opts.tol = 1e-9;
    opts.wall_clock = false;
    const auto jac = iterate(sys, std::vector<double>(31, 0.0), ref.interior, opts);
    opts.method = Method::gauss_seidel;
    const auto gs = iterate(sys, std::vector<double>(31, 0.0), ref.interior, opts);
    CHECK(jac.converged);
    CHECK(gs.converged);
    CHECK(gs.iterations < jac.iterations);
    CHECK(sup_distance(gs.solution, ref.interior) <= 1e-9);
}

TEST_CASE("method names") {
    CHECK(parse_method("jacobi") == Method::jacobi);
    CHECK(parse_method("gauss-seidel") == Method::gauss_seidel);
    CHECK(parse_method(to_string(Method::gauss_seidel)) == Method::gauss_seidel);
    CHECK_THROWS(parse_method("sor"));
}

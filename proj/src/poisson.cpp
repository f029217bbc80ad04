#include "freqprin/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "freqprin/kernels.hpp"

namespace freqprin::poisson {

double g_rhs(double x) {
    return std::sin(x) + 4.0 * std::sin(4.0 * x) - 8.0 * std::sin(8.0 * x) + 16.0 * std::sin(24.0 * x);
}

std::vector<double> TridiagSystem::apply(std::span<const double> u) const {
    const std::size_t m = unknowns();
    if (u.size() != m) throw std::invalid_argument("TridiagSystem::apply: length mismatch");
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) {
        double acc = diag[i] * u[i];
        if (i > 0) acc += sub[i] * u[i - 1];
        if (i + 1 < m) acc += super[i] * u[i + 1];
        out[i] = acc;
    }
    return out;
}

TridiagSystem assemble_poisson(const Grid1D& grid, const std::function<double(double)>& g) {
    grid.validate();
    const std::size_t m = grid.n - 1;
    TridiagSystem sys;
    sys.grid = grid;
    sys.sub.assign(m, -1.0);
    sys.diag.assign(m, 2.0);
    sys.super.assign(m, -1.0);
    sys.rhs.resize(m);
    const double h2 = grid.dx() * grid.dx();
    for (std::size_t i = 1; i < grid.n; ++i) sys.rhs[i - 1] = h2 * g(grid.point(i));
    return sys;
}

std::vector<double> solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                                      std::span<const double> super, std::span<const double> rhs) {
    const std::size_t m = diag.size();
    if (sub.size() != m || super.size() != m || rhs.size() != m)
        throw std::invalid_argument("solve_tridiagonal: length mismatch");
    if (m == 0) return {};
    std::vector<double> c(m), d(m);
    double pivot = diag[0];
    if (pivot == 0.0) throw std::runtime_error("solve_tridiagonal: zero pivot");
    c[0] = super[0] / pivot;
    d[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < m; ++i) {
        pivot = diag[i] - sub[i] * c[i - 1];
        if (pivot == 0.0) throw std::runtime_error("solve_tridiagonal: zero pivot");
        c[i] = super[i] / pivot;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / pivot;
    }
    std::vector<double> x(m);
    x[m - 1] = d[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

ReferenceSolution thomas_solve(const TridiagSystem& system) {
    ReferenceSolution ref;
    ref.interior = solve_tridiagonal(system.sub, system.diag, system.super, system.rhs);
    // A has condition number ~ n^2, so plain elimination leaves a residual of
    // order eps * ||A|| ||u||. Refining against an extended-precision residual
    // brings it down to the rounding of u itself.
    const std::size_t m = ref.interior.size();
    std::vector<double> r(m);
    for (int pass = 0; pass < 2; ++pass) {
        const auto& u = ref.interior;
        for (std::size_t i = 0; i < m; ++i) {
            long double au = static_cast<long double>(system.diag[i]) * u[i];
            if (i > 0) au += static_cast<long double>(system.sub[i]) * u[i - 1];
            if (i + 1 < m) au += static_cast<long double>(system.super[i]) * u[i + 1];
            r[i] = static_cast<double>(system.rhs[i] - au);
        }
        const auto du = solve_tridiagonal(system.sub, system.diag, system.super, r);
        for (std::size_t i = 0; i < m; ++i) ref.interior[i] += du[i];
    }
    ref.full.reserve(ref.interior.size() + 2);
    ref.full.push_back(0.0);
    ref.full.insert(ref.full.end(), ref.interior.begin(), ref.interior.end());
    ref.full.push_back(0.0);
    return ref;
}

std::vector<double> jacobi_step(const TridiagSystem& system, std::span<const double> u) {
    if (u.size() != system.unknowns()) throw std::invalid_argument("jacobi_step: length mismatch");
    std::vector<double> next(u.size());
    kernels::active::jacobi_sweep(u, system.rhs, next);
    return next;
}

std::vector<double> gauss_seidel_step(const TridiagSystem& system, std::span<const double> u) {
    const std::size_t m = system.unknowns();
    if (u.size() != m) throw std::invalid_argument("gauss_seidel_step: length mismatch");
    std::vector<double> next(u.begin(), u.end());
    for (std::size_t i = 0; i < m; ++i) {
        const double left = i > 0 ? next[i - 1] : 0.0;
        const double right = i + 1 < m ? next[i + 1] : 0.0;
        next[i] = (left + right + system.rhs[i]) / 2.0;
    }
    return next;
}

double jacobi_eigen(std::size_t n, std::size_t k) {
    if (n < 2 || k < 1 || k >= n) throw std::out_of_range("jacobi_eigen: need 1 <= k <= n-1");
    return std::cos(static_cast<double>(k) * std::numbers::pi / static_cast<double>(n));
}

std::vector<double> jacobi_eigenvector(std::size_t n, std::size_t k) {
    if (n < 2 || k < 1 || k >= n) throw std::out_of_range("jacobi_eigenvector: need 1 <= k <= n-1");
    std::vector<double> v(n - 1);
    for (std::size_t j = 1; j < n; ++j) v[j - 1] = kernels::sine_pi_ratio(j * k, n);
    return v;
}

ModeAnalysis::ModeAnalysis(std::size_t n_) : n(n_) {
    if (n < 2) throw std::invalid_argument("ModeAnalysis: n must be >= 2");
    eigenvalues.resize(n - 1);
    for (std::size_t k = 1; k < n; ++k) eigenvalues[k - 1] = jacobi_eigen(n, k);
}

double ModeAnalysis::halving_time(std::size_t k) const {
    const double mag = std::abs(lambda(k));
    if (mag == 0.0) return 0.0;
    return std::log(0.5) / std::log(mag);
}

std::size_t ModeAnalysis::halving_count(std::size_t k) const {
    // lambda_{n/4}^2 is exactly 1/2, but the rounded cosine puts t a few ulps
    // above 2; a tolerance keeps such ties on the exact count.
    const double t = halving_time(k);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(t - 1e-9 * t)));
}

std::vector<double> mode_amplitudes(std::span<const double> err, std::size_t n) {
    if (n < 2 || err.size() != n - 1) throw std::invalid_argument("mode_amplitudes: length must be n-1");
    std::vector<double> alpha(n - 1);
    kernels::active::sine_coefficients(err, alpha);
    return alpha;
}

std::string to_string(Method m) { return m == Method::jacobi ? "jacobi" : "gauss_seidel"; }

Method parse_method(const std::string& s) {
    if (s == "jacobi") return Method::jacobi;
    if (s == "gauss_seidel" || s == "gauss-seidel") return Method::gauss_seidel;
    throw std::invalid_argument("unknown iterative method '" + s + "'");
}

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("sup_distance: length mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

IterativeRun iterate(const TridiagSystem& system, std::span<const double> u0, std::span<const double> u_star,
                     const IterateOptions& opts) {
    const std::size_t m = system.unknowns();
    const std::size_t n = system.n();
    if (u0.size() != m || u_star.size() != m) throw std::invalid_argument("iterate: length mismatch");
    for (std::size_t k : opts.track_modes)
        if (k < 1 || k >= n) throw std::out_of_range("iterate: tracked mode out of range");

    // Sine tables for the tracked modes only.
    std::vector<std::vector<double>> tables;
    tables.reserve(opts.track_modes.size());
    for (std::size_t k : opts.track_modes) tables.push_back(jacobi_eigenvector(n, k));

    IterativeRun run;
    run.method = opts.method;
    run.tracked_modes = opts.track_modes;
    const std::size_t every = std::max<std::size_t>(1, opts.record_every);

    Stopwatch clock(opts.wall_clock);
    std::vector<double> u(u0.begin(), u0.end());
    std::vector<double> err(m);
    for (std::size_t l = 0;; ++l) {
        for (std::size_t i = 0; i < m; ++i) err[i] = u[i] - u_star[i];
        const double sup = sup_norm(err);
        if (!std::isfinite(sup)) throw std::runtime_error("iterate: non-finite iterate");
        const bool done = sup <= opts.tol || l >= opts.max_iters;
        if (l % every == 0 || done) {
            IterationRecord rec{l, sup, clock.elapsed_ms(), {}};
            rec.alphas.reserve(tables.size());
            for (const auto& v : tables) {
                double acc = 0.0;
                for (std::size_t j = 0; j < m; ++j) acc += err[j] * v[j];
                rec.alphas.push_back(2.0 * acc / static_cast<double>(n));
            }
            run.records.push_back(std::move(rec));
        }
        if (done) {
            run.converged = sup <= opts.tol;
            run.iterations = l;
            break;
        }
        u = opts.method == Method::jacobi ? jacobi_step(system, u) : gauss_seidel_step(system, u);
        if (opts.observer) opts.observer(l + 1, u);
    }
    run.solution = std::move(u);
    return run;
}

}  // namespace freqprin::poisson

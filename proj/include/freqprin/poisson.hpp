#pragma once

// Central-difference discretisation of -u'' = g on (a, b) with u(a) = u(b) = 0,
// its direct solution, and the Jacobi / Gauss-Seidel iterations together with
// the exact eigen-mode description of the Jacobi error.

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "freqprin/grid.hpp"

namespace freqprin::poisson {

/// Source term g(x) = sin(x) + 4 sin(4x) - 8 sin(8x) + 16 sin(24x).
double g_rhs(double x);
inline constexpr const char* kSourceFormula = "g(x)=sin(x)+4sin(4x)-8sin(8x)+16sin(24x)";

/// Interior system A u = rhs of size (n-1), A = tridiag(-1, 2, -1),
/// rhs_i = dx^2 g(x_i).
struct TridiagSystem {
    Grid1D grid;
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> super;
    std::vector<double> rhs;

    std::size_t n() const { return grid.n; }
    std::size_t unknowns() const { return rhs.size(); }
    /// A * u for the stored matrix.
    std::vector<double> apply(std::span<const double> u) const;
};

TridiagSystem assemble_poisson(const Grid1D& grid, const std::function<double(double)>& g);

struct ReferenceSolution {
    std::vector<double> interior;  // u*_1 .. u*_{n-1}
    std::vector<double> full;      // u*_0 .. u*_n with zero boundary values
};

/// Thomas elimination for a general tridiagonal system. sub[0] and super[m-1]
/// are ignored. Throws std::runtime_error on a zero pivot.
std::vector<double> solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                                      std::span<const double> super, std::span<const double> rhs);

ReferenceSolution thomas_solve(const TridiagSystem& system);

/// u_next_i = (u_{i-1} + u_{i+1} + rhs_i) / 2 with zero boundary neighbours.
std::vector<double> jacobi_step(const TridiagSystem& system, std::span<const double> u);
/// In-order sweep using already-updated left neighbours.
std::vector<double> gauss_seidel_step(const TridiagSystem& system, std::span<const double> u);

/// Eigenvalue cos(k pi / n) of the Jacobi iteration matrix, 1 <= k <= n-1.
double jacobi_eigen(std::size_t n, std::size_t k);
/// Eigenvector v_{k,j} = sin(j k pi / n), j = 1..n-1.
std::vector<double> jacobi_eigenvector(std::size_t n, std::size_t k);

/// Eigen-structure of the Jacobi iteration matrix R_J = D^{-1}(L+U).
struct ModeAnalysis {
    std::size_t n = 0;
    std::vector<double> eigenvalues;  // index k-1 holds lambda_k

    explicit ModeAnalysis(std::size_t n_);
    double lambda(std::size_t k) const { return eigenvalues.at(k - 1); }
    /// Real-valued halving time ln(1/2) / ln|lambda_k|.
    double halving_time(std::size_t k) const;
    /// Smallest l >= 1 with |lambda_k|^l <= 1/2, i.e. ceil(halving_time(k)) with
    /// exact ties resolved downwards.
    std::size_t halving_count(std::size_t k) const;
};

/// Coefficients alpha_k (k = 1..n-1) of err in the sine eigenbasis.
std::vector<double> mode_amplitudes(std::span<const double> err, std::size_t n);

enum class Method { jacobi, gauss_seidel };
std::string to_string(Method m);
Method parse_method(const std::string& s);

struct IterationRecord {
    std::size_t iteration = 0;
    double sup_error = 0.0;
    double wall_ms = 0.0;
    std::vector<double> alphas;  // one per tracked mode
};

struct IterativeRun {
    Method method = Method::jacobi;
    std::vector<std::size_t> tracked_modes;
    std::vector<IterationRecord> records;
    std::vector<double> solution;
    bool converged = false;
    /// Iterations performed (the last iterate's index).
    std::size_t iterations = 0;
};

struct IterateOptions {
    Method method = Method::jacobi;
    std::size_t max_iters = 10000;
    double tol = 1e-12;  // stop once sup_error <= tol
    std::vector<std::size_t> track_modes;
    std::size_t record_every = 1;  // records at multiples of this plus the last iterate
    bool wall_clock = true;
    /// Invoked after every iteration with (iteration, iterate).
    std::function<void(std::size_t, std::span<const double>)> observer;
};

/// Runs the chosen method from u0, recording the sup-norm error against
/// u_star. The stopping test precedes every iteration, so u0 within tol
/// performs no iterations.
IterativeRun iterate(const TridiagSystem& system, std::span<const double> u0, std::span<const double> u_star,
                     const IterateOptions& opts);

/// Elapsed-time helper; reports 0 when disabled so outputs stay reproducible.
class Stopwatch {
public:
    explicit Stopwatch(bool enabled = true) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
    double elapsed_ms() const {
        if (!enabled_) return 0.0;
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    bool enabled_;
    std::chrono::steady_clock::time_point start_;
};

double sup_norm(std::span<const double> v);
double sup_distance(std::span<const double> a, std::span<const double> b);

}  // namespace freqprin::poisson

#include "freqprin/grad_decomposition.hpp"

#include <cmath>
#include <stdexcept>

#include "freqprin/kernels.hpp"
#include "freqprin/loss.hpp"

namespace freqprin::spectral {

namespace {

using cplx = std::complex<double>;

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

void check_uniform(const Matrix& xs) {
    if (xs.cols != 1) throw std::invalid_argument("grad_decomposition: inputs must be scalar");
    if (xs.rows < 2) throw std::invalid_argument("grad_decomposition: need at least two samples");
    const double h = xs.data[1] - xs.data[0];
    if (!(h != 0.0)) throw std::invalid_argument("grad_decomposition: samples must be distinct");
    for (std::size_t j = 1; j < xs.rows; ++j)
        if (std::abs((xs.data[j] - xs.data[j - 1]) - h) > 1e-9 * std::abs(h))
            throw std::invalid_argument("grad_decomposition: samples must be uniformly spaced");
}

}  // namespace

double GradDecomposition::real_residual() const {
    const double ref = norm2(direct_grad);
    std::vector<double> diff(direct_grad.size(), 0.0);
    for (std::size_t p = 0; p < diff.size(); ++p) {
        double re = 0.0;
        for (const auto& term : l_k_terms) re += term[p].real();
        diff[p] = re - direct_grad[p];
    }
    return norm2(diff) / ref;
}

double GradDecomposition::imag_residual() const {
    const double ref = norm2(direct_grad);
    std::vector<double> im(direct_grad.size(), 0.0);
    for (std::size_t p = 0; p < im.size(); ++p)
        for (const auto& term : l_k_terms) im[p] += term[p].imag();
    return norm2(im) / ref;
}

std::vector<double> GradDecomposition::term_norms() const {
    std::vector<double> out;
    out.reserve(l_k_terms.size());
    for (const auto& term : l_k_terms) {
        double s = 0.0;
        for (const auto& c : term) s += std::norm(c);
        out.push_back(std::sqrt(s));
    }
    return out;
}

GradDecomposition grad_decomposition(const nn::Mlp& mlp, const Matrix& xs, const Matrix& targets,
                                     PointwiseLoss loss, std::optional<std::size_t> output_dim) {
    if (loss == PointwiseLoss::energy)
        throw std::invalid_argument("grad_decomposition: the energy loss is not pointwise");
    check_uniform(xs);
    const std::size_t samples = xs.rows;
    const std::size_t outs = mlp.output_dim();
    if (targets.rows != samples || targets.cols != outs)
        throw std::invalid_argument("grad_decomposition: target shape mismatch");
    if (output_dim && *output_dim >= outs) throw std::out_of_range("grad_decomposition: output dim out of range");

    GradDecomposition res;
    if (output_dim) {
        res.dims = {*output_dim};
    } else {
        for (std::size_t j = 0; j < outs; ++j) res.dims.push_back(j);
    }

    const auto fwd = nn::forward(mlp, xs);
    const auto lv = loss == PointwiseLoss::mse ? loss::mse_loss(fwd.outputs.data, targets.data)
                                               : loss::cross_entropy_loss(fwd.outputs, targets);
    Matrix g(samples, outs);
    for (std::size_t s = 0; s < samples; ++s)
        for (std::size_t j : res.dims) g(s, j) = lv.grad[s * outs + j];
    res.direct_grad = nn::backprop(mlp, fwd.cache, g).flatten();
    const std::size_t params = res.direct_grad.size();

    // Per-sample output Jacobians dY_j(x_s)/dtheta.
    std::vector<std::vector<std::vector<double>>> jac(res.dims.size(), std::vector<std::vector<double>>(samples));
    for (std::size_t s = 0; s < samples; ++s) {
        Matrix x1(1, xs.cols);
        x1.data[0] = xs.data[s];
        const auto one = nn::forward(mlp, x1);
        for (std::size_t di = 0; di < res.dims.size(); ++di) {
            Matrix seed(1, outs);
            seed.data[res.dims[di]] = 1.0;
            jac[di][s] = nn::backprop(mlp, one.cache, seed).flatten();
        }
    }

    // p_k(x_s) = w^{-ks} / sqrt(N) with w = exp(-2 pi i / N); conj(p_k) = w^{ks} / sqrt(N).
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(samples));
    auto basis = [&](std::size_t k, std::size_t s) { return std::conj(kernels::unit_root(k * s, samples)) * inv_sqrt; };

    res.d_k.assign(res.dims.size(), std::vector<cplx>(samples));
    res.dc_dtheta.assign(res.dims.size(), std::vector<std::vector<cplx>>(samples, std::vector<cplx>(params)));
    res.l_k_terms.assign(samples, std::vector<cplx>(params, cplx{}));
    for (std::size_t di = 0; di < res.dims.size(); ++di) {
        const std::size_t j = res.dims[di];
        for (std::size_t k = 0; k < samples; ++k) {
            cplx d = 0.0;
            for (std::size_t s = 0; s < samples; ++s) d += g(s, j) * basis(k, s);
            res.d_k[di][k] = d;

            auto& dc = res.dc_dtheta[di][k];
            for (std::size_t s = 0; s < samples; ++s) {
                const cplx w = std::conj(basis(k, s));
                const auto& js = jac[di][s];
                for (std::size_t p = 0; p < params; ++p) dc[p] += w * js[p];
            }
            auto& term = res.l_k_terms[k];
            for (std::size_t p = 0; p < params; ++p) term[p] += dc[p] * d;
        }
    }
    return res;
}

}  // namespace freqprin::spectral

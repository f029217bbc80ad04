#include "freqprin/mnist.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "freqprin/kernels.hpp"
#include "freqprin/rng.hpp"

namespace freqprin::data {

namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
    return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
           (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

}  // namespace

Matrix parse_idx_images(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 16) throw ParseError("IDX images: truncated header");
    if (read_be32(bytes, 0) != kImageMagic) throw ParseError("IDX images: bad magic number");
    const std::uint64_t count = read_be32(bytes, 4);
    const std::uint64_t rows = read_be32(bytes, 8);
    const std::uint64_t cols = read_be32(bytes, 12);
    const std::uint64_t pixels = rows * cols;  // both < 2^32, cannot overflow
    if (pixels != 0 && count > std::numeric_limits<std::uint64_t>::max() / pixels)
        throw ParseError("IDX images: dimension overflow");
    const std::uint64_t payload = count * pixels;
    if (payload > std::numeric_limits<std::size_t>::max() / sizeof(double))
        throw ParseError("IDX images: dimension overflow");
    if (bytes.size() - 16 < payload) throw ParseError("IDX images: truncated payload");

    Matrix out(count, pixels);
    const auto* src = bytes.data() + 16;
    for (std::size_t i = 0; i < payload; ++i) out.data[i] = static_cast<double>(src[i]) / 255.0;
    return out;
}

std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8) throw ParseError("IDX labels: truncated header");
    if (read_be32(bytes, 0) != kLabelMagic) throw ParseError("IDX labels: bad magic number");
    const std::uint64_t count = read_be32(bytes, 4);
    if (bytes.size() - 8 < count) throw ParseError("IDX labels: truncated payload");
    std::vector<std::uint8_t> labels(bytes.begin() + 8, bytes.begin() + 8 + static_cast<std::ptrdiff_t>(count));
    for (auto l : labels)
        if (l > 9) throw ParseError("IDX labels: label " + std::to_string(l) + " out of range");
    return labels;
}

std::vector<std::uint8_t> read_file_maybe_gz(const std::string& path) {
    // gzread passes uncompressed files through unchanged.
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw IoError("cannot open " + path);
    std::vector<std::uint8_t> out;
    std::vector<std::uint8_t> buf(1 << 16);
    for (;;) {
        const int got = gzread(f, buf.data(), static_cast<unsigned>(buf.size()));
        if (got < 0) {
            gzclose(f);
            throw IoError("read error in " + path);
        }
        if (got == 0) break;
        out.insert(out.end(), buf.begin(), buf.begin() + got);
    }
    gzclose(f);
    return out;
}

Matrix ImageSet::onehot() const {
    Matrix m(labels.size(), 10);
    for (std::size_t i = 0; i < labels.size(); ++i) m(i, labels[i]) = 1.0;
    return m;
}

ImageSet ImageSet::head(std::size_t count) const {
    if (count == 0 || count >= size()) return *this;
    ImageSet out;
    out.pixels = Matrix(count, pixels.cols);
    std::copy_n(pixels.data.begin(), count * pixels.cols, out.pixels.data.begin());
    out.labels.assign(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(count));
    return out;
}

ImageSet load_mnist(const std::string& images_path, const std::string& labels_path) {
    ImageSet set;
    set.pixels = parse_idx_images(read_file_maybe_gz(images_path));
    set.labels = parse_idx_labels(read_file_maybe_gz(labels_path));
    if (set.pixels.rows != set.labels.size())
        throw ParseError("MNIST: image count " + std::to_string(set.pixels.rows) + " != label count " +
                         std::to_string(set.labels.size()));
    return set;
}

ImageSet synthetic_blobs(std::size_t count, std::uint64_t seed, std::size_t dim) {
    Rng rng(seed);
    std::vector<double> center_a(dim), center_b(dim);
    for (std::size_t c = 0; c < dim; ++c) {
        center_a[c] = rng.uniform(0.1, 0.4);
        center_b[c] = rng.uniform(0.6, 0.9);
    }
    ImageSet set;
    set.pixels = Matrix(count, dim);
    set.labels.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const bool in_b = (i % 2) == 1;
        const auto& mu = in_b ? center_b : center_a;
        for (std::size_t c = 0; c < dim; ++c)
            set.pixels(i, c) = std::clamp(rng.normal(mu[c], 0.05), 0.0, 1.0);
        set.labels[i] = in_b ? static_cast<std::uint8_t>(1 + (i / 2) % 9) : 0;
    }
    return set;
}

std::vector<double> mean_row(const Matrix& x) {
    if (x.rows == 0) throw std::invalid_argument("mean_row: empty matrix");
    std::vector<double> mean(x.cols, 0.0);
    kernels::active::column_sums(x, mean);
    for (double& m : mean) m /= static_cast<double>(x.rows);
    return mean;
}

Matrix center(const Matrix& x) {
    const auto mean = mean_row(x);
    Matrix out = x;
    for (std::size_t r = 0; r < out.rows; ++r) {
        auto row = out.row(r);
        for (std::size_t c = 0; c < out.cols; ++c) row[c] -= mean[c];
    }
    return out;
}

namespace {

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

EigenResult leading_eigenvector(const Matrix& x, double tol, std::size_t max_iters) {
    if (x.rows == 0 || x.cols == 0) throw std::invalid_argument("leading_eigenvector: empty matrix");
    const std::size_t d = x.cols;
    Rng rng(0x9e3779b97f4a7c15ULL);
    std::vector<double> v(d), w(d), scratch(x.rows);
    for (double& e : v) e = rng.normal();
    double nv = norm2(v);
    for (double& e : v) e /= nv;

    EigenResult res;
    for (std::size_t it = 1; it <= max_iters; ++it) {
        kernels::active::gram_matvec(x, v, scratch, w);
        double lambda = 0.0;
        for (std::size_t i = 0; i < d; ++i) lambda += v[i] * w[i];
        if (!(lambda > 0.0)) throw std::invalid_argument("leading_eigenvector: zero matrix");
        double r = 0.0;
        for (std::size_t i = 0; i < d; ++i) r += (w[i] - lambda * v[i]) * (w[i] - lambda * v[i]);
        res.eigenvalue = lambda;
        res.residual = std::sqrt(r) / lambda;
        res.iterations = it;
        if (res.residual <= tol) break;
        if (it == max_iters)
            throw std::runtime_error("leading_eigenvector: no convergence after " + std::to_string(max_iters) +
                                     " iterations (residual " + std::to_string(res.residual) + ")");
        nv = norm2(w);
        for (std::size_t i = 0; i < d; ++i) v[i] = w[i] / nv;
    }
    std::size_t big = 0;
    for (std::size_t i = 1; i < d; ++i)
        if (std::abs(v[i]) > std::abs(v[big])) big = i;
    if (v[big] < 0.0)
        for (double& e : v) e = -e;
    res.vector = std::move(v);
    return res;
}

std::vector<double> rescale_unit(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("rescale_unit: empty input");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double span = *hi_it - lo;
    if (!(span > 0.0)) throw std::invalid_argument("rescale_unit: all projections identical");
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - lo) / span;
    // The extreme samples land exactly on the endpoints.
    out[static_cast<std::size_t>(lo_it - values.begin())] = 0.0;
    out[static_cast<std::size_t>(hi_it - values.begin())] = 1.0;
    return out;
}

std::vector<double> project_rescale(const Matrix& x, std::span<const double> direction) {
    if (direction.size() != x.cols) throw std::invalid_argument("project_rescale: dimension mismatch");
    std::vector<double> proj(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r) {
        const auto row = x.row(r);
        double acc = 0.0;
        for (std::size_t c = 0; c < x.cols; ++c) acc += row[c] * direction[c];
        proj[r] = acc;
    }
    return rescale_unit(proj);
}

PcaProjection pca_project(const Matrix& pixels, double tol, std::size_t max_iters) {
    PcaProjection out;
    out.mean = mean_row(pixels);
    const Matrix centered = center(pixels);
    auto eig = leading_eigenvector(centered, tol, max_iters);
    out.direction = std::move(eig.vector);
    out.eigenvalue = eig.eigenvalue;
    out.coords = project_rescale(centered, out.direction);
    return out;
}

}  // namespace freqprin::data

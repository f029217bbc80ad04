#pragma once

// MNIST ingestion and the first-principal-direction projection used to get a
// scalar coordinate per image.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "freqprin/errors.hpp"
#include "freqprin/matrix.hpp"

namespace freqprin::data {

inline constexpr std::uint32_t kImageMagic = 0x00000803;
inline constexpr std::uint32_t kLabelMagic = 0x00000801;

/// Images as rows (count x rows*cols), pixel bytes divided by 255.
Matrix parse_idx_images(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes);

/// Reads a whole file, transparently inflating gzip. Throws IoError.
std::vector<std::uint8_t> read_file_maybe_gz(const std::string& path);

struct ImageSet {
    Matrix pixels;                      // one image per row
    std::vector<std::uint8_t> labels;   // 0..9

    std::size_t size() const { return labels.size(); }
    /// count x 10 one-hot rows.
    Matrix onehot() const;
    /// First `count` images (all if count is 0 or too large).
    ImageSet head(std::size_t count) const;
};

ImageSet load_mnist(const std::string& images_path, const std::string& labels_path);

/// Two well-separated Gaussian blobs in `dim` dimensions. Blob A carries
/// label 0; blob B cycles through labels 1..9, so the class-0 indicator is a
/// step function along the blob axis.
ImageSet synthetic_blobs(std::size_t count, std::uint64_t seed, std::size_t dim = 784);

/// Subtracts the mean image from every row.
Matrix center(const Matrix& x);
std::vector<double> mean_row(const Matrix& x);

struct EigenResult {
    std::vector<double> vector;  // unit norm, largest-magnitude entry positive
    double eigenvalue = 0.0;
    double residual = 0.0;       // ||C v - lambda v|| / lambda
    std::size_t iterations = 0;
};

/// Leading eigenvector of C = X^T X (X has one sample per row) by power
/// iteration, applying C as X^T (X v). Throws std::runtime_error (with the
/// achieved residual) when tol is not met within max_iters.
EigenResult leading_eigenvector(const Matrix& x, double tol = 1e-10, std::size_t max_iters = 10000);

/// x_k = (p^T row_k - min) / (max - min). Throws when all projections coincide.
std::vector<double> project_rescale(const Matrix& x, std::span<const double> direction);
/// The rescaling step alone.
std::vector<double> rescale_unit(std::span<const double> values);

struct PcaProjection {
    std::vector<double> direction;
    std::vector<double> mean;
    std::vector<double> coords;  // in [0, 1]
    double eigenvalue = 0.0;
};

PcaProjection pca_project(const Matrix& pixels, double tol = 1e-10, std::size_t max_iters = 10000);

}  // namespace freqprin::data

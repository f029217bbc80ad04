#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace freqprin::spectral {

using cplx = std::complex<double>;

/// coefficients[g] = sum_j value_j exp(-2 pi i x_j g), x_j in [0, 1].
/// For uniform samples x_j = j / N.
struct Spectrum {
    std::vector<cplx> coefficients;

    std::size_t size() const { return coefficients.size(); }
    double amplitude(std::size_t g) const { return std::abs(coefficients.at(g)); }
    std::vector<double> amplitudes() const;
};

/// Unnormalised forward DFT of length N.
Spectrum dft_uniform(std::span<const double> values);

/// Direct O(nK) evaluation at k = 0..K-1 for nodes in [0, 1].
Spectrum nufft_direct(std::span<const double> points, std::span<const double> values, std::size_t k_count);

struct PeakOptions {
    std::size_t max_count = 4;
    double min_rel_amplitude = 0.05;
};

/// Local maxima of |coefficient| on [0, K/2] above min_rel_amplitude times the
/// largest amplitude there; the max_count largest are returned in ascending
/// order. Index 0 is a peak when it exceeds index 1 (its mirror neighbour for
/// real signals).
std::vector<std::size_t> pick_peaks(const Spectrum& spectrum, const PeakOptions& opts = {});

enum class Denominator { target, model };
std::string to_string(Denominator d);
Denominator parse_denominator(const std::string& s);

/// |model - target| / |denominator| at index g; +inf when the denominator
/// amplitude is below 1e-14.
double rel_freq_diff(const Spectrum& model, const Spectrum& target, std::size_t g, Denominator denom);

struct TraceRow {
    std::size_t step = 0;
    std::size_t epoch = 0;
    double wall_ms = 0.0;
    double loss = 0.0;
    std::vector<double> df;  // aligned with FreqTrace::peaks
};

/// Per-recording-step relative frequency differences at selected peaks.
class FreqTrace {
public:
    FreqTrace() = default;
    explicit FreqTrace(std::vector<std::size_t> peaks) : peaks_(std::move(peaks)) {}

    const std::vector<std::size_t>& peaks() const { return peaks_; }
    const std::vector<TraceRow>& rows() const { return rows_; }
    bool empty() const { return rows_.empty(); }

    /// Appends a row; steps must strictly increase and every entry be >= 0.
    void append(TraceRow row);

    /// Column of df values for peak g. Throws std::out_of_range for unknown g.
    std::size_t column_of(std::size_t g) const;

    std::string csv_header() const;
    std::string to_csv() const;
    static FreqTrace from_csv(const std::string& text);

private:
    std::vector<std::size_t> peaks_;
    std::vector<TraceRow> rows_;
};

/// First recording step with df(g) <= tau, if any.
std::optional<std::size_t> step_to_threshold(const FreqTrace& trace, std::size_t g, double tau);

/// printf "%.17g": 17 significant digits, parses back to the same double.
std::string format_double(double v);

}  // namespace freqprin::spectral

#include "freqprin/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "freqprin/kernels.hpp"

namespace freqprin::spectral {

std::vector<double> Spectrum::amplitudes() const {
    std::vector<double> a(coefficients.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(coefficients[i]);
    return a;
}

Spectrum dft_uniform(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("dft_uniform: empty input");
    Spectrum s;
    s.coefficients.resize(values.size());
    kernels::active::dft_uniform(values, s.coefficients);
    return s;
}

Spectrum nufft_direct(std::span<const double> points, std::span<const double> values, std::size_t k_count) {
    if (points.size() != values.size()) throw std::invalid_argument("nufft_direct: size mismatch");
    if (k_count == 0) throw std::invalid_argument("nufft_direct: K must be >= 1");
    constexpr double kTol = 1e-9;
    for (double x : points)
        if (!(x >= -kTol && x <= 1.0 + kTol))
            throw std::invalid_argument("nufft_direct: node outside [0,1]: " + format_double(x));
    Spectrum s;
    s.coefficients.resize(k_count);
    kernels::active::nufft(points, values, s.coefficients);
    return s;
}

std::vector<std::size_t> pick_peaks(const Spectrum& spectrum, const PeakOptions& opts) {
    if (spectrum.size() == 0) throw std::invalid_argument("pick_peaks: empty spectrum");
    const auto amp = spectrum.amplitudes();
    const std::size_t last = spectrum.size() / 2;
    const double top = *std::max_element(amp.begin(), amp.begin() + static_cast<std::ptrdiff_t>(last) + 1);

    std::vector<std::size_t> found;
    for (std::size_t g = 0; g <= last; ++g) {
        bool peak;
        if (g == 0) {
            peak = amp.size() == 1 || amp[0] > amp[1];
        } else {
            peak = amp[g] > amp[g - 1] && (g + 1 >= amp.size() || amp[g] >= amp[g + 1]);
        }
        if (peak && amp[g] >= opts.min_rel_amplitude * top && amp[g] > 0.0) found.push_back(g);
    }
    std::stable_sort(found.begin(), found.end(), [&](std::size_t a, std::size_t b) { return amp[a] > amp[b]; });
    if (found.size() > opts.max_count) found.resize(opts.max_count);
    std::sort(found.begin(), found.end());
    return found;
}

std::string to_string(Denominator d) { return d == Denominator::target ? "target" : "model"; }

Denominator parse_denominator(const std::string& s) {
    if (s == "target") return Denominator::target;
    if (s == "model") return Denominator::model;
    throw std::invalid_argument("unknown denominator '" + s + "'");
}

double rel_freq_diff(const Spectrum& model, const Spectrum& target, std::size_t g, Denominator denom) {
    if (g >= model.size() || g >= target.size()) throw std::out_of_range("rel_freq_diff: index out of range");
    const double num = std::abs(model.coefficients[g] - target.coefficients[g]);
    const double den = denom == Denominator::target ? target.amplitude(g) : model.amplitude(g);
    if (den < 1e-14) return std::numeric_limits<double>::infinity();
    return num / den;
}

// ---------------------------------------------------------------- FreqTrace

void FreqTrace::append(TraceRow row) {
    if (row.df.size() != peaks_.size()) throw std::invalid_argument("FreqTrace: row width mismatch");
    if (!rows_.empty() && row.step <= rows_.back().step)
        throw std::invalid_argument("FreqTrace: recording steps must strictly increase");
    for (double d : row.df)
        if (!(d >= 0.0)) throw std::invalid_argument("FreqTrace: relative difference must be >= 0");
    rows_.push_back(std::move(row));
}

std::size_t FreqTrace::column_of(std::size_t g) const {
    const auto it = std::find(peaks_.begin(), peaks_.end(), g);
    if (it == peaks_.end()) throw std::out_of_range("FreqTrace: frequency index " + std::to_string(g) + " not tracked");
    return static_cast<std::size_t>(it - peaks_.begin());
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string FreqTrace::csv_header() const {
    std::string h = "step,epoch,wall_ms,loss";
    for (std::size_t g : peaks_) h += ",df_" + std::to_string(g);
    return h;
}

std::string FreqTrace::to_csv() const {
    std::string out = csv_header() + "\n";
    for (const auto& r : rows_) {
        out += std::to_string(r.step) + "," + std::to_string(r.epoch) + "," + format_double(r.wall_ms) + "," +
               format_double(r.loss);
        for (double d : r.df) out += "," + format_double(d);
        out += "\n";
    }
    return out;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    if (!line.empty() && line.back() == sep) parts.emplace_back();
    return parts;
}

double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw std::invalid_argument("FreqTrace CSV: bad number '" + s + "'");
    return v;
}

}  // namespace

FreqTrace FreqTrace::from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("FreqTrace CSV: missing header");
    const auto head = split(line, ',');
    if (head.size() < 4 || head[0] != "step" || head[1] != "epoch" || head[2] != "wall_ms" || head[3] != "loss")
        throw std::invalid_argument("FreqTrace CSV: unexpected header");
    std::vector<std::size_t> peaks;
    for (std::size_t i = 4; i < head.size(); ++i) {
        if (head[i].rfind("df_", 0) != 0) throw std::invalid_argument("FreqTrace CSV: bad column " + head[i]);
        peaks.push_back(std::stoull(head[i].substr(3)));
    }
    FreqTrace trace(std::move(peaks));
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != head.size()) throw std::invalid_argument("FreqTrace CSV: ragged row");
        TraceRow row{std::stoull(f[0]), std::stoull(f[1]), parse_double(f[2]), parse_double(f[3]), {}};
        for (std::size_t i = 4; i < f.size(); ++i) row.df.push_back(parse_double(f[i]));
        trace.append(std::move(row));
    }
    return trace;
}

std::optional<std::size_t> step_to_threshold(const FreqTrace& trace, std::size_t g, double tau) {
    const std::size_t col = trace.column_of(g);
    for (const auto& r : trace.rows())
        if (r.df[col] <= tau) return r.step;
    return std::nullopt;
}

}  // namespace freqprin::spectral

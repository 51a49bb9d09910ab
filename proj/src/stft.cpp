#include "isosparse/stft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace isosparse {

double TfGrid::norm() const {
    double e = 0;
    for (const Complex &c : coefficients)
        e += std::norm(c);
    return std::sqrt(e);
}

namespace {

std::vector<double> parseval_window(std::size_t length, std::size_t hop) {
    std::vector<double> w(length);
    for (std::size_t n = 0; n < length; ++n)
        w[n] = std::sqrt(0.5 - 0.5 * std::cos(2 * std::numbers::pi * static_cast<double>(n) / length));
    std::vector<double> overlap(hop, 0.0);
    for (std::size_t n = 0; n < length; ++n)
        overlap[n % hop] += w[n] * w[n];
    const double level = overlap[0];
    for (double v : overlap) {
        if (std::abs(v - level) > 1e-12 * level)
            throw std::invalid_argument("StftFrame: window and hop do not give a constant overlap-add");
    }
    const double scale = 1 / std::sqrt(level);
    for (double &v : w)
        v *= scale;
    return w;
}

} // namespace

StftFrame::StftFrame(std::size_t signal_length, std::size_t window_length, std::size_t hop)
    : signal_length_{signal_length}, hop_{hop}, fft_{window_length == 0 ? 1 : window_length} {
    if (window_length < 2 || hop == 0 || hop > window_length)
        throw std::invalid_argument("StftFrame: need window >= 2 and 0 < hop <= window");
    if (signal_length < window_length || signal_length % hop != 0)
        throw std::invalid_argument("StftFrame: signal length " + std::to_string(signal_length) +
                                    " must be a multiple of the hop and at least one window");
    window_ = parseval_window(window_length, hop);
}

void StftFrame::analyze_into(std::span<const double> x, std::span<Complex> c) const {
    if (x.size() != signal_length_)
        throw std::invalid_argument("StftFrame::analyze: signal length mismatch");
    if (c.size() != coefficient_count())
        throw std::invalid_argument("StftFrame::analyze: coefficient buffer size mismatch");
    const std::size_t W = window_length();
    const std::size_t B = bins();
    const std::size_t M = frames();
    const double norm = 1 / std::sqrt(static_cast<double>(W));
    const double mid = std::numbers::sqrt2 * norm;
    std::vector<double> seg(W);
    std::vector<Complex> spec(B);
    for (std::size_t m = 0; m < M; ++m) {
        const std::size_t start = m * hop_;
        for (std::size_t n = 0; n < W; ++n)
            seg[n] = window_[n] * x[(start + n) % signal_length_];
        fft_.forward(seg, spec);
        for (std::size_t k = 0; k < B; ++k) {
            const bool edge = k == 0 || (W % 2 == 0 && k == B - 1);
            c[k * M + m] = spec[k] * (edge ? norm : mid);
        }
    }
}

void StftFrame::synthesize_into(std::span<const Complex> c, std::span<double> x) const {
    if (c.size() != coefficient_count())
        throw std::invalid_argument("StftFrame::synthesize: coefficient buffer size mismatch");
    if (x.size() != signal_length_)
        throw std::invalid_argument("StftFrame::synthesize: signal length mismatch");
    const std::size_t W = window_length();
    const std::size_t B = bins();
    const std::size_t M = frames();
    const double norm = 1 / std::sqrt(static_cast<double>(W));
    std::vector<double> seg(W);
    std::vector<Complex> spec(B);
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t m = 0; m < M; ++m) {
        for (std::size_t k = 0; k < B; ++k) {
            const bool edge = k == 0 || (W % 2 == 0 && k == B - 1);
            // The inverse real FFT doubles interior bins; the analysis weight is sqrt(2).
            spec[k] = edge ? c[k * M + m] : c[k * M + m] / std::numbers::sqrt2;
        }
        fft_.inverse(spec, seg);
        const std::size_t start = m * hop_;
        for (std::size_t n = 0; n < W; ++n)
            x[(start + n) % signal_length_] += window_[n] * norm * seg[n];
    }
}

TfGrid StftFrame::analyze(std::span<const double> x) const {
    TfGrid grid(bins(), frames());
    analyze_into(x, grid.coefficients);
    return grid;
}

std::vector<double> StftFrame::synthesize(const TfGrid &c) const {
    if (c.bins != bins() || c.frames != frames())
        throw std::invalid_argument("StftFrame::synthesize: grid dimensions do not match the frame");
    std::vector<double> x(signal_length_);
    synthesize_into(c.coefficients, x);
    return x;
}

TfGrid StftFrame::project_range(const TfGrid &c) const {
    return analyze(synthesize(c));
}

GroupLayout tf_group_layout(std::size_t bins, std::size_t frames, std::size_t width_freq, std::size_t length_time) {
    if (width_freq == 0 || length_time == 0)
        throw std::invalid_argument("tf_group_layout: tile dimensions must be positive");
    if (bins == 0 || frames == 0)
        throw std::invalid_argument("tf_group_layout: empty grid");
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t t0 = 0; t0 < frames; t0 += length_time) {
        const std::size_t t1 = std::min(frames, t0 + length_time);
        for (std::size_t f0 = 0; f0 < bins; f0 += width_freq) {
            const std::size_t f1 = std::min(bins, f0 + width_freq);
            std::vector<std::size_t> g;
            g.reserve((f1 - f0) * (t1 - t0));
            for (std::size_t f = f0; f < f1; ++f)
                for (std::size_t t = t0; t < t1; ++t)
                    g.push_back(f * frames + t);
            groups.push_back(std::move(g));
        }
    }
    return GroupLayout(bins * frames, groups);
}

GroupLayout tf_group_layout(const StftFrame &frame, std::size_t width_freq, std::size_t length_time) {
    return tf_group_layout(frame.bins(), frame.frames(), width_freq, length_time);
}

SuperGroupLayout tf_supergroup_layout(std::size_t bins, std::size_t frames, std::size_t width_freq,
                                      std::size_t length_time, std::size_t stack) {
    if (stack == 0)
        throw std::invalid_argument("tf_supergroup_layout: stack must be positive");
    GroupLayout base = tf_group_layout(bins, frames, width_freq, length_time);
    const std::size_t freq_tiles = (bins + width_freq - 1) / width_freq;
    const std::size_t time_tiles = (frames + length_time - 1) / length_time;
    std::vector<std::size_t> runs;
    for (std::size_t t = 0; t < time_tiles; ++t)
        for (std::size_t f = 0; f < freq_tiles; f += stack)
            runs.push_back(std::min(stack, freq_tiles - f));
    return SuperGroupLayout(std::move(base), std::move(runs));
}

SuperGroupLayout tf_supergroup_layout(const StftFrame &frame, std::size_t width_freq, std::size_t length_time,
                                      std::size_t stack) {
    return tf_supergroup_layout(frame.bins(), frame.frames(), width_freq, length_time, stack);
}

} // namespace isosparse

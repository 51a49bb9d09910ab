#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "isosparse/fft.hpp"
#include "isosparse/types.hpp"

namespace isosparse {

/// Nonnegative-frequency STFT coefficients, stored frequency-major:
/// coefficient (bin, frame) lives at bin * frames + frame.
struct TfGrid {
    std::size_t bins = 0;
    std::size_t frames = 0;
    std::vector<Complex> coefficients;

    TfGrid() = default;
    TfGrid(std::size_t bins, std::size_t frames) : bins{bins}, frames{frames}, coefficients(bins * frames) {}

    Complex &at(std::size_t bin, std::size_t frame) { return coefficients[bin * frames + frame]; }
    const Complex &at(std::size_t bin, std::size_t frame) const { return coefficients[bin * frames + frame]; }
    double norm() const;
};

/// Parseval STFT frame on signals of a fixed length with periodic extension.
///
/// The window is a square-root periodic Hann window scaled so that its squared
/// overlap-add equals one, and the one-sided spectra are weighted so that
/// ||S x|| = ||x|| and S* S = I exactly. Frames start at multiples of the hop;
/// the signal length must be a multiple of the hop and at least one window.
class StftFrame {
public:
    explicit StftFrame(std::size_t signal_length, std::size_t window_length = 960, std::size_t hop = 240);

    std::size_t signal_length() const { return signal_length_; }
    std::size_t window_length() const { return window_.size(); }
    std::size_t hop() const { return hop_; }
    std::size_t fft_size() const { return fft_.size(); }
    std::size_t bins() const { return fft_.bins(); }
    std::size_t frames() const { return signal_length_ / hop_; }
    std::size_t coefficient_count() const { return bins() * frames(); }
    std::span<const double> window() const { return window_; }

    TfGrid analyze(std::span<const double> x) const;
    std::vector<double> synthesize(const TfGrid &c) const;
    /// S S* c: orthogonal projection onto the range of the analysis operator.
    TfGrid project_range(const TfGrid &c) const;

    /// Flat-buffer forms used by the solvers (layout as in TfGrid).
    void analyze_into(std::span<const double> x, std::span<Complex> c) const;
    void synthesize_into(std::span<const Complex> c, std::span<double> x) const;

private:
    std::size_t signal_length_;
    std::size_t hop_;
    std::vector<double> window_;
    RealFft fft_;
};

/// Rectangular tiles of `width_freq` bins by `length_time` frames; tiles at the
/// upper edges may be partial. Groups are ordered by time tile, then by
/// frequency tile, and list their members frequency-major.
GroupLayout tf_group_layout(std::size_t bins, std::size_t frames, std::size_t width_freq, std::size_t length_time);
GroupLayout tf_group_layout(const StftFrame &frame, std::size_t width_freq, std::size_t length_time);

/// The tiles of tf_group_layout stacked `stack` at a time along the frequency
/// axis (within one time tile) into super-groups.
SuperGroupLayout tf_supergroup_layout(std::size_t bins, std::size_t frames, std::size_t width_freq,
                                      std::size_t length_time, std::size_t stack);
SuperGroupLayout tf_supergroup_layout(const StftFrame &frame, std::size_t width_freq, std::size_t length_time,
                                      std::size_t stack);

} // namespace isosparse

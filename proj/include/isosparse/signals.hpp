#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace isosparse {

/// Seed for an independent stream, derived from a master seed, a stream tag
/// and an index by splitmix64 mixing.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

struct ReflectivityConfig {
    std::size_t length = 512;
    double spike_prob = 0.1;
    /// A spike can only occur if none occurred in this many preceding samples.
    std::size_t refractory = 10;
    std::uint64_t seed = 42;
};

/// Markov spike train with N(0, 1) amplitudes.
std::vector<double> gen_reflectivity(const ReflectivityConfig &cfg);

/// Ricker wavelet (1 - 2 pi^2 f^2 t^2) exp(-pi^2 f^2 t^2) sampled at fs on
/// |t| <= duration / 2, with tails below 1e-4 of the peak trimmed. Odd length,
/// peak 1 at the centre. Throws unless fs > 2 * peak_freq.
std::vector<double> gen_ricker(double fs = 300, double duration = 0.2, double peak_freq = 25);

enum class NoiseKind { white, pink };

struct NoisyObservation {
    std::vector<double> y;
    double sigma = 0; ///< standard deviation of the noise actually added
};

/// x plus Gaussian noise rescaled so that 10 log10(||x||^2 / ||w||^2) equals
/// snr_db for the realized noise. Pink noise is white noise with its spectrum
/// shaped by 1 / sqrt(f) (DC removed). snr_db >= 1e9 adds no noise.
/// Throws for a zero signal or non-finite snr_db.
NoisyObservation add_noise_at_snr(std::span<const double> x, double snr_db, NoiseKind kind, std::uint64_t seed);

/// Unit-variance (realized) noise of the given kind.
std::vector<double> unit_noise(std::size_t n, NoiseKind kind, std::uint64_t seed);

/// Returned by metrics_snr when the estimate is exact.
inline constexpr double exact_snr_db = 400.0;

/// 20 log10(||ref|| / ||ref - est||). Throws for a zero reference or length mismatch.
double metrics_snr(std::span<const double> reference, std::span<const double> estimate);

} // namespace isosparse

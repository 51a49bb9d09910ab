#include "isosparse/signals.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "isosparse/fft.hpp"

namespace isosparse {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double energy(std::span<const double> x) {
    double e = 0;
    for (double v : x)
        e += v * v;
    return e;
}

} // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
    return splitmix64(splitmix64(splitmix64(master) ^ stream) ^ index);
}

std::vector<double> gen_reflectivity(const ReflectivityConfig &cfg) {
    if (!(cfg.spike_prob > 0 && cfg.spike_prob < 1))
        throw std::invalid_argument("gen_reflectivity: spike probability must lie in (0, 1)");
    std::mt19937_64 rng(cfg.seed);
    std::bernoulli_distribution spike(cfg.spike_prob);
    std::normal_distribution<double> amplitude;
    std::vector<double> x(cfg.length, 0.0);
    std::size_t since_last = cfg.refractory; // samples since the last spike
    for (std::size_t i = 0; i < cfg.length; ++i) {
        if (since_last >= cfg.refractory && spike(rng)) {
            x[i] = amplitude(rng);
            since_last = 0;
        } else {
            ++since_last;
        }
    }
    return x;
}

std::vector<double> gen_ricker(double fs, double duration, double peak_freq) {
    if (!(peak_freq > 0 && fs > 2 * peak_freq))
        throw std::invalid_argument("gen_ricker: need fs > 2 * peak_freq > 0");
    if (!(duration > 0))
        throw std::invalid_argument("gen_ricker: duration must be positive");
    auto r = [peak_freq](double t) {
        const double a = std::numbers::pi * std::numbers::pi * peak_freq * peak_freq * t * t;
        return (1 - 2 * a) * std::exp(-a);
    };
    auto half = static_cast<std::ptrdiff_t>(std::floor(duration / 2 * fs));
    while (half > 0 && std::abs(r(half / fs)) < 1e-4)
        --half;
    std::vector<double> w;
    for (std::ptrdiff_t i = -half; i <= half; ++i)
        w.push_back(r(i / fs));
    return w;
}

std::vector<double> unit_noise(std::size_t n, NoiseKind kind, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<double> w(n);
    for (double &v : w)
        v = g(rng);
    if (kind == NoiseKind::pink && n > 1) {
        RealFft fft(n);
        std::vector<Complex> spec(fft.bins());
        fft.forward(w, spec);
        spec[0] = 0;
        for (std::size_t k = 1; k < spec.size(); ++k)
            spec[k] /= std::sqrt(static_cast<double>(k));
        fft.inverse(spec, w);
    }
    const double rms = std::sqrt(energy(w) / static_cast<double>(n));
    if (rms > 0)
        for (double &v : w)
            v /= rms;
    return w;
}

NoisyObservation add_noise_at_snr(std::span<const double> x, double snr_db, NoiseKind kind, std::uint64_t seed) {
    if (!std::isfinite(snr_db))
        throw std::invalid_argument("add_noise_at_snr: SNR must be finite");
    const double ex = energy(x);
    if (ex == 0)
        throw std::invalid_argument("add_noise_at_snr: zero signal");
    NoisyObservation out;
    out.y.assign(x.begin(), x.end());
    if (snr_db >= 1e9)
        return out;
    const auto w = unit_noise(x.size(), kind, seed);
    const double ew = energy(w);
    const double scale = std::sqrt(ex / (ew * std::pow(10.0, snr_db / 10)));
    for (std::size_t i = 0; i < x.size(); ++i)
        out.y[i] += scale * w[i];
    out.sigma = scale * std::sqrt(ew / static_cast<double>(x.size()));
    return out;
}

double metrics_snr(std::span<const double> reference, std::span<const double> estimate) {
    if (reference.size() != estimate.size())
        throw std::invalid_argument("metrics_snr: length mismatch");
    const double er = energy(reference);
    if (er == 0)
        throw std::invalid_argument("metrics_snr: zero reference");
    double ee = 0;
    for (std::size_t i = 0; i < reference.size(); ++i)
        ee += (reference[i] - estimate[i]) * (reference[i] - estimate[i]);
    if (ee == 0)
        return exact_snr_db;
    return std::min(exact_snr_db, 10 * std::log10(er / ee));
}

} // namespace isosparse

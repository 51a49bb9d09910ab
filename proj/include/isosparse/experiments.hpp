#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "isosparse/signals.hpp"
#include "isosparse/solvers.hpp"

namespace isosparse {

// ---------------------------------------------------------------------------
// Result records
// ---------------------------------------------------------------------------

using Cell = std::variant<std::string, long long, double>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// Raw per-trial rows plus aggregates, with enough metadata to rerun.
struct ExperimentResult {
    std::string experiment;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> config;
    Table rows;
    Table summary;
};

/// Mean and (population) standard deviation.
std::pair<double, double> mean_std(std::span<const double> v);

/// Candidate value -> score to maximize.
using Objective1d = std::function<double(double)>;

struct LogSweep {
    std::vector<std::pair<double, double>> evaluated; ///< (value, score), ascending value
    double best_value = 0;
    double best_score = 0;
};

/// Evaluates `points` log-spaced values on [lo, hi]. While the best value is an
/// end point, the window is shifted by its own width in that direction (at
/// most `max_widenings` times) so the reported optimum is interior.
LogSweep log_sweep(double lo, double hi, std::size_t points, const Objective1d &score, std::size_t max_widenings = 6);

// ---------------------------------------------------------------------------
// Threshold sweeps on short noisy sparse vectors
// ---------------------------------------------------------------------------

/// lambda * gamma values 0.05, 0.10, ..., 0.95.
std::vector<double> default_product_grid();

struct SweepConfig {
    std::size_t n = 10;
    std::size_t K = 1;
    double input_snr_db = 5;
    /// lambda = lambda_factor * sigma, sigma the realized noise standard deviation.
    double lambda_factor = 0.5;
    std::vector<double> lambda_gamma_grid = default_product_grid();
    std::size_t trials = 1000;
    std::uint64_t seed = 42;
};

struct SweepCurve {
    std::vector<double> grid;
    std::vector<double> mean_gain; ///< dB
    std::vector<double> std_gain;
    std::size_t argmax = 0; ///< first grid point within rounding of the best mean gain
    double best_product() const { return grid[argmax]; }
    double peak() const { return mean_gain[argmax]; }
};

struct SweepOutcome {
    SweepCurve curve;
    ExperimentResult record;
};

/// Each trial draws K N(0, 1) nonzeros at distinct uniform positions, adds
/// white noise at the input SNR and records the SNR gain of the threshold at
/// every lambda * gamma on the grid. Throws if K > n or the grid leaves (0, 1).
SweepOutcome run_threshold_sweep(const SweepConfig &cfg);

struct ScaleSweepOutcome {
    std::vector<double> sigma_grid;
    std::vector<SweepCurve> curves; ///< one per sigma
    ExperimentResult record;
    /// Largest minus smallest argmax index across sigma.
    std::size_t argmax_drift() const;
};

/// The sweep repeated with the noise standard deviation fixed at each sigma
/// and the signal rescaled to keep the input SNR. Each sigma uses its own
/// random streams.
ScaleSweepOutcome run_scale_invariance_sweep(const SweepConfig &cfg, std::span<const double> sigma_grid);

// ---------------------------------------------------------------------------
// Time-frequency denoising
// ---------------------------------------------------------------------------

struct SceneConfig {
    double fs = 16000;
    std::size_t length = 32160; ///< a multiple of the 240-sample hop
    double fundamental = 220;
    std::size_t harmonics = 8;
    double decay = 0.8;
    /// Active intervals in seconds; silence elsewhere.
    std::vector<std::pair<double, double>> events{{0.25, 0.85}, {1.15, 1.75}};
    double ramp = 0.02; ///< raised-cosine onset/offset, seconds
};

/// Harmonic tone bursts; sample-level activity mask in `active`.
struct Scene {
    std::vector<double> signal;
    std::vector<bool> active;
};
Scene gen_tonal_scene(const SceneConfig &cfg);

struct DenoiseConfig {
    SceneConfig scene;
    std::size_t window = 960;
    std::size_t hop = 240;
    double input_snr_db = 5;
    NoiseKind noise = NoiseKind::pink;
    std::size_t lambda_points = 15;
    /// lambda * gamma candidates for the weakly convex penalties.
    std::vector<double> product_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99};
    double dr_alpha = 1.0;
    SolverOptions solver{300, 1e-4, false};
    std::uint64_t seed = 42;
};

struct DenoiseMethod {
    std::string name;
    double lambda = 0;
    double gamma = 0;
    double output_snr_db = 0;
    /// Nonzero threshold outputs in frames that overlap no active sample.
    std::size_t silent_nonzeros = 0;
    std::size_t iterations = 0;
};

struct DenoiseOutcome {
    double input_snr_db = 0;
    std::vector<DenoiseMethod> methods; ///< l1, elasso, l21, proposed, hybrid
    ExperimentResult record;
    const DenoiseMethod &method(const std::string &name) const;
};

/// Runs the analysis-prior denoiser with each penalty on the noisy scene and
/// tunes its weights for output SNR: lambda by log sweep for l1, E-Lasso and
/// l21; gamma (via lambda * gamma) for the pairwise penalties with lambda set to
/// half the l1 (proposed) or l21 (hybrid) choice.
DenoiseOutcome run_denoise_experiment(const DenoiseConfig &cfg);

// ---------------------------------------------------------------------------
// Sparse deconvolution
// ---------------------------------------------------------------------------

struct DeconvConfig {
    std::vector<double> snr_db{5, 10, 15, 20};
    std::size_t trials = 100;
    /// Trials used to pick lambda; the chosen lambda is then scored on all trials.
    std::size_t tuning_trials = 20;
    ReflectivityConfig reflectivity;
    /// Draw a new reflectivity for every trial instead of only new noise.
    bool redraw_reflectivity = false;
    double fs = 300;
    double peak_freq = 25;
    BoundaryMode boundary = BoundaryMode::zero_padded;
    std::size_t group = 8;
    double beta = 0.95;
    double p = -0.5;
    double lambda_gamma = 0.9;
    double step_fraction = 0.99;
    std::size_t lambda_points = 15;
    std::vector<std::string> methods{"proposed", "sgl", "ips"};
    SolverOptions solver{5000, 1e-8, false};
    std::uint64_t seed = 42;
};

struct DeconvStats {
    std::string method;
    double snr_db = 0;
    /// lambda = lambda_factor * sigma, sigma the realized noise standard deviation.
    double lambda_factor = 0;
    double mean_srer = 0;
    double std_srer = 0;
    std::vector<double> srer;
};

struct DeconvOutcome {
    std::vector<DeconvStats> stats;
    ExperimentResult record;
    const DeconvStats &find(const std::string &method, double snr_db) const;
};

/// Reflectivity convolved with a Ricker wavelet plus white noise, recovered
/// by forward-backward splitting with each method at 0.99 of the safe step.
DeconvOutcome run_deconv_experiment(const DeconvConfig &cfg);

} // namespace isosparse

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "isosparse/penalties.hpp"
#include "isosparse/stft.hpp"

namespace isosparse {

enum class BoundaryMode {
    circular,   ///< periodic signal extension
    zero_padded ///< linear convolution cropped to the input length ("same")
};

/// Convolution with a kernel centred at index (K - 1) / 2, mapping signals of
/// a fixed length to signals of the same length. The adjoint is correlation.
class ConvolutionOperator {
public:
    ConvolutionOperator(std::vector<double> kernel, std::size_t signal_length,
                        BoundaryMode mode = BoundaryMode::circular);

    std::span<const double> kernel() const { return kernel_; }
    std::size_t signal_length() const { return n_; }
    BoundaryMode mode() const { return mode_; }

    void apply(std::span<const double> x, std::span<double> y) const;
    void adjoint(std::span<const double> y, std::span<double> x) const;
    std::vector<double> apply(std::span<const double> x) const;
    std::vector<double> adjoint(std::span<const double> y) const;

private:
    std::vector<double> kernel_;
    std::size_t n_;
    BoundaryMode mode_;
};

/// Largest singular value of H by power iteration on H^T H from a seeded
/// random start. Requires iters >= 20; throws for an all-zero kernel.
double spectral_norm(const ConvolutionOperator &op, std::size_t iters = 20000, std::uint64_t seed = 1);

enum class SolverStatus { converged, max_iters };

struct SolverReport {
    std::size_t iterations = 0;
    std::vector<double> cost_trace;            ///< cost of each iterate, starting with the initial one
    std::vector<double> fixed_point_residuals; ///< relative change per iteration
    SolverStatus status = SolverStatus::max_iters;
};

struct SolverOptions {
    std::size_t max_iters = 5000;
    double tol = 1e-8;
    bool record_cost = true;
};

/// min_x 0.5 ||y - x||^2 + lambda P(S x) for a Parseval frame S.
struct DenoiseProblem {
    std::vector<double> observation;
    StftFrame frame;
    Penalty penalty;
    double dr_alpha = 1.0;
};

struct DenoiseResult {
    std::vector<double> signal;
    /// Final output of the penalty's threshold step (sparse frame coefficients).
    std::vector<Complex> coefficients;
    SolverReport report;
};

/// Douglas-Rachford splitting between the threshold of the penalty and the
/// projection onto the range of the frame, started from t = S y. Stops when
/// ||t_{k+1} - t_k|| / max(1, ||t_k||) < tol. Throws for a penalty whose
/// lambda * gamma exceeds 1 (the problem is then non-convex) or alpha <= 0.
DenoiseResult dr_denoise(const DenoiseProblem &problem, const SolverOptions &options = {});

/// 0.5 ||y - x||^2 + lambda P(S x) for the given signal.
double denoise_cost(const DenoiseProblem &problem, std::span<const double> x);

/// min_x 0.5 ||y - H x||^2 + lambda P(x), solved by forward-backward splitting.
class DeconvProblem {
public:
    /// `sigma` is the spectral norm of `op`; 0 computes it. Throws unless
    /// 0 < step < step_cap(sigma, penalty).
    DeconvProblem(std::vector<double> observation, ConvolutionOperator op, Penalty penalty, double step,
                  double sigma = 0);

    /// min(1 / sigma^2, 1 / (lambda gamma)); the second term only for weakly convex penalties.
    static double step_cap(double sigma, const Penalty &penalty);

    const std::vector<double> &observation() const { return y_; }
    const ConvolutionOperator &op() const { return op_; }
    const Penalty &penalty() const { return penalty_; }
    double step() const { return step_; }
    double sigma() const { return sigma_; }

    double cost(std::span<const double> x) const;

private:
    std::vector<double> y_;
    ConvolutionOperator op_;
    Penalty penalty_;
    double step_;
    double sigma_;
};

struct DeconvResult {
    std::vector<double> signal;
    SolverReport report;
};

/// x_{k+1} = prox_{step lambda P}(x_k - step H^T (H x_k - y)) from x_0 = 0,
/// until ||x_{k+1} - x_k|| <= tol ||x_{k+1}|| or max_iters.
DeconvResult fbs_deconvolve(const DeconvProblem &problem, const SolverOptions &options = {});

} // namespace isosparse

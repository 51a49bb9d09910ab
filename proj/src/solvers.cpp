#include "isosparse/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace isosparse {

namespace {

template <class T>
double norm2(std::span<const T> v) {
    double s = 0;
    for (const T &x : v)
        s += std::norm(x);
    return std::sqrt(s);
}

} // namespace

// ---------------------------------------------------------------------------

ConvolutionOperator::ConvolutionOperator(std::vector<double> kernel, std::size_t signal_length, BoundaryMode mode)
    : kernel_{std::move(kernel)}, n_{signal_length}, mode_{mode} {
    if (kernel_.empty() || n_ == 0)
        throw std::invalid_argument("ConvolutionOperator: empty kernel or signal");
    for (double v : kernel_)
        if (!std::isfinite(v))
            throw std::invalid_argument("ConvolutionOperator: non-finite kernel");
}

namespace {

// out[n] += h[j] * in[n + shift_j] with shift_j = sign * (c - j), wrapping or
// dropping out-of-range indices. Each tap is applied as contiguous runs.
void correlate_taps(std::span<const double> kernel, std::span<const double> in, std::span<double> out,
                    BoundaryMode mode, int sign) {
    const auto N = static_cast<std::ptrdiff_t>(in.size());
    const auto K = static_cast<std::ptrdiff_t>(kernel.size());
    const std::ptrdiff_t c = (K - 1) / 2;
    std::fill(out.begin(), out.end(), 0.0);
    for (std::ptrdiff_t j = 0; j < K; ++j) {
        const double h = kernel[j];
        std::ptrdiff_t shift = sign * (c - j);
        if (mode == BoundaryMode::circular) {
            shift = ((shift % N) + N) % N;
            for (std::ptrdiff_t n = 0; n < N - shift; ++n)
                out[n] += h * in[n + shift];
            for (std::ptrdiff_t n = N - shift; n < N; ++n)
                out[n] += h * in[n + shift - N];
        } else {
            const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -shift);
            const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(N, N - shift);
            for (std::ptrdiff_t n = lo; n < hi; ++n)
                out[n] += h * in[n + shift];
        }
    }
}

} // namespace

void ConvolutionOperator::apply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != n_ || y.size() != n_)
        throw std::invalid_argument("ConvolutionOperator::apply: length mismatch");
    correlate_taps(kernel_, x, y, mode_, +1);
}

void ConvolutionOperator::adjoint(std::span<const double> y, std::span<double> x) const {
    if (x.size() != n_ || y.size() != n_)
        throw std::invalid_argument("ConvolutionOperator::adjoint: length mismatch");
    correlate_taps(kernel_, y, x, mode_, -1);
}

std::vector<double> ConvolutionOperator::apply(std::span<const double> x) const {
    std::vector<double> y(n_);
    apply(x, y);
    return y;
}

std::vector<double> ConvolutionOperator::adjoint(std::span<const double> y) const {
    std::vector<double> x(n_);
    adjoint(y, x);
    return x;
}

double spectral_norm(const ConvolutionOperator &op, std::size_t iters, std::uint64_t seed) {
    if (iters < 20)
        throw std::invalid_argument("spectral_norm: at least 20 iterations are required");
    if (std::all_of(op.kernel().begin(), op.kernel().end(), [](double v) { return v == 0; }))
        throw std::invalid_argument("spectral_norm: zero kernel");
    const std::size_t n = op.signal_length();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<double> v(n), hv(n), w(n);
    for (double &x : v)
        x = g(rng);
    double estimate = 0;
    for (std::size_t it = 0; it < iters; ++it) {
        const double nv = norm2<double>(v);
        for (double &x : v)
            x /= nv;
        op.apply(v, hv);
        op.adjoint(hv, w);
        const double next = norm2<double>(hv);
        v.swap(w);
        if (it > 0 && std::abs(next - estimate) <= 1e-13 * next) {
            estimate = next;
            break;
        }
        estimate = next;
    }
    return estimate;
}

// ---------------------------------------------------------------------------

double denoise_cost(const DenoiseProblem &problem, std::span<const double> x) {
    std::vector<Complex> c(problem.frame.coefficient_count());
    problem.frame.analyze_into(x, c);
    double data = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        data += (problem.observation[i] - x[i]) * (problem.observation[i] - x[i]);
    return 0.5 * data + penalty_cost<Complex>(problem.penalty, c);
}

DenoiseResult dr_denoise(const DenoiseProblem &problem, const SolverOptions &options) {
    const StftFrame &S = problem.frame;
    if (problem.observation.size() != S.signal_length())
        throw std::invalid_argument("dr_denoise: observation length does not match the frame");
    if (!(problem.dr_alpha > 0))
        throw std::invalid_argument("dr_denoise: alpha must be positive");
    if (weak_convexity(problem.penalty) > 1)
        throw std::invalid_argument("dr_denoise: lambda * gamma > 1 makes the denoising problem non-convex");

    const double alpha = problem.dr_alpha;
    const double beta = alpha / (alpha + 1);
    const std::size_t C = S.coefficient_count();
    const std::size_t N = S.signal_length();

    std::vector<Complex> sy(C), t(C), u(C), v(C), z(C);
    std::vector<double> x(N);
    S.analyze_into(problem.observation, sy);
    t = sy;

    DenoiseResult result;
    SolverReport &report = result.report;
    for (std::size_t k = 0; k < options.max_iters; ++k) {
        S.synthesize_into(t, x);
        S.analyze_into(x, u);
        if (options.record_cost) {
            double data = 0;
            for (std::size_t i = 0; i < N; ++i)
                data += (problem.observation[i] - x[i]) * (problem.observation[i] - x[i]);
            report.cost_trace.push_back(0.5 * data + penalty_cost<Complex>(problem.penalty, u));
        }
        for (std::size_t i = 0; i < C; ++i)
            v[i] = beta * (sy[i] + (2.0 * u[i] - t[i]) / alpha);
        apply_prox<Complex>(problem.penalty, v, z, beta);
        const double tnorm = norm2<Complex>(t);
        double change = 0;
        for (std::size_t i = 0; i < C; ++i) {
            const Complex d = z[i] - u[i];
            change += std::norm(d);
            t[i] += d;
        }
        const double residual = std::sqrt(change) / std::max(1.0, tnorm);
        report.fixed_point_residuals.push_back(residual);
        report.iterations = k + 1;
        if (residual < options.tol) {
            report.status = SolverStatus::converged;
            break;
        }
    }
    S.synthesize_into(t, x);
    result.signal = std::move(x);
    result.coefficients = std::move(z);
    return result;
}

// ---------------------------------------------------------------------------

double DeconvProblem::step_cap(double sigma, const Penalty &penalty) {
    if (!(sigma > 0))
        throw std::invalid_argument("DeconvProblem: spectral norm must be positive");
    double cap = 1 / (sigma * sigma);
    const double s = weak_convexity(penalty);
    if (s > 0)
        cap = std::min(cap, 1 / s);
    return cap;
}

DeconvProblem::DeconvProblem(std::vector<double> observation, ConvolutionOperator op, Penalty penalty, double step,
                             double sigma)
    : y_{std::move(observation)}, op_{std::move(op)}, penalty_{std::move(penalty)}, step_{step}, sigma_{sigma} {
    if (y_.size() != op_.signal_length())
        throw std::invalid_argument("DeconvProblem: observation length does not match the operator");
    if (sigma_ == 0)
        sigma_ = spectral_norm(op_);
    const double cap = step_cap(sigma_, penalty_);
    if (!(step_ > 0 && step_ < cap))
        throw std::invalid_argument("DeconvProblem: step must lie in (0, " + std::to_string(cap) + ")");
}

double DeconvProblem::cost(std::span<const double> x) const {
    const auto hx = op_.apply(x);
    double data = 0;
    for (std::size_t i = 0; i < hx.size(); ++i)
        data += (y_[i] - hx[i]) * (y_[i] - hx[i]);
    return 0.5 * data + penalty_cost<double>(penalty_, x);
}

DeconvResult fbs_deconvolve(const DeconvProblem &problem, const SolverOptions &options) {
    const std::size_t n = problem.observation().size();
    const double alpha = problem.step();
    std::vector<double> x(n, 0.0), hx(n), grad(n), v(n), next(n);
    DeconvResult result;
    SolverReport &report = result.report;
    if (options.record_cost)
        report.cost_trace.push_back(problem.cost(x));
    for (std::size_t k = 0; k < options.max_iters; ++k) {
        problem.op().apply(x, hx);
        for (std::size_t i = 0; i < n; ++i)
            hx[i] -= problem.observation()[i];
        problem.op().adjoint(hx, grad);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = x[i] - alpha * grad[i];
        apply_prox<double>(problem.penalty(), v, next, alpha);
        double change = 0;
        for (std::size_t i = 0; i < n; ++i)
            change += (next[i] - x[i]) * (next[i] - x[i]);
        change = std::sqrt(change);
        x.swap(next);
        const double xnorm = norm2<double>(x);
        const double residual = xnorm > 0 ? change / xnorm : change;
        report.fixed_point_residuals.push_back(residual);
        if (options.record_cost)
            report.cost_trace.push_back(problem.cost(x));
        report.iterations = k + 1;
        if (residual <= options.tol) {
            report.status = SolverStatus::converged;
            break;
        }
    }
    result.signal = std::move(x);
    return result;
}

} // namespace isosparse

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "isosparse/fft.hpp"
#include "isosparse/solvers.hpp"
#include "support.hpp"

using namespace isosparse;
using testing_support::max_abs_diff;

namespace {

std::vector<double> gaussian(std::mt19937_64 &rng, std::size_t n) {
    std::normal_distribution<double> g;
    std::vector<double> v(n);
    for (double &x : v)
        x = g(rng);
    return v;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

double max_dft_magnitude(std::span<const double> kernel, std::size_t n) {
    std::vector<double> padded(n, 0.0);
    std::copy(kernel.begin(), kernel.end(), padded.begin());
    RealFft fft(n);
    std::vector<Complex> spec(fft.bins());
    fft.forward(padded, spec);
    double m = 0;
    for (const Complex &c : spec)
        m = std::max(m, std::abs(c));
    return m;
}

std::vector<double> test_kernel() {
    std::vector<double> k;
    for (int i = -6; i <= 6; ++i) {
        const double a = std::numbers::pi * 0.15 * i;
        k.push_back((1 - 2 * a * a) * std::exp(-a * a));
    }
    return k;
}

} // namespace

TEST_CASE("convolution adjoint") {
    std::mt19937_64 rng(41);
    for (auto mode : {BoundaryMode::circular, BoundaryMode::zero_padded}) {
        for (std::size_t klen : {1, 2, 5, 13}) {
            const ConvolutionOperator H(gaussian(rng, klen), 64, mode);
            for (int t = 0; t < 5; ++t) {
                const auto x = gaussian(rng, 64);
                const auto y = gaussian(rng, 64);
                CHECK(std::abs(dot(H.apply(x), y) - dot(x, H.adjoint(y))) < 1e-8);
            }
        }
    }
}

TEST_CASE("convolution is centred") {
    const ConvolutionOperator H({1, 2, 3}, 8, BoundaryMode::zero_padded);
    std::vector<double> x(8, 0.0);
    x[4] = 1;
    CHECK(H.apply(x) == std::vector<double>{0, 0, 0, 1, 2, 3, 0, 0});
    const ConvolutionOperator C({1, 2, 3}, 4);
    CHECK(C.apply(std::vector<double>{1, 0, 0, 0}) == std::vector<double>{2, 3, 0, 1});
    CHECK_THROWS_AS(ConvolutionOperator({}, 4), std::invalid_argument);
}

TEST_CASE("spectral norm") {
    CHECK(spectral_norm(ConvolutionOperator({1.0}, 32)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(spectral_norm(ConvolutionOperator({2.0}, 32)) == doctest::Approx(2.0).epsilon(1e-12));
    const auto k = test_kernel();
    const double sigma = spectral_norm(ConvolutionOperator(k, 512));
    CHECK(std::abs(sigma - max_dft_magnitude(k, 512)) < 1e-4 * sigma);
    // The same-length linear convolution is a block of a longer circulant.
    CHECK(spectral_norm(ConvolutionOperator(k, 512, BoundaryMode::zero_padded)) <=
          max_dft_magnitude(k, 512 + k.size()) * (1 + 1e-9));
    CHECK_THROWS_AS(spectral_norm(ConvolutionOperator({0.0, 0.0}, 8)), std::invalid_argument);
    CHECK_THROWS_AS(spectral_norm(ConvolutionOperator({1.0}, 8), 10), std::invalid_argument);
}

TEST_CASE("fbs with identity operator is one prox step") {
    std::mt19937_64 rng(43);
    const auto y = gaussian(rng, 12);
    const auto layout = GroupLayout::contiguous(12, 4);
    const Penalty pen = PairwiseGroupPenalty{layout, 0.6, 0.5};
    // The identity has sigma = 1, so the step must stay below 1; take it in the limit.
    const double step = std::nextafter(1.0, 0.0);
    const DeconvProblem problem(y, ConvolutionOperator({1.0}, 12), pen, step);
    SolverOptions opt;
    opt.max_iters = 1;
    const auto r = fbs_deconvolve(problem, opt);
    std::vector<double> expected(12);
    apply_prox<double>(pen, y, expected, step);
    CHECK(max_abs_diff(r.signal, expected) < 1e-15);
    CHECK(r.report.iterations == 1);
}

TEST_CASE("fbs from zero observation stays at zero") {
    const DeconvProblem problem(std::vector<double>(64, 0.0), ConvolutionOperator(test_kernel(), 64),
                                L1Penalty{0.1}, 0.5 / std::pow(max_dft_magnitude(test_kernel(), 64), 2));
    const auto r = fbs_deconvolve(problem);
    CHECK(r.signal == std::vector<double>(64, 0.0));
    CHECK(r.report.status == SolverStatus::converged);
}

TEST_CASE("fbs step cap is enforced") {
    const ConvolutionOperator H({2.0}, 8);
    const Penalty pen = PairwiseGroupPenalty{GroupLayout::contiguous(8, 4), 1.0, 0.9};
    CHECK(DeconvProblem::step_cap(2.0, pen) == doctest::Approx(0.25));
    CHECK(DeconvProblem::step_cap(0.5, pen) == doctest::Approx(1 / 0.9));
    CHECK_THROWS_AS(DeconvProblem(std::vector<double>(8, 0.0), H, pen, 0.26), std::invalid_argument);
    CHECK_NOTHROW(DeconvProblem(std::vector<double>(8, 0.0), H, pen, 0.24));
    CHECK_THROWS_AS(DeconvProblem(std::vector<double>(7, 0.0), H, pen, 0.1), std::invalid_argument);
}

TEST_CASE("fbs cost decreases monotonically") {
    std::mt19937_64 rng(47);
    const auto kernel = test_kernel();
    for (int t = 0; t < 10; ++t) {
        const std::size_t n = 128;
        std::vector<double> x(n, 0.0);
        std::uniform_int_distribution<std::size_t> pos(0, n - 1);
        std::normal_distribution<double> g;
        for (int s = 0; s < 8; ++s)
            x[pos(rng)] = g(rng);
        const ConvolutionOperator H(kernel, n, t % 2 ? BoundaryMode::circular : BoundaryMode::zero_padded);
        auto y = H.apply(x);
        for (double &v : y)
            v += 0.05 * g(rng);
        const double lambda = 0.02 + 0.01 * t;
        const Penalty pen = PairwiseGroupPenalty{GroupLayout::contiguous(n, 8), lambda, 0.9 / lambda};
        const double sigma = spectral_norm(H);
        const DeconvProblem problem(y, H, pen, 0.99 * DeconvProblem::step_cap(sigma, pen), sigma);
        SolverOptions opt;
        opt.max_iters = 400;
        const auto r = fbs_deconvolve(problem, opt);
        for (std::size_t k = 1; k < r.report.cost_trace.size(); ++k)
            CHECK(r.report.cost_trace[k] <= r.report.cost_trace[k - 1] + 1e-9);
    }
}

TEST_CASE("douglas-rachford denoiser limits") {
    std::mt19937_64 rng(53);
    const StftFrame frame(64, 16, 4);
    const auto layout = tf_group_layout(frame, 3, 1);
    const auto y = gaussian(rng, 64);
    SUBCASE("vanishing penalty returns the observation") {
        const DenoiseProblem p{y, frame, PairwiseGroupPenalty{layout, 1e-12, 0.5}};
        const auto r = dr_denoise(p, {.max_iters = 2000, .tol = 1e-12});
        CHECK(max_abs_diff(r.signal, y) < 1e-6);
    }
    SUBCASE("huge penalty annihilates") {
        const DenoiseProblem p{y, frame, PairwiseGroupPenalty{layout, 1e3, 1e-4}};
        const auto r = dr_denoise(p, {.max_iters = 2000, .tol = 1e-12});
        CHECK(max_abs_diff(r.signal, std::vector<double>(64, 0.0)) < 1e-6);
    }
    SUBCASE("non-convex setting is rejected") {
        const DenoiseProblem p{y, frame, PairwiseGroupPenalty{layout, 1.0, 1.5}};
        CHECK_THROWS_AS(dr_denoise(p), std::invalid_argument);
    }
}

TEST_CASE("douglas-rachford reaches a minimizer") {
    std::mt19937_64 rng(59);
    const StftFrame frame(64, 16, 4);
    std::vector<Penalty> penalties{
        L1Penalty{0.3},
        PairwiseGroupPenalty{tf_group_layout(frame, 3, 1), 0.3, 0.999 / 0.3},
        GroupL21Penalty{tf_group_layout(frame, 1, 4), 0.4},
        ElitistLassoPenalty{tf_group_layout(frame, 3, 1), 0.05},
        HybridPairwisePenalty{tf_supergroup_layout(frame, 1, 4, 3), 0.2, 0.5 / 0.2},
    };
    std::uniform_real_distribution<double> unit(-1, 1);
    for (const auto &pen : penalties) {
        CAPTURE(penalty_name(pen));
        const auto y = gaussian(rng, 64);
        const DenoiseProblem p{y, frame, pen};
        const auto r = dr_denoise(p, {.max_iters = 20000, .tol = 1e-13});
        CHECK(r.report.status == SolverStatus::converged);
        const double base = denoise_cost(p, r.signal);
        for (int d = 0; d < 100; ++d) {
            std::vector<double> probe = r.signal;
            for (double &v : probe)
                v += 1e-4 * unit(rng);
            CHECK(denoise_cost(p, probe) >= base - 1e-7);
        }
        const auto &res = r.report.fixed_point_residuals;
        CHECK(res.back() < res.front());
    }
}

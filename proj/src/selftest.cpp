#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "isosparse/cli.hpp"
#include "isosparse/oracle.hpp"
#include "isosparse/signals.hpp"
#include "isosparse/solvers.hpp"
#include "isosparse/stft.hpp"
#include "isosparse/threshold.hpp"

namespace isosparse {

namespace {

struct Check {
    std::string name;
    bool pass = true;
    std::string detail;
};

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// The analytic threshold, optionally with a deliberately wrong threshold.
std::vector<double> analytic(std::span<const double> z, const ThresholdParams &params, Sabotage sabotage) {
    auto r = prox_single_group_linear(z, params);
    if (sabotage != Sabotage::h_offset || r.support == 0)
        return r.minimizer;
    const double h = r.threshold + 0.05;
    std::vector<double> x(z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
        x[i] = std::copysign(std::max(std::abs(z[i]) - h, 0.0), z[i]) / (1 - params.product());
    return x;
}

Check oracle_agreement(const SelftestOptions &o) {
    std::mt19937_64 rng(derive_seed(o.seed, 1, 0));
    std::uniform_int_distribution<std::size_t> size(1, 6);
    std::uniform_real_distribution<double> zd(-3, 3), lam(0.05, 2), prod(0.01, 0.99);
    double worst = 0;
    for (std::size_t t = 0; t < o.cases; ++t) {
        std::vector<double> z(size(rng));
        for (double &v : z)
            v = zd(rng);
        const double lambda = lam(rng), gamma = prod(rng) / lambda;
        const auto cost = oracle::prox_cost(
            z, [=](std::span<const double> x) { return lambda * oracle::pairwise_penalty_naive(x, gamma); });
        const auto ref = oracle::brute_force_prox(z, cost);
        worst = std::max(worst, max_abs_diff(ref.minimizer, analytic(z, ThresholdParams(lambda, gamma), o.sabotage)));
    }
    return {"oracle agreement", worst <= 1e-6, fmt::format("{} cases, max error {:.3g}", o.cases, worst)};
}

Check search_equivalence(const SelftestOptions &o) {
    std::mt19937_64 rng(derive_seed(o.seed, 2, 0));
    std::uniform_int_distribution<std::size_t> size(1, 64);
    std::uniform_real_distribution<double> zd(-3, 3), lam(0.05, 2), prod(0.01, 0.99);
    std::size_t mismatches = 0;
    for (std::size_t t = 0; t < o.cases; ++t) {
        std::vector<double> z(size(rng));
        for (double &v : z)
            v = zd(rng);
        const double lambda = lam(rng);
        const ThresholdParams params(lambda, prod(rng) / lambda);
        const auto a = prox_single_group_linear(z, params);
        const auto b = prox_single_group_binary(z, params);
        if (a.support != b.support || a.minimizer != b.minimizer)
            ++mismatches;
    }
    return {"linear and binary search agree", mismatches == 0, fmt::format("{} mismatches", mismatches)};
}

Check frame_parseval(const SelftestOptions &o) {
    const StftFrame frame(4800, 960, 240);
    std::mt19937_64 rng(derive_seed(o.seed, 3, 0));
    std::normal_distribution<double> g;
    double worst = 0;
    for (int t = 0; t < 3; ++t) {
        std::vector<double> x(frame.signal_length());
        for (double &v : x)
            v = g(rng);
        const auto c = frame.analyze(x);
        double ex = 0;
        for (double v : x)
            ex += v * v;
        worst = std::max(worst, std::abs(c.norm() * c.norm() - ex) / ex);
        worst = std::max(worst, max_abs_diff(frame.synthesize(c), x));
    }
    return {"frame parseval and reconstruction", worst < 1e-10, fmt::format("max residual {:.3g}", worst)};
}

Check solver_monotone(const SelftestOptions &o) {
    const ConvolutionOperator H(gen_ricker(), 128, BoundaryMode::zero_padded);
    const double sigma = spectral_norm(H);
    const auto layout = GroupLayout::contiguous(128, 8);
    double worst = -INFINITY;
    for (std::uint64_t t = 0; t < 3; ++t) {
        ReflectivityConfig rc;
        rc.length = 128;
        rc.seed = derive_seed(o.seed, 4, t);
        const auto x = gen_reflectivity(rc);
        const auto obs = add_noise_at_snr(H.apply(x), 10, NoiseKind::white, derive_seed(o.seed, 5, t));
        const double lambda = 2 * obs.sigma;
        const Penalty pen = PairwiseGroupPenalty{layout, lambda, 0.9 / lambda};
        const DeconvProblem problem(obs.y, H, pen, 0.99 * DeconvProblem::step_cap(sigma, pen), sigma);
        const auto r = fbs_deconvolve(problem, {300, 1e-10, true});
        for (std::size_t i = 1; i < r.report.cost_trace.size(); ++i)
            worst = std::max(worst, r.report.cost_trace[i] - r.report.cost_trace[i - 1]);
    }
    return {"forward-backward cost is monotone", worst <= 1e-9, fmt::format("largest increase {:.3g}", worst)};
}

} // namespace

int run_selftest(const SelftestOptions &options, std::ostream &out) {
    const std::vector<Check> checks{oracle_agreement(options), search_equivalence(options), frame_parseval(options),
                                    solver_monotone(options)};
    std::size_t failed = 0;
    for (const auto &c : checks) {
        out << fmt::format("{} {} ({})\n", c.pass ? "PASS" : "FAIL", c.name, c.detail);
        failed += !c.pass;
    }
    if (failed) {
        out << fmt::format("selftest: {} of {} checks failed\n", failed, checks.size());
        return exit_failure;
    }
    out << "selftest: all checks passed\n";
    return exit_ok;
}

} // namespace isosparse

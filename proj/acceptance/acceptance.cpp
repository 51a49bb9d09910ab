// Acceptance suite: one PASS/FAIL line per criterion. Exit status 0 iff every
// selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "isosparse/experiments.hpp"
#include "isosparse/oracle.hpp"
#include "isosparse/signals.hpp"
#include "isosparse/solvers.hpp"
#include "isosparse/stft.hpp"
#include "isosparse/threshold.hpp"

using namespace isosparse;

namespace {

// Pinned tolerances and budgets.
constexpr double kOracleTol = 1e-6;
constexpr double kClosedFormTol = 1e-12;
constexpr double kChainSlack = 1e-12; // relative, for strict inequalities between rounded thresholds
constexpr double kMonotoneTol = 1e-9;
constexpr double kFrameTol = 1e-10;
constexpr std::uint64_t kSeed = 42;

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    int id;
    std::string title;
    double budget_s; // 0: no runtime bound
    std::function<Outcome()> run;
};

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

std::vector<double> uniform(std::mt19937_64 &rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (double &x : v)
        x = d(rng);
    return v;
}

/// lambda * gamma uniform on (0, 0.99].
double draw_product(std::mt19937_64 &rng) { return 0.99 - std::uniform_real_distribution<double>(0, 0.99)(rng); }

/// Random group; every other instance is quantized to 1/8 steps to force ties.
std::vector<double> draw_group(std::mt19937_64 &rng, std::size_t n, std::size_t t) {
    auto z = uniform(rng, n, -3, 3);
    if (t % 2)
        for (double &v : z)
            v = std::round(v * 8) / 8;
    return z;
}

Outcome oracle_agreement() {
    std::mt19937_64 rng(derive_seed(kSeed, 1, 0));
    std::uniform_int_distribution<std::size_t> size(1, 6);
    std::uniform_real_distribution<double> lam(0.05, 2);
    double worst = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto z = uniform(rng, size(rng), -3, 3);
        const double lambda = lam(rng), gamma = draw_product(rng) / lambda;
        const ThresholdParams params(lambda, gamma);
        const auto cost = oracle::prox_cost(
            z, [=](std::span<const double> x) { return lambda * oracle::pairwise_penalty_naive(x, gamma); });
        const auto ref = oracle::brute_force_prox(z, cost).minimizer;
        worst = std::max(worst, max_abs_diff(ref, prox_single_group_linear(z, params).minimizer));
        worst = std::max(worst, max_abs_diff(ref, prox_single_group_binary(z, params).minimizer));
    }
    return {worst <= kOracleTol, fmt::format("1000 instances, max |analytic - oracle| = {:.3g}", worst)};
}

Outcome search_equivalence() {
    std::mt19937_64 rng(derive_seed(kSeed, 2, 0));
    std::uniform_int_distribution<std::size_t> size(1, 64);
    std::uniform_real_distribution<double> lam(0.05, 2);
    std::size_t mismatches = 0;
    for (std::size_t t = 0; t < 10000; ++t) {
        const auto z = draw_group(rng, size(rng), t);
        const double lambda = lam(rng);
        const ThresholdParams params(lambda, draw_product(rng) / lambda);
        const auto a = prox_single_group_linear(z, params);
        const auto b = prox_single_group_binary(z, params);
        if (a.support != b.support || a.minimizer != b.minimizer)
            ++mismatches;
    }
    return {mismatches == 0, fmt::format("10000 instances, {} mismatches in (k, x)", mismatches)};
}

Outcome property_suites() {
    std::mt19937_64 rng(derive_seed(kSeed, 3, 0));
    std::uniform_int_distribution<std::size_t> size(1, 24);
    std::uniform_real_distribution<double> lam(0.05, 2);
    std::size_t shrink = 0, order = 0, chain = 0, interval = 0;

    for (std::size_t t = 0; t < 10000; ++t) {
        const auto z = draw_group(rng, size(rng), t);
        const double lambda = lam(rng);
        const auto x = prox_single_group_linear(z, ThresholdParams(lambda, draw_product(rng) / lambda)).minimizer;
        bool ok_shrink = true, ok_order = true;
        for (std::size_t i = 0; i < z.size(); ++i) {
            ok_shrink &= z[i] >= 0 ? (z[i] >= x[i] && x[i] >= 0) : (z[i] <= x[i] && x[i] <= 0);
            for (std::size_t m = 0; m < z.size(); ++m) {
                if (std::abs(z[i]) > std::abs(z[m]))
                    ok_order &= std::abs(x[i]) >= std::abs(x[m]);
                if (std::abs(z[i]) == std::abs(z[m]))
                    ok_order &= std::abs(x[i]) == std::abs(x[m]);
            }
        }
        shrink += !ok_shrink;
        order += !ok_order;
    }

    for (std::size_t t = 0; t < 10000; ++t) {
        const auto z = draw_group(rng, size(rng), t);
        const double lambda = lam(rng);
        GroupThresholder th(ThresholdParams(lambda, draw_product(rng) / lambda));
        std::vector<double> out(z.size());
        const auto sup = th.apply<double>(z, out);
        const auto s = th.sorted();
        const std::size_t k = sup.support;
        const double slack = kChainSlack * std::max(1.0, s.empty() ? 0.0 : s[0]);
        bool ok = th.h(0) == lambda && sup.threshold == th.h(k);
        // s_1 >= ... >= s_k > h(k) >= ... >= h(0) = lambda, and s_{k+1} <= h(k).
        for (std::size_t i = 0; i < k; ++i)
            ok &= s[i] > th.h(k) && th.h(i + 1) >= th.h(i) - slack;
        if (k < s.size())
            ok &= s[k] <= th.h(k);
        // s_{i+1} > h(i) implies s_{i+1} > h(i+1) > h(i).
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s[i] > th.h(i))
                ok &= s[i] > th.h(i + 1) - slack && th.h(i + 1) > th.h(i) - slack;
        chain += !ok;
    }

    for (std::size_t t = 0; t < 10000; ++t) {
        auto z = uniform(rng, size(rng), 0, 3);
        std::sort(z.begin(), z.end(), std::greater<>());
        const double lambda = lam(rng), product = draw_product(rng);
        const auto r = prox_single_group_linear(z, ThresholdParams(lambda, product / lambda));
        bool ok = true;
        for (std::size_t k = 0; k <= z.size(); ++k)
            ok &= gamma_bounds_for_support(z, lambda, k).contains(product) == (k == r.support);
        interval += !ok;
    }
    return {shrink + order + chain + interval == 0,
            fmt::format("10000 instances each; violations: shrinkage {}, order {}, threshold chain {}, "
                        "support interval {}",
                        shrink, order, chain, interval)};
}

Outcome bivariate_closed_form() {
    const std::pair<double, double> params[] = {{0.5, 0.5}, {1, 0.9}, {1, 0.1}};
    double worst = 0;
    for (auto [lambda, gamma] : params) {
        const ThresholdParams p(lambda, gamma);
        for (int i = 0; i < 200; ++i)
            for (int j = 0; j < 200; ++j) {
                const std::array<double, 2> z{3.0 * i / 199, 3.0 * j / 199};
                const auto closed = prox_bivariate_closed_form(z, p);
                const auto general = prox_single_group_linear(z, p).minimizer;
                worst = std::max(worst, max_abs_diff(closed, general));
            }
    }
    return {worst <= kClosedFormTol, fmt::format("3 x 200 x 200 grid, max difference {:.3g}", worst)};
}

Outcome gain_sweep_ordering() {
    std::vector<SweepCurve> curves;
    for (std::size_t K = 1; K <= 4; ++K) {
        SweepConfig cfg;
        cfg.K = K;
        cfg.trials = 1000;
        cfg.seed = kSeed;
        curves.push_back(run_threshold_sweep(cfg).curve);
    }
    bool ok = curves[0].best_product() > curves[3].best_product();
    std::string detail;
    for (std::size_t K = 1; K <= 4; ++K) {
        const auto &c = curves[K - 1];
        ok &= c.peak() > 0;
        detail += fmt::format("{}K={}: argmax {} peak {:.2f} dB", K > 1 ? "; " : "", K, c.best_product(), c.peak());
    }
    return {ok, detail};
}

Outcome scale_invariance() {
    std::vector<double> sigma(11);
    for (std::size_t i = 0; i < sigma.size(); ++i)
        sigma[i] = 0.1 * std::pow(10.0, static_cast<double>(i) / 10);
    bool ok = true;
    std::string detail = "sigma 0.1..1 (11 points)";
    for (std::size_t K = 1; K <= 2; ++K) {
        SweepConfig cfg;
        cfg.K = K;
        cfg.trials = 1000;
        cfg.seed = kSeed;
        const auto o = run_scale_invariance_sweep(cfg, sigma);
        ok &= o.argmax_drift() <= 2;
        detail += fmt::format("; K={} drift {} steps", K, o.argmax_drift());
    }
    return {ok, detail};
}

struct ReferenceRow {
    double snr;
    double sgl, ips, proposed;
};
constexpr ReferenceRow kReferenceSrer[] = {
    {5, 10.08, 9.18, 11.36}, {10, 14.58, 14.99, 16.63}, {15, 19.41, 21.87, 21.82}, {20, 24.19, 24.08, 27.09}};

Outcome deconvolution_srer(bool full) {
    DeconvConfig cfg;
    cfg.seed = kSeed;
    cfg.trials = 100;
    cfg.snr_db = {5, 20};
    const auto o = run_deconv_experiment(cfg);
    const auto &p5 = o.find("proposed", 5), &s5 = o.find("sgl", 5), &p20 = o.find("proposed", 20);
    bool ok = std::abs(p5.mean_srer - 11.36) <= 1.5 && p5.mean_srer > s5.mean_srer &&
              std::abs(p20.mean_srer - 27.09) <= 2.0;
    std::string detail = fmt::format("100 trials: 5 dB proposed {:.2f} (11.36 +- 1.5), sgl {:.2f}, ips {:.2f}; "
                                     "20 dB proposed {:.2f} (27.09 +- 2.0), sgl {:.2f}, ips {:.2f}",
                                     p5.mean_srer, s5.mean_srer, o.find("ips", 5).mean_srer, p20.mean_srer,
                                     o.find("sgl", 20).mean_srer, o.find("ips", 20).mean_srer);
    if (full) {
        cfg.trials = 500;
        cfg.snr_db = {5, 10, 15, 20};
        const auto f = run_deconv_experiment(cfg);
        double worst = 0;
        for (const auto &row : kReferenceSrer) {
            worst = std::max(worst, std::abs(f.find("proposed", row.snr).mean_srer - row.proposed));
            worst = std::max(worst, std::abs(f.find("sgl", row.snr).mean_srer - row.sgl));
            worst = std::max(worst, std::abs(f.find("ips", row.snr).mean_srer - row.ips));
        }
        ok &= worst <= 1.0;
        detail += fmt::format("; 500 trials: largest deviation from the table {:.2f} dB (limit 1.0)", worst);
    }
    return {ok, detail};
}

Outcome fbs_monotone() {
    std::mt19937_64 rng(derive_seed(kSeed, 8, 0));
    std::uniform_int_distribution<std::size_t> length(64, 512);
    std::uniform_real_distribution<double> snr(0, 30), factor(0.3, 5);
    const auto wavelet = gen_ricker();
    double worst = -INFINITY;
    std::size_t steps = 0;
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = length(rng);
        const ConvolutionOperator H(wavelet, n, t % 2 ? BoundaryMode::circular : BoundaryMode::zero_padded);
        const double sigma = spectral_norm(H);
        ReflectivityConfig rc;
        rc.length = n;
        rc.seed = rng();
        auto x = gen_reflectivity(rc);
        x[n / 2] += 1; // never all-zero
        const auto obs = add_noise_at_snr(H.apply(x), snr(rng), NoiseKind::white, rng());
        const double lambda = factor(rng) * obs.sigma;
        const Penalty pen = PairwiseGroupPenalty{GroupLayout::contiguous(n, 8), lambda, draw_product(rng) / lambda};
        const DeconvProblem problem(obs.y, H, pen, 0.99 * DeconvProblem::step_cap(sigma, pen), sigma);
        const auto r = fbs_deconvolve(problem, {1000, 1e-12, true});
        for (std::size_t i = 1; i < r.report.cost_trace.size(); ++i, ++steps)
            worst = std::max(worst, r.report.cost_trace[i] - r.report.cost_trace[i - 1]);
    }
    return {worst <= kMonotoneTol, fmt::format("50 instances, {} steps, largest cost increase {:.3g}", steps, worst)};
}

Outcome frame_correctness() {
    const StftFrame frame(24000, 960, 240);
    std::mt19937_64 rng(derive_seed(kSeed, 9, 0));
    std::normal_distribution<double> g;
    double parseval = 0, reconstruction = 0;
    for (int t = 0; t < 20; ++t) {
        std::vector<double> x(frame.signal_length());
        for (double &v : x)
            v = g(rng);
        double ex = 0;
        for (double v : x)
            ex += v * v;
        const auto c = frame.analyze(x);
        parseval = std::max(parseval, std::abs(c.norm() * c.norm() - ex) / ex);
        reconstruction = std::max(reconstruction, max_abs_diff(frame.synthesize(c), x));
    }
    return {parseval < kFrameTol && reconstruction < kFrameTol,
            fmt::format("20 signals, {} bins x {} frames; relative Parseval error {:.3g}, reconstruction error {:.3g}",
                        frame.bins(), frame.frames(), parseval, reconstruction)};
}

Outcome denoise_ordering() {
    DenoiseConfig cfg;
    cfg.seed = kSeed;
    const auto o = run_denoise_experiment(cfg);
    bool ok = o.method("hybrid").output_snr_db >= o.method("l21").output_snr_db;
    std::string detail = fmt::format("input {:.2f} dB", o.input_snr_db);
    for (const auto &m : o.methods) {
        ok &= m.output_snr_db > o.input_snr_db;
        detail += fmt::format("; {} {:.2f}", m.name, m.output_snr_db);
    }
    return {ok, detail};
}

Outcome structural_claims() {
    std::mt19937_64 rng(derive_seed(kSeed, 11, 0));
    std::uniform_int_distribution<std::size_t> size(2, 16);
    std::uniform_real_distribution<double> lam(0.05, 2), tau(0.01, 100);
    std::normal_distribution<double> g;
    std::size_t annihilated = 0, deadzone = 0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = size(rng);
        const double lambda = lam(rng);
        // Half the groups sit inside the cube [-lambda, lambda]^n, half have an entry outside it.
        auto z = uniform(rng, n, -lambda, lambda);
        if (t % 2)
            z[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)] = lambda * (1.01 + std::abs(g(rng)));
        double peak = 0;
        for (double v : z)
            peak = std::max(peak, std::abs(v));
        const auto x = prox_single_group_linear(z, ThresholdParams(lambda, draw_product(rng) / lambda)).minimizer;
        const bool zero = std::all_of(x.begin(), x.end(), [](double v) { return v == 0; });
        deadzone += zero != (peak <= lambda);

        const auto e = prox_elasso<double>(z, tau(rng));
        annihilated += std::all_of(e.begin(), e.end(), [](double v) { return v == 0; });
    }
    return {annihilated == 0 && deadzone == 0,
            fmt::format("1000 groups; E-Lasso zeroed {} nonzero groups; proposed deadzone mismatches {}", annihilated,
                        deadzone)};
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Acceptance criteria"};
    bool full = false;
    std::vector<int> only;
    app.add_flag("--full", full, "Also run the 500-trial deconvolution table");
    app.add_option("--only", only, "Run only these criteria")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, "oracle agreement", 120, oracle_agreement},
        {2, "linear and binary search equivalence", 30, search_equivalence},
        {3, "shrinkage, order, threshold chain and gamma interval properties", 0, property_suites},
        {4, "bivariate closed form", 0, bivariate_closed_form},
        {5, "SNR gain sweep ordering", 60, gain_sweep_ordering},
        {6, "scale invariance of the best lambda * gamma", 120, scale_invariance},
        {7, "deconvolution SRER", 600, [full] { return deconvolution_srer(full); }},
        {8, "forward-backward cost monotonicity", 0, fbs_monotone},
        {9, "STFT frame Parseval and reconstruction", 0, frame_correctness},
        {10, "denoising ordering", 0, denoise_ordering},
        {11, "E-Lasso non-annihilation and deadzone", 0, structural_claims},
    };

    int failed = 0;
    for (const auto &c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end())
            continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception &e) {
            o = {false, fmt::format("exception: {}", e.what())};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::string timing = fmt::format("{:.1f}s", secs);
        if (c.budget_s > 0) {
            timing += fmt::format(" of {:.0f}s budget", c.budget_s);
            if (secs > c.budget_s)
                o.pass = false;
        }
        std::cout << fmt::format("{} criterion {:>2}: {} ({}; {})\n", o.pass ? "PASS" : "FAIL", c.id, c.title,
                                 o.detail, timing)
                  << std::flush;
        failed += !o.pass;
    }
    std::cout << fmt::format("{} criteria failed\n", failed);
    return failed ? 1 : 0;
}

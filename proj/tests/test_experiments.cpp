#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "isosparse/experiments.hpp"
#include "isosparse/signals.hpp"

using namespace isosparse;

namespace {

double as_double(const Cell &c) {
    if (const auto *d = std::get_if<double>(&c))
        return *d;
    return static_cast<double>(std::get<long long>(c));
}

double energy(std::span<const double> x) {
    double e = 0;
    for (double v : x)
        e += v * v;
    return e;
}

} // namespace

TEST_CASE("derived seeds are deterministic and distinct") {
    CHECK(derive_seed(42, 1, 7) == derive_seed(42, 1, 7));
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 4; ++s)
        for (std::uint64_t i = 0; i < 256; ++i)
            seen.insert(derive_seed(42, s, i));
    CHECK(seen.size() == 4 * 256);
    CHECK(derive_seed(42, 0, 0) != derive_seed(43, 0, 0));
}

TEST_CASE("reflectivity respects the refractory gap") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        ReflectivityConfig cfg;
        cfg.seed = seed;
        const auto x = gen_reflectivity(cfg);
        REQUIRE(x.size() == 512);
        std::ptrdiff_t last = -1000;
        std::size_t spikes = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] == 0)
                continue;
            CHECK(static_cast<std::ptrdiff_t>(i) - last >= 11);
            last = static_cast<std::ptrdiff_t>(i);
            ++spikes;
        }
        CHECK(spikes > 0);
    }
}

TEST_CASE("reflectivity edge cases") {
    ReflectivityConfig cfg;
    cfg.spike_prob = 1e-6;
    const auto x = gen_reflectivity(cfg);
    CHECK(std::count_if(x.begin(), x.end(), [](double v) { return v != 0; }) <= 2);

    ReflectivityConfig a;
    a.seed = 9;
    CHECK(gen_reflectivity(a) == gen_reflectivity(a));

    ReflectivityConfig bad;
    bad.spike_prob = 0;
    CHECK_THROWS_AS(gen_reflectivity(bad), std::invalid_argument);
    bad.spike_prob = 1;
    CHECK_THROWS_AS(gen_reflectivity(bad), std::invalid_argument);
}

TEST_CASE("ricker wavelet shape") {
    const double fs = 300, f = 25;
    const auto w = gen_ricker(fs, 0.2, f);
    REQUIRE(w.size() % 2 == 1);
    const std::size_t c = w.size() / 2;
    CHECK(w[c] == 1.0);
    for (std::size_t i = 0; i < c; ++i)
        CHECK(w[c - 1 - i] == doctest::Approx(w[c + 1 + i]).epsilon(1e-15));
    CHECK(std::abs(w.front()) >= 1e-4);

    // Sign change brackets the analytic root 1 / (pi f sqrt 2).
    const double root = 1 / (std::numbers::pi * f * std::sqrt(2.0));
    const auto j = static_cast<std::size_t>(std::floor(root * fs));
    CHECK(w[c + j] > 0);
    CHECK(w[c + j + 1] < 0);
    CHECK(w[c - j - 1] < 0);

    CHECK_THROWS_AS(gen_ricker(40, 0.2, 25), std::invalid_argument);
}

TEST_CASE("noise hits the requested snr exactly") {
    std::vector<double> x(400);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = std::sin(0.05 * static_cast<double>(i)) + 0.1;
    for (auto kind : {NoiseKind::white, NoiseKind::pink}) {
        for (double snr : {-3.0, 5.0, 20.0}) {
            const auto obs = add_noise_at_snr(x, snr, kind, 11);
            CHECK(metrics_snr(x, obs.y) == doctest::Approx(snr).epsilon(1e-9));
            std::vector<double> w(x.size());
            for (std::size_t i = 0; i < x.size(); ++i)
                w[i] = obs.y[i] - x[i];
            CHECK(obs.sigma == doctest::Approx(std::sqrt(energy(w) / x.size())).epsilon(1e-12));
        }
        CHECK(add_noise_at_snr(x, 5, kind, 3).y == add_noise_at_snr(x, 5, kind, 3).y);
        CHECK(add_noise_at_snr(x, 5, kind, 3).y != add_noise_at_snr(x, 5, kind, 4).y);
    }
    const auto clean = add_noise_at_snr(x, 1e9, NoiseKind::white, 1);
    CHECK(clean.y == x);
    CHECK(clean.sigma == 0);
    CHECK_THROWS_AS(add_noise_at_snr(std::vector<double>(8, 0.0), 5, NoiseKind::white, 1), std::invalid_argument);
    CHECK_THROWS_AS(add_noise_at_snr(x, INFINITY, NoiseKind::white, 1), std::invalid_argument);
}

TEST_CASE("pink noise tilts towards low frequencies") {
    const auto w = unit_noise(4096, NoiseKind::pink, 5);
    CHECK(energy(w) / 4096 == doctest::Approx(1.0).epsilon(1e-12));
    double lo = 0, hi = 0;
    for (std::size_t i = 1; i < w.size(); ++i) {
        const double d = w[i] - w[i - 1];
        hi += d * d;
        lo += w[i] * w[i];
    }
    // First differences of white noise carry twice the energy; pink carries far less.
    CHECK(hi / lo < 1.0);
}

TEST_CASE("metrics snr") {
    const std::vector<double> ref{1, -2, 3};
    CHECK(metrics_snr(ref, ref) >= 300);
    CHECK(metrics_snr(ref, std::vector<double>(3, 0.0)) == doctest::Approx(0.0).epsilon(1e-15));
    const std::vector<double> est{1.1, -2, 2.9};
    CHECK(metrics_snr(ref, est) == doctest::Approx(10 * std::log10(14 / 0.02)).epsilon(1e-12));
    CHECK_THROWS_AS(metrics_snr(std::vector<double>(3, 0.0), ref), std::invalid_argument);
    CHECK_THROWS_AS(metrics_snr(ref, std::vector<double>(2, 0.0)), std::invalid_argument);
}

TEST_CASE("log sweep widens until the optimum is interior") {
    auto peak_at = [](double p) { return [p](double v) { return -std::pow(std::log(v / p), 2); }; };
    const auto inside = log_sweep(0.1, 10, 15, peak_at(1.0));
    CHECK(inside.evaluated.size() == 15);
    CHECK(inside.best_value == doctest::Approx(1.0));

    const auto above = log_sweep(0.1, 10, 15, peak_at(500.0));
    CHECK(above.best_value > 100);
    CHECK(above.best_value < above.evaluated.back().first);

    const auto below = log_sweep(0.1, 10, 15, peak_at(0.004));
    CHECK(below.best_value < 0.01);
    CHECK(below.best_value > below.evaluated.front().first);

    const auto capped = log_sweep(0.1, 10, 5, peak_at(1e9), 1);
    CHECK(capped.best_value == doctest::Approx(capped.evaluated.back().first));
    CHECK_THROWS_AS(log_sweep(1, 1, 15, peak_at(1)), std::invalid_argument);
}

TEST_CASE("threshold sweep record") {
    SweepConfig cfg;
    cfg.trials = 1;
    const auto a = run_threshold_sweep(cfg);
    const auto b = run_threshold_sweep(cfg);
    REQUIRE(a.record.rows.rows.size() == cfg.lambda_gamma_grid.size());
    CHECK(a.curve.mean_gain == b.curve.mean_gain);
    for (double s : a.curve.std_gain)
        CHECK(s == 0);

    cfg.trials = 40;
    cfg.K = 2;
    const auto c = run_threshold_sweep(cfg);
    CHECK(c.record.rows.rows.size() == 40 * cfg.lambda_gamma_grid.size());
    // Aggregates are recomputable from the raw rows.
    for (std::size_t j = 0; j < cfg.lambda_gamma_grid.size(); ++j) {
        std::vector<double> v;
        for (const auto &r : c.record.rows.rows)
            if (as_double(r[1]) == cfg.lambda_gamma_grid[j])
                v.push_back(as_double(r[3]));
        REQUIRE(v.size() == 40);
        CHECK(mean_std(v).first == doctest::Approx(c.curve.mean_gain[j]).epsilon(1e-12));
    }

    cfg.K = 11;
    CHECK_THROWS_AS(run_threshold_sweep(cfg), std::invalid_argument);
    cfg.K = 1;
    cfg.lambda_gamma_grid = {0.5, 1.0};
    CHECK_THROWS_AS(run_threshold_sweep(cfg), std::invalid_argument);
}

TEST_CASE("argmax breaks rounding ties towards the smaller product") {
    SweepConfig cfg;
    cfg.trials = 200;
    const auto out = run_threshold_sweep(cfg);
    const auto &c = out.curve;
    for (std::size_t j = 0; j < c.argmax; ++j)
        CHECK(c.mean_gain[j] < c.peak());
    for (double g : c.mean_gain)
        CHECK(g <= c.peak() + 1e-9 * std::abs(c.peak()));
}

TEST_CASE("scale sweep") {
    SweepConfig cfg;
    cfg.trials = 30;
    const std::vector<double> one{2.0};
    const auto single = run_scale_invariance_sweep(cfg, one);
    REQUIRE(single.curves.size() == 1);
    CHECK(single.curves[0].grid == cfg.lambda_gamma_grid);
    CHECK(single.argmax_drift() == 0);
    CHECK(single.record.rows.rows.size() == 30 * cfg.lambda_gamma_grid.size());

    const std::vector<double> grid{0.1, 1.0};
    const auto two = run_scale_invariance_sweep(cfg, grid);
    CHECK(two.curves.size() == 2);
    CHECK(two.curves[0].mean_gain != two.curves[1].mean_gain);
    const std::vector<double> bad{1.0, 0.0};
    CHECK_THROWS_AS(run_scale_invariance_sweep(cfg, bad), std::invalid_argument);
}

TEST_CASE("tonal scene") {
    SceneConfig cfg;
    const auto s = gen_tonal_scene(cfg);
    REQUIRE(s.signal.size() == 32160);
    CHECK(s.signal.size() % 240 == 0);
    CHECK_FALSE(s.active[static_cast<std::size_t>(0.1 * cfg.fs)]);
    CHECK(s.active[static_cast<std::size_t>(0.5 * cfg.fs)]);
    CHECK_FALSE(s.active[static_cast<std::size_t>(1.0 * cfg.fs)]);
    for (std::size_t i = 0; i < s.signal.size(); ++i)
        if (!s.active[i])
            CHECK(s.signal[i] == 0);
}

TEST_CASE("deconvolution experiment at toy scale") {
    DeconvConfig cfg;
    cfg.snr_db = {20};
    cfg.trials = 3;
    cfg.tuning_trials = 2;
    cfg.reflectivity.length = 128;
    cfg.lambda_points = 5;
    cfg.methods = {"proposed", "sgl"};
    cfg.solver = {400, 1e-6, false};
    const auto a = run_deconv_experiment(cfg);
    const auto b = run_deconv_experiment(cfg);
    REQUIRE(a.stats.size() == 2);
    for (const auto &st : a.stats) {
        CHECK(st.srer.size() == 3);
        CHECK(st.lambda_factor > 0);
        CHECK(std::isfinite(st.mean_srer));
        CHECK(st.mean_srer == b.find(st.method, 20).mean_srer);
    }
    CHECK(a.record.summary.rows.size() == 2);
    CHECK_THROWS_AS(a.find("ips", 20), std::out_of_range);
    cfg.methods = {"bogus"};
    CHECK_THROWS_AS(run_deconv_experiment(cfg), std::invalid_argument);
}

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "isosparse/stft.hpp"
#include "support.hpp"

using namespace isosparse;

namespace {

double inner(const TfGrid &a, const TfGrid &b) {
    double s = 0;
    for (std::size_t i = 0; i < a.coefficients.size(); ++i)
        s += std::real(std::conj(a.coefficients[i]) * b.coefficients[i]);
    return s;
}

double l2(std::span<const double> x) {
    double s = 0;
    for (double v : x)
        s += v * v;
    return std::sqrt(s);
}

TfGrid random_grid(std::mt19937_64 &rng, std::size_t bins, std::size_t frames) {
    std::normal_distribution<double> g;
    TfGrid c(bins, frames);
    for (auto &v : c.coefficients)
        v = Complex(g(rng), g(rng));
    return c;
}

} // namespace

TEST_CASE("stft construction") {
    CHECK_THROWS_AS(StftFrame(1000, 960, 240), std::invalid_argument);
    CHECK_THROWS_AS(StftFrame(480, 960, 240), std::invalid_argument);
    CHECK_THROWS_AS(StftFrame(960, 960, 0), std::invalid_argument);
    CHECK_THROWS_AS(StftFrame(960, 960, 500), std::invalid_argument);
    const StftFrame f(4800);
    CHECK(f.bins() == 481);
    CHECK(f.frames() == 20);
    CHECK(f.fft_size() == 960);
}

TEST_CASE("stft is a Parseval frame") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g;
    for (auto [n, w, h] : {std::tuple{4800, 960, 240}, std::tuple{64, 16, 4}, std::tuple{90, 15, 5},
                           std::tuple{96, 32, 16}}) {
        CAPTURE(n);
        CAPTURE(w);
        const StftFrame f(n, w, h);
        std::vector<double> x(n);
        for (double &v : x)
            v = g(rng);
        const auto c = f.analyze(x);
        CHECK(std::abs(c.norm() - l2(x)) < 1e-10 * l2(x));
        const auto back = f.synthesize(c);
        CHECK(testing_support::max_abs_diff(back, x) < 1e-10);
        const auto d = random_grid(rng, f.bins(), f.frames());
        CHECK(std::abs(inner(c, d) - [&] {
                  const auto y = f.synthesize(d);
                  double s = 0;
                  for (std::size_t i = 0; i < x.size(); ++i)
                      s += x[i] * y[i];
                  return s;
              }()) < 1e-8 * std::max(1.0, c.norm() * d.norm()));
    }
}

TEST_CASE("stft zero in, zero out") {
    const StftFrame f(1920);
    const auto c = f.analyze(std::vector<double>(1920, 0.0));
    CHECK(c.norm() == 0.0);
    CHECK(f.synthesize(TfGrid(f.bins(), f.frames())) == std::vector<double>(1920, 0.0));
    CHECK_THROWS_AS(f.analyze(std::vector<double>(100, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(f.synthesize(TfGrid(3, 3)), std::invalid_argument);
}

TEST_CASE("stft concentrates a bin-centred sinusoid") {
    const std::size_t n = 9600, bin = 40;
    const StftFrame f(n);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = std::cos(2 * std::numbers::pi * bin * i / 960.0);
    const auto c = f.analyze(x);
    for (std::size_t m = 1; m + 1 < f.frames(); ++m) {
        double total = 0;
        for (std::size_t k = 0; k < f.bins(); ++k)
            total += std::norm(c.at(k, m));
        CHECK(std::abs(c.at(bin, m)) >= 0.9 * std::sqrt(total));
        double near = 0;
        for (std::size_t k = bin - 1; k <= bin + 1; ++k)
            near += std::norm(c.at(k, m));
        CHECK(near >= 0.99 * total);
    }
}

TEST_CASE("range projection") {
    std::mt19937_64 rng(37);
    std::normal_distribution<double> g;
    const StftFrame f(2400);
    std::vector<double> x(2400);
    for (double &v : x)
        v = g(rng);
    const auto inrange = f.analyze(x);
    const auto p = f.project_range(inrange);
    double diff = 0;
    for (std::size_t i = 0; i < p.coefficients.size(); ++i)
        diff = std::max(diff, std::abs(p.coefficients[i] - inrange.coefficients[i]));
    CHECK(diff < 1e-10);
    const auto c = random_grid(rng, f.bins(), f.frames());
    const auto pc = f.project_range(c);
    const auto ppc = f.project_range(pc);
    diff = 0;
    for (std::size_t i = 0; i < pc.coefficients.size(); ++i)
        diff = std::max(diff, std::abs(pc.coefficients[i] - ppc.coefficients[i]));
    CHECK(diff < 1e-10);
    CHECK(pc.norm() <= c.norm());
}

TEST_CASE("time-frequency group layouts") {
    const auto g = tf_group_layout(480, 100, 16, 1);
    CHECK(g.size() == 30 * 100);
    CHECK(g.max_group_size() == 16);
    const auto t = tf_group_layout(480, 100, 1, 8);
    CHECK(t.size() == 480 * 13);
    CHECK(t.group_size(0) == 8);
    const auto partial = tf_group_layout(481, 134, 16, 1);
    CHECK(partial.size() == 31 * 134);
    CHECK(partial.group_size(30) == 1);
    const auto s = tf_supergroup_layout(480, 100, 1, 8, 16);
    CHECK(s.size() == 30 * 13);
    CHECK(s.max_run() == 16);
    // Sub-groups in a super-group are frequency neighbours in the same time tile.
    const auto first = s.base().group(s.first_subgroup(0) + 1);
    CHECK(first[0] == 1 * 100 + 0);
    std::set<std::size_t> bins_seen;
    for (std::size_t j = 0; j < s.subgroup_count(0); ++j)
        bins_seen.insert(s.base().group(j)[0] / 100);
    CHECK(bins_seen.size() == 16);
    CHECK_THROWS_AS(tf_group_layout(10, 10, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(tf_supergroup_layout(10, 10, 1, 1, 0), std::invalid_argument);
}

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "isosparse/oracle.hpp"
#include "isosparse/threshold.hpp"

namespace testing_support {

inline std::vector<double> uniform_vector(std::mt19937_64 &rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (double &x : v)
        x = d(rng);
    return v;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline std::vector<double> sorted_magnitudes(std::span<const double> z) {
    std::vector<double> s(z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
        s[i] = std::abs(z[i]);
    std::sort(s.begin(), s.end(), std::greater<>());
    return s;
}

/// 0.5 ||z - x||^2 + lambda * (gamma sum_{i<m} |x_i x_m| + ||x||_1), evaluated naively.
inline isosparse::oracle::Objective pairwise_cost(std::vector<double> z, double lambda, double gamma) {
    return isosparse::oracle::prox_cost(std::move(z), [lambda, gamma](std::span<const double> x) {
        return lambda * isosparse::oracle::pairwise_penalty_naive(x, gamma);
    });
}

} // namespace testing_support

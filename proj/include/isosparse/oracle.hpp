#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace isosparse::oracle {

/// A cost function x -> f(x) on R^n.
using Objective = std::function<double(std::span<const double>)>;

struct OracleConfig {
    /// Box half-width |x_i| <= grid_halfwidth searched on every face. 0 picks
    /// max|z_i| + 1, which contains every shrinking prox.
    double grid_halfwidth = 0;
    std::size_t coordinate_descent_iters = 10000;
    /// Relative iterate change that ends coordinate descent.
    double tolerance = 1e-12;
    /// Extra seeded random starts per sign pattern (1 = model start only).
    std::size_t restarts = 1;
    /// How far (relative to the half-width) a face's model minimizer may sit
    /// outside the face and still be polished instead of discarded.
    double face_slack = 1e-9;
    std::uint64_t seed = 0x5eed;
};

struct OracleResult {
    std::vector<double> minimizer;
    double cost = 0;
    std::size_t patterns_kept = 0;
};

/// Global minimizer of a cost that is smooth and convex on every closed
/// orthant face, found by enumerating all 3^n sign patterns (-, 0, +).
/// Throws std::invalid_argument for n > 8 or non-finite input.
OracleResult brute_force_prox(std::span<const double> z, const Objective &objective, const OracleConfig &cfg = {});

struct ConvexityWitness {
    std::vector<double> x;
    std::vector<double> y;
    double t = 0;
    double violation = 0;
};

struct ConvexityReport {
    bool convex = true;
    std::optional<ConvexityWitness> witness;
};

/// Random-segment test of f(tx + (1-t)y) <= t f(x) + (1-t) f(y) + 1e-9 with
/// x, y uniform in [-radius, radius]^dim. Requires samples >= 100.
ConvexityReport convexity_probe(const Objective &objective, std::size_t dim, std::size_t samples,
                                std::uint64_t seed = 1, double radius = 3.0);

/// Direct double-loop evaluation of gamma * sum_{i<m} |u_i u_m| + ||u||_1.
double pairwise_penalty_naive(std::span<const double> u, double gamma);

/// x -> 0.5 ||z - x||^2 + penalty(x).
Objective prox_cost(std::vector<double> z, Objective penalty);

} // namespace isosparse::oracle

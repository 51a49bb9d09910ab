#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "isosparse/types.hpp"

namespace isosparse {

/// How the number of surviving coefficients k is located.
enum class SupportSearch { linear, binary };

// ---------------------------------------------------------------------------
// Penalties
// ---------------------------------------------------------------------------

/// gamma * sum_{i<m} |u_i u_m| + ||u||_1 for one group, in linear time via
/// sum_{i<m} |u_i u_m| = (||u||_1^2 - ||u||_2^2) / 2.
template <Coefficient T>
double pairwise_group_penalty(std::span<const T> u, double gamma);

/// Sum of pairwise_group_penalty over the groups of `layout`.
/// Throws std::invalid_argument if x and layout disagree in length.
template <Coefficient T>
double penalty_value(std::span<const T> x, const GroupLayout &layout, const ThresholdParams &params);

// ---------------------------------------------------------------------------
// Threshold functions
// ---------------------------------------------------------------------------

/// Componentwise magnitude shrinkage; exact zero when |x_i| <= tau.
template <Coefficient T>
std::vector<T> soft_threshold(std::span<const T> x, double tau);

/// Support size k of a thresholded group and the threshold h(k) applied.
struct GroupSupport {
    std::size_t support = 0;
    double threshold = 0;
};

/// Single-group threshold: the minimizer together with its support size k and
/// the threshold h(k) that produced it.
struct GroupProx {
    std::vector<double> minimizer;
    std::size_t support = 0;
    double threshold = 0;
};

GroupProx prox_single_group_linear(std::span<const double> z, const ThresholdParams &params);
GroupProx prox_single_group_binary(std::span<const double> z, const ThresholdParams &params);

/// Explicit four-region formula for groups of two.
std::array<double, 2> prox_bivariate_closed_form(std::array<double, 2> z, const ThresholdParams &params);

/// Complex group threshold: thresholds |z| and restores each argument.
std::vector<Complex> prox_complex(std::span<const Complex> z, const ThresholdParams &params);

/// Threshold applied to the vector of sub-group l2 norms inside every
/// super-group; sub-groups keep their direction.
template <Coefficient T>
std::vector<T> prox_hybrid(std::span<const T> z, const SuperGroupLayout &layout,
                           const ThresholdParams &params);

/// Group soft threshold: z_g * max(0, 1 - tau / ||z_g||_2).
template <Coefficient T>
std::vector<T> prox_l21(std::span<const T> z, const GroupLayout &layout, double tau);

/// Prox of tau * ||x||_1^2 on one group. Never annihilates a nonzero group.
template <Coefficient T>
std::vector<T> prox_elasso(std::span<const T> z, double tau);

/// prox_elasso applied group by group.
template <Coefficient T>
std::vector<T> prox_elasso(std::span<const T> z, const GroupLayout &layout, double tau);

/// Prox of lambda * (beta ||x||_1 + (1 - beta) sum_g ||x_g||_2).
template <Coefficient T>
std::vector<T> prox_sgl(std::span<const T> z, const GroupLayout &layout, double lambda, double beta);

/// p-shrinkage: sign(z) max(0, |z| - lambda^(2-p) |z|^(p-1)); zero maps to zero.
std::vector<double> p_shrink(std::span<const double> z, double lambda, double p);

/// Open interval of lambda * gamma values.
struct ProductInterval {
    double lower = 0;
    double upper = 0;
    bool empty() const { return !(lower < upper); }
    bool contains(double v) const { return lower < v && v < upper; }
};

/// Range of lambda * gamma (within (0, 1)) for which the threshold of the
/// descending, nonnegative vector `z` keeps exactly k coefficients.
/// Throws std::invalid_argument for unsorted or negative input or k > n.
ProductInterval gamma_bounds_for_support(std::span<const double> z, double lambda, std::size_t k);

/// The threshold applied independently to every group of `layout`.
template <Coefficient T>
ProxResult<T> prox_full(std::span<const T> z, const GroupLayout &layout, const ThresholdParams &params,
                        SupportSearch search = SupportSearch::linear);

// ---------------------------------------------------------------------------
// Allocation-free kernel used by the solvers
// ---------------------------------------------------------------------------

/// Reusable workspace for thresholding many groups with the same parameters.
class GroupThresholder {
public:
    explicit GroupThresholder(const ThresholdParams &params) : params_{params} {}

    const ThresholdParams &params() const { return params_; }

    /// Writes the threshold of `z` into `out` (same length; may alias `z`).
    template <Coefficient T>
    GroupSupport apply(std::span<const T> z, std::span<T> out, SupportSearch search = SupportSearch::linear);

    /// Sorted magnitudes and prefix sums of the last group; h(i) for that group.
    double h(std::size_t i) const;
    std::span<const double> sorted() const { return sorted_; }

    std::size_t search_linear() const;
    std::size_t search_binary() const;

private:
    template <Coefficient T>
    void load(std::span<const T> z);

    ThresholdParams params_;
    std::vector<double> sorted_;
    std::vector<double> prefix_;
};

} // namespace isosparse

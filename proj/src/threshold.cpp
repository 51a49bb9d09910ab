#include "isosparse/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace isosparse {

namespace {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const Complex &v) { return std::abs(v); }

// Shrinks one coefficient of magnitude `mag` by `thr` and divides by `denom`,
// keeping its sign or argument.
inline double shrink(double v, double mag, double thr, double denom) {
    return std::copysign((mag - thr) / denom, v);
}
inline Complex shrink(const Complex &v, double mag, double thr, double denom) {
    return v * ((mag - thr) / (denom * mag));
}

template <Coefficient T>
void check_length(std::span<const T> z, std::size_t expected, const char *who) {
    if (z.size() != expected)
        throw std::invalid_argument(std::string(who) + ": coefficient length " + std::to_string(z.size()) +
                                    " does not match layout length " + std::to_string(expected));
}

template <Coefficient T>
double l2_norm(std::span<const T> z) {
    double s = 0;
    for (const T &v : z)
        s += std::norm(v);
    return std::sqrt(s);
}

} // namespace

// ---------------------------------------------------------------------------

template <Coefficient T>
double pairwise_group_penalty(std::span<const T> u, double gamma) {
    double l1 = 0;
    double l2sq = 0;
    for (const T &v : u) {
        const double m = magnitude(v);
        l1 += m;
        l2sq += m * m;
    }
    // Rounding can push the difference slightly negative for a single survivor.
    const double pairwise = std::max(0.0, 0.5 * (l1 * l1 - l2sq));
    return gamma * pairwise + l1;
}

template <Coefficient T>
double penalty_value(std::span<const T> x, const GroupLayout &layout, const ThresholdParams &params) {
    check_length(x, layout.total_length(), "penalty_value");
    double total = 0;
    std::vector<T> scratch(layout.max_group_size());
    for (std::size_t g = 0; g < layout.size(); ++g) {
        const auto idx = layout.group(g);
        for (std::size_t j = 0; j < idx.size(); ++j)
            scratch[j] = x[idx[j]];
        total += pairwise_group_penalty(std::span<const T>(scratch.data(), idx.size()), params.gamma());
    }
    return total;
}

template <Coefficient T>
std::vector<T> soft_threshold(std::span<const T> x, double tau) {
    if (!(tau >= 0))
        throw std::invalid_argument("soft_threshold: tau must be nonnegative");
    std::vector<T> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double m = magnitude(x[i]);
        out[i] = m > tau ? shrink(x[i], m, tau, 1.0) : T{};
    }
    return out;
}

// ---------------------------------------------------------------------------
// GroupThresholder

template <Coefficient T>
void GroupThresholder::load(std::span<const T> z) {
    const std::size_t n = z.size();
    sorted_.resize(n);
    prefix_.resize(n + 1);
    for (std::size_t i = 0; i < n; ++i)
        sorted_[i] = magnitude(z[i]);
    // Equal magnitudes get equal outputs, so the order among ties is irrelevant.
    std::sort(sorted_.begin(), sorted_.end(), std::greater<>());
    prefix_[0] = 0;
    for (std::size_t i = 0; i < n; ++i)
        prefix_[i + 1] = prefix_[i] + sorted_[i];
}

double GroupThresholder::h(std::size_t i) const {
    const double lambda = params_.lambda();
    if (i == 0)
        return lambda;
    const double s = params_.product();
    return (lambda * (1 - s) + s * prefix_[i]) / (1 + static_cast<double>(i - 1) * s);
}

std::size_t GroupThresholder::search_linear() const {
    const std::size_t n = sorted_.size();
    std::size_t k = 0;
    // sorted_[k] is the (k+1)-th largest magnitude; past n the guard is false.
    while (k < n && h(k) < sorted_[k])
        ++k;
    return k;
}

std::size_t GroupThresholder::search_binary() const {
    const std::size_t n = sorted_.size();
    if (n == 0)
        return 0;
    // 1-based accessor for the sorted magnitudes.
    auto zs = [this](std::size_t i) { return sorted_[i - 1]; };
    if (zs(1) <= params_.lambda())
        return 0;
    if (zs(n) > h(n))
        return n;
    // Invariant: k0 < k < k1 for the sought k.
    std::size_t k0 = 0;
    std::size_t k1 = n;
    while (k1 - k0 >= 2) {
        const std::size_t k = (k0 + k1) / 2;
        const double hk = h(k);
        const bool above = zs(k) > hk;
        if (above && zs(k + 1) <= hk)
            return k;
        if (!above)
            k1 = k;
        else
            k0 = k;
    }
    // Only reachable if rounding breaks the ordering of h; resume linearly.
    std::size_t k = k0;
    while (k < n && h(k) < sorted_[k])
        ++k;
    return k;
}

template <Coefficient T>
GroupSupport GroupThresholder::apply(std::span<const T> z, std::span<T> out, SupportSearch search) {
    if (out.size() != z.size())
        throw std::invalid_argument("GroupThresholder::apply: output length mismatch");
    load(z);
    const std::size_t k = search == SupportSearch::binary ? search_binary() : search_linear();
    const double hk = h(k);
    const double denom = 1 - params_.product();
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double m = magnitude(z[i]);
        out[i] = m > hk ? shrink(z[i], m, hk, denom) : T{};
    }
    return {k, hk};
}

// ---------------------------------------------------------------------------

namespace {
GroupProx single_group(std::span<const double> z, const ThresholdParams &params, SupportSearch search) {
    GroupThresholder thr(params);
    GroupProx result;
    result.minimizer.resize(z.size());
    const auto sup = thr.apply(z, std::span<double>(result.minimizer), search);
    result.support = sup.support;
    result.threshold = sup.threshold;
    return result;
}
} // namespace

GroupProx prox_single_group_linear(std::span<const double> z, const ThresholdParams &params) {
    return single_group(z, params, SupportSearch::linear);
}

GroupProx prox_single_group_binary(std::span<const double> z, const ThresholdParams &params) {
    return single_group(z, params, SupportSearch::binary);
}

std::array<double, 2> prox_bivariate_closed_form(std::array<double, 2> z, const ThresholdParams &params) {
    const double lambda = params.lambda();
    const double s = params.product();
    const double a = std::abs(z[0]);
    const double b = std::abs(z[1]);
    double x1 = 0;
    double x2 = 0;
    if (a >= b) {
        if (a <= lambda) {
            // R4: deadzone
        } else if (b <= lambda + s * (a - lambda)) {
            x1 = a - lambda; // R1
        } else {
            x1 = (a - s * b - (1 - s) * lambda) / (1 - s * s); // R3
            x2 = (b - s * a - (1 - s) * lambda) / (1 - s * s);
        }
    } else {
        if (b <= lambda) {
            // R4
        } else if (a <= lambda + s * (b - lambda)) {
            x2 = b - lambda; // R2
        } else {
            x1 = (a - s * b - (1 - s) * lambda) / (1 - s * s); // R3
            x2 = (b - s * a - (1 - s) * lambda) / (1 - s * s);
        }
    }
    return {std::copysign(x1, z[0]), std::copysign(x2, z[1])};
}

std::vector<Complex> prox_complex(std::span<const Complex> z, const ThresholdParams &params) {
    GroupThresholder thr(params);
    std::vector<Complex> out(z.size());
    thr.apply(z, std::span<Complex>(out));
    return out;
}

template <Coefficient T>
std::vector<T> prox_hybrid(std::span<const T> z, const SuperGroupLayout &layout, const ThresholdParams &params) {
    check_length(z, layout.total_length(), "prox_hybrid");
    const GroupLayout &base = layout.base();
    std::vector<T> out(z.size(), T{});
    GroupThresholder thr(params);
    std::vector<double> w(layout.max_run());
    std::vector<double> w_hat(layout.max_run());
    for (std::size_t s = 0; s < layout.size(); ++s) {
        const std::size_t first = layout.first_subgroup(s);
        const std::size_t count = layout.subgroup_count(s);
        for (std::size_t j = 0; j < count; ++j) {
            double e = 0;
            for (std::size_t i : base.group(first + j))
                e += std::norm(z[i]);
            w[j] = std::sqrt(e);
        }
        thr.apply(std::span<const double>(w.data(), count), std::span<double>(w_hat.data(), count));
        for (std::size_t j = 0; j < count; ++j) {
            if (w[j] == 0 || w_hat[j] == 0)
                continue;
            const double scale = w_hat[j] / w[j];
            for (std::size_t i : base.group(first + j))
                out[i] = z[i] * scale;
        }
    }
    return out;
}

template <Coefficient T>
std::vector<T> prox_l21(std::span<const T> z, const GroupLayout &layout, double tau) {
    check_length(z, layout.total_length(), "prox_l21");
    if (!(tau >= 0))
        throw std::invalid_argument("prox_l21: tau must be nonnegative");
    std::vector<T> out(z.size(), T{});
    for (std::size_t g = 0; g < layout.size(); ++g) {
        double e = 0;
        for (std::size_t i : layout.group(g))
            e += std::norm(z[i]);
        const double norm = std::sqrt(e);
        if (norm <= tau)
            continue;
        const double scale = 1 - tau / norm;
        for (std::size_t i : layout.group(g))
            out[i] = z[i] * scale;
    }
    return out;
}

namespace {
// prox of tau * ||x||_1^2 on a gathered group, written into out.
template <Coefficient T>
void elasso_group(std::span<const T> z, double tau, std::span<T> out, std::vector<double> &sorted) {
    const std::size_t n = z.size();
    sorted.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        sorted[i] = magnitude(z[i]);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    // On a support of size k the optimality conditions give the common shift
    // theta(k) = 2 tau S_k / (1 + 2 tau k); the support is the largest k with z_k > theta(k).
    double prefix = 0;
    double theta = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        prefix += sorted[k - 1];
        const double t = 2 * tau * prefix / (1 + 2 * tau * static_cast<double>(k));
        if (sorted[k - 1] > t)
            theta = t;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double m = magnitude(z[i]);
        out[i] = m > theta ? shrink(z[i], m, theta, 1.0) : T{};
    }
}
} // namespace

template <Coefficient T>
std::vector<T> prox_elasso(std::span<const T> z, double tau) {
    if (!(tau >= 0))
        throw std::invalid_argument("prox_elasso: tau must be nonnegative");
    std::vector<T> out(z.size());
    std::vector<double> sorted;
    elasso_group(z, tau, std::span<T>(out), sorted);
    return out;
}

template <Coefficient T>
std::vector<T> prox_elasso(std::span<const T> z, const GroupLayout &layout, double tau) {
    check_length(z, layout.total_length(), "prox_elasso");
    if (!(tau >= 0))
        throw std::invalid_argument("prox_elasso: tau must be nonnegative");
    std::vector<T> out(z.size());
    std::vector<T> gathered(layout.max_group_size());
    std::vector<T> result(layout.max_group_size());
    std::vector<double> sorted;
    for (std::size_t g = 0; g < layout.size(); ++g) {
        const auto idx = layout.group(g);
        for (std::size_t j = 0; j < idx.size(); ++j)
            gathered[j] = z[idx[j]];
        elasso_group(std::span<const T>(gathered.data(), idx.size()), tau,
                     std::span<T>(result.data(), idx.size()), sorted);
        for (std::size_t j = 0; j < idx.size(); ++j)
            out[idx[j]] = result[j];
    }
    return out;
}

template <Coefficient T>
std::vector<T> prox_sgl(std::span<const T> z, const GroupLayout &layout, double lambda, double beta) {
    if (!(beta > 0 && beta < 1))
        throw std::invalid_argument("prox_sgl: beta must lie in (0, 1)");
    if (!(lambda >= 0))
        throw std::invalid_argument("prox_sgl: lambda must be nonnegative");
    const auto soft = soft_threshold(z, lambda * beta);
    return prox_l21(std::span<const T>(soft), layout, lambda * (1 - beta));
}

std::vector<double> p_shrink(std::span<const double> z, double lambda, double p) {
    if (!(p <= 1))
        throw std::invalid_argument("p_shrink: p must be <= 1");
    if (!(lambda >= 0))
        throw std::invalid_argument("p_shrink: lambda must be nonnegative");
    std::vector<double> out(z.size(), 0.0);
    if (p == 1)
        return soft_threshold(z, lambda);
    const double scale = std::pow(lambda, 2 - p);
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double m = std::abs(z[i]);
        if (m == 0)
            continue;
        const double r = m - scale * std::pow(m, p - 1);
        if (r > 0)
            out[i] = std::copysign(r, z[i]);
    }
    return out;
}

ProductInterval gamma_bounds_for_support(std::span<const double> z, double lambda, std::size_t k) {
    const std::size_t n = z.size();
    if (k > n)
        throw std::invalid_argument("gamma_bounds_for_support: k exceeds the group size");
    if (!(lambda > 0))
        throw std::invalid_argument("gamma_bounds_for_support: lambda must be positive");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(z[i] >= 0))
            throw std::invalid_argument("gamma_bounds_for_support: input must be nonnegative");
        if (i > 0 && z[i] > z[i - 1])
            throw std::invalid_argument("gamma_bounds_for_support: input must be sorted descending");
    }
    auto pos = [](double v) { return v > 0 ? v : 0.0; };
    ProductInterval range{0.0, 1.0};
    // z_{k+1} <= h(k): a lower bound, vacuous when z_{k+1} <= lambda.
    if (k < n) {
        const double zk1 = z[k];
        const double excess = pos(zk1 - lambda);
        if (excess > 0) {
            double spread = 0;
            for (std::size_t i = 0; i < k; ++i)
                spread += z[i] - zk1;
            range.lower = excess / (excess + spread);
        }
    }
    // z_k > h(k): an upper bound, empty when z_k <= lambda.
    if (k > 0) {
        const double zk = z[k - 1];
        const double excess = pos(zk - lambda);
        if (excess == 0)
            return {0.0, 0.0};
        double spread = 0;
        for (std::size_t i = 0; i + 1 < k; ++i)
            spread += z[i] - zk;
        range.upper = excess / (excess + spread);
    }
    return range;
}

template <Coefficient T>
ProxResult<T> prox_full(std::span<const T> z, const GroupLayout &layout, const ThresholdParams &params,
                        SupportSearch search) {
    check_length(z, layout.total_length(), "prox_full");
    ProxResult<T> result;
    result.minimizer.assign(z.size(), T{});
    result.support_counts.resize(layout.size());
    result.thresholds.resize(layout.size());
    GroupThresholder thr(params);
    std::vector<T> gathered(layout.max_group_size());
    std::vector<T> shrunk(layout.max_group_size());
    for (std::size_t g = 0; g < layout.size(); ++g) {
        const auto idx = layout.group(g);
        for (std::size_t j = 0; j < idx.size(); ++j)
            gathered[j] = z[idx[j]];
        const auto sup = thr.apply(std::span<const T>(gathered.data(), idx.size()),
                                   std::span<T>(shrunk.data(), idx.size()), search);
        for (std::size_t j = 0; j < idx.size(); ++j)
            result.minimizer[idx[j]] = shrunk[j];
        result.support_counts[g] = sup.support;
        result.thresholds[g] = sup.threshold;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Explicit instantiations

#define ISOSPARSE_INSTANTIATE(T)                                                                         \
    template double pairwise_group_penalty<T>(std::span<const T>, double);                               \
    template double penalty_value<T>(std::span<const T>, const GroupLayout &, const ThresholdParams &);  \
    template std::vector<T> soft_threshold<T>(std::span<const T>, double);                               \
    template GroupSupport GroupThresholder::apply<T>(std::span<const T>, std::span<T>, SupportSearch);   \
    template std::vector<T> prox_hybrid<T>(std::span<const T>, const SuperGroupLayout &,                 \
                                           const ThresholdParams &);                                     \
    template std::vector<T> prox_l21<T>(std::span<const T>, const GroupLayout &, double);                \
    template std::vector<T> prox_elasso<T>(std::span<const T>, double);                                  \
    template std::vector<T> prox_elasso<T>(std::span<const T>, const GroupLayout &, double);             \
    template std::vector<T> prox_sgl<T>(std::span<const T>, const GroupLayout &, double, double);        \
    template ProxResult<T> prox_full<T>(std::span<const T>, const GroupLayout &, const ThresholdParams &, \
                                        SupportSearch);

ISOSPARSE_INSTANTIATE(double)
ISOSPARSE_INSTANTIATE(Complex)

#undef ISOSPARSE_INSTANTIATE

} // namespace isosparse

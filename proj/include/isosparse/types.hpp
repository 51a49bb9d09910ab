#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <type_traits>
#include <vector>

namespace isosparse {

using Complex = std::complex<double>;

/// Scalars the thresholds act on: real coefficients or complex TF coefficients.
template <class T>
concept Coefficient = std::is_same_v<T, double> || std::is_same_v<T, Complex>;

/// The (lambda, gamma) pair of the pairwise group threshold.
///
/// Construction enforces lambda >= 0, gamma >= 0 and lambda * gamma < 1, the
/// condition under which the prox cost is strictly convex and the threshold is
/// single-valued.
class ThresholdParams {
public:
    ThresholdParams(double lambda, double gamma);

    double lambda() const { return lambda_; }
    double gamma() const { return gamma_; }
    double product() const { return lambda_ * gamma_; }

    /// Same gamma with lambda scaled by `factor` (used for step-scaled proxes).
    ThresholdParams scaled(double factor) const;

private:
    double lambda_;
    double gamma_;
};

/// A non-overlapping partition of {0, ..., total_length - 1} into non-empty
/// groups. Stored in compressed form: group g owns
/// indices_[offsets_[g] .. offsets_[g + 1]).
class GroupLayout {
public:
    GroupLayout() = default;
    GroupLayout(std::size_t total_length, const std::vector<std::vector<std::size_t>> &groups);

    /// Consecutive groups of `group_size`; the last group may be shorter.
    static GroupLayout contiguous(std::size_t total_length, std::size_t group_size);
    /// Consecutive groups with the given sizes.
    static GroupLayout from_sizes(std::span<const std::size_t> sizes);
    /// One group covering everything.
    static GroupLayout single(std::size_t total_length);

    std::size_t total_length() const { return total_length_; }
    std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t group_size(std::size_t g) const { return offsets_[g + 1] - offsets_[g]; }
    std::size_t max_group_size() const;

    std::span<const std::size_t> group(std::size_t g) const {
        return {indices_.data() + offsets_[g], group_size(g)};
    }

private:
    std::size_t total_length_ = 0;
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> indices_;
};

/// Sub-groups (a GroupLayout) gathered into super-groups. Super-group s is the
/// contiguous run of sub-groups [run_offsets[s], run_offsets[s + 1]).
class SuperGroupLayout {
public:
    SuperGroupLayout() = default;
    SuperGroupLayout(GroupLayout base, std::vector<std::size_t> run_sizes);

    const GroupLayout &base() const { return base_; }
    std::size_t total_length() const { return base_.total_length(); }
    std::size_t size() const { return run_offsets_.empty() ? 0 : run_offsets_.size() - 1; }
    std::size_t first_subgroup(std::size_t s) const { return run_offsets_[s]; }
    std::size_t subgroup_count(std::size_t s) const { return run_offsets_[s + 1] - run_offsets_[s]; }
    std::size_t max_run() const;

private:
    GroupLayout base_;
    std::vector<std::size_t> run_offsets_;
};

/// Output of the full (all-groups) threshold.
template <Coefficient T>
struct ProxResult {
    std::vector<T> minimizer;
    std::vector<std::size_t> support_counts; ///< k per group
    std::vector<double> thresholds;          ///< h(k) per group
};

} // namespace isosparse

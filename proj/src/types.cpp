#include "isosparse/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace isosparse {

ThresholdParams::ThresholdParams(double lambda, double gamma) : lambda_{lambda}, gamma_{gamma} {
    if (!std::isfinite(lambda) || lambda < 0)
        throw std::invalid_argument("ThresholdParams: lambda must be finite and nonnegative");
    if (!std::isfinite(gamma) || gamma < 0)
        throw std::invalid_argument("ThresholdParams: gamma must be finite and nonnegative");
    if (!(lambda * gamma < 1))
        throw std::invalid_argument("ThresholdParams: lambda * gamma must be < 1 (got " +
                                    std::to_string(lambda * gamma) + ")");
}

ThresholdParams ThresholdParams::scaled(double factor) const {
    return ThresholdParams(lambda_ * factor, gamma_);
}

GroupLayout::GroupLayout(std::size_t total_length,
                         const std::vector<std::vector<std::size_t>> &groups)
    : total_length_{total_length} {
    std::vector<char> seen(total_length, 0);
    offsets_.reserve(groups.size() + 1);
    offsets_.push_back(0);
    indices_.reserve(total_length);
    for (const auto &g : groups) {
        if (g.empty())
            throw std::invalid_argument("GroupLayout: empty group");
        for (std::size_t i : g) {
            if (i >= total_length)
                throw std::invalid_argument("GroupLayout: index " + std::to_string(i) +
                                            " out of range");
            if (seen[i])
                throw std::invalid_argument("GroupLayout: index " + std::to_string(i) +
                                            " appears in more than one group");
            seen[i] = 1;
            indices_.push_back(i);
        }
        offsets_.push_back(indices_.size());
    }
    if (indices_.size() != total_length)
        throw std::invalid_argument("GroupLayout: groups do not cover every index");
}

GroupLayout GroupLayout::contiguous(std::size_t total_length, std::size_t group_size) {
    if (group_size == 0)
        throw std::invalid_argument("GroupLayout::contiguous: group size must be positive");
    std::vector<std::size_t> sizes;
    for (std::size_t start = 0; start < total_length; start += group_size)
        sizes.push_back(std::min(group_size, total_length - start));
    return from_sizes(sizes);
}

GroupLayout GroupLayout::from_sizes(std::span<const std::size_t> sizes) {
    GroupLayout layout;
    layout.offsets_.push_back(0);
    std::size_t next = 0;
    for (std::size_t s : sizes) {
        if (s == 0)
            throw std::invalid_argument("GroupLayout::from_sizes: empty group");
        for (std::size_t j = 0; j < s; ++j)
            layout.indices_.push_back(next++);
        layout.offsets_.push_back(next);
    }
    layout.total_length_ = next;
    return layout;
}

GroupLayout GroupLayout::single(std::size_t total_length) {
    if (total_length == 0)
        return from_sizes({});
    const std::size_t sizes[] = {total_length};
    return from_sizes(sizes);
}

std::size_t GroupLayout::max_group_size() const {
    std::size_t m = 0;
    for (std::size_t g = 0; g < size(); ++g)
        m = std::max(m, group_size(g));
    return m;
}

SuperGroupLayout::SuperGroupLayout(GroupLayout base, std::vector<std::size_t> run_sizes)
    : base_{std::move(base)} {
    run_offsets_.reserve(run_sizes.size() + 1);
    run_offsets_.push_back(0);
    for (std::size_t r : run_sizes) {
        if (r == 0)
            throw std::invalid_argument("SuperGroupLayout: empty super-group");
        run_offsets_.push_back(run_offsets_.back() + r);
    }
    if (run_offsets_.back() != base_.size())
        throw std::invalid_argument("SuperGroupLayout: super-groups do not partition the sub-groups");
}

std::size_t SuperGroupLayout::max_run() const {
    std::size_t m = 0;
    for (std::size_t s = 0; s < size(); ++s)
        m = std::max(m, subgroup_count(s));
    return m;
}

} // namespace isosparse

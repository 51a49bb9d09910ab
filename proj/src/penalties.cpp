#include "isosparse/penalties.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace isosparse {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

template <Coefficient T>
double l1(std::span<const T> x) {
    double s = 0;
    for (const T &v : x)
        s += std::abs(v);
    return s;
}

template <Coefficient T>
double group_norm(std::span<const T> x, std::span<const std::size_t> idx) {
    double e = 0;
    for (std::size_t i : idx)
        e += std::norm(x[i]);
    return std::sqrt(e);
}

template <Coefficient T>
void copy_into(const std::vector<T> &src, std::span<T> out) {
    std::copy(src.begin(), src.end(), out.begin());
}

} // namespace

std::string penalty_name(const Penalty &penalty) {
    return std::visit(overloaded{
                          [](const L1Penalty &) { return std::string("l1"); },
                          [](const GroupL21Penalty &) { return std::string("l21"); },
                          [](const ElitistLassoPenalty &) { return std::string("elasso"); },
                          [](const PairwiseGroupPenalty &) { return std::string("proposed"); },
                          [](const HybridPairwisePenalty &) { return std::string("hybrid"); },
                          [](const SparseGroupLassoPenalty &) { return std::string("sgl"); },
                          [](const PShrinkagePenalty &) { return std::string("ips"); },
                      },
                      penalty);
}

double weak_convexity(const Penalty &penalty) {
    if (const auto *p = std::get_if<PairwiseGroupPenalty>(&penalty))
        return p->lambda * p->gamma;
    if (const auto *p = std::get_if<HybridPairwisePenalty>(&penalty))
        return p->lambda * p->gamma;
    return 0;
}

Penalty with_lambda(const Penalty &penalty, double lambda) {
    Penalty copy = penalty;
    std::visit([lambda](auto &p) { p.lambda = lambda; }, copy);
    return copy;
}

template <Coefficient T>
double penalty_cost(const Penalty &penalty, std::span<const T> x) {
    return std::visit(
        overloaded{
            [&](const L1Penalty &p) { return p.lambda * l1(x); },
            [&](const GroupL21Penalty &p) {
                double s = 0;
                for (std::size_t g = 0; g < p.layout.size(); ++g)
                    s += group_norm(x, p.layout.group(g));
                return p.lambda * s;
            },
            [&](const ElitistLassoPenalty &p) {
                double s = 0;
                for (std::size_t g = 0; g < p.layout.size(); ++g) {
                    double a = 0;
                    for (std::size_t i : p.layout.group(g))
                        a += std::abs(x[i]);
                    s += a * a;
                }
                return p.lambda * s;
            },
            [&](const PairwiseGroupPenalty &p) {
                double s = 0;
                for (std::size_t g = 0; g < p.layout.size(); ++g) {
                    double a = 0;
                    double e = 0;
                    for (std::size_t i : p.layout.group(g)) {
                        const double m = std::abs(x[i]);
                        a += m;
                        e += m * m;
                    }
                    s += p.gamma * std::max(0.0, 0.5 * (a * a - e)) + a;
                }
                return p.lambda * s;
            },
            [&](const HybridPairwisePenalty &p) {
                const GroupLayout &base = p.layout.base();
                double s = 0;
                for (std::size_t sg = 0; sg < p.layout.size(); ++sg) {
                    double a = 0;
                    double e = 0;
                    for (std::size_t j = 0; j < p.layout.subgroup_count(sg); ++j) {
                        const double w = group_norm(x, base.group(p.layout.first_subgroup(sg) + j));
                        a += w;
                        e += w * w;
                    }
                    s += p.gamma * std::max(0.0, 0.5 * (a * a - e)) + a;
                }
                return p.lambda * s;
            },
            [&](const SparseGroupLassoPenalty &p) {
                double groups = 0;
                for (std::size_t g = 0; g < p.layout.size(); ++g)
                    groups += group_norm(x, p.layout.group(g));
                return p.lambda * (p.beta * l1(x) + (1 - p.beta) * groups);
            },
            [&](const PShrinkagePenalty &) { return 0.0; },
        },
        penalty);
}

template <Coefficient T>
void apply_prox(const Penalty &penalty, std::span<const T> in, std::span<T> out, double step) {
    if (in.size() != out.size())
        throw std::invalid_argument("apply_prox: output length mismatch");
    std::visit(overloaded{
                   [&](const L1Penalty &p) { copy_into(soft_threshold(in, step * p.lambda), out); },
                   [&](const GroupL21Penalty &p) { copy_into(prox_l21(in, p.layout, step * p.lambda), out); },
                   [&](const ElitistLassoPenalty &p) {
                       copy_into(prox_elasso(in, p.layout, step * p.lambda), out);
                   },
                   [&](const PairwiseGroupPenalty &p) {
                       copy_into(prox_full(in, p.layout, ThresholdParams(step * p.lambda, p.gamma)).minimizer,
                                 out);
                   },
                   [&](const HybridPairwisePenalty &p) {
                       copy_into(prox_hybrid(in, p.layout, ThresholdParams(step * p.lambda, p.gamma)), out);
                   },
                   [&](const SparseGroupLassoPenalty &p) {
                       copy_into(prox_sgl(in, p.layout, step * p.lambda, p.beta), out);
                   },
                   [&](const PShrinkagePenalty &p) {
                       if constexpr (std::is_same_v<T, double>) {
                           // Threshold parameter t with t^(2-p) = step * lambda^(2-p), so that
                           // p = 1 is exactly the soft threshold of step * lambda.
                           const double t = std::pow(step, 1 / (2 - p.p)) * p.lambda;
                           copy_into(p_shrink(in, t, p.p), out);
                       } else {
                           throw std::invalid_argument("p-shrinkage is only defined for real coefficients");
                       }
                   },
               },
               penalty);
}

template double penalty_cost<double>(const Penalty &, std::span<const double>);
template double penalty_cost<Complex>(const Penalty &, std::span<const Complex>);
template void apply_prox<double>(const Penalty &, std::span<const double>, std::span<double>, double);
template void apply_prox<Complex>(const Penalty &, std::span<const Complex>, std::span<Complex>, double);

} // namespace isosparse

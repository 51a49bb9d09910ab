#pragma once

#include <span>
#include <string>
#include <variant>

#include "isosparse/threshold.hpp"
#include "isosparse/types.hpp"

namespace isosparse {

// Regularizers the splitting solvers can plug in. Each one knows its weighted
// value lambda * P(x) and the prox of step * lambda * P.

struct L1Penalty {
    double lambda = 0;
};

struct GroupL21Penalty {
    GroupLayout layout;
    double lambda = 0;
};

/// lambda * sum_g ||x_g||_1^2
struct ElitistLassoPenalty {
    GroupLayout layout;
    double lambda = 0;
};

/// lambda * sum_g [gamma * sum_{i<m} |x_i x_m| + ||x_g||_1]
struct PairwiseGroupPenalty {
    GroupLayout layout;
    double lambda = 0;
    double gamma = 0;
};

/// The pairwise penalty applied to the sub-group norms of each super-group.
struct HybridPairwisePenalty {
    SuperGroupLayout layout;
    double lambda = 0;
    double gamma = 0;
};

struct SparseGroupLassoPenalty {
    GroupLayout layout;
    double lambda = 0;
    double beta = 0.95;
};

/// p-shrinkage thresholding. It has no closed-form penalty; its value is
/// reported as zero.
struct PShrinkagePenalty {
    double lambda = 0;
    double p = -0.5;
};

using Penalty = std::variant<L1Penalty, GroupL21Penalty, ElitistLassoPenalty, PairwiseGroupPenalty,
                             HybridPairwisePenalty, SparseGroupLassoPenalty, PShrinkagePenalty>;

std::string penalty_name(const Penalty &penalty);

/// lambda * gamma for the weakly convex penalties, 0 for the convex ones.
double weak_convexity(const Penalty &penalty);

/// Copy of `penalty` with its weight lambda replaced.
Penalty with_lambda(const Penalty &penalty, double lambda);

/// lambda * P(x).
template <Coefficient T>
double penalty_cost(const Penalty &penalty, std::span<const T> x);

/// out = prox_{step * lambda * P}(in). `out` may alias `in`.
template <Coefficient T>
void apply_prox(const Penalty &penalty, std::span<const T> in, std::span<T> out, double step);

} // namespace isosparse

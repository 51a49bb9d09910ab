#include "isosparse/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace isosparse::oracle {

namespace {

// Evaluates the objective at x = sign .* u on the free coordinates of a face.
class FaceView {
public:
    FaceView(const Objective &f, std::size_t n, std::vector<int> sign, std::vector<std::size_t> free)
        : f_{f}, x_(n, 0.0), sign_{std::move(sign)}, free_{std::move(free)} {}

    std::size_t dim() const { return free_.size(); }

    double operator()(std::span<const double> u) {
        for (std::size_t j = 0; j < free_.size(); ++j)
            x_[free_[j]] = sign_[free_[j]] * u[j];
        return f_(x_);
    }

    std::vector<double> embed(std::span<const double> u) {
        std::vector<double> x(x_.size(), 0.0);
        for (std::size_t j = 0; j < free_.size(); ++j)
            x[free_[j]] = sign_[free_[j]] * u[j];
        return x;
    }

private:
    const Objective &f_;
    std::vector<double> x_;
    std::vector<int> sign_;
    std::vector<std::size_t> free_;
};

// Minimizer of the quadratic fitted by central differences around the middle
// of the face [0, H]^d. Exact when the cost is quadratic on the face.
std::optional<std::vector<double>> model_minimizer(FaceView &face, double H) {
    const std::size_t d = face.dim();
    const double delta = H / 4;
    std::vector<double> c(d, H / 2);
    std::vector<double> p = c;
    const double f0 = face(c);
    Eigen::VectorXd grad(d);
    Eigen::MatrixXd hess(d, d);
    std::vector<double> fplus(d), fminus(d);
    for (std::size_t i = 0; i < d; ++i) {
        p[i] = c[i] + delta;
        fplus[i] = face(p);
        p[i] = c[i] - delta;
        fminus[i] = face(p);
        p[i] = c[i];
        grad(i) = (fplus[i] - fminus[i]) / (2 * delta);
        hess(i, i) = (fplus[i] - 2 * f0 + fminus[i]) / (delta * delta);
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            double acc = 0;
            for (int si : {1, -1}) {
                for (int sj : {1, -1}) {
                    p[i] = c[i] + si * delta;
                    p[j] = c[j] + sj * delta;
                    acc += si * sj * face(p);
                }
            }
            p[i] = c[i];
            p[j] = c[j];
            hess(i, j) = hess(j, i) = acc / (4 * delta * delta);
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(hess);
    if (llt.info() != Eigen::Success)
        return std::nullopt;
    const Eigen::VectorXd step = llt.solve(-grad);
    std::vector<double> u(d);
    for (std::size_t i = 0; i < d; ++i)
        u[i] = c[i] + step(i);
    return u;
}

// Vertex of the parabola through three points, or NaN if it is not convex.
double parabola_vertex(double a, double fa, double b, double fb, double c, double fc) {
    const double curvature = ((fc - fb) / (c - b) - (fb - fa) / (b - a)) / (c - a);
    if (!(curvature > 0))
        return std::numeric_limits<double>::quiet_NaN();
    const double num = (b - a) * (b - a) * (fb - fc) - (b - c) * (b - c) * (fb - fa);
    const double den = (b - a) * (fb - fc) - (b - c) * (fb - fa);
    return b - 0.5 * num / den;
}

// Projected coordinate descent on [0, H]^d; each coordinate step is the vertex
// of a parabola through three points of the face.
double coordinate_descent(FaceView &face, std::vector<double> &u, double H, const OracleConfig &cfg) {
    const std::size_t d = u.size();
    std::vector<double> delta(d, H / 8);
    const double min_delta = 1e-4 * H;
    double fcur = face(u);
    for (std::size_t iter = 0; iter < cfg.coordinate_descent_iters; ++iter) {
        double max_change = 0;
        double max_abs = 0;
        for (std::size_t i = 0; i < d; ++i) {
            const double t = u[i];
            const double h = delta[i];
            double a, b, c;
            if (t - h >= 0 && t + h <= H) {
                a = t - h, b = t, c = t + h;
            } else if (t - h < 0) {
                a = t, b = t + h, c = t + 2 * h;
            } else {
                a = t - 2 * h, b = t - h, c = t;
            }
            auto eval_at = [&](double v) {
                if (v == t)
                    return fcur;
                u[i] = v;
                const double fv = face(u);
                u[i] = t;
                return fv;
            };
            const double fa = eval_at(a), fb = eval_at(b), fc = eval_at(c);
            double next = parabola_vertex(a, fa, b, fb, c, fc);
            double fnext;
            if (std::isnan(next)) {
                // Flat to rounding: take the best sampled point.
                next = t, fnext = fcur;
                if (fa < fnext) next = a, fnext = fa;
                if (fb < fnext) next = b, fnext = fb;
                if (fc < fnext) next = c, fnext = fc;
            } else {
                next = std::clamp(next, 0.0, H);
                fnext = eval_at(next);
            }
            if (fnext <= fcur) {
                const double change = std::abs(next - t);
                max_change = std::max(max_change, change);
                u[i] = next;
                fcur = fnext;
                delta[i] = std::clamp(2 * change, min_delta, H / 8);
            } else {
                delta[i] = std::max(min_delta, delta[i] / 2);
            }
            max_abs = std::max(max_abs, std::abs(u[i]));
        }
        if (max_change <= cfg.tolerance * std::max(max_abs, 1e-6 * H))
            break;
    }
    return fcur;
}

} // namespace

OracleResult brute_force_prox(std::span<const double> z, const Objective &objective, const OracleConfig &cfg) {
    const std::size_t n = z.size();
    if (n > 8)
        throw std::invalid_argument("brute_force_prox: at most 8 coordinates are supported");
    if (!(cfg.tolerance > 0) || cfg.restarts < 1)
        throw std::invalid_argument("brute_force_prox: tolerance must be positive and restarts >= 1");
    double zmax = 0;
    for (double v : z) {
        if (!std::isfinite(v))
            throw std::invalid_argument("brute_force_prox: non-finite input");
        zmax = std::max(zmax, std::abs(v));
    }
    const double H = cfg.grid_halfwidth > 0 ? cfg.grid_halfwidth : zmax + 1;

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    OracleResult best;
    best.cost = std::numeric_limits<double>::infinity();
    best.minimizer.assign(n, 0.0);

    std::size_t patterns = 1;
    for (std::size_t i = 0; i < n; ++i)
        patterns *= 3;

    for (std::size_t code = 0; code < patterns; ++code) {
        std::vector<int> sign(n, 0);
        std::vector<std::size_t> free;
        std::size_t rest = code;
        for (std::size_t i = 0; i < n; ++i) {
            sign[i] = static_cast<int>(rest % 3) - 1;
            rest /= 3;
            if (sign[i] != 0)
                free.push_back(i);
        }
        FaceView face(objective, n, sign, free);
        auto consider = [&](std::vector<double> u, double cost) {
            if (cost < best.cost) {
                best.cost = cost;
                best.minimizer = face.embed(u);
            }
        };
        if (free.empty()) {
            std::vector<double> none;
            consider(none, face(none));
            ++best.patterns_kept;
            continue;
        }
        if (auto start = model_minimizer(face, H)) {
            const double slack = cfg.face_slack * H;
            const bool inside = std::all_of(start->begin(), start->end(),
                                            [&](double v) { return v >= -slack && v <= H + slack; });
            if (inside) {
                for (double &v : *start)
                    v = std::clamp(v, 0.0, H);
                const double cost = coordinate_descent(face, *start, H, cfg);
                consider(*start, cost);
                ++best.patterns_kept;
            }
        }
        for (std::size_t r = 1; r < cfg.restarts; ++r) {
            std::vector<double> u(free.size());
            for (double &v : u)
                v = H * unit(rng);
            const double cost = coordinate_descent(face, u, H, cfg);
            consider(u, cost);
        }
    }
    return best;
}

ConvexityReport convexity_probe(const Objective &objective, std::size_t dim, std::size_t samples,
                                std::uint64_t seed, double radius) {
    if (samples < 100)
        throw std::invalid_argument("convexity_probe: at least 100 samples are required");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-radius, radius);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> x(dim), y(dim), m(dim);
    for (std::size_t s = 0; s < samples; ++s) {
        for (std::size_t i = 0; i < dim; ++i) {
            x[i] = coord(rng);
            y[i] = coord(rng);
        }
        const double t = unit(rng);
        for (std::size_t i = 0; i < dim; ++i)
            m[i] = t * x[i] + (1 - t) * y[i];
        const double lhs = objective(m);
        const double rhs = t * objective(x) + (1 - t) * objective(y);
        if (lhs > rhs + 1e-9)
            return {false, ConvexityWitness{x, y, t, lhs - rhs}};
    }
    return {};
}

double pairwise_penalty_naive(std::span<const double> u, double gamma) {
    double pairs = 0;
    double l1 = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        l1 += std::abs(u[i]);
        for (std::size_t m = i + 1; m < u.size(); ++m)
            pairs += std::abs(u[i] * u[m]);
    }
    return gamma * pairs + l1;
}

Objective prox_cost(std::vector<double> z, Objective penalty) {
    return [z = std::move(z), penalty = std::move(penalty)](std::span<const double> x) {
        double q = 0;
        for (std::size_t i = 0; i < z.size(); ++i)
            q += (z[i] - x[i]) * (z[i] - x[i]);
        return 0.5 * q + penalty(x);
    };
}

} // namespace isosparse::oracle

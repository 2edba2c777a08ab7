#include "neutro/fcm.hpp"

#include <algorithm>
#include <cmath>

#include "neutro/error.hpp"
#include "neutro/parallel.hpp"
#include "neutro/rng.hpp"
#include "neutro/solver.hpp"

namespace neutro {

namespace {

void validate(const FcmConfig& cfg, std::size_t n) {
    if (cfg.c < 2) throw Error("invalid_config", "FCM needs at least 2 clusters");
    if (!(cfg.m > 1.0)) throw Error("invalid_config", "fuzzifier m must exceed 1");
    if (!(cfg.eps_conv > 0.0)) throw Error("invalid_config", "eps_conv must be positive");
    if (cfg.max_iter < 0) throw Error("invalid_config", "max_iter must be non-negative");
    if (!(cfg.singular_delta > 0.0)) throw Error("invalid_config", "singular_delta must be positive");
    if (n < static_cast<std::size_t>(cfg.c))
        throw Error("too_few_points", "need at least c = " + std::to_string(cfg.c) + " points, have " + std::to_string(n));
}

}  // namespace

double fcm_objective(const Matrix& points, const Matrix& W, const Matrix& centers, double m) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i)
        for (std::size_t j = 0; j < centers.rows(); ++j)
            total += std::pow(W(i, j), m) * squared_distance(points.row(i), centers.row(j), points.cols());
    return total;
}

Matrix fcm_memberships(const Matrix& points, const Matrix& centers, const FcmConfig& cfg) {
    const std::size_t n = points.rows();
    const std::size_t c = centers.rows();
    const std::size_t d = points.cols();
    if (centers.cols() != d) throw Error("shape_mismatch", "centre dimension differs from point dimension");
    Matrix W(n, c);
    const double e = 1.0 / (cfg.m - 1.0);
    const double delta2 = cfg.singular_delta * cfg.singular_delta;
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        std::vector<double> d2(c);
        for (std::size_t i = begin; i < end; ++i) {
            std::size_t coincident = c;
            for (std::size_t j = 0; j < c; ++j) {
                d2[j] = squared_distance(points.row(i), centers.row(j), d);
                if (d2[j] < delta2 && (coincident == c || d2[j] < d2[coincident])) coincident = j;
            }
            if (coincident < c) {
                for (std::size_t j = 0; j < c; ++j) W(i, j) = j == coincident ? 1.0 : 0.0;
                continue;
            }
            for (std::size_t j = 0; j < c; ++j) {
                double s = 0.0;
                for (std::size_t l = 0; l < c; ++l) s += std::pow(d2[j] / d2[l], e);
                W(i, j) = 1.0 / s;
            }
        }
    });
    return W;
}

Matrix fcm_centers(const Matrix& points, const Matrix& W, double m, const Matrix& centers_prev) {
    const std::size_t n = points.rows();
    const std::size_t c = W.cols();
    const std::size_t d = points.cols();
    Matrix centers(c, d);
    std::vector<double> num(d);
    for (std::size_t j = 0; j < c; ++j) {
        std::fill(num.begin(), num.end(), 0.0);
        double den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = std::pow(W(i, j), m);
            den += w;
            for (std::size_t t = 0; t < d; ++t) num[t] += w * points(i, t);
        }
        if (den > 0.0) {
            for (std::size_t t = 0; t < d; ++t) centers(j, t) = num[t] / den;
        } else {
            std::copy(centers_prev.row(j), centers_prev.row(j) + d, centers.row(j));
        }
    }
    return centers;
}

FcmResult fcm_fit(const Matrix& points, const FcmConfig& cfg, const FcmOptions& options) {
    validate(cfg, points.rows());
    FcmResult res;
    if (options.initial_centers) {
        if (options.initial_centers->rows() != static_cast<std::size_t>(cfg.c) ||
            options.initial_centers->cols() != points.cols())
            throw Error("shape_mismatch", "initial centres must be c x d");
        res.centers = *options.initial_centers;
    } else {
        Rng rng(cfg.seed);
        res.centers = seed_centers(points, cfg.c, rng);
    }
    res.W = Matrix(points.rows(), static_cast<std::size_t>(cfg.c), 1.0 / cfg.c);
    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        Matrix next = fcm_memberships(points, res.centers, cfg);
        res.centers = fcm_centers(points, next, cfg.m, res.centers);
        res.objective_trace.push_back(fcm_objective(points, next, res.centers, cfg.m));
        res.iterations = iter;
        double change = 0.0;
        for (std::size_t q = 0; q < next.data().size(); ++q)
            change = std::max(change, std::abs(next.data()[q] - res.W.data()[q]));
        res.W = std::move(next);
        if (options.on_iteration) options.on_iteration(iter, res.W, res.centers);
        if (change <= cfg.eps_conv) {
            res.converged = true;
            break;
        }
    }
    return res;
}

std::vector<int> row_argmax(const Matrix& W) {
    std::vector<int> out(W.rows(), 0);
    for (std::size_t i = 0; i < W.rows(); ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < W.cols(); ++j)
            if (W(i, j) > W(i, best)) best = j;
        out[i] = static_cast<int>(best);
    }
    return out;
}

}  // namespace neutro

#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "neutro/matrix.hpp"
#include "neutro/solver.hpp"

namespace testing_helpers {

inline neutro::Matrix random_points(std::mt19937_64& gen, std::size_t n, std::size_t d, double hi) {
    std::uniform_real_distribution<double> u(0.0, hi);
    neutro::Matrix m(n, d);
    for (double& v : m.data()) v = u(gen);
    return m;
}

inline std::vector<double> random_vector(std::mt19937_64& gen, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = u(gen);
    return v;
}

// Strictly positive memberships with rows summing to 1.
inline neutro::Partition random_partition(std::mt19937_64& gen, std::size_t n, std::size_t k) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    neutro::Partition p{neutro::Matrix(n, k), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) s += p.T(i, j) = u(gen);
        s += p.F[i] = u(gen);
        for (std::size_t j = 0; j < k; ++j) p.T(i, j) /= s;
        p.F[i] /= s;
    }
    return p;
}

// Independent evaluation of the cost, written directly from its definition.
inline double reference_cost(const neutro::Matrix& x, const std::vector<double>& I, const neutro::Partition& p,
                             const neutro::Matrix& c, const neutro::SolverConfig& cfg) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double dist_sum = 0.0;
        for (std::size_t j = 0; j < c.rows(); ++j) {
            double d2 = 0.0;
            for (std::size_t t = 0; t < x.cols(); ++t) d2 += (x(i, t) - c(j, t)) * (x(i, t) - c(j, t));
            dist_sum += d2;
            total += std::pow(cfg.w1 * I[i] * p.T(i, j), cfg.m) * d2;
        }
        total += std::pow(cfg.w2 * (1.0 - I[i]) * p.F[i], cfg.m) * (cfg.k - dist_sum);
    }
    return total;
}

inline double reference_lagrangian(const neutro::Matrix& x, const std::vector<double>& I, const neutro::Partition& p,
                                   const neutro::Matrix& c, const std::vector<double>& lambda,
                                   const neutro::SolverConfig& cfg) {
    double L = reference_cost(x, I, p, c, cfg);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double s = p.F[i] - 1.0;
        for (std::size_t j = 0; j < p.T.cols(); ++j) s += p.T(i, j);
        L -= lambda[i] * s;
    }
    return L;
}

}  // namespace testing_helpers

#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "neutro/matrix.hpp"

namespace neutro {

struct FcmConfig {
    int c = 2;
    double m = 2.0;
    double eps_conv = 1e-6;
    int max_iter = 300;
    std::uint64_t seed = 0;
    double singular_delta = 1e-9;
};

struct FcmResult {
    Matrix W;        // n x c memberships
    Matrix centers;  // c x d
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;
};

struct FcmOptions {
    std::optional<Matrix> initial_centers;
    std::function<void(int iteration, const Matrix& W, const Matrix& centers)> on_iteration;
};

// sum_i sum_j w_ij^m ||x_i - c_j||^2
double fcm_objective(const Matrix& points, const Matrix& W, const Matrix& centers, double m);

// Standard membership update w_ij = 1 / sum_l (d_ij / d_il)^(2/(m-1)); a
// point closer than delta to a centre is hard-assigned to the nearest one.
Matrix fcm_memberships(const Matrix& points, const Matrix& centers, const FcmConfig& cfg);

// Weighted means with weights w_ij^m.
Matrix fcm_centers(const Matrix& points, const Matrix& W, double m, const Matrix& centers_prev);

// Centres start from the same seeded D^2 sampling as the neutrosophic
// solver; each iteration updates memberships from the centres, then the
// centres, and stops once the largest membership change is at most eps_conv.
FcmResult fcm_fit(const Matrix& points, const FcmConfig& cfg, const FcmOptions& options = {});

// Index of the largest entry in each row (lowest index on ties).
std::vector<int> row_argmax(const Matrix& W);

}  // namespace neutro

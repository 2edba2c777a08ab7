#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

#include "neutro/matrix.hpp"
#include "neutro/rng.hpp"

namespace neutro {

// How a point's main and noise memberships are computed from its distances.
//
// Stationary: the exact minimiser of the cost over (T_i, F_i) subject to
//   sum_j T_ij + F_i = 1, i.e. T_ij proportional to (w1 I)^(-m/(m-1)) d_ij^(-2/(m-1))
//   and F_i proportional to (w2 (1-I))^(-m/(m-1)) (k - sum_j d_ij^2)^(-1/(m-1)).
// Printed: the same form with the coefficients (w1 I)^-1 and (w2 (1-I))^-1.
//   It zeroes the simplified partials of printed_membership_gradients and is
//   kept for comparison; it is not a stationary point of the cost.
enum class MembershipRule { Stationary, Printed };

struct SolverConfig {
    int k = 2;
    double m = 2.0;
    double w1 = 1.0;
    double w2 = 2.0;
    double eps_conv = 1e-6;
    int max_iter = 300;
    double eps_density = 4.0;
    int np_threshold = 4;
    double alpha = 0.05;
    double boundary_t = 0.4;
    std::uint64_t seed = 0;
    double singular_delta = 1e-9;
    MembershipRule rule = MembershipRule::Stationary;
};

void validate(const SolverConfig& cfg);
void to_json(nlohmann::json& j, const SolverConfig& cfg);
// Reads the keys that are present; missing keys keep their current value.
void from_json(const nlohmann::json& j, SolverConfig& cfg);

// T is n x k main-cluster memberships, F the n noise memberships.
struct Partition {
    Matrix T;
    std::vector<double> F;

    bool operator==(const Partition& other) const = default;
};

// Largest |sum_j T_ij + F_i - 1| over all rows.
double max_row_sum_error(const Partition& part);
// True when every entry lies in [0, 1] and every row sums to 1 within tol.
bool satisfies_constraint(const Partition& part, double tol = 1e-9);

struct Diagnostics {
    long noise_base_clamps = 0;   // k - sum d^2 <= 0 met and clamped to delta
    long center_fallbacks = 0;    // centre update denominator below delta
    long centers_outside_box = 0; // centres outside the data box grown by 10%
};

struct FitResult {
    Partition partition;
    Matrix centers;
    std::vector<double> indeterminacy;
    int iterations = 0;
    std::vector<double> cost_trace;
    bool converged = false;
    Diagnostics diagnostics;
};

struct IterationState {
    int iteration = 0;
    const Partition& partition;
    const Matrix& centers;
    double cost = 0.0;
};

struct FitOptions {
    // Precomputed indeterminacy (for example from raw coordinates). When
    // absent it is computed from the points handed to fit.
    std::optional<std::vector<double>> indeterminacy;
    // Overrides the seeded centre initialisation.
    std::optional<Matrix> initial_centers;
    std::function<void(const IterationState&)> on_iteration;
};

// D^2 (k-means++) seeding: the first centre is a uniformly drawn point, each
// further centre is drawn with probability proportional to its squared
// distance to the nearest chosen centre. When every remaining distance is 0
// the next centre is drawn uniformly among points not yet chosen.
Matrix seed_centers(const Matrix& points, int k, Rng& rng);

// Seeded initialisation: first centre uniform, the rest by D^2 sampling
// (k-means++), then per row F_i = 0.05 u and T_i uniform, rescaled so the row
// sums to 1. Random draws are consumed in exactly that order.
std::pair<Partition, Matrix> initialize(const Matrix& points, const SolverConfig& cfg);

double compute_cost(const Matrix& points, const std::vector<double>& I, const Partition& part,
                    const Matrix& centers, const SolverConfig& cfg);

// Per point: pure noise (T = 0, F = 1) when I_i >= 1; otherwise a hard
// assignment to the nearest coincident centre when some d_ij^2 < delta^2;
// otherwise the closed-form rule selected by cfg.rule.
Partition update_memberships(const Matrix& points, const std::vector<double>& I,
                             const Matrix& centers, const SolverConfig& cfg,
                             Diagnostics* diagnostics = nullptr);

// The Lagrange multiplier implied by update_memberships for each point,
// m * K_i^(m-1) with K_i the row normaliser (0 for pure-noise and coincident
// points).
std::vector<double> implied_lambda(const Matrix& points, const std::vector<double>& I,
                                   const Matrix& centers, const SolverConfig& cfg);

// Row normaliser K_i of the closed-form rule (0 for pure-noise and coincident
// points).
std::vector<double> membership_normalizer(const Matrix& points, const std::vector<double>& I,
                                          const Matrix& centers, const SolverConfig& cfg);

// c_j = sum_i u_ij x_i / sum_i u_ij with u_ij = (w1 I_i T_ij)^m - (w2 (1-I_i) F_i)^m.
// A denominator below delta keeps the previous centre.
Matrix update_centers(const Matrix& points, const std::vector<double>& I, const Partition& part,
                      const Matrix& centers_prev, const SolverConfig& cfg,
                      Diagnostics* diagnostics = nullptr);

struct Gradients {
    Matrix dT;               // n x k
    std::vector<double> dF;  // n
    Matrix dC;               // k x d
};

// Partial derivatives of L = cost - sum_i lambda_i (sum_j T_ij + F_i - 1).
Gradients lagrangian_gradients(const Matrix& points, const std::vector<double>& I,
                               const Partition& part, const Matrix& centers,
                               const std::vector<double>& lambda, const SolverConfig& cfg);

// The simplified membership partials m (w1 I T)^(m-1) d^2 - lambda and
// m (w2 (1-I) F)^(m-1) (k - sum d^2) - lambda, which MembershipRule::Printed
// zeroes. Only dT and dF are filled.
Gradients printed_membership_gradients(const Matrix& points, const std::vector<double>& I,
                                       const Partition& part, const Matrix& centers,
                                       const std::vector<double>& lambda, const SolverConfig& cfg);

// Alternates membership and centre updates until the largest change of T
// falls below eps_conv or max_iter iterations have run.
FitResult fit(const Matrix& points, const SolverConfig& cfg, const FitOptions& options = {});

struct RestartResult {
    FitResult best;
    std::size_t best_index = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<double> final_costs;
};

// Runs fit `restarts` times (restart 0 uses cfg.seed, restart r > 0 uses
// derive_seed(cfg.seed, r)) and keeps the run with the lowest final cost;
// ties keep the earliest run.
RestartResult fit_restarts(const Matrix& points, const SolverConfig& cfg, int restarts,
                           const FitOptions& options = {});

}  // namespace neutro

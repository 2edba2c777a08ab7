#include "neutro/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "neutro/error.hpp"
#include "neutro/indeterminacy.hpp"
#include "neutro/parallel.hpp"

namespace neutro {

void validate(const SolverConfig& cfg) {
    auto fail = [](const std::string& msg) { throw Error("invalid_config", msg); };
    if (cfg.k < 2) fail("k must be at least 2");
    if (!(cfg.m > 1.0)) fail("fuzzifier m must exceed 1");
    if (!(cfg.w1 > 0.0) || !(cfg.w2 > 0.0)) fail("weights w1 and w2 must be positive");
    if (!(cfg.eps_conv > 0.0)) fail("eps_conv must be positive");
    if (cfg.max_iter < 0) fail("max_iter must be non-negative");
    if (!(cfg.eps_density > 0.0)) fail("eps_density must be positive");
    if (cfg.np_threshold < 1) fail("np_threshold must be at least 1");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 0.5)) fail("alpha must lie in (0, 0.5)");
    if (!(cfg.boundary_t > 0.0 && cfg.boundary_t < 0.5)) fail("boundary threshold t must lie in (0, 0.5)");
    if (!(cfg.singular_delta > 0.0)) fail("singular_delta must be positive");
}

void to_json(nlohmann::json& j, const SolverConfig& cfg) {
    j = nlohmann::json{{"k", cfg.k},
                       {"m", cfg.m},
                       {"w1", cfg.w1},
                       {"w2", cfg.w2},
                       {"eps_conv", cfg.eps_conv},
                       {"max_iter", cfg.max_iter},
                       {"eps_density", cfg.eps_density},
                       {"np_threshold", cfg.np_threshold},
                       {"alpha", cfg.alpha},
                       {"boundary_t", cfg.boundary_t},
                       {"seed", cfg.seed},
                       {"singular_delta", cfg.singular_delta},
                       {"rule", cfg.rule == MembershipRule::Stationary ? "stationary" : "printed"}};
}

void from_json(const nlohmann::json& j, SolverConfig& cfg) {
    auto read = [&j](const char* key, auto& field) {
        if (j.contains(key)) j.at(key).get_to(field);
    };
    read("k", cfg.k);
    read("m", cfg.m);
    read("w1", cfg.w1);
    read("w2", cfg.w2);
    read("eps_conv", cfg.eps_conv);
    read("max_iter", cfg.max_iter);
    read("eps_density", cfg.eps_density);
    read("np_threshold", cfg.np_threshold);
    read("alpha", cfg.alpha);
    read("boundary_t", cfg.boundary_t);
    read("seed", cfg.seed);
    read("singular_delta", cfg.singular_delta);
    if (j.contains("rule")) {
        const auto rule = j.at("rule").get<std::string>();
        if (rule == "stationary")
            cfg.rule = MembershipRule::Stationary;
        else if (rule == "printed")
            cfg.rule = MembershipRule::Printed;
        else
            throw Error("invalid_config", "unknown membership rule '" + rule + "'");
    }
}

double max_row_sum_error(const Partition& part) {
    double worst = 0.0;
    for (std::size_t i = 0; i < part.T.rows(); ++i) {
        double s = part.F[i];
        for (std::size_t j = 0; j < part.T.cols(); ++j) s += part.T(i, j);
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

bool satisfies_constraint(const Partition& part, double tol) {
    for (double v : part.T.data())
        if (!(v >= 0.0 && v <= 1.0)) return false;
    for (double v : part.F)
        if (!(v >= 0.0 && v <= 1.0)) return false;
    return max_row_sum_error(part) <= tol;
}

namespace {

void check_shapes(const Matrix& points, const std::vector<double>& I, const Matrix& centers) {
    if (I.size() != points.rows())
        throw Error("shape_mismatch", "indeterminacy length differs from point count");
    if (centers.cols() != points.cols())
        throw Error("shape_mismatch", "centre dimension differs from point dimension");
    if (centers.rows() < 1) throw Error("shape_mismatch", "at least one centre is required");
}

void check_shapes(const Matrix& points, const std::vector<double>& I, const Partition& part,
                  const Matrix& centers) {
    check_shapes(points, I, centers);
    if (part.T.rows() != points.rows() || part.F.size() != points.rows() || part.T.cols() != centers.rows())
        throw Error("shape_mismatch", "partition shape disagrees with points and centres");
}

struct RowResult {
    double normalizer = 0.0;
    bool clamped = false;
};

// Memberships of one point. Writes k values to T and the noise membership to
// F. Weights are combined in log space so extreme distances or fuzzifiers
// close to 1 do not overflow.
RowResult membership_row(const double* x, const Matrix& centers, double I, const SolverConfig& cfg,
                         double* T, double& F, std::vector<double>& scratch) {
    const std::size_t k = centers.rows();
    const std::size_t d = centers.cols();
    RowResult res;
    if (I >= 1.0) {
        std::fill(T, T + k, 0.0);
        F = 1.0;
        return res;
    }
    scratch.resize(k + 1);
    double* d2 = scratch.data();
    const double delta2 = cfg.singular_delta * cfg.singular_delta;
    std::size_t coincident = k;
    double sum_d2 = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        d2[j] = squared_distance(x, centers.row(j), d);
        sum_d2 += d2[j];
        if (d2[j] < delta2 && (coincident == k || d2[j] < d2[coincident])) coincident = j;
    }
    if (coincident < k) {
        std::fill(T, T + k, 0.0);
        T[coincident] = 1.0;
        F = 0.0;
        return res;
    }
    double base = static_cast<double>(cfg.k) - sum_d2;
    if (!(base > 0.0)) {
        base = cfg.singular_delta;
        res.clamped = true;
    }
    const double e = 1.0 / (cfg.m - 1.0);
    const double p = cfg.rule == MembershipRule::Stationary ? cfg.m / (cfg.m - 1.0) : 1.0;
    const double log_t = -p * std::log(cfg.w1 * I);
    const double log_f = -p * std::log(cfg.w2 * (1.0 - I));

    double* logs = scratch.data();  // reuse: d2[j] is replaced by its log-weight
    double top = log_f - e * std::log(base);
    logs[k] = top;
    for (std::size_t j = 0; j < k; ++j) {
        logs[j] = log_t - e * std::log(d2[j]);
        top = std::max(top, logs[j]);
    }
    double total = 0.0;
    for (std::size_t j = 0; j <= k; ++j) {
        logs[j] = std::exp(logs[j] - top);
        total += logs[j];
    }
    for (std::size_t j = 0; j < k; ++j) T[j] = logs[j] / total;
    F = logs[k] / total;
    res.normalizer = std::exp(-top) / total;
    return res;
}

}  // namespace

Matrix seed_centers(const Matrix& points, int k, Rng& rng) {
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    if (k < 1 || n < static_cast<std::size_t>(k))
        throw Error("too_few_points", "need at least k = " + std::to_string(k) + " points, have " + std::to_string(n));
    Matrix centers(k, d);
    std::vector<bool> chosen(n, false);
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());

    std::size_t pick = rng.below(n);
    for (int c = 0; c < k; ++c) {
        if (c > 0) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) total += nearest[i];
            if (total > 0.0) {
                const double target = rng.uniform() * total;
                double acc = 0.0;
                pick = n;
                std::size_t last_positive = n;
                for (std::size_t i = 0; i < n; ++i) {
                    if (nearest[i] <= 0.0) continue;
                    last_positive = i;
                    acc += nearest[i];
                    if (target < acc) {
                        pick = i;
                        break;
                    }
                }
                if (pick == n) pick = last_positive;
            } else {
                std::size_t remaining = 0;
                for (std::size_t i = 0; i < n; ++i) remaining += chosen[i] ? 0 : 1;
                std::size_t r = rng.below(remaining);
                for (std::size_t i = 0; i < n; ++i) {
                    if (chosen[i]) continue;
                    if (r-- == 0) {
                        pick = i;
                        break;
                    }
                }
            }
        }
        chosen[pick] = true;
        std::copy(points.row(pick), points.row(pick) + d, centers.row(c));
        for (std::size_t i = 0; i < n; ++i)
            nearest[i] = chosen[i] ? 0.0 : std::min(nearest[i], squared_distance(points.row(i), points.row(pick), d));
    }
    return centers;
}

namespace {

Partition random_partition(std::size_t n, std::size_t k, Rng& rng) {
    Partition part{Matrix(n, k), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        part.F[i] = 0.05 * rng.uniform();
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            part.T(i, j) = rng.uniform() + std::numeric_limits<double>::min();
            s += part.T(i, j);
        }
        for (std::size_t j = 0; j < k; ++j) part.T(i, j) = part.T(i, j) / s * (1.0 - part.F[i]);
    }
    return part;
}

}  // namespace

std::pair<Partition, Matrix> initialize(const Matrix& points, const SolverConfig& cfg) {
    validate(cfg);
    Rng rng(cfg.seed);
    Matrix centers = seed_centers(points, cfg.k, rng);
    Partition part = random_partition(points.rows(), static_cast<std::size_t>(cfg.k), rng);
    return {std::move(part), std::move(centers)};
}

double compute_cost(const Matrix& points, const std::vector<double>& I, const Partition& part,
                    const Matrix& centers, const SolverConfig& cfg) {
    check_shapes(points, I, part, centers);
    const std::size_t n = points.rows();
    const std::size_t k = centers.rows();
    const std::size_t d = points.cols();
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double sum_d2 = 0.0;
        double main = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double d2 = squared_distance(points.row(i), centers.row(j), d);
            sum_d2 += d2;
            main += std::pow(cfg.w1 * I[i] * part.T(i, j), cfg.m) * d2;
        }
        const double noise = std::pow(cfg.w2 * (1.0 - I[i]) * part.F[i], cfg.m) * (static_cast<double>(cfg.k) - sum_d2);
        cost += main + noise;
    }
    return cost;
}

Partition update_memberships(const Matrix& points, const std::vector<double>& I, const Matrix& centers,
                             const SolverConfig& cfg, Diagnostics* diagnostics) {
    check_shapes(points, I, centers);
    const std::size_t n = points.rows();
    const std::size_t k = centers.rows();
    Partition part{Matrix(n, k), std::vector<double>(n)};
    std::vector<char> clamped(n, 0);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        std::vector<double> scratch;
        for (std::size_t i = begin; i < end; ++i)
            clamped[i] = membership_row(points.row(i), centers, I[i], cfg, part.T.row(i), part.F[i], scratch).clamped;
    });
    if (diagnostics)
        for (char c : clamped) diagnostics->noise_base_clamps += c;
    return part;
}

std::vector<double> membership_normalizer(const Matrix& points, const std::vector<double>& I,
                                          const Matrix& centers, const SolverConfig& cfg) {
    check_shapes(points, I, centers);
    const std::size_t n = points.rows();
    std::vector<double> K(n);
    std::vector<double> T(centers.rows());
    std::vector<double> scratch;
    for (std::size_t i = 0; i < n; ++i) {
        double F = 0.0;
        K[i] = membership_row(points.row(i), centers, I[i], cfg, T.data(), F, scratch).normalizer;
    }
    return K;
}

std::vector<double> implied_lambda(const Matrix& points, const std::vector<double>& I, const Matrix& centers,
                                   const SolverConfig& cfg) {
    auto K = membership_normalizer(points, I, centers, cfg);
    for (double& v : K) v = cfg.m * std::pow(v, cfg.m - 1.0);
    return K;
}

Matrix update_centers(const Matrix& points, const std::vector<double>& I, const Partition& part,
                      const Matrix& centers_prev, const SolverConfig& cfg, Diagnostics* diagnostics) {
    check_shapes(points, I, part, centers_prev);
    const std::size_t n = points.rows();
    const std::size_t k = centers_prev.rows();
    const std::size_t d = points.cols();
    Matrix centers(k, d);
    std::vector<double> num(d);
    for (std::size_t j = 0; j < k; ++j) {
        std::fill(num.begin(), num.end(), 0.0);
        double den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double u = std::pow(cfg.w1 * I[i] * part.T(i, j), cfg.m) -
                             std::pow(cfg.w2 * (1.0 - I[i]) * part.F[i], cfg.m);
            den += u;
            for (std::size_t t = 0; t < d; ++t) num[t] += u * points(i, t);
        }
        if (den < cfg.singular_delta) {
            std::copy(centers_prev.row(j), centers_prev.row(j) + d, centers.row(j));
            if (diagnostics) ++diagnostics->center_fallbacks;
            continue;
        }
        for (std::size_t t = 0; t < d; ++t) centers(j, t) = num[t] / den;
    }
    return centers;
}

Gradients lagrangian_gradients(const Matrix& points, const std::vector<double>& I, const Partition& part,
                               const Matrix& centers, const std::vector<double>& lambda, const SolverConfig& cfg) {
    check_shapes(points, I, part, centers);
    if (lambda.size() != points.rows()) throw Error("shape_mismatch", "lambda length differs from point count");
    const std::size_t n = points.rows();
    const std::size_t k = centers.rows();
    const std::size_t d = points.cols();
    const double m = cfg.m;
    Gradients g{Matrix(n, k), std::vector<double>(n), Matrix(k, d)};
    for (std::size_t i = 0; i < n; ++i) {
        const double a = cfg.w1 * I[i];
        const double b = cfg.w2 * (1.0 - I[i]);
        double sum_d2 = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double d2 = squared_distance(points.row(i), centers.row(j), d);
            sum_d2 += d2;
            g.dT(i, j) = m * std::pow(a, m) * std::pow(part.T(i, j), m - 1.0) * d2 - lambda[i];
            const double coef = 2.0 * (std::pow(b * part.F[i], m) - std::pow(a * part.T(i, j), m));
            for (std::size_t t = 0; t < d; ++t) g.dC(j, t) += coef * (points(i, t) - centers(j, t));
        }
        g.dF[i] = m * std::pow(b, m) * std::pow(part.F[i], m - 1.0) * (static_cast<double>(cfg.k) - sum_d2) - lambda[i];
    }
    return g;
}

Gradients printed_membership_gradients(const Matrix& points, const std::vector<double>& I, const Partition& part,
                                       const Matrix& centers, const std::vector<double>& lambda,
                                       const SolverConfig& cfg) {
    check_shapes(points, I, part, centers);
    if (lambda.size() != points.rows()) throw Error("shape_mismatch", "lambda length differs from point count");
    const std::size_t n = points.rows();
    const std::size_t k = centers.rows();
    const std::size_t d = points.cols();
    const double m = cfg.m;
    Gradients g{Matrix(n, k), std::vector<double>(n), Matrix()};
    for (std::size_t i = 0; i < n; ++i) {
        double sum_d2 = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double d2 = squared_distance(points.row(i), centers.row(j), d);
            sum_d2 += d2;
            g.dT(i, j) = m * std::pow(cfg.w1 * I[i] * part.T(i, j), m - 1.0) * d2 - lambda[i];
        }
        g.dF[i] = m * std::pow(cfg.w2 * (1.0 - I[i]) * part.F[i], m - 1.0) * (static_cast<double>(cfg.k) - sum_d2) -
                  lambda[i];
    }
    return g;
}

namespace {

long count_outside_box(const Matrix& points, const Matrix& centers) {
    const std::size_t d = points.cols();
    long outside = 0;
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < points.rows(); ++i)
        for (std::size_t t = 0; t < d; ++t) {
            lo[t] = std::min(lo[t], points(i, t));
            hi[t] = std::max(hi[t], points(i, t));
        }
    for (std::size_t j = 0; j < centers.rows(); ++j) {
        bool out = false;
        for (std::size_t t = 0; t < d; ++t) {
            const double margin = 0.1 * (hi[t] - lo[t]);
            const double v = centers(j, t);
            if (!std::isfinite(v) || v < lo[t] - margin || v > hi[t] + margin) out = true;
        }
        outside += out ? 1 : 0;
    }
    return outside;
}

}  // namespace

FitResult fit(const Matrix& points, const SolverConfig& cfg, const FitOptions& options) {
    validate(cfg);
    const std::size_t n = points.rows();
    if (n < static_cast<std::size_t>(cfg.k))
        throw Error("too_few_points", "need at least k = " + std::to_string(cfg.k) + " points, have " + std::to_string(n));

    FitResult res;
    if (options.indeterminacy) {
        if (options.indeterminacy->size() != n)
            throw Error("shape_mismatch", "indeterminacy length differs from point count");
        res.indeterminacy = *options.indeterminacy;
    } else {
        res.indeterminacy = compute_indeterminacy(points, cfg.k, cfg.eps_density, cfg.np_threshold, cfg.alpha);
    }

    Rng rng(cfg.seed);
    if (options.initial_centers) {
        if (options.initial_centers->rows() != static_cast<std::size_t>(cfg.k) ||
            options.initial_centers->cols() != points.cols())
            throw Error("shape_mismatch", "initial centres must be k x d");
        res.centers = *options.initial_centers;
    } else {
        res.centers = seed_centers(points, cfg.k, rng);
    }
    res.partition = random_partition(n, static_cast<std::size_t>(cfg.k), rng);

    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        Partition next = update_memberships(points, res.indeterminacy, res.centers, cfg, &res.diagnostics);
        res.centers = update_centers(points, res.indeterminacy, next, res.centers, cfg, &res.diagnostics);
        const double cost = compute_cost(points, res.indeterminacy, next, res.centers, cfg);
        res.cost_trace.push_back(cost);
        res.iterations = iter;

        double change = 0.0;
        for (std::size_t q = 0; q < next.T.data().size(); ++q)
            change = std::max(change, std::abs(next.T.data()[q] - res.partition.T.data()[q]));
        res.partition = std::move(next);
        if (options.on_iteration) options.on_iteration(IterationState{iter, res.partition, res.centers, cost});
        if (change < cfg.eps_conv) {
            res.converged = true;
            break;
        }
    }
    res.diagnostics.centers_outside_box = count_outside_box(points, res.centers);
    return res;
}

RestartResult fit_restarts(const Matrix& points, const SolverConfig& cfg, int restarts, const FitOptions& options) {
    if (restarts < 1) throw Error("invalid_config", "restarts must be at least 1");
    RestartResult out;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        SolverConfig run = cfg;
        run.seed = r == 0 ? cfg.seed : derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
        FitResult res = fit(points, run, options);
        const double cost = res.cost_trace.empty()
                                ? compute_cost(points, res.indeterminacy, res.partition, res.centers, run)
                                : res.cost_trace.back();
        out.seeds.push_back(run.seed);
        out.final_costs.push_back(cost);
        if (r == 0 || cost < best_cost) {
            best_cost = cost;
            out.best = std::move(res);
            out.best_index = static_cast<std::size_t>(r);
        }
    }
    return out;
}

}  // namespace neutro

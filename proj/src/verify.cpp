#include "neutro/verify.hpp"

#include <algorithm>
#include <cmath>

#include "neutro/rng.hpp"
#include "neutro/solver.hpp"

namespace neutro {

bool VerifyReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

struct Instance {
    Matrix points;
    std::vector<double> I;
    Matrix centers;
    Partition part;
    std::vector<double> lambda;
};

Instance random_instance(Rng& rng, const VerifyOptions& o, const SolverConfig& cfg) {
    const auto n = static_cast<std::size_t>(o.n);
    const auto k = static_cast<std::size_t>(o.k);
    const auto d = static_cast<std::size_t>(o.d);
    const double side = 1.0 / std::sqrt(static_cast<double>(d));
    Instance in{Matrix(n, d), std::vector<double>(n), Matrix(k, d), Partition{Matrix(n, k), std::vector<double>(n)},
                std::vector<double>(n)};
    for (double& v : in.points.data()) v = side * rng.uniform();
    for (double& v : in.centers.data()) v = side * rng.uniform();
    for (double& v : in.I) v = cfg.alpha + (0.95 - cfg.alpha) * rng.uniform();
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) s += in.part.T(i, j) = 0.05 + rng.uniform();
        s += in.part.F[i] = 0.05 + rng.uniform();
        for (std::size_t j = 0; j < k; ++j) in.part.T(i, j) /= s;
        in.part.F[i] /= s;
        in.lambda[i] = 0.05 * rng.uniform();
    }
    return in;
}

double lagrangian(const Instance& in, const SolverConfig& cfg) {
    double L = compute_cost(in.points, in.I, in.part, in.centers, cfg);
    for (std::size_t i = 0; i < in.points.rows(); ++i) {
        double s = in.part.F[i] - 1.0;
        for (std::size_t j = 0; j < in.part.T.cols(); ++j) s += in.part.T(i, j);
        L -= in.lambda[i] * s;
    }
    return L;
}

// Central difference of the Lagrangian with respect to one scalar.
double central(Instance& in, double& x, const SolverConfig& cfg, double h) {
    const double saved = x;
    x = saved + h;
    const double up = lagrangian(in, cfg);
    x = saved - h;
    const double down = lagrangian(in, cfg);
    x = saved;
    return (up - down) / (2.0 * h);
}

double relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric) {
    double diff = 0.0, scale = 0.0;
    for (std::size_t q = 0; q < analytic.size(); ++q) {
        diff = std::max(diff, std::abs(analytic[q] - numeric[q]));
        scale = std::max(scale, std::abs(numeric[q]));
    }
    return diff / std::max(scale, 1e-300);
}

}  // namespace

VerifyReport run_verification(const VerifyOptions& o) {
    SolverConfig cfg;
    cfg.k = o.k;
    if (o.inject_fault) cfg.rule = MembershipRule::Printed;
    Rng rng(o.seed);
    VerifyReport report;
    const double h = 1e-6;

    CheckResult grad{"gradient_vs_finite_differences", 0.0, 1e-5, true, o.instances};
    for (int r = 0; r < o.instances; ++r) {
        Instance in = random_instance(rng, o, cfg);
        Gradients g = lagrangian_gradients(in.points, in.I, in.part, in.centers, in.lambda, cfg);
        if (o.inject_fault)
            for (double& v : g.dC.data()) v *= 1.001;
        std::vector<double> nT, nF, nC;
        for (double& v : in.part.T.data()) nT.push_back(central(in, v, cfg, h));
        for (double& v : in.part.F) nF.push_back(central(in, v, cfg, h));
        for (double& v : in.centers.data()) nC.push_back(central(in, v, cfg, h));
        const double err = std::max({relative_error(g.dT.data(), nT), relative_error(g.dF, nF),
                                     relative_error(g.dC.data(), nC)});
        grad.max_error = std::max(grad.max_error, err);
    }
    grad.passed = grad.max_error < grad.tolerance;
    report.checks.push_back(grad);

    CheckResult mem{"membership_stationarity", 0.0, 1e-8, true, o.instances};
    for (int r = 0; r < o.instances; ++r) {
        Instance in = random_instance(rng, o, cfg);
        const Partition part = update_memberships(in.points, in.I, in.centers, cfg);
        const auto lambda = implied_lambda(in.points, in.I, in.centers, cfg);
        const Gradients g = lagrangian_gradients(in.points, in.I, part, in.centers, lambda, cfg);
        for (double v : g.dT.data()) mem.max_error = std::max(mem.max_error, std::abs(v));
        for (double v : g.dF) mem.max_error = std::max(mem.max_error, std::abs(v));
    }
    mem.passed = mem.max_error < mem.tolerance;
    report.checks.push_back(mem);

    CheckResult cen{"center_stationarity", 0.0, 1e-8, true, 0};
    for (int attempts = 0; cen.instances < o.instances && attempts < 50 * o.instances; ++attempts) {
        Instance in = random_instance(rng, o, cfg);
        const Partition part = update_memberships(in.points, in.I, in.centers, cfg);
        Diagnostics diag;
        const Matrix centers = update_centers(in.points, in.I, part, in.centers, cfg, &diag);
        if (diag.center_fallbacks > 0) continue;  // stationary point undefined
        Gradients g = lagrangian_gradients(in.points, in.I, part, centers, in.lambda, cfg);
        if (o.inject_fault) g = lagrangian_gradients(in.points, in.I, part, in.centers, in.lambda, cfg);
        for (double v : g.dC.data()) cen.max_error = std::max(cen.max_error, std::abs(v));
        ++cen.instances;
    }
    cen.passed = cen.instances == o.instances && cen.max_error < cen.tolerance;
    report.checks.push_back(cen);

    CheckResult con{"row_sum_constraint", 0.0, 1e-9, true, o.instances};
    for (int r = 0; r < o.instances; ++r) {
        VerifyOptions big = o;
        big.n = std::max(o.n, 5 * o.k);
        Instance in = random_instance(rng, big, cfg);
        SolverConfig run = cfg;
        run.seed = rng.next();
        run.eps_density = 0.2;
        bool in_range = true;
        FitOptions fo;
        fo.on_iteration = [&](const IterationState& s) {
            con.max_error = std::max(con.max_error, max_row_sum_error(s.partition));
            in_range = in_range && satisfies_constraint(s.partition, 1.0);
        };
        fit(in.points, run, fo);
        if (!in_range) con.max_error = std::max(con.max_error, 1.0);
    }
    con.passed = con.max_error < con.tolerance;
    report.checks.push_back(con);
    return report;
}

}  // namespace neutro

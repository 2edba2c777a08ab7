#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "helpers.hpp"
#include "neutro/dataset.hpp"
#include "neutro/error.hpp"
#include "neutro/indeterminacy.hpp"
#include "neutro/solver.hpp"

using namespace neutro;
using testing_helpers::random_partition;
using testing_helpers::random_points;
using testing_helpers::random_vector;

namespace {

// One 1-D point at 0 with centres at 0.2 and 0.4: squared distances
// (0.04, 0.16), I = 0.05, m = 2, w1 = 1, w2 = 2, k = 2.
struct SinglePoint {
    Matrix x{1, 1, 0.0};
    Matrix c{2, 1};
    std::vector<double> I{0.05};
    SinglePoint() {
        c(0, 0) = 0.2;
        c(1, 0) = 0.4;
    }
};

Dataset normalized_diamonds(const DiamondSpec& s) { return normalize(generate_diamond(s)).first; }

DiamondSpec x12() {
    DiamondSpec s;
    s.outliers = {{3.0, 5.0}};
    return s;
}

}  // namespace

TEST_SUITE("solver") {
    TEST_CASE("printed rule reproduces the worked example (40-digit oracle)") {
        SinglePoint p;
        SolverConfig cfg;
        cfg.rule = MembershipRule::Printed;
        const auto part = update_memberships(p.x, p.I, p.c, cfg);
        CHECK(part.T(0, 0) == doctest::Approx(0.7996259060088847).epsilon(1e-12));
        CHECK(part.T(0, 1) == doctest::Approx(0.1999064765022212).epsilon(1e-12));
        CHECK(part.F[0] == doctest::Approx(4.676174888940846e-4).epsilon(1e-12));
        CHECK(membership_normalizer(p.x, p.I, p.c, cfg)[0] == doctest::Approx(1.599251812017769e-3).epsilon(1e-12));
    }

    TEST_CASE("stationary rule on the same point (40-digit oracle)") {
        SinglePoint p;
        SolverConfig cfg;
        const auto part = update_memberships(p.x, p.I, p.c, cfg);
        CHECK(part.T(0, 0) == doctest::Approx(0.7999901509368921).epsilon(1e-12));
        CHECK(part.T(0, 1) == doctest::Approx(0.1999975377342230).epsilon(1e-12));
        CHECK(part.F[0] == doctest::Approx(1.231132888483983e-5).epsilon(1e-11));
        CHECK(implied_lambda(p.x, p.I, p.c, cfg)[0] == doctest::Approx(1.599980301873784e-4).epsilon(1e-12));
    }

    TEST_CASE("coincident centre, equidistant point and pure noise") {
        SolverConfig cfg;
        Matrix x(3, 1);
        // Dyadic coordinates keep the two distances of point 1 exactly equal.
        x(0, 0) = 0.125;
        x(1, 0) = 0.25;
        x(2, 0) = 0.875;
        Matrix c(2, 1);
        c(0, 0) = 0.125;
        c(1, 0) = 0.375;
        const auto part = update_memberships(x, {0.05, 0.05, 1.0}, c, cfg);
        CHECK(part.T(0, 0) == 1.0);
        CHECK(part.T(0, 1) == 0.0);
        CHECK(part.F[0] == 0.0);
        CHECK(part.T(1, 0) == part.T(1, 1));
        CHECK(part.T(2, 0) == 0.0);
        CHECK(part.T(2, 1) == 0.0);
        CHECK(part.F[2] == 1.0);
    }

    TEST_CASE("a non-positive noise base is clamped and reported") {
        SolverConfig cfg;
        Matrix x(1, 1, 0.0);
        Matrix c(2, 1, 1.0);  // sum of squared distances = 2 = k
        Diagnostics diag;
        const auto part = update_memberships(x, {0.3}, c, cfg, &diag);
        CHECK(diag.noise_base_clamps == 1);
        CHECK(satisfies_constraint(part));
    }

    TEST_CASE("cost: zero on a coincident centre, worked example value") {
        SolverConfig cfg;
        Matrix x(1, 1, 0.5);
        Matrix c(2, 1, 0.5);
        Partition one{Matrix(1, 2), {0.0}};
        one.T(0, 0) = 1.0;
        c(1, 0) = 0.9;
        CHECK(compute_cost(x, {0.4}, one, c, cfg) == 0.0);

        SinglePoint p;
        Partition part{Matrix(1, 2), {0.000468}};
        part.T(0, 0) = 0.7996;
        part.T(0, 1) = 0.19991;
        // (0.05*0.7996)^2*0.04 + (0.05*0.19991)^2*0.16 + (1.9*0.000468)^2*1.8,
        // evaluated at 40 digits.
        CHECK(compute_cost(p.x, p.I, part, p.c, cfg) == doctest::Approx(8.1344837192e-5).epsilon(1e-9));
        CHECK_THROWS_AS(compute_cost(p.x, {0.1, 0.2}, part, p.c, cfg), Error);
    }

    TEST_CASE("moving any feasible membership towards the update never raises the cost") {
        std::mt19937_64 gen(21);
        SolverConfig cfg;
        cfg.k = 3;
        for (int inst = 0; inst < 20; ++inst) {
            const Matrix x = random_points(gen, 8, 2, 1.0 / std::sqrt(2.0));
            const Matrix c = random_points(gen, 3, 2, 1.0 / std::sqrt(2.0));
            const auto I = random_vector(gen, 8, 0.05, 0.95);
            const Partition start = random_partition(gen, 8, 3);
            const Partition target = update_memberships(x, I, c, cfg);
            double prev = testing_helpers::reference_cost(x, I, start, c, cfg);
            for (int s = 1; s <= 20; ++s) {
                const double a = s / 20.0;
                Partition mix = start;
                for (std::size_t q = 0; q < mix.T.data().size(); ++q)
                    mix.T.data()[q] = (1 - a) * start.T.data()[q] + a * target.T.data()[q];
                for (std::size_t i = 0; i < 8; ++i) mix.F[i] = (1 - a) * start.F[i] + a * target.F[i];
                const double cost = testing_helpers::reference_cost(x, I, mix, c, cfg);
                CHECK(cost <= prev + 1e-15);
                prev = cost;
            }
        }
    }

    TEST_CASE("centre update: centroid, weighted mean and fallback") {
        SolverConfig cfg;
        Matrix x(4, 1);
        x(0, 0) = 0.0;
        x(1, 0) = 0.2;
        x(2, 0) = 0.7;
        x(3, 0) = 0.9;
        Partition hard{Matrix(4, 2), std::vector<double>(4, 0.0)};
        hard.T(0, 0) = hard.T(1, 0) = hard.T(2, 1) = hard.T(3, 1) = 1.0;
        const Matrix c = update_centers(x, std::vector<double>(4, 0.3), hard, Matrix(2, 1), cfg);
        CHECK(c(0, 0) == doctest::Approx(0.1));
        CHECK(c(1, 0) == doctest::Approx(0.8));

        // Weights (w1 I T)^m = (0.1, 0.3) on x = {0, 1}.
        Matrix y(2, 1);
        y(1, 0) = 1.0;
        Partition w{Matrix(2, 1, 1.0), {0.0, 0.0}};
        const Matrix c1 = update_centers(y, {std::sqrt(0.1), std::sqrt(0.3)}, w, Matrix(1, 1), cfg);
        CHECK(c1(0, 0) == doctest::Approx(0.75).epsilon(1e-14));

        Partition noise{Matrix(2, 1, 0.0), {1.0, 1.0}};
        Matrix prev(1, 1, 0.42);
        Diagnostics diag;
        const Matrix c2 = update_centers(y, {0.5, 0.5}, noise, prev, cfg, &diag);
        CHECK(c2(0, 0) == 0.42);
        CHECK(diag.center_fallbacks == 1);
    }

    TEST_CASE("analytic partials match central differences (20 instances, n=10 k=3 d=2)") {
        std::mt19937_64 gen(2024);
        SolverConfig cfg;
        cfg.k = 3;
        const double h = 1e-6;
        for (int inst = 0; inst < 20; ++inst) {
            const Matrix x = random_points(gen, 10, 2, 1.0 / std::sqrt(2.0));
            Matrix c = random_points(gen, 3, 2, 1.0 / std::sqrt(2.0));
            const auto I = random_vector(gen, 10, 0.05, 0.95);
            const auto lambda = random_vector(gen, 10, 0.0, 0.05);
            Partition p = random_partition(gen, 10, 3);
            const Gradients g = lagrangian_gradients(x, I, p, c, lambda, cfg);

            auto central = [&](double& v) {
                const double keep = v;
                v = keep + h;
                const double up = testing_helpers::reference_lagrangian(x, I, p, c, lambda, cfg);
                v = keep - h;
                const double down = testing_helpers::reference_lagrangian(x, I, p, c, lambda, cfg);
                v = keep;
                return (up - down) / (2 * h);
            };
            auto rel = [](const std::vector<double>& a, const std::vector<double>& b) {
                double diff = 0, scale = 0;
                for (std::size_t q = 0; q < a.size(); ++q) {
                    diff = std::max(diff, std::abs(a[q] - b[q]));
                    scale = std::max(scale, std::abs(b[q]));
                }
                return diff / scale;
            };
            std::vector<double> nT, nF, nC;
            for (double& v : p.T.data()) nT.push_back(central(v));
            for (double& v : p.F) nF.push_back(central(v));
            for (double& v : c.data()) nC.push_back(central(v));
            CHECK(rel(g.dT.data(), nT) < 1e-5);
            CHECK(rel(g.dF, nF) < 1e-5);
            CHECK(rel(g.dC.data(), nC) < 1e-5);
        }
    }

    TEST_CASE("updates are stationary points of their gradients") {
        std::mt19937_64 gen(77);
        SolverConfig cfg;
        cfg.k = 3;
        int centre_checks = 0;
        for (int inst = 0; inst < 20; ++inst) {
            const Matrix x = random_points(gen, 10, 2, 1.0 / std::sqrt(2.0));
            const Matrix c = random_points(gen, 3, 2, 1.0 / std::sqrt(2.0));
            const auto I = random_vector(gen, 10, 0.05, 0.95);
            const Partition p = update_memberships(x, I, c, cfg);
            const auto lambda = implied_lambda(x, I, c, cfg);
            const Gradients g = lagrangian_gradients(x, I, p, c, lambda, cfg);
            for (double v : g.dT.data()) CHECK(std::abs(v) < 1e-8);
            for (double v : g.dF) CHECK(std::abs(v) < 1e-8);

            Diagnostics diag;
            const Matrix c2 = update_centers(x, I, p, c, cfg, &diag);
            if (diag.center_fallbacks) continue;
            ++centre_checks;
            // The centre gradient written out independently: -2 sum_i u_ij (x_i - c_j).
            for (std::size_t j = 0; j < 3; ++j)
                for (std::size_t t = 0; t < 2; ++t) {
                    double s = 0;
                    for (std::size_t i = 0; i < 10; ++i) {
                        const double u = std::pow(I[i] * p.T(i, j), 2) - std::pow(2 * (1 - I[i]) * p.F[i], 2);
                        s += -2 * u * (x(i, t) - c2(j, t));
                    }
                    CHECK(std::abs(s) < 1e-8);
                }
        }
        CHECK(centre_checks >= 15);
    }

    TEST_CASE("printed rule zeroes the simplified partials but not the true ones") {
        std::mt19937_64 gen(5);
        SolverConfig cfg;
        cfg.k = 3;
        cfg.rule = MembershipRule::Printed;
        const Matrix x = random_points(gen, 10, 2, 0.7);
        const Matrix c = random_points(gen, 3, 2, 0.7);
        const auto I = random_vector(gen, 10, 0.05, 0.95);
        const Partition p = update_memberships(x, I, c, cfg);
        const auto lambda = implied_lambda(x, I, c, cfg);
        const Gradients simple = printed_membership_gradients(x, I, p, c, lambda, cfg);
        double worst_simple = 0, worst_true = 0;
        for (double v : simple.dT.data()) worst_simple = std::max(worst_simple, std::abs(v));
        const Gradients full = lagrangian_gradients(x, I, p, c, lambda, cfg);
        for (double v : full.dT.data()) worst_true = std::max(worst_true, std::abs(v));
        CHECK(worst_simple < 1e-8);
        CHECK(worst_true > 1e-6);
    }

    TEST_CASE("zero membership point: dL/dT equals -lambda exactly") {
        SolverConfig cfg;
        SinglePoint p;
        Partition zero{Matrix(1, 2, 0.0), {0.0}};
        const Gradients g = lagrangian_gradients(p.x, p.I, zero, p.c, {0.37}, cfg);
        CHECK(g.dT(0, 0) == -0.37);
        CHECK(g.dT(0, 1) == -0.37);
        CHECK(g.dF[0] == -0.37);
    }

    TEST_CASE("initialisation is deterministic, feasible and exhausts points when k = n") {
        std::mt19937_64 gen(4);
        const Matrix x = random_points(gen, 30, 2, 0.7);
        SolverConfig cfg;
        cfg.k = 4;
        cfg.seed = 7;
        const auto [p1, c1] = initialize(x, cfg);
        const auto [p2, c2] = initialize(x, cfg);
        CHECK(p1 == p2);
        CHECK(c1 == c2);
        CHECK(max_row_sum_error(p1) < 1e-12);
        CHECK(satisfies_constraint(p1, 1e-12));

        const Matrix small = random_points(gen, 6, 2, 0.7);
        cfg.k = 6;
        const auto [p3, c3] = initialize(small, cfg);
        std::set<std::size_t> rows;
        for (std::size_t j = 0; j < 6; ++j)
            for (std::size_t i = 0; i < 6; ++i)
                if (std::equal(c3.row(j), c3.row(j) + 2, small.row(i))) rows.insert(i);
        CHECK(rows.size() == 6);
        cfg.k = 7;
        CHECK_THROWS_AS(initialize(small, cfg), Error);
    }

    TEST_CASE("two separated diamonds: motif points put more than 0.8 on their own cluster") {
        DiamondSpec s = x12();
        // The outlier is kept so that min-max scaling stays close to isotropic.
        s.boundary_points_per_gap = 0;
        const auto d = normalized_diamonds(s);
        const auto I = compute_indeterminacy(generate_diamond(s).points, 2, 4, 4, 0.05);
        SolverConfig cfg;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            cfg.seed = seed;
            const auto r = fit(d.points, cfg, FitOptions{I, {}, {}});
            const auto top = [&](std::size_t i) { return r.partition.T(i, 0) >= r.partition.T(i, 1) ? 0 : 1; };
            CHECK(top(2) != top(7));
            for (std::size_t i = 0; i < 10; ++i) CHECK(r.partition.T(i, top(i < 5 ? 2 : 7)) > 0.8);
        }
    }

    TEST_CASE("X12 analogue: boundary point split evenly, outlier goes to noise") {
        const auto d = normalized_diamonds(x12());
        SolverConfig cfg;
        const auto r = fit(d.points, cfg, FitOptions{compute_indeterminacy(generate_diamond(x12()).points, 2, 4, 4, 0.05), {}, {}});
        CHECK(std::abs(r.partition.T(5, 0) - r.partition.T(5, 1)) < 1e-3);
        CHECK(r.partition.T(5, 0) > 0.4);
        CHECK(r.partition.T(5, 0) < 0.6);
        CHECK(r.partition.F[11] > 0.8);
        CHECK(r.converged);
        CHECK(r.iterations <= cfg.max_iter);
        CHECK(r.cost_trace.size() == static_cast<std::size_t>(r.iterations));
    }

    TEST_CASE("iteration cap reached reports not converged") {
        const auto d = normalized_diamonds(x12());
        SolverConfig cfg;
        cfg.max_iter = 2;
        cfg.eps_conv = 1e-300;
        const auto r = fit(d.points, cfg);
        CHECK_FALSE(r.converged);
        CHECK(r.iterations == 2);
        CHECK(r.cost_trace.size() == 2);
    }

    TEST_CASE("restarts keep the lowest final cost and restart 0 is the plain fit") {
        std::mt19937_64 gen(9);
        const Matrix x = random_points(gen, 60, 2, 0.7);
        SolverConfig cfg;
        cfg.k = 4;
        cfg.seed = 3;
        cfg.eps_density = 0.1;
        const auto rr = fit_restarts(x, cfg, 5);
        CHECK(rr.final_costs.size() == 5);
        CHECK(rr.seeds[0] == 3);
        const double best = *std::min_element(rr.final_costs.begin(), rr.final_costs.end());
        CHECK(rr.final_costs[rr.best_index] == best);
        CHECK(rr.best.cost_trace.back() == best);
        const auto single = fit(x, cfg);
        CHECK(single.cost_trace.back() == rr.final_costs[0]);
        CHECK_THROWS_AS(fit_restarts(x, cfg, 0), Error);
    }

    TEST_CASE("configuration validation and JSON round trip") {
        SolverConfig cfg;
        cfg.k = 5;
        cfg.m = 2.5;
        cfg.seed = 123456789012345ULL;
        cfg.rule = MembershipRule::Printed;
        nlohmann::json j = cfg;
        SolverConfig back;
        from_json(j, back);
        CHECK(back.k == 5);
        CHECK(back.m == 2.5);
        CHECK(back.seed == cfg.seed);
        CHECK(back.rule == MembershipRule::Printed);
        SolverConfig bad;
        bad.m = 1.0;
        CHECK_THROWS_AS(validate(bad), Error);
        bad = SolverConfig{};
        bad.boundary_t = 0.5;
        CHECK_THROWS_AS(validate(bad), Error);
        CHECK_THROWS_AS(from_json(nlohmann::json{{"rule", "other"}}, bad), Error);
    }
}

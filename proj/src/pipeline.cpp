#include "neutro/pipeline.hpp"

#include "neutro/error.hpp"
#include "neutro/indeterminacy.hpp"

namespace neutro {

ClusterRun run_cluster(const Dataset& data, const ClusterOptions& options) {
    validate(options.solver);
    if (options.restarts < 1) throw Error("invalid_config", "restarts must be at least 1");
    ClusterRun run;
    run.method = options.method;
    std::tie(run.normalized, run.record) = normalize(data);
    const Matrix& points = run.normalized.points;
    const SolverConfig& cfg = options.solver;

    if (options.method == Method::Neutro) {
        FitOptions fit_options;
        const Matrix& space = options.space == IndeterminacySpace::Raw ? data.points : points;
        fit_options.indeterminacy = compute_indeterminacy(space, cfg.k, cfg.eps_density, cfg.np_threshold, cfg.alpha);
        RestartResult rr = fit_restarts(points, cfg, options.restarts, fit_options);
        run.fit = std::move(rr.best);
        run.restart_seeds = std::move(rr.seeds);
        run.restart_costs = std::move(rr.final_costs);
        run.best_restart = rr.best_index;
        run.labels = assign(run.fit.partition, cfg.boundary_t);
    } else {
        FcmConfig fc{cfg.k, cfg.m, cfg.eps_conv, cfg.max_iter, cfg.seed, cfg.singular_delta};
        double best = 0.0;
        for (int r = 0; r < options.restarts; ++r) {
            fc.seed = r == 0 ? cfg.seed : derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
            FcmResult res = fcm_fit(points, fc);
            const double obj = res.objective_trace.empty() ? fcm_objective(points, res.W, res.centers, fc.m)
                                                           : res.objective_trace.back();
            run.restart_seeds.push_back(fc.seed);
            run.restart_costs.push_back(obj);
            if (r == 0 || obj < best) {
                best = obj;
                run.best_restart = static_cast<std::size_t>(r);
                run.fcm = std::move(res);
            }
        }
        run.fit.partition = Partition{run.fcm->W, std::vector<double>(points.rows(), 0.0)};
        run.fit.centers = run.fcm->centers;
        run.fit.iterations = run.fcm->iterations;
        run.fit.converged = run.fcm->converged;
        run.fit.cost_trace = run.fcm->objective_trace;
        const auto ids = row_argmax(run.fcm->W);
        run.labels.resize(ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i) run.labels[i] = PointLabel{LabelKind::Main, ids[i], -1, ids[i]};
    }
    if (data.labels) run.accuracy = accuracy(run.labels, *data.labels);
    return run;
}

}  // namespace neutro

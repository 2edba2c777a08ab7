#pragma once

#include <optional>
#include <vector>

#include "neutro/assignment.hpp"
#include "neutro/dataset.hpp"
#include "neutro/fcm.hpp"
#include "neutro/imaging.hpp"
#include "neutro/solver.hpp"

namespace neutro {

enum class Method { Neutro, Fcm };

struct ClusterOptions {
    SolverConfig solver;
    Method method = Method::Neutro;
    IndeterminacySpace space = IndeterminacySpace::Raw;
    int restarts = 1;
};

struct ClusterRun {
    Dataset normalized;
    NormalizationRecord record;
    Method method = Method::Neutro;
    // Neutrosophic runs fill fit; FCM runs fill fcm (with fit.partition.T = W,
    // F = 0, indeterminacy empty) so exports share one code path.
    FitResult fit;
    std::optional<FcmResult> fcm;
    std::vector<PointLabel> labels;
    std::optional<double> accuracy;
    std::vector<std::uint64_t> restart_seeds;
    std::vector<double> restart_costs;
    std::size_t best_restart = 0;
};

// normalize -> indeterminacy (raw or normalized space) -> fit (with
// restarts) -> assign -> accuracy when the dataset carries labels.
ClusterRun run_cluster(const Dataset& data, const ClusterOptions& options);

}  // namespace neutro

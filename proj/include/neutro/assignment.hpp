#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "neutro/solver.hpp"

namespace neutro {

enum class LabelKind { Main, Boundary, Outlier };

// Hard label of one point. For Main, cluster_a is the cluster and cluster_b
// is -1. For Boundary, cluster_a < cluster_b are the two competing clusters.
// For Outlier both are -1. `top` is always argmax_j T_ij (lowest index on
// ties) and is what a Boundary point resolves to when scored.
struct PointLabel {
    LabelKind kind = LabelKind::Main;
    int cluster_a = -1;
    int cluster_b = -1;
    int top = 0;

    bool operator==(const PointLabel& other) const = default;
};

std::string to_string(LabelKind kind);

// Outlier when F_i > max_j T_ij; else Boundary when the two largest T values
// both lie strictly inside (t, 1 - t); else Main(argmax).
std::vector<PointLabel> assign(const Partition& part, double t);

// Cluster id used for scoring: Main -> its cluster, Boundary -> top,
// Outlier -> -1 (reject, never matched to a class).
int scoring_id(const PointLabel& label);

// Maximum total weight of a one-to-one assignment between the rows and
// columns of a non-negative weight matrix (rows and columns may differ in
// number). Returns, for every row, its matched column or -1.
std::vector<int> max_weight_matching(const std::vector<std::vector<double>>& weight);

// Number of points whose predicted id (-1 = reject) agrees with the truth
// under the best one-to-one mapping of predicted ids to truth ids.
std::size_t matched_count(const std::vector<int>& predicted, const std::vector<int>& truth);

double accuracy(const std::vector<PointLabel>& predicted, const std::vector<int>& truth);
double accuracy(const std::vector<int>& predicted_ids, const std::vector<int>& truth);

}  // namespace neutro

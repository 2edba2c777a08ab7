#include "neutro/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "neutro/error.hpp"

namespace neutro {

std::string to_string(LabelKind kind) {
    switch (kind) {
        case LabelKind::Main: return "main";
        case LabelKind::Boundary: return "boundary";
        case LabelKind::Outlier: return "outlier";
    }
    return "unknown";
}

std::vector<PointLabel> assign(const Partition& part, double t) {
    if (!(t > 0.0 && t < 0.5)) throw Error("invalid_argument", "boundary threshold t must lie in (0, 0.5)");
    if (part.T.rows() != part.F.size()) throw Error("shape_mismatch", "T and F disagree on the point count");
    if (part.T.cols() < 1) throw Error("shape_mismatch", "partition has no clusters");
    if (max_row_sum_error(part) > 1e-6)
        throw Error("malformed_partition", "membership rows do not sum to 1");

    const std::size_t n = part.T.rows();
    const std::size_t k = part.T.cols();
    std::vector<PointLabel> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t first = 0;
        for (std::size_t j = 1; j < k; ++j)
            if (part.T(i, j) > part.T(i, first)) first = j;
        std::size_t second = k;
        for (std::size_t j = 0; j < k; ++j) {
            if (j == first) continue;
            if (second == k || part.T(i, j) > part.T(i, second)) second = j;
        }
        PointLabel& label = out[i];
        label.top = static_cast<int>(first);
        const double t1 = part.T(i, first);
        if (part.F[i] > t1) {
            label.kind = LabelKind::Outlier;
            continue;
        }
        if (second < k) {
            const double t2 = part.T(i, second);
            if (t1 > t && t1 < 1.0 - t && t2 > t && t2 < 1.0 - t) {
                label.kind = LabelKind::Boundary;
                label.cluster_a = static_cast<int>(std::min(first, second));
                label.cluster_b = static_cast<int>(std::max(first, second));
                continue;
            }
        }
        label.kind = LabelKind::Main;
        label.cluster_a = static_cast<int>(first);
    }
    return out;
}

int scoring_id(const PointLabel& label) {
    switch (label.kind) {
        case LabelKind::Main: return label.cluster_a;
        case LabelKind::Boundary: return label.top;
        case LabelKind::Outlier: return -1;
    }
    return -1;
}

std::vector<int> max_weight_matching(const std::vector<std::vector<double>>& weight) {
    const std::size_t rows = weight.size();
    std::size_t cols = 0;
    for (const auto& r : weight) cols = std::max(cols, r.size());
    if (rows == 0 || cols == 0) return std::vector<int>(rows, -1);
    const std::size_t size = std::max(rows, cols);

    double top = 0.0;
    for (const auto& r : weight)
        for (double w : r) top = std::max(top, w);
    // Square cost matrix (1-based for the classic potentials formulation);
    // padding cells cost `top`, i.e. weight 0.
    auto cost = [&](std::size_t i, std::size_t j) {
        if (i < rows && j < weight[i].size()) return top - weight[i][j];
        return top;
    };

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(size + 1, 0.0), v(size + 1, 0.0), minv(size + 1);
    std::vector<std::size_t> p(size + 1, 0), way(size + 1, 0);
    std::vector<char> used(size + 1);
    for (std::size_t i = 1; i <= size; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= size; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= size; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> match(rows, -1);
    for (std::size_t j = 1; j <= size; ++j) {
        const std::size_t i = p[j];
        if (i >= 1 && i <= rows && j <= cols && j - 1 < weight[i - 1].size()) match[i - 1] = static_cast<int>(j - 1);
    }
    return match;
}

std::size_t matched_count(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.size() != truth.size()) throw Error("shape_mismatch", "predicted and truth lengths differ");
    std::map<int, std::size_t> pred_index;
    std::map<int, std::size_t> truth_index;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] >= 0) pred_index.emplace(predicted[i], 0);
        truth_index.emplace(truth[i], 0);
    }
    std::size_t next = 0;
    for (auto& [id, idx] : pred_index) idx = next++;
    next = 0;
    for (auto& [id, idx] : truth_index) idx = next++;

    std::vector<std::vector<double>> table(pred_index.size(), std::vector<double>(truth_index.size(), 0.0));
    for (std::size_t i = 0; i < predicted.size(); ++i)
        if (predicted[i] >= 0) table[pred_index[predicted[i]]][truth_index[truth[i]]] += 1.0;

    const auto match = max_weight_matching(table);
    double total = 0.0;
    for (std::size_t r = 0; r < match.size(); ++r)
        if (match[r] >= 0) total += table[r][static_cast<std::size_t>(match[r])];
    return static_cast<std::size_t>(std::llround(total));
}

double accuracy(const std::vector<int>& predicted_ids, const std::vector<int>& truth) {
    if (predicted_ids.size() != truth.size()) throw Error("shape_mismatch", "predicted and truth lengths differ");
    if (truth.empty()) throw Error("invalid_argument", "accuracy needs at least one point");
    return static_cast<double>(matched_count(predicted_ids, truth)) / static_cast<double>(truth.size());
}

double accuracy(const std::vector<PointLabel>& predicted, const std::vector<int>& truth) {
    std::vector<int> ids(predicted.size());
    std::transform(predicted.begin(), predicted.end(), ids.begin(), scoring_id);
    return accuracy(ids, truth);
}

}  // namespace neutro

#include "neutro/indeterminacy.hpp"

#include <algorithm>
#include <cmath>

#include "neutro/error.hpp"
#include "neutro/parallel.hpp"

namespace neutro {

namespace {

void check_points(const Matrix& points) {
    for (double v : points.data())
        if (!std::isfinite(v)) throw Error("invalid_dataset", "points contain non-finite values");
}

std::vector<int> counts_1d(const Matrix& points, double eps) {
    const std::size_t n = points.rows();
    std::vector<double> sorted(points.data());
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> counts(n, 0);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const double x = points(i, 0);
            // |x - v| < eps splits into x - v < eps (true from some index on)
            // and v - x < eps (true up to some index); both are monotone in
            // v because floating-point subtraction is monotone.
            const auto lo = std::partition_point(sorted.begin(), sorted.end(),
                                                 [&](double v) { return !(x - v < eps); });
            const auto hi = std::partition_point(lo, sorted.end(), [&](double v) { return v - x < eps; });
            counts[i] = static_cast<int>(hi - lo) - 1;  // the point itself is always inside
        }
    });
    return counts;
}

}  // namespace

std::vector<int> neighbor_counts(const Matrix& points, double eps) {
    if (!(eps > 0.0)) throw Error("invalid_argument", "density radius must be positive");
    check_points(points);
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    if (d == 1) return counts_1d(points, eps);

    std::vector<int> counts(n, 0);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            int c = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                if (std::sqrt(squared_distance(points.row(i), points.row(j), d)) < eps) ++c;
            }
            counts[i] = c;
        }
    });
    return counts;
}

std::vector<double> indeterminacy_from_counts(const std::vector<int>& counts, int num_clusters,
                                              int np_threshold, double alpha) {
    if (num_clusters < 2) throw Error("invalid_argument", "num_clusters must be at least 2");
    if (np_threshold < 1) throw Error("invalid_argument", "np_threshold must be at least 1");
    if (!(alpha > 0.0 && alpha < 0.5)) throw Error("invalid_argument", "alpha must lie in (0, 0.5)");
    const double per_cluster = static_cast<double>(counts.size()) / num_clusters;
    std::vector<double> out(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double raw = counts[i] < np_threshold ? 1.0 - counts[i] / per_cluster : alpha;
        out[i] = std::max(raw, alpha);
    }
    return out;
}

std::vector<double> compute_indeterminacy(const Matrix& points, int num_clusters, double eps,
                                          int np_threshold, double alpha) {
    return indeterminacy_from_counts(neighbor_counts(points, eps), num_clusters, np_threshold, alpha);
}

}  // namespace neutro

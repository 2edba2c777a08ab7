#pragma once

#include <vector>

#include "neutro/matrix.hpp"

namespace neutro {

// counts[i] = number of points j != i with Euclidean distance strictly below
// eps. One-dimensional inputs use a sorted sweep that performs the same
// comparisons as the pairwise scan.
std::vector<int> neighbor_counts(const Matrix& points, double eps);

// Maps neighbour counts to indeterminacy values. A point with fewer than
// np_threshold neighbours gets 1 - NP/(N/NC); every other point gets alpha.
// Values are clamped from below at alpha only, so an isolated point
// (NP = 0) has indeterminacy exactly 1 and is treated as pure noise by the
// solver.
std::vector<double> indeterminacy_from_counts(const std::vector<int>& counts, int num_clusters,
                                              int np_threshold, double alpha);

std::vector<double> compute_indeterminacy(const Matrix& points, int num_clusters, double eps,
                                          int np_threshold, double alpha);

}  // namespace neutro

#pragma once

#include <string>
#include <vector>

#include "neutro/assignment.hpp"
#include "neutro/dataset.hpp"
#include "neutro/solver.hpp"

namespace neutro {

// Shortest round-trip decimal form ("%.17g").
std::string format_double(double v);

std::string dataset_csv(const Dataset& data);
// point_id,T_1..T_k,F,I (F and I columns omitted when the vectors are empty).
std::string memberships_csv(const Partition& part, const std::vector<double>& indeterminacy,
                            bool with_noise = true);
// cluster,x_1..x_d
std::string centers_csv(const Matrix& centers);
// iteration,cost
std::string cost_trace_csv(const std::vector<double>& trace);
// point_id,kind,cluster_a,cluster_b
std::string labels_csv(const std::vector<PointLabel>& labels);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace neutro

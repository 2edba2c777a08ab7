#include "neutro/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "neutro/error.hpp"

namespace neutro {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string dataset_csv(const Dataset& data) {
    std::string out;
    for (std::size_t t = 0; t < data.dims(); ++t) out += (t ? ",x" : "x") + std::to_string(t + 1);
    if (data.labels) out += ",label";
    out.push_back('\n');
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t t = 0; t < data.dims(); ++t) {
            if (t) out.push_back(',');
            out += format_double(data.points(i, t));
        }
        if (data.labels) out += "," + data.class_names[static_cast<std::size_t>((*data.labels)[i])];
        out.push_back('\n');
    }
    return out;
}

std::string memberships_csv(const Partition& part, const std::vector<double>& indeterminacy, bool with_noise) {
    const std::size_t k = part.T.cols();
    std::string out = "point_id";
    for (std::size_t j = 0; j < k; ++j) out += ",T_" + std::to_string(j + 1);
    if (with_noise) out += ",F";
    if (!indeterminacy.empty()) out += ",I";
    out.push_back('\n');
    for (std::size_t i = 0; i < part.T.rows(); ++i) {
        out += std::to_string(i);
        for (std::size_t j = 0; j < k; ++j) out += "," + format_double(part.T(i, j));
        if (with_noise) out += "," + format_double(part.F[i]);
        if (!indeterminacy.empty()) out += "," + format_double(indeterminacy[i]);
        out.push_back('\n');
    }
    return out;
}

std::string centers_csv(const Matrix& centers) {
    std::string out = "cluster";
    for (std::size_t t = 0; t < centers.cols(); ++t) out += ",x" + std::to_string(t + 1);
    out.push_back('\n');
    for (std::size_t j = 0; j < centers.rows(); ++j) {
        out += std::to_string(j);
        for (std::size_t t = 0; t < centers.cols(); ++t) out += "," + format_double(centers(j, t));
        out.push_back('\n');
    }
    return out;
}

std::string cost_trace_csv(const std::vector<double>& trace) {
    std::string out = "iteration,cost\n";
    for (std::size_t i = 0; i < trace.size(); ++i) out += std::to_string(i + 1) + "," + format_double(trace[i]) + "\n";
    return out;
}

std::string labels_csv(const std::vector<PointLabel>& labels) {
    std::string out = "point_id,kind,cluster_a,cluster_b\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto& l = labels[i];
        out += std::to_string(i) + "," + to_string(l.kind) + "," + std::to_string(l.cluster_a) + "," +
               std::to_string(l.cluster_b) + "\n";
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io_error", "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io_error", "cannot write " + path);
    out << contents;
    if (!out) throw Error("io_error", "failed writing " + path);
}

}  // namespace neutro

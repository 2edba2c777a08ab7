#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "neutro/matrix.hpp"

namespace neutro {

// n points in d dimensions with optional ground-truth class ids.
struct Dataset {
    Matrix points;
    std::optional<std::vector<int>> labels;
    std::vector<std::string> class_names;  // index = class id; empty when unlabeled
    std::string name;

    std::size_t size() const { return points.rows(); }
    std::size_t dims() const { return points.cols(); }
    int num_classes() const { return static_cast<int>(class_names.size()); }
};

// Throws when the dataset breaks its invariants (empty, non-finite, labels
// out of range or of the wrong length).
void validate(const Dataset& data);

enum class DiamondMotif { Diamond5, Grid9 };
enum class DiamondLayout { Collinear, Grid };

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

// Parameters of the synthetic diamond scatter family.
struct DiamondSpec {
    int num_clusters = 2;
    double motif_scale = 1.0;
    double center_spacing = 6.0;
    int boundary_points_per_gap = 1;
    std::vector<Point2> outliers;
    DiamondLayout layout = DiamondLayout::Collinear;
    DiamondMotif motif = DiamondMotif::Diamond5;
};

// Truth ids used by generate_diamond: clusters take 0..k-1, then these.
inline int diamond_boundary_label(int k) { return k; }
inline int diamond_outlier_label(int k) { return k + 1; }

// Cluster centre positions for a spec (index = cluster id).
std::vector<Point2> diamond_centers(const DiamondSpec& spec);

// Pairs of adjacent clusters (a < b) that receive boundary points, in
// generation order.
std::vector<std::pair<int, int>> diamond_gaps(const DiamondSpec& spec);

// Point order: cluster 0 motif, the boundary points of the gaps whose lower
// cluster is 0, cluster 1 motif, ..., outliers last. The 5-point motif is
// (-s,0), (0,s), (0,0), (0,-s), (s,0); the 9-point motif is the 3x3 grid with
// offsets in {-s,0,s}, row by row. Boundary points of one gap sit on the
// perpendicular bisector of the gap at offsets 0, +s, -s, +2s, -2s, ...
Dataset generate_diamond(const DiamondSpec& spec, bool truth_labeling = true);

struct CsvOptions {
    char delimiter = ',';
    bool has_header = false;
    // Column holding class names; negative values count from the end
    // (-1 = last column).
    std::optional<int> label_column;
};

Dataset load_csv(const std::string& path, const CsvOptions& options = {});
Dataset parse_csv(const std::string& text, const CsvOptions& options = {},
                  const std::string& name = "csv");

// Per-feature min-max statistics and dimension, enough to map normalized
// coordinates back to original units.
struct NormalizationRecord {
    std::vector<double> minimum;
    std::vector<double> range;  // 0 for constant features
    std::size_t dims = 0;
    // Multiplier applied after min-max scaling: 1/sqrt(d), nudged down by at
    // most a few ulps so that d * scale^2 <= 1 holds in floating point.
    double scale = 1.0;

    std::vector<double> to_original(const double* normalized) const;
    Matrix to_original(const Matrix& normalized) const;
    std::vector<double> to_normalized(const double* original) const;
};

void to_json(nlohmann::json& j, const NormalizationRecord& r);
void from_json(const nlohmann::json& j, NormalizationRecord& r);

// Min-max scales every feature to [0, 1] (constant features become 0) and
// divides by sqrt(d), so every pairwise squared distance is at most 1.
std::pair<Dataset, NormalizationRecord> normalize(const Dataset& data);

}  // namespace neutro

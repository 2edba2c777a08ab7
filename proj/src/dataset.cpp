#include "neutro/dataset.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "neutro/error.hpp"

namespace neutro {

void validate(const Dataset& data) {
    if (data.points.rows() == 0 || data.points.cols() == 0)
        throw Error("invalid_dataset", "dataset must have at least one point and one feature");
    for (double v : data.points.data())
        if (!std::isfinite(v)) throw Error("invalid_dataset", "dataset contains non-finite values");
    if (data.labels) {
        if (data.labels->size() != data.points.rows())
            throw Error("invalid_dataset", "label count differs from point count");
        for (int l : *data.labels)
            if (l < 0 || l >= data.num_classes())
                throw Error("invalid_dataset", "label outside [0, num_classes)");
    }
}

namespace {

void check_spec(const DiamondSpec& spec) {
    if (spec.num_clusters < 2) throw Error("invalid_spec", "diamond spec needs at least 2 clusters");
    if (!(spec.motif_scale > 0.0)) throw Error("invalid_spec", "motif_scale must be positive");
    if (!(spec.center_spacing > 0.0)) throw Error("invalid_spec", "center_spacing must be positive");
    if (!(spec.center_spacing > 2.0 * spec.motif_scale))
        throw Error("invalid_spec", "center_spacing must exceed twice the motif scale");
    if (spec.boundary_points_per_gap < 0)
        throw Error("invalid_spec", "boundary_points_per_gap must be non-negative");
    for (const auto& o : spec.outliers)
        if (!std::isfinite(o.x) || !std::isfinite(o.y))
            throw Error("invalid_spec", "outlier coordinates must be finite");
}

int grid_columns(int k) {
    int cols = 1;
    while (cols * cols < k) ++cols;
    return cols;
}

std::vector<Point2> motif_offsets(const DiamondSpec& spec) {
    const double s = spec.motif_scale;
    if (spec.motif == DiamondMotif::Diamond5) return {{-s, 0.0}, {0.0, s}, {0.0, 0.0}, {0.0, -s}, {s, 0.0}};
    std::vector<Point2> out;
    for (double dy : {-s, 0.0, s})
        for (double dx : {-s, 0.0, s}) out.push_back({dx, dy});
    return out;
}

}  // namespace

std::vector<Point2> diamond_centers(const DiamondSpec& spec) {
    check_spec(spec);
    std::vector<Point2> centers;
    const int k = spec.num_clusters;
    if (spec.layout == DiamondLayout::Collinear) {
        for (int i = 0; i < k; ++i) centers.push_back({i * spec.center_spacing, 0.0});
    } else {
        const int cols = grid_columns(k);
        for (int i = 0; i < k; ++i)
            centers.push_back({(i % cols) * spec.center_spacing, -(i / cols) * spec.center_spacing});
    }
    return centers;
}

std::vector<std::pair<int, int>> diamond_gaps(const DiamondSpec& spec) {
    check_spec(spec);
    std::vector<std::pair<int, int>> gaps;
    const int k = spec.num_clusters;
    if (spec.layout == DiamondLayout::Collinear) {
        for (int i = 0; i + 1 < k; ++i) gaps.emplace_back(i, i + 1);
    } else {
        const int cols = grid_columns(k);
        for (int i = 0; i < k; ++i) {
            if (i % cols + 1 < cols && i + 1 < k) gaps.emplace_back(i, i + 1);
            if (i + cols < k) gaps.emplace_back(i, i + cols);
        }
    }
    return gaps;
}

Dataset generate_diamond(const DiamondSpec& spec, bool truth_labeling) {
    const auto centers = diamond_centers(spec);
    const auto gaps = diamond_gaps(spec);
    const auto motif = motif_offsets(spec);
    const int k = spec.num_clusters;
    const double s = spec.motif_scale;

    std::vector<Point2> pts;
    std::vector<int> labels;
    for (int c = 0; c < k; ++c) {
        for (const auto& o : motif) {
            pts.push_back({centers[c].x + o.x, centers[c].y + o.y});
            labels.push_back(c);
        }
        for (const auto& [a, b] : gaps) {
            if (a != c) continue;
            const Point2 mid{(centers[a].x + centers[b].x) / 2.0, (centers[a].y + centers[b].y) / 2.0};
            // Unit direction perpendicular to the gap; gaps are axis aligned.
            const Point2 perp = centers[a].y == centers[b].y ? Point2{0.0, 1.0} : Point2{1.0, 0.0};
            for (int q = 0; q < spec.boundary_points_per_gap; ++q) {
                const double step = static_cast<double>((q + 1) / 2) * s;
                const double off = (q % 2 == 1) ? step : -step;
                pts.push_back({mid.x + off * perp.x, mid.y + off * perp.y});
                labels.push_back(diamond_boundary_label(k));
            }
        }
    }
    for (const auto& o : spec.outliers) {
        pts.push_back(o);
        labels.push_back(diamond_outlier_label(k));
    }

    Dataset data;
    data.points = Matrix(pts.size(), 2);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        data.points(i, 0) = pts[i].x;
        data.points(i, 1) = pts[i].y;
    }
    data.name = "diamond_k" + std::to_string(k) + "_n" + std::to_string(pts.size());
    if (truth_labeling) {
        data.labels = labels;
        for (int c = 0; c < k; ++c) data.class_names.push_back("cluster_" + std::to_string(c));
        data.class_names.push_back("boundary");
        data.class_names.push_back("outlier");
    }
    return data;
}

namespace {

// Splits CSV text into records of fields (quoted fields may contain the
// delimiter, doubled quotes and line breaks). Returns the 1-based line number
// of each record's start alongside it.
std::vector<std::pair<std::size_t, std::vector<std::string>>> split_csv(const std::string& text,
                                                                        char delim) {
    std::vector<std::pair<std::size_t, std::vector<std::string>>> records;
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool record_has_content = false;
    std::size_t line = 1;
    std::size_t record_line = 1;

    auto end_record = [&] {
        fields.push_back(field);
        field.clear();
        if (record_has_content) records.emplace_back(record_line, std::move(fields));
        fields.clear();
        record_has_content = false;
    };

    for (std::size_t p = 0; p < text.size(); ++p) {
        const char ch = text[p];
        if (in_quotes) {
            if (ch == '"') {
                if (p + 1 < text.size() && text[p + 1] == '"') {
                    field.push_back('"');
                    ++p;
                } else {
                    in_quotes = false;
                }
            } else {
                if (ch == '\n') ++line;
                field.push_back(ch);
            }
            continue;
        }
        if (ch == '"') {
            in_quotes = true;
            record_has_content = true;
        } else if (ch == delim) {
            fields.push_back(field);
            field.clear();
            record_has_content = true;
        } else if (ch == '\r') {
            continue;
        } else if (ch == '\n') {
            end_record();
            ++line;
            record_line = line;
        } else {
            field.push_back(ch);
            record_has_content = true;
        }
    }
    if (in_quotes) throw Error("parse_error", "unterminated quoted field starting on line " + std::to_string(record_line));
    end_record();
    return records;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace

Dataset parse_csv(const std::string& text, const CsvOptions& options, const std::string& name) {
    auto records = split_csv(text, options.delimiter);
    std::size_t first = options.has_header ? 1 : 0;
    if (records.size() <= first) throw Error("parse_error", "no data rows in " + name);

    const std::size_t arity = records[first].second.size();
    std::optional<std::size_t> label_col;
    if (options.label_column) {
        const int lc = *options.label_column;
        const long idx = lc < 0 ? static_cast<long>(arity) + lc : lc;
        if (idx < 0 || idx >= static_cast<long>(arity))
            throw Error("invalid_argument", "label column " + std::to_string(lc) + " outside the " +
                                                std::to_string(arity) + " columns of " + name);
        label_col = static_cast<std::size_t>(idx);
    }
    const std::size_t d = arity - (label_col ? 1 : 0);
    if (d == 0) throw Error("parse_error", "no feature columns in " + name);

    const std::size_t n = records.size() - first;
    Dataset data;
    data.name = name;
    data.points = Matrix(n, d);
    std::vector<int> labels;
    std::map<std::string, int> class_ids;

    for (std::size_t r = 0; r < n; ++r) {
        const auto& [line, fields] = records[first + r];
        if (fields.size() != arity)
            throw Error("ragged_rows", name + ":" + std::to_string(line) + ": expected " + std::to_string(arity) +
                                           " fields, found " + std::to_string(fields.size()));
        std::size_t out = 0;
        for (std::size_t c = 0; c < arity; ++c) {
            const std::string f = trim(fields[c]);
            if (label_col && c == *label_col) {
                auto [it, inserted] = class_ids.emplace(f, static_cast<int>(class_ids.size()));
                if (inserted) data.class_names.push_back(f);
                labels.push_back(it->second);
                continue;
            }
            double v = 0.0;
            std::size_t used = 0;
            bool ok = !f.empty();
            if (ok) {
                try {
                    v = std::stod(f, &used);
                } catch (const std::exception&) {
                    ok = false;
                }
            }
            if (!ok || used != f.size() || !std::isfinite(v))
                throw Error("parse_error", name + ":" + std::to_string(line) + ": column " + std::to_string(c + 1) +
                                               ": cannot parse '" + f + "' as a finite number");
            data.points(r, out++) = v;
        }
    }
    if (label_col) data.labels = std::move(labels);
    return data;
}

Dataset load_csv(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io_error", "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw Error("io_error", "failed reading " + path);
    return parse_csv(ss.str(), options, path);
}

std::vector<double> NormalizationRecord::to_original(const double* normalized) const {
    std::vector<double> out(dims);
    for (std::size_t t = 0; t < dims; ++t) out[t] = minimum[t] + normalized[t] / scale * range[t];
    return out;
}

Matrix NormalizationRecord::to_original(const Matrix& normalized) const {
    Matrix out(normalized.rows(), normalized.cols());
    for (std::size_t r = 0; r < normalized.rows(); ++r) {
        const auto v = to_original(normalized.row(r));
        for (std::size_t t = 0; t < dims; ++t) out(r, t) = v[t];
    }
    return out;
}

std::vector<double> NormalizationRecord::to_normalized(const double* original) const {
    std::vector<double> out(dims);
    for (std::size_t t = 0; t < dims; ++t)
        out[t] = range[t] > 0.0 ? (original[t] - minimum[t]) / range[t] * scale : 0.0;
    return out;
}

void to_json(nlohmann::json& j, const NormalizationRecord& r) {
    j = nlohmann::json{{"minimum", r.minimum}, {"range", r.range}, {"dims", r.dims}, {"scale", r.scale}};
}

void from_json(const nlohmann::json& j, NormalizationRecord& r) {
    j.at("minimum").get_to(r.minimum);
    j.at("range").get_to(r.range);
    j.at("dims").get_to(r.dims);
    j.at("scale").get_to(r.scale);
    if (r.minimum.size() != r.dims || r.range.size() != r.dims)
        throw Error("invalid_record", "normalization record dimensions disagree");
}

std::pair<Dataset, NormalizationRecord> normalize(const Dataset& data) {
    validate(data);
    const std::size_t n = data.size();
    const std::size_t d = data.dims();

    NormalizationRecord rec;
    rec.dims = d;
    rec.minimum.assign(d, 0.0);
    rec.range.assign(d, 0.0);
    for (std::size_t t = 0; t < d; ++t) {
        double lo = data.points(0, t);
        double hi = lo;
        for (std::size_t i = 1; i < n; ++i) {
            lo = std::min(lo, data.points(i, t));
            hi = std::max(hi, data.points(i, t));
        }
        rec.minimum[t] = lo;
        rec.range[t] = hi - lo;
    }
    double scale = 1.0 / std::sqrt(static_cast<double>(d));
    auto bound = [d](double s) {
        double sum = 0.0;
        for (std::size_t t = 0; t < d; ++t) sum += s * s;
        return sum;
    };
    while (bound(scale) > 1.0) scale = std::nextafter(scale, 0.0);
    rec.scale = scale;

    Dataset out = data;
    for (std::size_t i = 0; i < n; ++i) {
        const auto v = rec.to_normalized(data.points.row(i));
        for (std::size_t t = 0; t < d; ++t) out.points(i, t) = v[t];
    }
    return {std::move(out), std::move(rec)};
}

}  // namespace neutro

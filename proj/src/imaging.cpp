#include "neutro/imaging.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "neutro/assignment.hpp"
#include "neutro/error.hpp"
#include "neutro/indeterminacy.hpp"

namespace neutro {

namespace {

void check_dims(int w, int h) {
    if (w <= 0 || h <= 0) throw Error("invalid_image", "image dimensions must be positive");
}

// Skips whitespace and '#' comments in a PNM header.
void skip_space(const std::string& s, std::size_t& p) {
    while (p < s.size()) {
        if (std::isspace(static_cast<unsigned char>(s[p]))) {
            ++p;
        } else if (s[p] == '#') {
            while (p < s.size() && s[p] != '\n') ++p;
        } else {
            break;
        }
    }
}

long read_int(const std::string& s, std::size_t& p) {
    skip_space(s, p);
    const std::size_t start = p;
    while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) ++p;
    if (start == p) throw Error("parse_error", "malformed PGM header");
    if (p - start > 9) throw Error("parse_error", "PGM header value too large");
    return std::stol(s.substr(start, p - start));
}

}  // namespace

GrayImage parse_pgm(const std::string& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2'))
        throw Error("parse_error", "not a P2/P5 PGM image");
    const bool binary = bytes[1] == '5';
    std::size_t p = 2;
    const long w = read_int(bytes, p);
    const long h = read_int(bytes, p);
    const long maxval = read_int(bytes, p);
    if (w <= 0 || h <= 0) throw Error("parse_error", "PGM dimensions must be positive");
    if (maxval < 1 || maxval > 255) throw Error("parse_error", "only 8-bit PGM (maxval <= 255) is supported");
    GrayImage img{static_cast<int>(w), static_cast<int>(h), {}};
    const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    img.pixels.resize(count);
    auto rescale = [maxval](long v) {
        if (v > maxval) throw Error("parse_error", "PGM sample exceeds maxval");
        return static_cast<std::uint8_t>(maxval == 255 ? v : (v * 255 + maxval / 2) / maxval);
    };
    if (binary) {
        if (p >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[p])))
            throw Error("parse_error", "malformed PGM header");
        ++p;
        if (bytes.size() - p < count) throw Error("parse_error", "PGM pixel data truncated");
        for (std::size_t q = 0; q < count; ++q) img.pixels[q] = rescale(static_cast<unsigned char>(bytes[p + q]));
    } else {
        for (std::size_t q = 0; q < count; ++q) img.pixels[q] = rescale(read_int(bytes, p));
    }
    return img;
}

GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io_error", "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_pgm(ss.str());
}

std::string encode_pgm(const GrayImage& img) {
    check_dims(img.width, img.height);
    if (img.pixels.size() != static_cast<std::size_t>(img.width) * img.height)
        throw Error("invalid_image", "pixel count differs from width * height");
    std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    out.append(img.pixels.begin(), img.pixels.end());
    return out;
}

void write_pgm(const std::string& path, const GrayImage& img) {
    const std::string bytes = encode_pgm(img);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io_error", "cannot write " + path);
    out << bytes;
    if (!out) throw Error("io_error", "failed writing " + path);
}

GrayImage label_image_to_gray(const LabelImage& labels) {
    int top = 0;
    for (int l : labels.labels) top = std::max(top, l);
    GrayImage img{labels.width, labels.height, std::vector<std::uint8_t>(labels.labels.size())};
    for (std::size_t q = 0; q < labels.labels.size(); ++q) {
        const int l = std::max(0, labels.labels[q]);
        img.pixels[q] = static_cast<std::uint8_t>(top == 0 ? 0 : (l * 255) / top);
    }
    return img;
}

std::string label_image_csv(const LabelImage& labels) {
    std::string out;
    for (int y = 0; y < labels.height; ++y) {
        for (int x = 0; x < labels.width; ++x) {
            if (x) out.push_back(',');
            out += std::to_string(labels.at(x, y));
        }
        out.push_back('\n');
    }
    return out;
}

std::pair<GrayImage, LabelImage> synth_quadrant_image(int side) {
    if (side <= 0 || side % 2 != 0) throw Error("invalid_argument", "quadrant image side must be positive and even");
    const int half = side / 2;
    const std::size_t count = static_cast<std::size_t>(side) * side;
    GrayImage img{side, side, std::vector<std::uint8_t>(count)};
    LabelImage truth{side, side, std::vector<int>(count)};
    constexpr std::uint8_t levels[4] = {50, 100, 150, 200};
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            const int label = (y < half ? 0 : 2) + (x < half ? 0 : 1);
            const std::size_t q = static_cast<std::size_t>(y) * side + x;
            img.pixels[q] = levels[label];
            truth.labels[q] = label;
        }
    return {std::move(img), std::move(truth)};
}

std::pair<GrayImage, LabelImage> synth_steps_image(int width, int height, int background, int upper, int lower) {
    check_dims(width, height);
    if (height % 8 != 0 || width % 4 != 0)
        throw Error("invalid_geometry", "steps image needs height divisible by 8 and width divisible by 4");
    for (int g : {background, upper, lower})
        if (g < 0 || g > 255) throw Error("invalid_argument", "gray levels must lie in [0, 255]");
    const std::size_t count = static_cast<std::size_t>(width) * height;
    GrayImage img{width, height, std::vector<std::uint8_t>(count, static_cast<std::uint8_t>(background))};
    LabelImage truth{width, height, std::vector<int>(count, 0)};
    for (int y = 0; y < height; ++y) {
        int label = 0;
        if (y >= height / 8 && y < 3 * height / 8) label = 1;
        if (y >= 5 * height / 8 && y < 7 * height / 8) label = 2;
        if (label == 0) continue;
        for (int x = width / 4; x < 3 * width / 4; ++x) {
            const std::size_t q = static_cast<std::size_t>(y) * width + x;
            img.pixels[q] = static_cast<std::uint8_t>(label == 1 ? upper : lower);
            truth.labels[q] = label;
        }
    }
    return {std::move(img), std::move(truth)};
}

GrayImage add_gaussian_noise(const GrayImage& img, double mu, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw Error("invalid_argument", "noise sigma must be non-negative");
    Rng rng(seed);
    GrayImage out = img;
    for (auto& px : out.pixels) {
        const double v = static_cast<double>(px) + mu + sigma * rng.normal();
        px = static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
    }
    return out;
}

Partition smooth_memberships(const Partition& part, int width, int height, int z) {
    check_dims(width, height);
    if (z < 1 || z % 2 == 0) throw Error("invalid_argument", "smoothing window must be a positive odd integer");
    const std::size_t n = static_cast<std::size_t>(width) * height;
    if (part.T.rows() != n || part.F.size() != n) throw Error("shape_mismatch", "partition size differs from pixel count");
    const std::size_t k = part.T.cols();
    const int r = z / 2;
    const double area = static_cast<double>(z) * z;
    Partition out{Matrix(n, k), std::vector<double>(n)};
    std::vector<double> acc(k + 1);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            std::fill(acc.begin(), acc.end(), 0.0);
            for (int dy = -r; dy <= r; ++dy) {
                const int yy = std::clamp(y + dy, 0, height - 1);
                for (int dx = -r; dx <= r; ++dx) {
                    const int xx = std::clamp(x + dx, 0, width - 1);
                    const std::size_t q = static_cast<std::size_t>(yy) * width + xx;
                    for (std::size_t j = 0; j < k; ++j) acc[j] += part.T(q, j);
                    acc[k] += part.F[q];
                }
            }
            const std::size_t q = static_cast<std::size_t>(y) * width + x;
            for (std::size_t j = 0; j < k; ++j) out.T(q, j) = acc[j] / area;
            out.F[q] = acc[k] / area;
        }
    return out;
}

namespace {

// Intensities as an n x 1 matrix, raw and scaled to [0, 1].
std::pair<Matrix, Matrix> pixel_points(const GrayImage& img) {
    check_dims(img.width, img.height);
    const std::size_t n = img.pixels.size();
    if (n != static_cast<std::size_t>(img.width) * img.height)
        throw Error("invalid_image", "pixel count differs from width * height");
    Matrix raw(n, 1);
    std::uint8_t lo = 255, hi = 0;
    for (std::size_t q = 0; q < n; ++q) {
        raw(q, 0) = img.pixels[q];
        lo = std::min(lo, img.pixels[q]);
        hi = std::max(hi, img.pixels[q]);
    }
    Matrix scaled(n, 1);
    const double range = static_cast<double>(hi) - lo;
    for (std::size_t q = 0; q < n; ++q) scaled(q, 0) = range > 0.0 ? (raw(q, 0) - lo) / range : 0.0;
    return {std::move(raw), std::move(scaled)};
}

}  // namespace

SegmentResult segment(const GrayImage& img, const SegmentConfig& cfg) {
    validate(cfg.solver);
    auto [raw, scaled] = pixel_points(img);
    const Matrix& space = cfg.space == IndeterminacySpace::Raw ? raw : scaled;
    FitOptions options;
    options.indeterminacy =
        compute_indeterminacy(space, cfg.solver.k, cfg.solver.eps_density, cfg.solver.np_threshold, cfg.solver.alpha);

    SegmentResult res;
    res.fit = fit(scaled, cfg.solver, options);
    res.smoothed = smooth_memberships(res.fit.partition, img.width, img.height, cfg.window);
    res.labels = LabelImage{img.width, img.height, row_argmax(res.smoothed.T)};
    return res;
}

LabelImage segment_fcm(const GrayImage& img, const FcmConfig& cfg) {
    auto [raw, scaled] = pixel_points(img);
    const FcmResult res = fcm_fit(scaled, cfg);
    return LabelImage{img.width, img.height, row_argmax(res.W)};
}

std::size_t count_misclassified(const LabelImage& pred, const LabelImage& truth) {
    if (pred.width != truth.width || pred.height != truth.height || pred.labels.size() != truth.labels.size())
        throw Error("shape_mismatch", "label images differ in size");
    return truth.labels.size() - matched_count(pred.labels, truth.labels);
}

FMeasure f_measure_from(double precision, double recall, double psi) {
    if (!(psi > 0.0 && psi < 1.0)) throw Error("invalid_argument", "psi must lie in (0, 1)");
    FMeasure fm{0.0, precision, recall};
    if (precision == 0.0 && recall == 0.0) return fm;
    fm.f = precision * recall / (psi * precision + (1.0 - psi) * recall);
    return fm;
}

FMeasure f_measure(const GrayImage& pred_mask, const GrayImage& truth_mask, double psi) {
    if (pred_mask.width != truth_mask.width || pred_mask.height != truth_mask.height ||
        pred_mask.pixels.size() != truth_mask.pixels.size())
        throw Error("shape_mismatch", "masks differ in size");
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t q = 0; q < pred_mask.pixels.size(); ++q) {
        const bool p = pred_mask.pixels[q] != 0;
        const bool t = truth_mask.pixels[q] != 0;
        tp += p && t;
        fp += p && !t;
        fn += !p && t;
    }
    const double precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    return f_measure_from(precision, recall, psi);
}

}  // namespace neutro

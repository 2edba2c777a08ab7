#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "neutro/fcm.hpp"
#include "neutro/solver.hpp"

namespace neutro {

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    bool operator==(const GrayImage& other) const = default;
};

struct LabelImage {
    int width = 0;
    int height = 0;
    std::vector<int> labels;  // row-major

    int at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
    bool operator==(const LabelImage& other) const = default;
};

// Binary (P5) and ASCII (P2) PGM with maxval up to 255 are read; P5 is
// written.
GrayImage read_pgm(const std::string& path);
GrayImage parse_pgm(const std::string& bytes);
std::string encode_pgm(const GrayImage& img);
void write_pgm(const std::string& path, const GrayImage& img);

// Spreads label ids 0..max over distinguishable grays (0 .. 255).
GrayImage label_image_to_gray(const LabelImage& labels);
// One CSV row per image row with the raw ids.
std::string label_image_csv(const LabelImage& labels);

// Four equal quadrants: 50 (upper left), 100 (upper right), 150 (lower
// left), 200 (lower right), labelled 0..3.
std::pair<GrayImage, LabelImage> synth_quadrant_image(int side = 128);

// Background (label 0) with two equal rectangles, each covering 1/8 of the
// image: rows [H/8, 3H/8) in `upper` gray (label 1) and rows [5H/8, 7H/8) in
// `lower` gray (label 2), both spanning columns [W/4, 3W/4). Requires H
// divisible by 8 and W divisible by 4.
std::pair<GrayImage, LabelImage> synth_steps_image(int width = 128, int height = 128,
                                                   int background = 255, int upper = 20,
                                                   int lower = 100);

// Adds mu + sigma * z to every pixel in row-major order, z drawn from
// Rng(seed).normal(); the sum is rounded half away from zero and clamped to
// [0, 255].
GrayImage add_gaussian_noise(const GrayImage& img, double mu, double sigma, std::uint64_t seed);

// z x z mean of T and F around every pixel with edge replication.
Partition smooth_memberships(const Partition& part, int width, int height, int z = 3);

enum class IndeterminacySpace { Raw, Normalized };

struct SegmentConfig {
    SolverConfig solver;
    int window = 3;
    IndeterminacySpace space = IndeterminacySpace::Raw;
};

struct SegmentResult {
    LabelImage labels;
    FitResult fit;
    Partition smoothed;
};

// Clusters pixel intensities (normalized to [0, 1]; indeterminacy from raw
// intensities by default), smooths the memberships and labels each pixel with
// the argmax of its smoothed T.
SegmentResult segment(const GrayImage& img, const SegmentConfig& cfg);

// Plain per-pixel fuzzy c-means on normalized intensities, argmax labels.
LabelImage segment_fcm(const GrayImage& img, const FcmConfig& cfg);

// Pixels that disagree with the truth after the best one-to-one matching of
// predicted ids to truth ids.
std::size_t count_misclassified(const LabelImage& pred, const LabelImage& truth);

struct FMeasure {
    double f = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

// Masks: any nonzero pixel is foreground. Precision (recall) is 1 when its
// denominator is 0; F is 0 when both are 0.
FMeasure f_measure(const GrayImage& pred_mask, const GrayImage& truth_mask, double psi = 0.5);
FMeasure f_measure_from(double precision, double recall, double psi);

}  // namespace neutro

// Command-line front end: synthetic data generation, clustering, image
// segmentation and verification. Every command writes its outputs plus one
// manifest.json into the --out directory.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "neutro/assignment.hpp"
#include "neutro/dataset.hpp"
#include "neutro/error.hpp"
#include "neutro/fcm.hpp"
#include "neutro/imaging.hpp"
#include "neutro/io.hpp"
#include "neutro/pipeline.hpp"
#include "neutro/solver.hpp"
#include "neutro/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw neutro::Error("digest_error", "SHA-256 computation failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int q = 0; q < len; ++q) {
        out.push_back(hex[digest[q] >> 4]);
        out.push_back(hex[digest[q] & 15]);
    }
    return out;
}

// Collects outputs of one command and writes the manifest last.
class Run {
public:
    Run(std::string command, std::string out_dir) : command_(std::move(command)), out_dir_(std::move(out_dir)) {
        start_ = std::chrono::steady_clock::now();
        std::error_code ec;
        fs::create_directories(out_dir_, ec);
        if (ec) throw neutro::Error("io_error", "cannot create output directory " + out_dir_ + ": " + ec.message());
    }

    void input(const std::string& path) {
        inputs_.push_back({{"path", path}, {"sha256", sha256_hex(neutro::read_file(path))}});
    }

    void output(const std::string& name, const std::string& contents) {
        const std::string path = (fs::path(out_dir_) / name).string();
        neutro::write_file(path, contents);
        outputs_.push_back({{"path", path}, {"sha256", sha256_hex(contents)}});
    }

    void finish(const json& config, std::uint64_t seed) {
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        char stamp[32];
        const std::time_t now = std::time(nullptr);
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        json manifest{{"command", command_},
                      {"config", config},
                      {"seed", seed},
                      {"inputs", inputs_},
                      {"tool_version", kVersion},
                      {"wall_time_seconds", wall},
                      {"timestamp", stamp},
                      {"outputs", outputs_}};
        neutro::write_file((fs::path(out_dir_) / "manifest.json").string(), manifest.dump(2) + "\n");
    }

private:
    std::string command_;
    std::string out_dir_;
    std::chrono::steady_clock::time_point start_;
    json inputs_ = json::array();
    json outputs_ = json::array();
};

// Solver flags that override config-file values only when given.
struct SolverFlags {
    std::optional<int> k;
    std::optional<double> m, w1, w2, eps_conv, eps_density, alpha, t;
    std::optional<int> np_th, max_iter;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> rule;
    std::string config_path;

    void add(CLI::App* app) {
        app->add_option("--config", config_path, "JSON file with solver settings (flags override it)");
        app->add_option("--k", k, "number of clusters");
        app->add_option("--m", m, "fuzzifier (default 2)");
        app->add_option("--w1", w1, "main-cluster weight (default 1)");
        app->add_option("--w2", w2, "noise-cluster weight (default 2)");
        app->add_option("--eps-conv", eps_conv, "stop when max |T change| falls below this (default 1e-6)");
        app->add_option("--eps-density", eps_density, "neighbourhood radius Eps (default 4)");
        app->add_option("--np-th", np_th, "neighbour-count threshold (default 4)");
        app->add_option("--alpha", alpha, "indeterminacy of dense points (default 0.05)");
        app->add_option("--t", t, "boundary threshold (default 0.4)");
        app->add_option("--seed", seed, "random seed (default 0)");
        app->add_option("--max-iter", max_iter, "iteration cap (default 300)");
        app->add_option("--rule", rule, "membership rule: stationary (default) or printed")
            ->check(CLI::IsMember({"stationary", "printed"}));
    }

    neutro::SolverConfig resolve(int default_k) const {
        neutro::SolverConfig cfg;
        cfg.k = default_k;
        if (!config_path.empty()) {
            json j;
            try {
                j = json::parse(neutro::read_file(config_path));
            } catch (const json::exception& e) {
                throw neutro::Error("parse_error", config_path + ": " + e.what());
            }
            from_json(j, cfg);
        }
        if (k) cfg.k = *k;
        if (m) cfg.m = *m;
        if (w1) cfg.w1 = *w1;
        if (w2) cfg.w2 = *w2;
        if (eps_conv) cfg.eps_conv = *eps_conv;
        if (eps_density) cfg.eps_density = *eps_density;
        if (alpha) cfg.alpha = *alpha;
        if (t) cfg.boundary_t = *t;
        if (np_th) cfg.np_threshold = *np_th;
        if (max_iter) cfg.max_iter = *max_iter;
        if (seed) cfg.seed = *seed;
        if (rule) cfg.rule = *rule == "printed" ? neutro::MembershipRule::Printed : neutro::MembershipRule::Stationary;
        neutro::validate(cfg);
        return cfg;
    }
};

std::string command_line(int argc, char** argv) {
    std::string out;
    for (int i = 0; i < argc; ++i) {
        if (i) out.push_back(' ');
        out += argv[i];
    }
    return out;
}

neutro::Point2 parse_point(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw neutro::Error("invalid_argument", "expected x,y but got '" + s + "'");
    try {
        return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
    } catch (const std::exception&) {
        throw neutro::Error("invalid_argument", "expected x,y but got '" + s + "'");
    }
}

// Maps the distinct gray values of a truth image to ids in increasing order.
neutro::LabelImage truth_from_gray(const neutro::GrayImage& img) {
    std::map<int, int> ids;
    for (auto v : img.pixels) ids.emplace(v, 0);
    int next = 0;
    for (auto& [v, id] : ids) id = next++;
    neutro::LabelImage out{img.width, img.height, std::vector<int>(img.pixels.size())};
    for (std::size_t q = 0; q < img.pixels.size(); ++q) out.labels[q] = ids[img.pixels[q]];
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neutrosophic clustering with density-based indeterminacy"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string out_dir = "out";

    // synth
    auto* synth = app.add_subcommand("synth", "generate synthetic datasets and images");
    synth->require_subcommand(1);
    std::uint64_t synth_seed = 1;
    double noise_sigma = 0.0, noise_mu = 0.0;

    auto* diamond = synth->add_subcommand("diamond", "diamond scatter dataset (CSV)");
    neutro::DiamondSpec spec;
    std::vector<std::string> outliers;
    std::string layout = "collinear", motif = "diamond5";
    bool no_truth = false;
    diamond->add_option("--k", spec.num_clusters, "number of clusters")->capture_default_str();
    diamond->add_option("--scale", spec.motif_scale, "motif scale s")->capture_default_str();
    diamond->add_option("--spacing", spec.center_spacing, "distance between adjacent cluster centres")
        ->capture_default_str();
    diamond->add_option("--boundary-per-gap", spec.boundary_points_per_gap, "boundary points per adjacent pair")
        ->capture_default_str();
    diamond->add_option("--outlier", outliers,
                        "outlier as x,y (repeatable; default one outlier 5 units above the first gap, "
                        "plus one below the last gap when k > 2)");
    diamond->add_option("--layout", layout, "collinear or grid")->check(CLI::IsMember({"collinear", "grid"}))
        ->capture_default_str();
    diamond->add_option("--motif", motif, "diamond5 or grid9")->check(CLI::IsMember({"diamond5", "grid9"}))
        ->capture_default_str();
    diamond->add_flag("--no-truth", no_truth, "omit the ground-truth label column");
    diamond->add_option("--out", out_dir, "output directory")->capture_default_str();

    auto* quadrant = synth->add_subcommand("quadrant", "four-level quadrant image (PGM)");
    int side = 128;
    quadrant->add_option("--side", side, "image side (even)")->capture_default_str();
    auto* steps = synth->add_subcommand("steps", "two rectangles on a bright background (PGM)");
    int width = 128, height = 128, background = 255, upper = 20, lower = 100;
    steps->add_option("--width", width)->capture_default_str();
    steps->add_option("--height", height)->capture_default_str();
    steps->add_option("--background", background)->capture_default_str();
    steps->add_option("--upper", upper)->capture_default_str();
    steps->add_option("--lower", lower)->capture_default_str();
    for (auto* sub : {quadrant, steps}) {
        sub->add_option("--noise-sigma", noise_sigma, "Gaussian noise standard deviation")->capture_default_str();
        sub->add_option("--noise-mu", noise_mu, "Gaussian noise mean")->capture_default_str();
        sub->add_option("--seed", synth_seed, "noise seed")->capture_default_str();
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    }

    // cluster
    auto* cluster = app.add_subcommand("cluster", "cluster a CSV dataset");
    SolverFlags cluster_flags;
    cluster_flags.add(cluster);
    std::string input, delimiter = ",", method = "neutro", space = "raw";
    bool header = false;
    std::optional<int> label_col;
    int restarts = 1;
    cluster->add_option("--input", input, "CSV file")->required();
    cluster->add_flag("--header", header, "skip the first row");
    cluster->add_option("--delimiter", delimiter, "field delimiter")->capture_default_str();
    cluster->add_option("--label-col", label_col, "column with class names (negative counts from the end)");
    cluster->add_option("--restarts", restarts, "runs with derived seeds; the lowest final cost is kept")
        ->capture_default_str();
    cluster->add_option("--method", method, "neutro or fcm")->check(CLI::IsMember({"neutro", "fcm"}))
        ->capture_default_str();
    cluster->add_option("--normalize-space", space, "space for indeterminacy: raw or normalized")
        ->check(CLI::IsMember({"raw", "normalized"}))
        ->capture_default_str();
    cluster->add_option("--out", out_dir, "output directory")->capture_default_str();

    // segment
    auto* seg = app.add_subcommand("segment", "segment a grayscale PGM image");
    SolverFlags seg_flags;
    seg_flags.add(seg);
    std::string image_path, truth_path, mask_path;
    int window = 3;
    seg->add_option("--input", image_path, "PGM image")->required();
    seg->add_option("--truth", truth_path, "truth PGM, one gray level per class");
    seg->add_option("--mask", mask_path, "binary foreground mask PGM for the F-measure");
    seg->add_option("--window", window, "smoothing window (odd)")->capture_default_str();
    seg->add_option("--method", method, "neutro or fcm (plain per-pixel FCM)")
        ->check(CLI::IsMember({"neutro", "fcm"}))
        ->capture_default_str();
    seg->add_option("--normalize-space", space, "space for indeterminacy: raw or normalized")
        ->check(CLI::IsMember({"raw", "normalized"}))
        ->capture_default_str();
    double psi = 0.5;
    seg->add_option("--psi", psi, "F-measure weight")->capture_default_str();
    seg->add_option("--out", out_dir, "output directory")->capture_default_str();

    // verify
    auto* ver = app.add_subcommand("verify", "run gradient, stationarity and constraint checks");
    neutro::VerifyOptions vopt;
    ver->add_option("--seed", vopt.seed)->capture_default_str();
    ver->add_option("--instances", vopt.instances)->capture_default_str();
    ver->add_option("--n", vopt.n, "points per instance")->capture_default_str();
    ver->add_option("--k", vopt.k, "clusters per instance")->capture_default_str();
    ver->add_option("--d", vopt.d, "dimensions per instance")->capture_default_str();
    ver->add_flag("--inject-fault", vopt.inject_fault, "perturb the implementation to show the checks fail");
    std::string verify_out = "out";
    ver->add_option("--out", verify_out, "output directory for report.json")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << "\n";
        return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
    }

    const std::string cmd = command_line(argc, argv);
    try {
        if (synth->parsed()) {
            Run run(cmd, out_dir);
            json config;
            std::uint64_t seed = 0;
            if (diamond->parsed()) {
                spec.layout = layout == "grid" ? neutro::DiamondLayout::Grid : neutro::DiamondLayout::Collinear;
                spec.motif = motif == "grid9" ? neutro::DiamondMotif::Grid9 : neutro::DiamondMotif::Diamond5;
                if (outliers.empty()) {
                    const auto centers = neutro::diamond_centers(spec);
                    const auto gaps = neutro::diamond_gaps(spec);
                    auto mid = [&](std::pair<int, int> g) {
                        return neutro::Point2{(centers[g.first].x + centers[g.second].x) / 2.0,
                                              (centers[g.first].y + centers[g.second].y) / 2.0};
                    };
                    const double lift = 5.0 * spec.motif_scale;
                    auto first = mid(gaps.front());
                    spec.outliers.push_back({first.x, first.y + lift});
                    if (spec.num_clusters > 2) {
                        auto last = mid(gaps.back());
                        spec.outliers.push_back({last.x, last.y - lift});
                    }
                } else {
                    for (const auto& o : outliers) spec.outliers.push_back(parse_point(o));
                }
                const auto data = neutro::generate_diamond(spec, !no_truth);
                run.output("dataset.csv", neutro::dataset_csv(data));
                json outs = json::array();
                for (const auto& o : spec.outliers) outs.push_back({o.x, o.y});
                config = {{"kind", "diamond"},
                          {"k", spec.num_clusters},
                          {"scale", spec.motif_scale},
                          {"spacing", spec.center_spacing},
                          {"boundary_per_gap", spec.boundary_points_per_gap},
                          {"outliers", outs},
                          {"layout", layout},
                          {"motif", motif},
                          {"truth", !no_truth}};
                std::cout << "wrote " << data.size() << " points to " << (fs::path(out_dir) / "dataset.csv").string()
                          << "\n";
            } else {
                auto [img, truth] = quadrant->parsed()
                                        ? neutro::synth_quadrant_image(side)
                                        : neutro::synth_steps_image(width, height, background, upper, lower);
                if (noise_sigma > 0.0 || noise_mu != 0.0)
                    img = neutro::add_gaussian_noise(img, noise_mu, noise_sigma, synth_seed);
                run.output("image.pgm", neutro::encode_pgm(img));
                run.output("truth.pgm", neutro::encode_pgm(neutro::label_image_to_gray(truth)));
                run.output("truth.csv", neutro::label_image_csv(truth));
                seed = synth_seed;
                config = {{"kind", quadrant->parsed() ? "quadrant" : "steps"},
                          {"width", img.width},
                          {"height", img.height},
                          {"noise_sigma", noise_sigma},
                          {"noise_mu", noise_mu},
                          {"seed", synth_seed}};
                if (steps->parsed()) {
                    config["background"] = background;
                    config["upper"] = upper;
                    config["lower"] = lower;
                }
                std::cout << "wrote " << img.width << "x" << img.height << " image to "
                          << (fs::path(out_dir) / "image.pgm").string() << "\n";
            }
            run.finish(config, seed);
            return 0;
        }

        if (cluster->parsed()) {
            if (delimiter.size() != 1) throw neutro::Error("invalid_argument", "delimiter must be one character");
            neutro::ClusterOptions opt;
            opt.solver = cluster_flags.resolve(2);
            opt.method = method == "fcm" ? neutro::Method::Fcm : neutro::Method::Neutro;
            opt.space = space == "normalized" ? neutro::IndeterminacySpace::Normalized : neutro::IndeterminacySpace::Raw;
            opt.restarts = restarts;
            neutro::CsvOptions csv{delimiter[0], header, label_col};
            Run run(cmd, out_dir);
            run.input(input);
            const auto data = neutro::load_csv(input, csv);
            const auto res = neutro::run_cluster(data, opt);
            const bool neutro_method = opt.method == neutro::Method::Neutro;

            run.output("memberships.csv",
                       neutro::memberships_csv(res.fit.partition, res.fit.indeterminacy, neutro_method));
            run.output("centers.csv", neutro::centers_csv(res.record.to_original(res.fit.centers)));
            run.output("labels.csv", neutro::labels_csv(res.labels));
            run.output("cost_trace.csv", neutro::cost_trace_csv(res.fit.cost_trace));
            run.output("normalization.json", json(res.record).dump(2) + "\n");

            std::map<std::string, int> kinds{{"main", 0}, {"boundary", 0}, {"outlier", 0}};
            for (const auto& l : res.labels) ++kinds[neutro::to_string(l.kind)];
            json metrics{{"method", method},
                         {"n", data.size()},
                         {"d", data.dims()},
                         {"iterations", res.fit.iterations},
                         {"converged", res.fit.converged},
                         {"final_cost", res.fit.cost_trace.empty() ? 0.0 : res.fit.cost_trace.back()},
                         {"label_counts", kinds},
                         {"restart_seeds", res.restart_seeds},
                         {"restart_costs", res.restart_costs},
                         {"best_restart", res.best_restart},
                         {"diagnostics",
                          {{"noise_base_clamps", res.fit.diagnostics.noise_base_clamps},
                           {"center_fallbacks", res.fit.diagnostics.center_fallbacks},
                           {"centers_outside_box", res.fit.diagnostics.centers_outside_box}}}};
            if (res.accuracy) metrics["accuracy"] = *res.accuracy;
            run.output("metrics.json", metrics.dump(2) + "\n");

            json config = opt.solver;
            config["method"] = method;
            config["normalize_space"] = space;
            config["restarts"] = restarts;
            run.finish(config, opt.solver.seed);
            if (res.fit.diagnostics.center_fallbacks > 0 || res.fit.diagnostics.noise_base_clamps > 0 ||
                res.fit.diagnostics.centers_outside_box > 0)
                std::cerr << "diagnostic: center_fallbacks=" << res.fit.diagnostics.center_fallbacks
                          << " noise_base_clamps=" << res.fit.diagnostics.noise_base_clamps
                          << " centers_outside_box=" << res.fit.diagnostics.centers_outside_box << "\n";
            std::cout << "iterations " << res.fit.iterations << (res.fit.converged ? " (converged)" : " (cap reached)");
            if (res.accuracy) std::cout << ", accuracy " << *res.accuracy;
            std::cout << "\n";
            return 0;
        }

        if (seg->parsed()) {
            Run run(cmd, out_dir);
            run.input(image_path);
            const auto img = neutro::read_pgm(image_path);
            neutro::SegmentConfig scfg;
            scfg.solver = seg_flags.resolve(2);
            scfg.window = window;
            scfg.space = space == "normalized" ? neutro::IndeterminacySpace::Normalized : neutro::IndeterminacySpace::Raw;

            json metrics{{"method", method}, {"width", img.width}, {"height", img.height}};
            neutro::LabelImage labels;
            if (method == "fcm") {
                const neutro::FcmConfig fc{scfg.solver.k, scfg.solver.m, scfg.solver.eps_conv, scfg.solver.max_iter,
                                           scfg.solver.seed, scfg.solver.singular_delta};
                labels = neutro::segment_fcm(img, fc);
            } else {
                const auto res = neutro::segment(img, scfg);
                labels = res.labels;
                double f_mean = 0.0, f_max = 0.0;
                for (double f : res.smoothed.F) {
                    f_mean += f;
                    f_max = std::max(f_max, f);
                }
                f_mean /= static_cast<double>(res.smoothed.F.size());
                metrics["iterations"] = res.fit.iterations;
                metrics["converged"] = res.fit.converged;
                metrics["smoothed_noise_mean"] = f_mean;
                metrics["smoothed_noise_max"] = f_max;
                run.output("cost_trace.csv", neutro::cost_trace_csv(res.fit.cost_trace));
            }
            std::vector<int> sizes(static_cast<std::size_t>(scfg.solver.k), 0);
            for (int l : labels.labels) ++sizes[static_cast<std::size_t>(l)];
            metrics["cluster_sizes"] = sizes;
            run.output("labels.pgm", neutro::encode_pgm(neutro::label_image_to_gray(labels)));
            run.output("labels.csv", neutro::label_image_csv(labels));

            if (!truth_path.empty()) {
                run.input(truth_path);
                const auto truth = truth_from_gray(neutro::read_pgm(truth_path));
                const auto wrong = neutro::count_misclassified(labels, truth);
                metrics["misclassified"] = wrong;
                std::cout << "misclassified pixels " << wrong << "\n";
            }
            if (!mask_path.empty()) {
                run.input(mask_path);
                const auto mask = neutro::read_pgm(mask_path);
                // The foreground cluster is the one whose mask scores best.
                neutro::FMeasure best;
                int best_cluster = 0;
                for (int c = 0; c < scfg.solver.k; ++c) {
                    neutro::GrayImage pred{labels.width, labels.height, std::vector<std::uint8_t>(labels.labels.size())};
                    for (std::size_t q = 0; q < labels.labels.size(); ++q) pred.pixels[q] = labels.labels[q] == c ? 255 : 0;
                    const auto fm = neutro::f_measure(pred, mask, psi);
                    if (c == 0 || fm.f > best.f) {
                        best = fm;
                        best_cluster = c;
                    }
                }
                metrics["f_measure"] = {{"f", best.f},
                                        {"precision", best.precision},
                                        {"recall", best.recall},
                                        {"foreground_cluster", best_cluster},
                                        {"psi", psi}};
                std::cout << "F-measure " << best.f << " (cluster " << best_cluster << ")\n";
            }
            run.output("metrics.json", metrics.dump(2) + "\n");
            json config = scfg.solver;
            config["method"] = method;
            config["window"] = window;
            config["normalize_space"] = space;
            run.finish(config, scfg.solver.seed);
            return 0;
        }

        if (ver->parsed()) {
            const auto report = neutro::run_verification(vopt);
            json checks = json::array();
            for (const auto& c : report.checks) {
                std::printf("%s %-32s max_error=%.3e tolerance=%.1e instances=%d\n", c.passed ? "PASS" : "FAIL",
                            c.name.c_str(), c.max_error, c.tolerance, c.instances);
                checks.push_back({{"name", c.name},
                                  {"passed", c.passed},
                                  {"max_error", c.max_error},
                                  {"tolerance", c.tolerance},
                                  {"instances", c.instances}});
            }
            {
                Run run(cmd, verify_out);
                run.output("report.json", json{{"passed", report.passed()}, {"checks", checks}}.dump(2) + "\n");
                run.finish({{"seed", vopt.seed},
                            {"instances", vopt.instances},
                            {"n", vopt.n},
                            {"k", vopt.k},
                            {"d", vopt.d},
                            {"inject_fault", vopt.inject_fault}},
                           vopt.seed);
            }
            if (!report.passed()) {
                std::cerr << "error: verification_failed: at least one check exceeded its tolerance\n";
                return 1;
            }
            return 0;
        }
    } catch (const neutro::Error& e) {
        std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "toposcore/error.hpp"
#include "toposcore/phantom.hpp"
#include "toposcore/report_json.hpp"
#include "toposcore/score.hpp"
#include "toposcore/select.hpp"
#include "toposcore/skeleton.hpp"
#include "toposcore/volume.hpp"

namespace fs = std::filesystem;
using namespace toposcore;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitIo = 2;

struct ScoreFlags {
    double radius = kDefaultRadius;
    double t_low = kDefaultTLow;
    double t_high = kDefaultTHigh;
    std::size_t min_component = kDefaultMinComponentSize;

    void attach(CLI::App* app) {
        app->add_option("--radius", radius, "Node matching radius (voxels)");
        app->add_option("--t-low", t_low, "IoU below this scores 0");
        app->add_option("--t-high", t_high, "IoU above this scores 1");
        app->add_option("--min-component", min_component, "Smallest component kept, in skeleton nodes");
    }

    ScoreConfig config() const {
        ScoreConfig cfg;
        cfg.match.radius = radius;
        cfg.t_low = t_low;
        cfg.t_high = t_high;
        cfg.min_component_size = min_component;
        cfg.validate();
        return cfg;
    }
};

// A binary mask, a probability map cut at `threshold`, or a skeleton.
SkeletonInput load_scored_input(const fs::path& path, std::optional<double> threshold) {
    if (detect_input_kind(path) == InputKind::skeleton) return load_skeleton_input(path);
    Volume v = load_volume(path);
    if (v.dtype() == DType::f32) {
        if (!threshold)
            throw Error(Errc::invalid_argument, path.string() + " is a probability map; pass --threshold to binarize it");
        v = binarize(v, *threshold);
    }
    SkeletonInput in;
    in.skeleton = skeletonize(v);
    in.volume = std::move(v);
    return in;
}

Volume load_mask(const fs::path& path, std::optional<double> threshold) {
    Volume v = load_volume(path);
    if (v.dtype() == DType::u8) return v;
    if (!threshold)
        throw Error(Errc::invalid_argument, path.string() + " is a probability map; pass --threshold to binarize it");
    return binarize(v, *threshold);
}

void check_threshold(const std::optional<double>& t) {
    if (t && !(*t >= 0.0 && *t <= 1.0)) throw Error(Errc::invalid_argument, "--threshold must lie in [0, 1]");
}

void ensure_parent(const fs::path& p) {
    const auto dir = p.parent_path();
    if (dir.empty()) return;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::io, "cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topology-aware scoring of tubular network segmentations"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);

    // skeletonize
    auto* skel = app.add_subcommand("skeletonize", "Thin a binary volume and write its skeleton graph");
    fs::path skel_in, skel_out;
    std::optional<double> skel_threshold;
    skel->add_option("--in", skel_in, "Binary volume header (or probability map with --threshold)")->required();
    skel->add_option("--threshold", skel_threshold, "Binarization threshold for probability maps");
    skel->add_option("--out", skel_out, "Skeleton JSON to write")->required();

    // score
    auto* score = app.add_subcommand("score", "Topology score between a ground truth and a prediction");
    fs::path score_gt, score_pred, score_out;
    std::optional<double> score_threshold;
    ScoreFlags score_flags;
    score->add_option("--gt", score_gt, "Ground truth: binary volume or skeleton JSON")->required();
    score->add_option("--pred", score_pred, "Prediction: binary volume, probability map or skeleton JSON")->required();
    score_flags.attach(score);
    score->add_option("--threshold", score_threshold, "Binarization threshold for probability maps");
    score->add_option("--out", score_out, "Report JSON to write");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Threshold sweep over a dataset manifest");
    fs::path sweep_manifest, sweep_out;
    std::vector<double> sweep_thresholds;
    std::string sweep_metric;
    ScoreFlags sweep_flags;
    sweep->add_option("--manifest", sweep_manifest, "Sweep manifest JSON")->required();
    sweep->add_option("--thresholds", sweep_thresholds, "Override the manifest's thresholds")->delimiter(',');
    sweep->add_option("--metric", sweep_metric, "voxel_iou, topology_score or both (overrides the manifest)");
    sweep_flags.attach(sweep);
    sweep->add_option("--out", sweep_out, "Output stem; writes <stem>.csv and <stem>.json")->required();

    // phantom
    auto* phantom = app.add_subcommand("phantom", "Generate a synthetic tubular phantom with known topology");
    PhantomSpec ps;
    std::size_t total_loops = 0;
    std::vector<std::size_t> phantom_dims{ps.dims.nx, ps.dims.ny, ps.dims.nz};
    fs::path phantom_out;
    phantom->add_option("--seed", ps.seed, "Random seed");
    phantom->add_option("--components", ps.n_components, "Number of connected components");
    phantom->add_option("--loops", total_loops, "Total number of loops, spread over the components");
    phantom->add_option("--dims", phantom_dims, "Grid size nx ny nz")->expected(3);
    phantom->add_option("--tube-radius", ps.tube_radius, "Tube radius (voxels)");
    phantom->add_option("--jitter", ps.jitter, "Maximum waypoint displacement per axis (voxels)");
    phantom->add_option("--nodes", ps.nodes_per_component, "Minimum waypoints per component");
    phantom->add_option("--out", phantom_out, "Output directory")->required();

    // voxel-iou
    auto* viou = app.add_subcommand("voxel-iou", "Voxel IoU between two masks");
    fs::path viou_gt, viou_pred, viou_out;
    std::optional<double> viou_threshold;
    viou->add_option("--gt", viou_gt, "Ground-truth binary volume")->required();
    viou->add_option("--pred", viou_pred, "Predicted binary volume or probability map")->required();
    viou->add_option("--threshold", viou_threshold, "Binarization threshold for probability maps");
    viou->add_option("--out", viou_out, "JSON result to write");

    // entropy
    auto* ent = app.add_subcommand("entropy", "Mean binary entropy of a probability map");
    fs::path ent_in, ent_out;
    ent->add_option("--in", ent_in, "Probability map")->required();
    ent->add_option("--out", ent_out, "JSON result to write");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (*skel) {
            check_threshold(skel_threshold);
            const auto g = skeletonize(load_mask(skel_in, skel_threshold));
            ensure_parent(skel_out);
            save_skeleton(g, skel_out);
            const auto [label, n] = label_graph_components(g);
            std::printf("%zu nodes, %zu edges, %zu components, cycle rank %zu\n", g.node_count(), g.edges.size(), n,
                        cycle_rank(g));
        } else if (*score) {
            const auto cfg = score_flags.config();
            check_threshold(score_threshold);
            const auto gt = load_skeleton_input(score_gt);
            const auto pred = load_scored_input(score_pred, score_threshold);
            auto rep = topology_score(gt.skeleton, pred.skeleton, cfg);
            if (gt.volume && pred.volume) rep.voxel_iou = voxel_iou(*gt.volume, *pred.volume);
            if (!score_out.empty()) {
                ensure_parent(score_out);
                save_report(rep, score_out);
            }
            std::printf("topology_score %.6f\n", rep.topology_score);
            std::printf("loop_score %.6f (gt %zu, pred %zu)\n", rep.loop_score, rep.counts.gt_loops,
                        rep.counts.pred_loops);
            std::printf("component_score %.6f (gt %zu, pred %zu)\n", rep.component_score, rep.counts.gt_components,
                        rep.counts.pred_components);
            if (rep.voxel_iou) std::printf("voxel_iou %.6f\n", *rep.voxel_iou);
        } else if (*sweep) {
            auto spec = load_sweep_manifest(sweep_manifest);
            if (!sweep_thresholds.empty()) spec.thresholds = sweep_thresholds;
            if (!sweep_metric.empty()) spec.metric = parse_metric(sweep_metric);
            // flags given on the command line override the manifest's config
            ScoreConfig cfg = spec.cfg;
            if (sweep->count("--radius")) cfg.match.radius = sweep_flags.radius;
            if (sweep->count("--t-low")) cfg.t_low = sweep_flags.t_low;
            if (sweep->count("--t-high")) cfg.t_high = sweep_flags.t_high;
            if (sweep->count("--min-component")) cfg.min_component_size = sweep_flags.min_component;
            spec.cfg = cfg;
            spec.validate();

            const auto result = run_sweep(spec);
            for (const auto& s : result.skipped)
                std::fprintf(stderr, "warning: skipped item %s: %s\n", s.item.c_str(), s.reason.c_str());
            ensure_parent(sweep_out);
            emit_report(result, sweep_out);
            std::printf("%-10s %-18s %-18s\n", "threshold", "voxel_iou", "topo_score");
            for (const auto& s : result.summary) {
                char vox[32] = "-";
                if (s.voxel_iou.n) std::snprintf(vox, sizeof vox, "%.4f+-%.4f", s.voxel_iou.mean, s.voxel_iou.std);
                std::printf("%-10.3g %-18s %.4f+-%.4f\n", s.threshold, vox, s.topo_score.mean, s.topo_score.std);
            }
            if (result.best_voxel_iou) std::printf("voxel-tuned threshold %.3g\n", *result.best_voxel_iou);
            if (result.best_topology) std::printf("topo-tuned threshold %.3g\n", *result.best_topology);
            if (result.rows.empty()) {
                std::fprintf(stderr, "error: no item could be scored\n");
                return kExitIo;
            }
        } else if (*phantom) {
            ps.dims = {phantom_dims[0], phantom_dims[1], phantom_dims[2]};
            ps.loops_per_component = distribute_loops(total_loops, ps.n_components);
            const auto truth = generate_phantom(ps);
            std::error_code ec;
            fs::create_directories(phantom_out, ec);
            if (ec) throw Error(Errc::io, "cannot create " + phantom_out.string() + ": " + ec.message());
            save_volume(truth.volume, phantom_out / "phantom.json");
            save_skeleton(truth.skeleton, phantom_out / "skeleton.json");
            write_json_file({{"components", truth.counts.components}, {"loops", truth.counts.loops}, {"seed", ps.seed}},
                            phantom_out / "truth.json");
            std::printf("phantom: %zu components, %zu loops, %zu foreground voxels -> %s\n", truth.counts.components,
                        truth.counts.loops, truth.volume.count_foreground(), phantom_out.string().c_str());
        } else if (*viou) {
            check_threshold(viou_threshold);
            const double v = voxel_iou(load_mask(viou_gt, std::nullopt), load_mask(viou_pred, viou_threshold));
            if (!viou_out.empty()) {
                ensure_parent(viou_out);
                write_json_file({{"voxel_iou", v}}, viou_out);
            }
            std::printf("voxel_iou %.6f\n", v);
        } else if (*ent) {
            const double h = mean_entropy(load_volume(ent_in));
            if (!ent_out.empty()) {
                ensure_parent(ent_out);
                write_json_file({{"mean_entropy", h}}, ent_out);
            }
            std::printf("mean_entropy %.6f\n", h);
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.is_io() ? kExitIo : kExitInvalid;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInvalid;
    }
    return kExitOk;
}

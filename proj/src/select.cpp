#include "toposcore/select.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <thread>

#include "toposcore/error.hpp"
#include "toposcore/report_json.hpp"

namespace toposcore {

using nlohmann::json;

namespace {

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(Errc::malformed_header, path.string() + ": " + e.what());
    }
}

// Shortest representation that round-trips.
std::string format_number(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

Volume as_probability(Volume v) {
    if (v.dtype() == DType::f32) return v;
    const auto src = v.u8();
    return Volume::real(v.dims(), std::vector<float>(src.begin(), src.end()), v.spacing());
}

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd m;
    m.n = xs.size();
    if (xs.empty()) return m;
    double s = 0;
    for (double x : xs) s += x;
    m.mean = s / static_cast<double>(xs.size());
    double ss = 0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(ss / static_cast<double>(xs.size()));
    return m;
}

std::optional<double> argmax(const std::vector<ThresholdSummary>& summary, MeanStd ThresholdSummary::*field) {
    std::optional<double> best;
    double best_mean = 0;
    for (const auto& s : summary) {
        const auto& m = s.*field;
        if (m.n == 0) continue;
        if (!best || m.mean > best_mean) {
            best = s.threshold;
            best_mean = m.mean;
        }
    }
    return best;
}

struct ItemOutcome {
    std::vector<SweepRow> rows;
    std::optional<std::string> failure;
};

ItemOutcome score_item(const SweepItem& item, const SweepSpec& spec) {
    ItemOutcome out;
    try {
        const Volume prob = as_probability(load_volume(item.prob));
        const SkeletonInput gt = load_skeleton_input(item.gt);
        if (gt.volume && gt.volume->dims() != prob.dims())
            throw Error(Errc::dimension_mismatch, "probability map and GT volume differ in size");
        const double entropy = mean_entropy(prob);
        const auto gt_topo = decompose(gt.skeleton, spec.cfg.min_component_size);

        for (double t : spec.thresholds) {
            const Volume pred = binarize(prob, t);
            SweepRow row;
            row.item = item.name;
            row.threshold = t;
            if (gt.volume) row.voxel_iou = voxel_iou(*gt.volume, pred);
            const SkeletonGraph pred_graph = skeletonize(pred);
            const auto pred_topo = decompose(pred_graph, spec.cfg.min_component_size);
            const auto rep = topology_score(gt_topo, pred_topo, spec.cfg);
            row.topo_score = rep.topology_score;
            row.loop_score = rep.loop_score;
            row.component_score = rep.component_score;
            row.entropy = entropy;
            out.rows.push_back(std::move(row));
        }
    } catch (const std::exception& e) {
        out.rows.clear();
        out.failure = e.what();
    }
    return out;
}

}  // namespace

InputKind detect_input_kind(const std::filesystem::path& path) {
    const json j = read_json(path);
    if (j.is_object() && j.contains("dims")) return InputKind::volume;
    if (j.is_object() && j.contains("nodes")) return InputKind::skeleton;
    throw Error(Errc::malformed_header, path.string() + " is neither a volume header nor a skeleton");
}

SkeletonInput load_skeleton_input(const std::filesystem::path& path) {
    SkeletonInput in;
    if (detect_input_kind(path) == InputKind::skeleton) {
        in.skeleton = load_skeleton(path);
        in.skeleton.validate();
        return in;
    }
    in.volume = load_volume(path);
    if (in.volume->dtype() != DType::u8)
        throw Error(Errc::bad_dtype, path.string() + ": expected a binary u8 volume");
    in.skeleton = skeletonize(*in.volume);
    return in;
}

const char* metric_name(SweepMetric m) noexcept {
    switch (m) {
        case SweepMetric::voxel_iou: return "voxel_iou";
        case SweepMetric::topology_score: return "topology_score";
        case SweepMetric::both: return "both";
    }
    return "?";
}

SweepMetric parse_metric(const std::string& s) {
    if (s == "voxel_iou" || s == "voxel-iou") return SweepMetric::voxel_iou;
    if (s == "topology_score" || s == "topology-score" || s == "topo") return SweepMetric::topology_score;
    if (s == "both") return SweepMetric::both;
    throw Error(Errc::invalid_argument, "unknown metric '" + s + "' (voxel_iou, topology_score, both)");
}

std::vector<double> default_thresholds() {
    std::vector<double> t;
    for (int k = 1; k <= 9; ++k) t.push_back(k / 10.0);
    return t;
}

void SweepSpec::validate() const {
    if (thresholds.empty()) throw Error(Errc::invalid_argument, "sweep needs at least one threshold");
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (!(thresholds[i] > 0.0 && thresholds[i] < 1.0))
            throw Error(Errc::invalid_argument, "sweep thresholds must lie in (0, 1)");
        if (i > 0 && !(thresholds[i] > thresholds[i - 1]))
            throw Error(Errc::invalid_argument, "sweep thresholds must be strictly increasing");
    }
    if (dataset.empty()) throw Error(Errc::invalid_argument, "sweep dataset is empty");
    for (const auto& item : dataset)
        if (item.name.empty() || item.name.find_first_of(",\"\r\n") != std::string::npos)
            throw Error(Errc::invalid_argument, "item name '" + item.name + "' cannot be written as a CSV field");
    cfg.validate();
}

SweepSpec load_sweep_manifest(const std::filesystem::path& path) {
    const json j = read_json(path);
    const auto base = path.parent_path();
    SweepSpec spec;
    try {
        if (!j.is_object()) throw Error(Errc::invalid_argument, "sweep manifest must be a JSON object");
        if (j.contains("thresholds")) spec.thresholds = j.at("thresholds").get<std::vector<double>>();
        if (j.contains("metric")) spec.metric = parse_metric(j.at("metric").get<std::string>());
        if (j.contains("config")) spec.cfg = score_config_from_json(j.at("config"));
        for (const auto& it : j.at("items")) {
            SweepItem item;
            item.prob = base / it.at("prob").get<std::string>();
            item.gt = base / it.at("gt").get<std::string>();
            item.name = it.contains("name") ? it.at("name").get<std::string>() : item.prob.stem().string();
            spec.dataset.push_back(std::move(item));
        }
    } catch (const json::exception& e) {
        throw Error(Errc::invalid_argument, path.string() + ": " + e.what());
    }
    spec.validate();
    return spec;
}

SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    const std::size_t n = spec.dataset.size();
    std::vector<ItemOutcome> outcomes(n);
    {
        const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, n);
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < n; i += workers) outcomes[i] = score_item(spec.dataset[i], spec);
            });
    }

    SweepResult r;
    r.thresholds = spec.thresholds;
    r.metric = spec.metric;
    r.cfg = spec.cfg;
    for (std::size_t i = 0; i < n; ++i) {
        if (outcomes[i].failure) {
            r.skipped.push_back({spec.dataset[i].name, *outcomes[i].failure});
            continue;
        }
        for (auto& row : outcomes[i].rows) r.rows.push_back(std::move(row));
    }

    for (std::size_t k = 0; k < spec.thresholds.size(); ++k) {
        std::vector<double> vox, topo, loop, comp;
        for (const auto& row : r.rows) {
            if (row.threshold != spec.thresholds[k]) continue;
            if (row.voxel_iou) vox.push_back(*row.voxel_iou);
            topo.push_back(row.topo_score);
            loop.push_back(row.loop_score);
            comp.push_back(row.component_score);
        }
        r.summary.push_back({spec.thresholds[k], mean_std(vox), mean_std(topo), mean_std(loop), mean_std(comp)});
    }
    if (spec.metric != SweepMetric::topology_score) r.best_voxel_iou = argmax(r.summary, &ThresholdSummary::voxel_iou);
    if (spec.metric != SweepMetric::voxel_iou) r.best_topology = argmax(r.summary, &ThresholdSummary::topo_score);
    return r;
}

json to_json(const SweepResult& r) {
    auto opt = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
    auto ms = [](const MeanStd& m) {
        if (m.n == 0) return json(nullptr);
        return json{{"mean", m.mean}, {"std", m.std}, {"n", m.n}};
    };
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"item", row.item},
                        {"threshold", row.threshold},
                        {"voxel_iou", opt(row.voxel_iou)},
                        {"topo_score", row.topo_score},
                        {"loop_score", row.loop_score},
                        {"component_score", row.component_score},
                        {"entropy", row.entropy}});
    json summary = json::array();
    for (const auto& s : r.summary)
        summary.push_back({{"threshold", s.threshold},
                           {"voxel_iou", ms(s.voxel_iou)},
                           {"topo_score", ms(s.topo_score)},
                           {"loop_score", ms(s.loop_score)},
                           {"component_score", ms(s.component_score)}});
    json skipped = json::array();
    for (const auto& s : r.skipped) skipped.push_back({{"item", s.item}, {"reason", s.reason}});
    return {{"metric", metric_name(r.metric)},
            {"thresholds", r.thresholds},
            {"config", to_json(r.cfg)},
            {"best", {{"voxel_iou", opt(r.best_voxel_iou)}, {"topology_score", opt(r.best_topology)}}},
            {"summary", summary},
            {"rows", rows},
            {"skipped", skipped}};
}

void emit_report(const SweepResult& r, const std::filesystem::path& path) {
    auto stem = path;
    if (stem.extension() == ".csv" || stem.extension() == ".json") stem.replace_extension();
    auto csv_path = stem;
    csv_path += ".csv";
    auto json_path = stem;
    json_path += ".json";

    std::ofstream csv(csv_path, std::ios::trunc);
    if (!csv) throw Error(Errc::io, "cannot open for writing: " + csv_path.string());
    csv << "item,threshold,voxel_iou,topo_score,loop_score,component_score,entropy\n";
    for (const auto& row : r.rows) {
        csv << row.item << ',' << format_number(row.threshold) << ','
            << (row.voxel_iou ? format_number(*row.voxel_iou) : std::string()) << ',' << format_number(row.topo_score)
            << ',' << format_number(row.loop_score) << ',' << format_number(row.component_score) << ','
            << format_number(row.entropy) << '\n';
    }
    if (!csv) throw Error(Errc::io, "write failed: " + csv_path.string());
    write_json_file(to_json(r), json_path);
}

}  // namespace toposcore

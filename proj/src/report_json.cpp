#include "toposcore/report_json.hpp"

#include <fstream>

#include "toposcore/error.hpp"

namespace toposcore {

using nlohmann::json;

namespace {

json rows_of(const std::vector<double>& flat, std::size_t rows, std::size_t cols) {
    json out = json::array();
    for (std::size_t i = 0; i < rows; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < cols; ++j) row.push_back(flat[i * cols + j]);
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace

json to_json(const ScoreConfig& cfg) {
    return {{"radius", cfg.match.radius},
            {"t_low", cfg.t_low},
            {"t_high", cfg.t_high},
            {"min_component_size", cfg.min_component_size}};
}

json to_json(const ScoreMatrix& m) {
    return {{"kind", m.kind == FeatureKind::loop ? "loop" : "component"},
            {"rows", m.rows},
            {"cols", m.cols},
            {"raw", rows_of(m.raw, m.rows, m.cols)},
            {"entries", rows_of(m.entries, m.rows, m.cols)},
            {"gt_scores", m.gt_scores},
            {"pred_scores", m.pred_scores}};
}

json to_json(const TopoReport& rep) {
    json j;
    j["topology_score"] = rep.topology_score;
    j["loop_score"] = rep.loop_score;
    j["component_score"] = rep.component_score;
    j["voxel_iou"] = rep.voxel_iou ? json(*rep.voxel_iou) : json(nullptr);
    j["counts"] = {{"gt", {{"components", rep.counts.gt_components}, {"loops", rep.counts.gt_loops}}},
                   {"pred", {{"components", rep.counts.pred_components}, {"loops", rep.counts.pred_loops}}}};
    j["matrices"] = {{"loop", to_json(rep.loop_matrix)}, {"component", to_json(rep.component_matrix)}};
    j["config"] = to_json(rep.config);
    return j;
}

ScoreConfig score_config_from_json(const json& j) {
    ScoreConfig cfg;
    try {
        if (j.contains("radius")) cfg.match.radius = j.at("radius").get<double>();
        if (j.contains("t_low")) cfg.t_low = j.at("t_low").get<double>();
        if (j.contains("t_high")) cfg.t_high = j.at("t_high").get<double>();
        if (j.contains("min_component_size")) cfg.min_component_size = j.at("min_component_size").get<std::size_t>();
    } catch (const json::exception& e) {
        throw Error(Errc::invalid_argument, std::string("score config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

void write_json_file(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(Errc::io, "cannot open for writing: " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw Error(Errc::io, "write failed: " + path.string());
}

void save_report(const TopoReport& rep, const std::filesystem::path& path) { write_json_file(to_json(rep), path); }

}  // namespace toposcore

#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "toposcore/score.hpp"

namespace toposcore {

nlohmann::json to_json(const ScoreConfig& cfg);
nlohmann::json to_json(const ScoreMatrix& m);
nlohmann::json to_json(const TopoReport& rep);

/// Reads the keys written by to_json(ScoreConfig); missing keys keep defaults.
ScoreConfig score_config_from_json(const nlohmann::json& j);

void save_report(const TopoReport& rep, const std::filesystem::path& path);

/// Pretty-printed JSON, truncating any existing file.
void write_json_file(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace toposcore

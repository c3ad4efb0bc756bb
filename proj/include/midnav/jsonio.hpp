#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "midnav/action.hpp"
#include "midnav/datagen.hpp"
#include "midnav/episode.hpp"
#include "midnav/metrics.hpp"

namespace midnav {

nlohmann::json to_json(const Action& action);
Action action_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ParseReport& report);
nlohmann::json to_json(const EpisodeRecord& record);
EpisodeRecord episode_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SftSample& sample);
nlohmann::json to_json(const AggregateReport& report);

// One EpisodeRecord per line.
void write_episodes_jsonl(const std::vector<EpisodeRecord>& records,
                          const std::string& path);
std::vector<EpisodeRecord> read_episodes_jsonl(const std::string& path,
                                               int* skipped = nullptr);

// Run manifest accompanying every CLI output file: effective parameters,
// seed, tool version, inputs/outputs, and the only timestamps we emit.
void write_manifest(const std::string& out_path, const std::string& subcommand,
                    const nlohmann::json& parameters,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs);

}  // namespace midnav

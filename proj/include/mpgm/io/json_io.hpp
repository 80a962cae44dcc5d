#pragma once

#include "mpgm/compositions/mlda_words.hpp"
#include "mpgm/compositions/proto_agent.hpp"
#include "mpgm/compositions/spco_lite.hpp"
#include "mpgm/planning/tabular_mdp.hpp"
#include "mpgm/slam/grid_world.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mpgm::io {

// All formats are JSON (datasets as JSON lines). Readers throw
// std::runtime_error with the offending field on malformed input.

slam::GridWorld world_from_json(const std::string& text);
std::string world_to_json(const slam::GridWorld& world);

planning::TabularMdp mdp_from_json(const std::string& text);
std::string mdp_to_json(const planning::TabularMdp& mdp);
planning::TabularPomdp pomdp_from_json(const std::string& text);
std::string pomdp_to_json(const planning::TabularPomdp& pomdp);

/// Corpus: one object per line {"id", "modalities": {name: [int...]},
/// "category": int (optional ground truth)}.
compositions::LabeledCorpus corpus_from_jsonl(const std::string& text,
                                              const std::vector<std::string>& modality_names);
std::string corpus_to_jsonl(const compositions::LabeledCorpus& corpus,
                            const std::vector<std::string>& modality_names);

/// Sequences: one per line {"id", "obs": [int...]}.
std::vector<std::vector<int>> sequences_from_jsonl(const std::string& text);
std::string sequences_to_jsonl(const std::vector<std::vector<int>>& sequences,
                               const std::vector<std::string>& ids = {});

compositions::SpcoScenario spco_scenario_from_json(const std::string& text);
std::string spco_scenario_to_json(const compositions::SpcoScenario& scenario);

compositions::ProtoScenario proto_scenario_from_json(const std::string& text);
std::string proto_scenario_to_json(const compositions::ProtoScenario& scenario);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// 64-bit FNV-1a of the raw bytes, hex-encoded; embedded in every output.
std::string content_hash(const std::string& bytes);

}  // namespace mpgm::io

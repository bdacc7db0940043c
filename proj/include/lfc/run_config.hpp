#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "lfc/attack_env.hpp"
#include "lfc/dataset.hpp"
#include "lfc/ddpg.hpp"
#include "lfc/detectors.hpp"
#include "lfc/load_process.hpp"

namespace lfc {

/// One RL data-collection run inside build-dataset.
struct CollectionJob {
  std::string name;
  EnvConfig env;
  AgentConfig agent;
  std::uint64_t seed_offset = 0;        // combined with the run seed
  int harvest_from_episode = 0;         // skip the first episodes if wanted
  std::vector<int> target_classes;      // job stops once these pools fill
};

struct DatasetConfig {
  std::size_t quota = 1000;
  SplitFractions fractions;
  std::size_t crop_min = 100;  // samples at 50 ms
  std::size_t crop_max = 300;
  double normal_sim_duration_s = 0.0;  // 0 = derived from the quota
  LoadProcessConfig load;
  std::vector<CollectionJob> collection;  // empty = built-in default plan
};

struct ThresholdConfig {
  ThresholdPolicy policy = MaxTimesFactorPolicy{};
};

/// Full run configuration: one JSON document, flags override fields.
struct RunConfig {
  std::string system_preset = "MG2";
  SystemParams params = mg_preset("MG2");
  EnvConfig env;           // derived from the fields above unless overridden
  AgentConfig agent;
  DatasetConfig dataset;
  DetectorHyper detector;
  ThresholdConfig threshold;
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  static RunConfig defaults();
  static RunConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

nlohmann::json env_config_to_json(const EnvConfig& cfg);
EnvConfig env_config_from_json(const nlohmann::json& doc, const EnvConfig& base);
nlohmann::json agent_config_to_json(const AgentConfig& cfg);
AgentConfig agent_config_from_json(const nlohmann::json& doc, const AgentConfig& base);

/// The default data-collection plan: a class-2-heavy exploratory run, a
/// pool of full-rate FDI runs passing through their UF/OF phase, and a
/// switching run, all derived from the configured system.
std::vector<CollectionJob> default_collection_plan(const RunConfig& cfg);

}  // namespace lfc

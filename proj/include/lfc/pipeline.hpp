#pragma once

#include <functional>
#include <string>

#include "lfc/run_config.hpp"

namespace lfc {

using ProgressFn = std::function<void(const std::string&)>;

struct CollectionStats {
  std::size_t normal = 0;
  std::size_t no_trip = 0;
  std::size_t uf_of = 0;
  std::size_t rocof = 0;
  std::size_t episodes = 0;
  std::vector<std::string> sources;  // collection runs actually executed
};

struct BuiltDataset {
  DatasetSplit split;
  CollectionStats stats;
};

/// Runs the normal-operation simulation and the RL collection plan, then
/// assembles the class-balanced split. Deterministic per (config, seed).
BuiltDataset build_dataset(const RunConfig& cfg, std::uint64_t seed,
                           const ProgressFn& progress = {});

struct DetectorBundle {
  ClassifierModel classifier;
  AutoencoderModel autoencoder;
};

/// Trains both detectors on the split per the configured hyperparameters
/// and selects the autoencoder threshold from label-1 validation errors.
DetectorBundle train_detectors(const DatasetSplit& split, const RunConfig& cfg,
                               std::uint64_t seed, const ProgressFn& progress = {});

nlohmann::json evaluation_to_json(const EvaluationReport& report);

/// Dataset -> detectors -> evaluation, one seed end to end.
struct ProtocolResult {
  CollectionStats stats;
  EvaluationReport report;
};

ProtocolResult run_detector_protocol(const RunConfig& cfg, std::uint64_t seed,
                                     const ProgressFn& progress = {});

}  // namespace lfc

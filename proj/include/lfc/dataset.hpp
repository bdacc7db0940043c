#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lfc/grid_model.hpp"
#include "lfc/protection.hpp"

namespace lfc {

/// Dataset categories: 1 normal operation, 2 attack without a trip,
/// 3 UF/OF trip, 4 ROCOF trip.
enum : int {
  kLabelNormal = 1,
  kLabelAttackNoTrip = 2,
  kLabelUfOfTrip = 3,
  kLabelRocofTrip = 4,
};

int label_for(TripLabel trip, bool attack);

/// A (de, dw_meas) time series sampled at dt seconds with a class label.
struct LabeledRecord {
  int label = kLabelNormal;
  double dt = 0.05;
  std::vector<double> de;
  std::vector<double> dw_meas;
  std::string source;    // run id of the producing simulation/episode
  double start_time_s = 0.0;

  std::size_t length() const { return de.size(); }
  void validate() const;
};

struct SplitFractions {
  double train = 0.55;
  double validation = 0.15;
  double test = 0.30;

  void validate() const;
};

struct DatasetSplit {
  std::vector<LabeledRecord> train;
  std::vector<LabeledRecord> validation;
  std::vector<LabeledRecord> test;
};

/// Extracts the (de, dw_meas) channels from a trace between the given
/// sample indices (inclusive start, exclusive end).
LabeledRecord record_from_trace(const Trace& trace, int label, std::size_t begin,
                                std::size_t end, const std::string& source);

/// Randomly crops `count` windows out of a long normal-operation trace.
/// Window lengths are uniform over [min_len, max_len] samples and start
/// offsets uniform over the admissible range. All crops are labeled 1.
std::vector<LabeledRecord> crop_normal(const Trace& trace, std::size_t count,
                                       std::size_t min_len, std::size_t max_len,
                                       std::uint64_t seed, const std::string& source);

/// Labels a full episode trace from its trip outcome (2, 3 or 4).
LabeledRecord label_episode(const Trace& trace, TripLabel trip, const std::string& source);

/// Draws `quota` records per class, shuffles, and splits stratified by
/// class. Throws when any pool is short.
DatasetSplit assemble(const std::vector<std::vector<LabeledRecord>>& pools_by_class,
                      std::size_t quota, const SplitFractions& fractions, std::uint64_t seed);

/// JSON Lines: one record per line,
/// {"label":..,"dt":..,"de":[..],"dw_meas":[..],"provenance":{..}}.
void serialize_records(std::ostream& os, const std::vector<LabeledRecord>& records);
std::vector<LabeledRecord> load_records(std::istream& is);

void save_split(const std::string& directory, const DatasetSplit& split);
DatasetSplit load_split(const std::string& directory);

}  // namespace lfc

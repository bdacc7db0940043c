#include "lfc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

#include "lfc/rng.hpp"
#include "lfc/trace_io.hpp"

namespace lfc {

using nlohmann::json;

int label_for(TripLabel trip, bool attack) {
  if (!attack) return kLabelNormal;
  switch (trip) {
    case TripLabel::None: return kLabelAttackNoTrip;
    case TripLabel::UfOf: return kLabelUfOfTrip;
    case TripLabel::Rocof: return kLabelRocofTrip;
  }
  return kLabelAttackNoTrip;
}

void LabeledRecord::validate() const {
  if (label < kLabelNormal || label > kLabelRocofTrip) {
    throw std::invalid_argument("LabeledRecord: label out of range");
  }
  if (de.size() != dw_meas.size()) {
    throw std::invalid_argument("LabeledRecord: channel lengths differ");
  }
  if (de.size() < 2) throw std::invalid_argument("LabeledRecord: need at least 2 samples");
  if (!(dt > 0.0)) throw std::invalid_argument("LabeledRecord: dt must be > 0");
}

void SplitFractions::validate() const {
  if (train < 0.0 || validation < 0.0 || test < 0.0 ||
      std::abs(train + validation + test - 1.0) > 1e-9) {
    throw std::invalid_argument("SplitFractions: fractions must be >= 0 and sum to 1");
  }
}

LabeledRecord record_from_trace(const Trace& trace, int label, std::size_t begin,
                                std::size_t end, const std::string& source) {
  if (end > trace.size() || begin >= end) {
    throw std::out_of_range("record_from_trace: window out of bounds");
  }
  LabeledRecord rec;
  rec.label = label;
  rec.dt = trace.dt;
  rec.source = source;
  rec.start_time_s = trace.time_at(begin);
  rec.de.reserve(end - begin);
  rec.dw_meas.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    rec.de.push_back(trace.states[i](kStateDe));
    rec.dw_meas.push_back(trace.states[i](kStateDwMeas));
  }
  rec.validate();
  return rec;
}

std::vector<LabeledRecord> crop_normal(const Trace& trace, std::size_t count,
                                       std::size_t min_len, std::size_t max_len,
                                       std::uint64_t seed, const std::string& source) {
  if (min_len < 2 || min_len > max_len) {
    throw std::invalid_argument("crop_normal: need 2 <= min_len <= max_len");
  }
  if (trace.size() < max_len) throw std::invalid_argument("crop_normal: trace too short");

  Rng rng(seed);
  std::vector<LabeledRecord> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t len = min_len + rng.uniform_index(max_len - min_len + 1);
    const std::size_t start = rng.uniform_index(trace.size() - len + 1);
    out.push_back(record_from_trace(trace, kLabelNormal, start, start + len, source));
  }
  return out;
}

LabeledRecord label_episode(const Trace& trace, TripLabel trip, const std::string& source) {
  return record_from_trace(trace, label_for(trip, true), 0, trace.size(), source);
}

DatasetSplit assemble(const std::vector<std::vector<LabeledRecord>>& pools_by_class,
                      std::size_t quota, const SplitFractions& fractions, std::uint64_t seed) {
  fractions.validate();
  if (pools_by_class.size() != 4) {
    throw std::invalid_argument("assemble: expected 4 class pools");
  }
  Rng rng(seed);
  DatasetSplit split;
  for (std::size_t c = 0; c < 4; ++c) {
    const auto& pool = pools_by_class[c];
    if (pool.size() < quota) {
      throw std::runtime_error("assemble: class " + std::to_string(c + 1) + " pool has " +
                               std::to_string(pool.size()) + " records, need " +
                               std::to_string(quota));
    }
    // choose quota records without replacement (partial Fisher-Yates)
    std::vector<std::size_t> idx(pool.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < quota; ++i) {
      const std::size_t j = i + rng.uniform_index(idx.size() - i);
      std::swap(idx[i], idx[j]);
    }
    // stratified split of this class's quota
    const auto n_train = static_cast<std::size_t>(std::lround(fractions.train * quota));
    const auto n_val = static_cast<std::size_t>(std::lround(fractions.validation * quota));
    for (std::size_t i = 0; i < quota; ++i) {
      const LabeledRecord& rec = pool[idx[i]];
      if (i < n_train) {
        split.train.push_back(rec);
      } else if (i < n_train + n_val) {
        split.validation.push_back(rec);
      } else {
        split.test.push_back(rec);
      }
    }
  }
  // shuffle within each part so classes interleave
  auto shuffle = [&rng](std::vector<LabeledRecord>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[rng.uniform_index(i)]);
    }
  };
  shuffle(split.train);
  shuffle(split.validation);
  shuffle(split.test);
  return split;
}

void serialize_records(std::ostream& os, const std::vector<LabeledRecord>& records) {
  for (const auto& rec : records) {
    json line;
    line["label"] = rec.label;
    line["dt"] = rec.dt;
    line["de"] = rec.de;
    line["dw_meas"] = rec.dw_meas;
    line["provenance"] = {{"source", rec.source}, {"start_time_s", rec.start_time_s}};
    os << line.dump() << '\n';
  }
}

std::vector<LabeledRecord> load_records(std::istream& is) {
  std::vector<LabeledRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error("dataset line " + std::to_string(line_no) +
                               ": JSON parse error: " + e.what());
    }
    auto fail = [line_no](const std::string& field, const std::string& why) -> std::runtime_error {
      return std::runtime_error("dataset line " + std::to_string(line_no) + ": field '" + field +
                                "': " + why);
    };
    LabeledRecord rec;
    try {
      rec.label = doc.at("label").get<int>();
    } catch (const json::exception&) {
      throw fail("label", "missing or not an integer");
    }
    try {
      rec.dt = doc.at("dt").get<double>();
    } catch (const json::exception&) {
      throw fail("dt", "missing or not a number");
    }
    try {
      rec.de = doc.at("de").get<std::vector<double>>();
    } catch (const json::exception&) {
      throw fail("de", "missing or not a number array");
    }
    try {
      rec.dw_meas = doc.at("dw_meas").get<std::vector<double>>();
    } catch (const json::exception&) {
      throw fail("dw_meas", "missing or not a number array");
    }
    if (doc.contains("provenance")) {
      const auto& prov = doc.at("provenance");
      rec.source = prov.value("source", std::string{});
      rec.start_time_s = prov.value("start_time_s", 0.0);
    }
    try {
      rec.validate();
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("dataset line " + std::to_string(line_no) + ": " + e.what());
    }
    out.push_back(std::move(rec));
  }
  return out;
}

namespace {

void save_part(const std::filesystem::path& path, const std::vector<LabeledRecord>& records) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  serialize_records(os, records);
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::vector<LabeledRecord> load_part(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path.string());
  return load_records(is);
}

}  // namespace

void save_split(const std::string& directory, const DatasetSplit& split) {
  const std::filesystem::path dir(directory);
  std::filesystem::create_directories(dir);
  save_part(dir / "train.jsonl", split.train);
  save_part(dir / "validation.jsonl", split.validation);
  save_part(dir / "test.jsonl", split.test);
}

DatasetSplit load_split(const std::string& directory) {
  const std::filesystem::path dir(directory);
  DatasetSplit split;
  split.train = load_part(dir / "train.jsonl");
  split.validation = load_part(dir / "validation.jsonl");
  split.test = load_part(dir / "test.jsonl");
  return split;
}

}  // namespace lfc

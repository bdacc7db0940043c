#include "lfc/pipeline.hpp"

#include <cmath>

namespace lfc {

namespace {

void report(const ProgressFn& progress, const std::string& msg) {
  if (progress) progress(msg);
}

}  // namespace

BuiltDataset build_dataset(const RunConfig& cfg, std::uint64_t seed, const ProgressFn& progress) {
  BuiltDataset out;
  std::vector<std::vector<LabeledRecord>> pools(4);

  // normal operation: one long load-following simulation, cropped
  const std::size_t normal_target = cfg.dataset.quota + cfg.dataset.quota / 20 + 5;
  double sim_duration = cfg.dataset.normal_sim_duration_s;
  if (sim_duration <= 0.0) {
    // enough length that crops overlap only lightly
    sim_duration = std::max(1800.0, static_cast<double>(normal_target) * 3.0);
  }
  report(progress, "normal simulation (" + std::to_string(static_cast<long>(sim_duration)) +
                       " s)");
  const LoadSchedule load = sample_load_trace(cfg.dataset.load, sim_duration, seed ^ 0x9e37);
  const Trace normal = simulate(cfg.params, load.as_input(),
                                [](double) { return AttackVector::Zero(); }, sim_duration,
                                cfg.env.agent_step_s, cfg.env.internal_dt_s);
  pools[0] = crop_normal(normal, normal_target, cfg.dataset.crop_min, cfg.dataset.crop_max,
                         seed ^ 0x51ed, "normal_sim");
  out.stats.normal = pools[0].size();

  // attack records from the RL collection plan
  const auto plan = cfg.dataset.collection.empty() ? default_collection_plan(cfg)
                                                   : cfg.dataset.collection;
  const std::size_t wanted = cfg.dataset.quota + cfg.dataset.quota / 20 + 5;

  auto targets_full = [&](const CollectionJob& job) {
    if (job.target_classes.empty()) return false;
    for (int cls : job.target_classes) {
      if (pools[static_cast<std::size_t>(cls - 1)].size() < wanted) return false;
    }
    return true;
  };

  auto run_job = [&](const CollectionJob& job) {
    report(progress, "collection run '" + job.name + "'");
    out.stats.sources.push_back(job.name);
    AttackEnv env(job.env);
    int harvested = 0;
    train(env, job.agent, seed + job.seed_offset,
          [&](const EpisodeSummary& ep, const Trace& trace) {
            out.stats.episodes += 1;
            if (ep.index >= job.harvest_from_episode && trace.size() >= 2) {
              const TripLabel label = classify_trip(ep.trip);
              const int cls = label_for(label, true);
              auto& pool = pools[static_cast<std::size_t>(cls - 1)];
              if (pool.size() < wanted) {
                pool.push_back(label_episode(trace, label,
                                             job.name + "/ep" + std::to_string(ep.index)));
                ++harvested;
                switch (cls) {
                  case kLabelAttackNoTrip: out.stats.no_trip += 1; break;
                  case kLabelUfOfTrip: out.stats.uf_of += 1; break;
                  case kLabelRocofTrip: out.stats.rocof += 1; break;
                  default: break;
                }
              }
            }
            return !targets_full(job);  // stop once this job's targets fill
          });
    report(progress, "  harvested " + std::to_string(harvested) + " records (pools " +
                         std::to_string(pools[1].size()) + "/" + std::to_string(pools[2].size()) +
                         "/" + std::to_string(pools[3].size()) + ")");
  };

  auto have_all = [&] {
    return pools[1].size() >= cfg.dataset.quota && pools[2].size() >= cfg.dataset.quota &&
           pools[3].size() >= cfg.dataset.quota;
  };

  for (const auto& job : plan) {
    if (have_all()) break;
    if (targets_full(job)) continue;
    run_job(job);
  }

  // top up any short class with more runs of the matching generator
  const auto base_plan = default_collection_plan(cfg);
  for (int attempt = 0; attempt < 12 && !have_all(); ++attempt) {
    CollectionJob job;
    if (pools[1].size() < cfg.dataset.quota) {
      job = base_plan.back();  // the exploratory class-2 generator
    } else if (pools[2].size() < cfg.dataset.quota) {
      job = base_plan[base_plan.size() - 2];  // the slow-bias class-3 generator
    } else {
      job = base_plan.front();  // a full-rate run for class 4
    }
    job.name = "topup_" + std::to_string(attempt);
    job.seed_offset = 5000 + static_cast<std::uint64_t>(attempt) * 17;
    run_job(job);
  }

  out.split = assemble(pools, cfg.dataset.quota, cfg.dataset.fractions, seed ^ 0xa55a);
  return out;
}

DetectorBundle train_detectors(const DatasetSplit& split, const RunConfig& cfg,
                               std::uint64_t seed, const ProgressFn& progress) {
  DetectorBundle bundle{ClassifierModel{}, AutoencoderModel{}};

  report(progress, "training classifier (" + std::to_string(split.train.size()) + " records)");
  DetectorHyper hyper = cfg.detector;
  if (progress) {
    hyper.epoch_hook = [&progress](int epoch, double train_loss, double val_loss) {
      progress("  epoch " + std::to_string(epoch) + ": train " + std::to_string(train_loss) +
               " val " + std::to_string(val_loss));
    };
  }
  bundle.classifier = train_classifier(split.train, split.validation, hyper, seed);

  std::vector<LabeledRecord> normal_train;
  std::vector<LabeledRecord> normal_val;
  for (const auto& rec : split.train) {
    if (rec.label == kLabelNormal) normal_train.push_back(rec);
  }
  for (const auto& rec : split.validation) {
    if (rec.label == kLabelNormal) normal_val.push_back(rec);
  }
  report(progress, "training autoencoder (" + std::to_string(normal_train.size()) +
                       " normal records)");
  bundle.autoencoder = train_autoencoder(normal_train, normal_val, hyper, seed ^ 0xae);

  std::vector<double> val_errors;
  val_errors.reserve(normal_val.size());
  for (const auto& rec : normal_val) {
    val_errors.push_back(reconstruction_mae(bundle.autoencoder, rec));
  }
  bundle.autoencoder.threshold = select_threshold(val_errors, cfg.threshold.policy);
  report(progress, "threshold = " + std::to_string(*bundle.autoencoder.threshold));
  return bundle;
}

nlohmann::json evaluation_to_json(const EvaluationReport& report) {
  nlohmann::json doc;
  nlohmann::json confusion = nlohmann::json::array();
  for (int i = 0; i < 4; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < 4; ++j) {
      row.push_back(report.confusion.counts[static_cast<std::size_t>(i)]
                                           [static_cast<std::size_t>(j)]);
    }
    confusion.push_back(std::move(row));
  }
  doc["confusion"] = std::move(confusion);
  doc["classifier_accuracy"] = report.classifier_accuracy;
  doc["classifier_binary_accuracy"] = report.classifier_binary_accuracy;
  doc["autoencoder_binary_accuracy"] = report.autoencoder_binary_accuracy;
  doc["classifier_trip_accuracy"] = report.classifier_trip_accuracy;
  doc["autoencoder_trip_accuracy"] = report.autoencoder_trip_accuracy;
  doc["integrated_trip_accuracy"] = report.integrated_trip_accuracy;
  doc["autoencoder_false_alarms_normal"] = report.autoencoder_false_alarms_normal;
  doc["integrated_false_alarms_normal"] = report.integrated_false_alarms_normal;
  doc["per_class_recall"] = report.per_class_recall;
  doc["per_class_precision"] = report.per_class_precision;
  return doc;
}

ProtocolResult run_detector_protocol(const RunConfig& cfg, std::uint64_t seed,
                                     const ProgressFn& progress) {
  BuiltDataset built = build_dataset(cfg, seed, progress);
  DetectorBundle bundle = train_detectors(built.split, cfg, seed, progress);
  ProtocolResult out{built.stats, evaluate(bundle.autoencoder, bundle.classifier,
                                           built.split.test)};
  return out;
}

}  // namespace lfc

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lfc/detectors.hpp"
#include "lfc/rng.hpp"

using namespace lfc;

namespace {

/// Tiny synthetic records with class-dependent shapes: class 1 flat noise,
/// class 2 slow sine, class 3 ramp, class 4 fast large sine. Separable by a
/// small model in a few epochs.
LabeledRecord synth_record(int label, Rng& rng) {
  LabeledRecord r;
  r.label = label;
  r.dt = 0.05;
  const std::size_t n = 24 + rng.uniform_index(16);
  const double amp = rng.uniform(0.05, 0.15);   // per-record normal amplitude
  const double phase = rng.uniform(0.0, 6.28);  // per-record normal phase
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * 0.05;
    double de = 0.0, dw = 0.0;
    switch (label) {
      case 1:
        // smooth low-frequency family, like the load-following response
        de = amp * std::sin(0.4 * t + phase) + 0.003 * rng.normal();
        dw = 0.1 * amp * std::sin(0.4 * t + phase - 0.3) + 0.0005 * rng.normal();
        break;
      case 2:
        de = 0.35 * std::sin(1.2 * t + phase) + 0.01 * rng.normal();
        dw = 0.015 * std::sin(1.2 * t + phase);
        break;
      case 3:
        de = 0.3 * t;
        dw = -0.012 * t + 0.001 * rng.normal();
        break;
      case 4:
        de = 0.8 * std::sin(4.0 * t);
        dw = 0.04 * std::sin(4.0 * t + 0.5) + 0.001 * rng.normal();
        break;
    }
    r.de.push_back(de);
    r.dw_meas.push_back(dw);
  }
  return r;
}

std::vector<LabeledRecord> synth_set(int per_class, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledRecord> out;
  for (int c = 1; c <= 4; ++c) {
    for (int i = 0; i < per_class; ++i) out.push_back(synth_record(c, rng));
  }
  return out;
}

}  // namespace

TEST_CASE("classifier overfits a 40-record toy split to full train accuracy") {
  const auto train_set = synth_set(10, 1);
  const auto val_set = synth_set(4, 2);

  DetectorHyper hyper;
  hyper.max_epochs = 150;
  hyper.patience = 150;  // no early stop while overfitting
  ClassifierModel model = train_classifier(train_set, val_set, hyper, 7);

  int correct = 0;
  for (const auto& rec : train_set) {
    if (classify(model, rec).label == rec.label) ++correct;
  }
  CHECK(correct == static_cast<int>(train_set.size()));

  SUBCASE("probabilities sum to one on every record") {
    for (const auto& rec : val_set) {
      const auto c = classify(model, rec);
      const double sum = c.probabilities[0] + c.probabilities[1] + c.probabilities[2] +
                         c.probabilities[3];
      CHECK(std::abs(sum - 1.0) < 1e-9);
    }
  }

  SUBCASE("inference is dropout-free and repeatable") {
    const auto a = classify(model, val_set[0]);
    const auto b = classify(model, val_set[0]);
    for (int i = 0; i < 4; ++i) CHECK(a.probabilities[i] == b.probabilities[i]);
  }

  SUBCASE("early-stopping contract: selected epoch beats epoch 1 on validation") {
    REQUIRE(!model.history.validation_loss.empty());
    const double at_selected =
        model.history.validation_loss[static_cast<std::size_t>(model.history.selected_epoch - 1)];
    CHECK(at_selected <= model.history.validation_loss.front());
  }

  SUBCASE("training is deterministic per seed") {
    ClassifierModel again = train_classifier(train_set, val_set, hyper, 7);
    const auto a = classify(model, val_set[1]);
    const auto b = classify(again, val_set[1]);
    for (int i = 0; i < 4; ++i) CHECK(a.probabilities[i] == b.probabilities[i]);
  }
}

TEST_CASE("classifier rejects empty splits and degenerate records") {
  const auto ok = synth_set(2, 3);
  CHECK_THROWS_AS((void)train_classifier({}, ok, {}, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)train_classifier(ok, {}, {}, 1), std::invalid_argument);

  ClassifierModel model = make_classifier(5);
  LabeledRecord bad;
  bad.label = 1;
  bad.de = {0.0};
  bad.dw_meas = {0.0};
  CHECK_THROWS_AS((void)classify(model, bad), std::invalid_argument);
}

TEST_CASE("autoencoder trains on normal data and separates attack shapes") {
  Rng rng(5);
  std::vector<LabeledRecord> normal_train, normal_val;
  for (int i = 0; i < 30; ++i) normal_train.push_back(synth_record(1, rng));
  for (int i = 0; i < 8; ++i) normal_val.push_back(synth_record(1, rng));

  DetectorHyper hyper;
  hyper.max_epochs = 40;
  hyper.patience = 40;

  AutoencoderModel untrained = make_autoencoder(9);
  AutoencoderModel model = train_autoencoder(normal_train, normal_val, hyper, 9);

  SUBCASE("validation error improves at least 5x over the untrained net") {
    double before = 0.0, after = 0.0;
    for (const auto& rec : normal_val) {
      before += reconstruction_mae(untrained, rec);
      after += reconstruction_mae(model, rec);
    }
    CHECK(before / after >= 5.0);
  }

  SUBCASE("threshold selection and anomaly calls") {
    std::vector<double> val_errors;
    for (const auto& rec : normal_val) val_errors.push_back(reconstruction_mae(model, rec));
    model.threshold = select_threshold(val_errors, MaxTimesFactorPolicy{});

    // held-out normal records stay below threshold
    int normal_ok = 0;
    for (int i = 0; i < 10; ++i) {
      const auto rec = synth_record(1, rng);
      if (!detect_anomaly(model, rec).anomalous) ++normal_ok;
    }
    CHECK(normal_ok >= 9);

    // the zero record lies inside the normal envelope
    LabeledRecord zero;
    zero.label = 1;
    zero.de.assign(40, 0.0);
    zero.dw_meas.assign(40, 0.0);
    CHECK_FALSE(detect_anomaly(model, zero).anomalous);

    // large attack shapes reconstruct badly
    int attacks_flagged = 0;
    for (int i = 0; i < 10; ++i) {
      const auto rec = synth_record(4, rng);
      if (detect_anomaly(model, rec).anomalous) ++attacks_flagged;
    }
    CHECK(attacks_flagged >= 8);
  }

  SUBCASE("non-normal input is rejected by contract") {
    auto poisoned = normal_train;
    poisoned.push_back(synth_record(3, rng));
    CHECK_THROWS_AS((void)train_autoencoder(poisoned, normal_val, hyper, 1),
                    std::invalid_argument);
  }

  SUBCASE("anomaly call without a threshold is an error") {
    AutoencoderModel fresh = make_autoencoder(2);
    CHECK_THROWS_AS((void)detect_anomaly(fresh, normal_val[0]), std::logic_error);
  }
}

TEST_CASE("select_threshold policies") {
  CHECK(select_threshold({0.05, 0.1}, MaxTimesFactorPolicy{1.05}) == doctest::Approx(0.105));
  CHECK(select_threshold({0.07, 0.01}, FixedThresholdPolicy{0.2}) == doctest::Approx(0.2));
  CHECK(select_threshold({0.03, 0.03, 0.03}, MaxTimesFactorPolicy{1.05}) ==
        doctest::Approx(1.05 * 0.03));
  CHECK_THROWS_AS((void)select_threshold({}, MaxTimesFactorPolicy{}), std::invalid_argument);

  SUBCASE("boundary: mae exactly at threshold stays normal") {
    AutoencoderModel model = make_autoencoder(3);
    LabeledRecord rec;
    rec.label = 1;
    rec.de.assign(10, 0.1);
    rec.dw_meas.assign(10, 0.01);
    const double mae = reconstruction_mae(model, rec);
    model.threshold = mae;  // exact boundary
    CHECK_FALSE(detect_anomaly(model, rec).anomalous);
    model.threshold = std::nextafter(mae, 0.0);
    CHECK(detect_anomaly(model, rec).anomalous);
  }

  SUBCASE("threshold monotonicity: raising it never flags more records") {
    Rng rng(8);
    AutoencoderModel model = make_autoencoder(4);
    std::vector<LabeledRecord> recs;
    for (int i = 0; i < 20; ++i) recs.push_back(synth_record(1 + (i % 4), rng));
    int prev = 21;
    for (double th = 0.01; th < 2.0; th *= 2.0) {
      model.threshold = th;
      int flagged = 0;
      for (const auto& r : recs) {
        if (detect_anomaly(model, r).anomalous) ++flagged;
      }
      CHECK(flagged <= prev);
      prev = flagged;
    }
  }
}

TEST_CASE("integrated pipeline rules") {
  Rng rng(13);
  // train a small pair of models on the synthetic shapes
  const auto train_set = synth_set(12, 21);
  const auto val_set = synth_set(3, 22);
  DetectorHyper hyper;
  hyper.max_epochs = 120;
  hyper.patience = 120;
  ClassifierModel clf = train_classifier(train_set, val_set, hyper, 3);

  std::vector<LabeledRecord> normal_train, normal_val;
  for (int i = 0; i < 25; ++i) normal_train.push_back(synth_record(1, rng));
  for (int i = 0; i < 6; ++i) normal_val.push_back(synth_record(1, rng));
  AutoencoderModel ae = train_autoencoder(normal_train, normal_val, hyper, 4);
  std::vector<double> val_errors;
  for (const auto& rec : normal_val) val_errors.push_back(reconstruction_mae(ae, rec));
  ae.threshold = select_threshold(val_errors, MaxTimesFactorPolicy{});

  SUBCASE("normal records short-circuit without the classifier") {
    int skipped = 0;
    for (int i = 0; i < 8; ++i) {
      const auto rec = synth_record(1, rng);
      const auto res = integrated_detect(ae, clf, rec);
      if (!res.used_classifier) {
        ++skipped;
        CHECK_FALSE(res.alert);
      }
    }
    CHECK(skipped >= 7);
  }

  SUBCASE("anomalous records classified 2 are accepted, 3/4 alert with the kind") {
    int alerts_rocof = 0, accepts_class2 = 0;
    for (int i = 0; i < 10; ++i) {
      const auto rec4 = synth_record(4, rng);
      const auto res4 = integrated_detect(ae, clf, rec4);
      if (res4.alert && res4.alert_kind == TripLabel::Rocof) ++alerts_rocof;

      const auto rec2 = synth_record(2, rng);
      const auto res2 = integrated_detect(ae, clf, rec2);
      if (res2.used_classifier && res2.classifier_label == kLabelAttackNoTrip) {
        ++accepts_class2;
        CHECK_FALSE(res2.alert);
      }
    }
    CHECK(alerts_rocof >= 8);
    CHECK(accepts_class2 >= 8);
  }

  SUBCASE("evaluate: metrics and the pipeline-dominance inequality") {
    const auto test_set = synth_set(12, 23);
    const EvaluationReport report = evaluate(ae, clf, test_set);
    CHECK(report.confusion.total() == test_set.size());
    CHECK(report.classifier_accuracy > 0.9);
    CHECK(report.classifier_binary_accuracy > 0.9);
    // stage-1 acceptance can only reduce label-1 false alarms
    CHECK(report.integrated_false_alarms_normal <= report.autoencoder_false_alarms_normal);
    CHECK(report.integrated_trip_accuracy >= 0.8);
    CHECK_THROWS_AS((void)evaluate(ae, clf, {}), std::invalid_argument);
  }
}

TEST_CASE("evaluate: a perfect predictor yields the identity confusion matrix") {
  // a predictor made perfect by construction: saturated on the very records
  // it is scored on (capacity for this is covered by the overfit case)
  const auto train_set = synth_set(6, 31);
  const auto val_set = synth_set(3, 32);
  DetectorHyper hyper;
  hyper.max_epochs = 150;
  hyper.patience = 150;
  ClassifierModel clf = train_classifier(train_set, val_set, hyper, 5);

  const auto& test_set = train_set;
  ConfusionMatrix confusion;
  bool perfect = true;
  for (const auto& rec : test_set) {
    const int predicted = classify(clf, rec).label;
    confusion.counts[static_cast<std::size_t>(rec.label - 1)]
                    [static_cast<std::size_t>(predicted - 1)] += 1;
    perfect = perfect && predicted == rec.label;
  }
  REQUIRE(perfect);  // saturated on its own training records
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      CHECK(confusion.counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ==
            (i == j ? 6u : 0u));
    }
  }
  CHECK(confusion.accuracy() == 1.0);
  for (int c = 1; c <= 4; ++c) {
    CHECK(confusion.recall(c) == 1.0);
    CHECK(confusion.precision(c) == 1.0);
  }
}

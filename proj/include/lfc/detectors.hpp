#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "lfc/dataset.hpp"
#include "lfc/nn/network.hpp"

namespace lfc {

/// (de, dw_meas) record as a (time x 2) network input.
nn::Matrix record_matrix(const LabeledRecord& record);

struct DetectorHyper {
  double learning_rate = 1e-3;  // Adam
  std::size_t batch_size = 32;
  int max_epochs = 200;
  int patience = 10;  // early stop on validation loss
  double min_delta = 1e-4;  // improvement below this does not reset patience
  /// Optional per-epoch hook (epoch, train loss, validation loss).
  std::function<void(int, double, double)> epoch_hook;

  void validate() const;
};

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
  int selected_epoch = 0;  // 1-based epoch whose parameters were kept
};

/// Supervised 4-class sequence classifier:
/// lstm75 -> drop10 -> lstm50 -> drop20 -> lstm35 -> drop10 -> dense4,
/// softmax applied over the final timestep's logits.
struct ClassifierModel {
  nn::Network net;
  TrainHistory history;
};

ClassifierModel make_classifier(std::uint64_t seed);

ClassifierModel train_classifier(const std::vector<LabeledRecord>& train,
                                 const std::vector<LabeledRecord>& validation,
                                 const DetectorHyper& hyper, std::uint64_t seed);

struct Classification {
  std::array<double, 4> probabilities{};
  int label = kLabelNormal;  // argmax, ties to the lowest class index
};

Classification classify(ClassifierModel& model, const LabeledRecord& record);

/// BiLSTM autoencoder with fixed input normalization (0.2 pu for de,
/// 0.1 pu for dw_meas): bilstm36 -> relu -> bilstm8 -> relu -> bilstm36 ->
/// relu -> per-timestep dense(72 -> 2) reconstructing the raw channels.
struct AutoencoderModel {
  nn::Network net;
  std::optional<double> threshold;  // record-mean MAE units
  TrainHistory history;
};

AutoencoderModel make_autoencoder(std::uint64_t seed);

/// Trains on normal-operation records only; throws std::invalid_argument
/// if any record has label != 1. The threshold is left unset.
AutoencoderModel train_autoencoder(const std::vector<LabeledRecord>& normal_train,
                                   const std::vector<LabeledRecord>& normal_validation,
                                   const DetectorHyper& hyper, std::uint64_t seed);

/// Reconstruction mean absolute error of one record.
double reconstruction_mae(AutoencoderModel& model, const LabeledRecord& record);

struct MaxTimesFactorPolicy {
  double factor = 1.05;
};
struct FixedThresholdPolicy {
  double value = 0.2;
};
using ThresholdPolicy = std::variant<MaxTimesFactorPolicy, FixedThresholdPolicy>;

/// Threshold from validation reconstruction errors. The default policy is
/// max(validation MAE) * 1.05; the fixed policy reproduces an absolute
/// setting. Throws on an empty error list for the max policy.
double select_threshold(const std::vector<double>& validation_errors,
                        const ThresholdPolicy& policy);

struct AnomalyResult {
  bool anomalous = false;  // strict: mae > threshold
  double mae = 0.0;
};

AnomalyResult detect_anomaly(AutoencoderModel& model, const LabeledRecord& record);

/// Integrated pipeline outcome. Records accepted by the anomaly stage, or
/// classified 1/2 by the attack stage, raise no alert.
struct IntegratedResult {
  bool alert = false;
  std::optional<TripLabel> alert_kind;  // UfOf or Rocof when alert
  bool used_classifier = false;
  int classifier_label = 0;  // 0 when the classifier was skipped
  double mae = 0.0;
};

IntegratedResult integrated_detect(AutoencoderModel& autoencoder, ClassifierModel& classifier,
                                   const LabeledRecord& record);

struct ConfusionMatrix {
  std::array<std::array<std::size_t, 4>, 4> counts{};  // [true][predicted], 0-based classes

  std::size_t total() const;
  double accuracy() const;
  double recall(int label) const;
  double precision(int label) const;
};

struct EvaluationReport {
  ConfusionMatrix confusion;
  double classifier_accuracy = 0.0;
  /// Binary normal (label 1) vs anomalous (2-4).
  double classifier_binary_accuracy = 0.0;
  double autoencoder_binary_accuracy = 0.0;
  /// Trip ({3,4}) vs no-trip ({1,2}); the anomaly detector predicts "trip"
  /// whenever it flags a record.
  double classifier_trip_accuracy = 0.0;
  double autoencoder_trip_accuracy = 0.0;
  double integrated_trip_accuracy = 0.0;
  std::size_t autoencoder_false_alarms_normal = 0;  // label-1 records flagged
  std::size_t integrated_false_alarms_normal = 0;   // label-1 records alerted
  std::array<double, 4> per_class_recall{};
  std::array<double, 4> per_class_precision{};
};

EvaluationReport evaluate(AutoencoderModel& autoencoder, ClassifierModel& classifier,
                          const std::vector<LabeledRecord>& test);

}  // namespace lfc

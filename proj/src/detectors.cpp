#include "lfc/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lfc/nn/losses.hpp"
#include "lfc/nn/optimizer.hpp"

namespace lfc {

using nn::Matrix;

nn::Matrix record_matrix(const LabeledRecord& record) {
  Matrix m(static_cast<Eigen::Index>(record.length()), 2);
  for (std::size_t i = 0; i < record.length(); ++i) {
    m(static_cast<Eigen::Index>(i), 0) = record.de[i];
    m(static_cast<Eigen::Index>(i), 1) = record.dw_meas[i];
  }
  return m;
}

void DetectorHyper::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("DetectorHyper: lr must be > 0");
  if (batch_size < 1) throw std::invalid_argument("DetectorHyper: batch size must be >= 1");
  if (max_epochs < 1) throw std::invalid_argument("DetectorHyper: max_epochs must be >= 1");
  if (patience < 1) throw std::invalid_argument("DetectorHyper: patience must be >= 1");
}

ClassifierModel make_classifier(std::uint64_t seed) {
  Rng rng(seed);
  ClassifierModel model;
  model.net.add(std::make_unique<nn::Lstm>(2, 75, rng));
  model.net.add(std::make_unique<nn::Dropout>(0.1));
  model.net.add(std::make_unique<nn::Lstm>(75, 50, rng));
  model.net.add(std::make_unique<nn::Dropout>(0.2));
  model.net.add(std::make_unique<nn::Lstm>(50, 35, rng));
  model.net.add(std::make_unique<nn::Dropout>(0.1));
  model.net.add(std::make_unique<nn::SelectLast>());
  model.net.add(std::make_unique<nn::Dense>(35, 4, rng));
  return model;
}

AutoencoderModel make_autoencoder(std::uint64_t seed) {
  Rng rng(seed);
  AutoencoderModel model;
  Eigen::RowVectorXd scale(2), offset(2);
  scale << 1.0 / 0.2, 1.0 / 0.1;
  offset << 0.0, 0.0;
  model.net.add(std::make_unique<nn::FixedAffine>(scale, offset));
  model.net.add(std::make_unique<nn::BiLstm>(2, 36, rng));
  model.net.add(std::make_unique<nn::Relu>());
  model.net.add(std::make_unique<nn::BiLstm>(72, 8, rng));
  model.net.add(std::make_unique<nn::Relu>());
  model.net.add(std::make_unique<nn::BiLstm>(16, 36, rng));
  model.net.add(std::make_unique<nn::Relu>());
  model.net.add(std::make_unique<nn::Dense>(72, 2, rng));  // per-timestep projection
  return model;
}

namespace {

struct ParamSnapshot {
  std::vector<Matrix> values;

  static ParamSnapshot take(nn::Network& net) {
    ParamSnapshot snap;
    for (auto& p : net.params()) snap.values.push_back(*p.value);
    return snap;
  }

  void restore(nn::Network& net) const {
    auto params = net.params();
    for (std::size_t i = 0; i < params.size(); ++i) *params[i].value = values[i];
  }
};

/// Shared early-stopping loop. step_record runs forward+backward for one
/// record and returns its loss; val_loss evaluates a record in inference
/// mode. The best-validation parameters are restored at the end.
template <typename StepFn, typename ValFn>
TrainHistory run_training(nn::Network& net, std::size_t n_train, std::size_t n_val,
                          const DetectorHyper& hyper, Rng& rng, StepFn&& step_record,
                          ValFn&& val_loss) {
  nn::Optimizer opt(nn::OptimizerKind::Adam, hyper.learning_rate);
  TrainHistory history;
  double best_val = std::numeric_limits<double>::infinity();
  ParamSnapshot best;
  int since_best = 0;

  std::vector<std::size_t> order(n_train);
  for (std::size_t i = 0; i < n_train; ++i) order[i] = i;

  for (int epoch = 1; epoch <= hyper.max_epochs; ++epoch) {
    // in-place Fisher-Yates over the record order
    for (std::size_t i = n_train; i > 1; --i) {
      std::swap(order[i - 1], order[rng.uniform_index(i)]);
    }
    double train_loss = 0.0;
    std::size_t in_batch = 0;
    net.zero_grads();
    for (std::size_t i = 0; i < n_train; ++i) {
      train_loss += step_record(order[i], rng);
      if (++in_batch == hyper.batch_size || i + 1 == n_train) {
        // mean gradient over the accumulated records
        for (auto& p : net.params()) *p.grad /= static_cast<double>(in_batch);
        opt.step(net.params());
        net.zero_grads();
        in_batch = 0;
      }
    }
    train_loss /= static_cast<double>(n_train);

    double v = 0.0;
    for (std::size_t i = 0; i < n_val; ++i) v += val_loss(i);
    v /= static_cast<double>(std::max<std::size_t>(n_val, 1));

    history.train_loss.push_back(train_loss);
    history.validation_loss.push_back(v);
    if (hyper.epoch_hook) hyper.epoch_hook(epoch, train_loss, v);

    if (v < best_val) {
      const bool significant = v < best_val - hyper.min_delta;
      best_val = v;
      best = ParamSnapshot::take(net);
      history.selected_epoch = epoch;
      if (significant) {
        since_best = 0;
      } else if (++since_best >= hyper.patience) {
        break;
      }
    } else if (++since_best >= hyper.patience) {
      break;
    }
  }
  if (!best.values.empty()) best.restore(net);
  return history;
}

}  // namespace

ClassifierModel train_classifier(const std::vector<LabeledRecord>& train,
                                 const std::vector<LabeledRecord>& validation,
                                 const DetectorHyper& hyper, std::uint64_t seed) {
  hyper.validate();
  if (train.empty()) throw std::invalid_argument("train_classifier: empty training split");
  if (validation.empty()) throw std::invalid_argument("train_classifier: empty validation split");

  Rng rng(seed);
  ClassifierModel model = make_classifier(rng.next_u64());

  model.history = run_training(
      model.net, train.size(), validation.size(), hyper, rng,
      [&](std::size_t i, Rng& step_rng) {
        const LabeledRecord& rec = train[i];
        const Matrix logits = model.net.forward(record_matrix(rec), true, &step_rng);
        auto [loss, grad] = nn::softmax_cross_entropy(logits, rec.label - 1);
        model.net.backward(grad);
        return loss;
      },
      [&](std::size_t i) {
        const LabeledRecord& rec = validation[i];
        const Matrix logits = model.net.forward(record_matrix(rec));
        return nn::softmax_cross_entropy(logits, rec.label - 1).loss;
      });
  return model;
}

Classification classify(ClassifierModel& model, const LabeledRecord& record) {
  if (record.length() < 2) throw std::invalid_argument("classify: record too short");
  const Matrix logits = model.net.forward(record_matrix(record));
  const Eigen::RowVectorXd probs = nn::softmax_row(logits.row(0));

  Classification out;
  int best = 0;
  for (int c = 0; c < 4; ++c) {
    out.probabilities[static_cast<std::size_t>(c)] = probs(c);
    if (probs(c) > probs(best)) best = c;  // ties keep the lowest index
  }
  out.label = best + 1;
  return out;
}

AutoencoderModel train_autoencoder(const std::vector<LabeledRecord>& normal_train,
                                   const std::vector<LabeledRecord>& normal_validation,
                                   const DetectorHyper& hyper, std::uint64_t seed) {
  hyper.validate();
  if (normal_train.empty()) throw std::invalid_argument("train_autoencoder: empty training split");
  for (const auto* split : {&normal_train, &normal_validation}) {
    for (const auto& rec : *split) {
      if (rec.label != kLabelNormal) {
        throw std::invalid_argument("train_autoencoder: non-normal record in input");
      }
    }
  }

  Rng rng(seed);
  AutoencoderModel model = make_autoencoder(rng.next_u64());

  model.history = run_training(
      model.net, normal_train.size(), normal_validation.size(), hyper, rng,
      [&](std::size_t i, Rng& step_rng) {
        const Matrix target = record_matrix(normal_train[i]);
        const Matrix recon = model.net.forward(target, true, &step_rng);
        auto [loss, grad] = nn::mse_loss(recon, target);
        model.net.backward(grad);
        return loss;
      },
      [&](std::size_t i) {
        const Matrix target = record_matrix(normal_validation[i]);
        const Matrix recon = model.net.forward(target);
        return nn::mse_loss(recon, target).loss;
      });
  return model;
}

double reconstruction_mae(AutoencoderModel& model, const LabeledRecord& record) {
  const Matrix target = record_matrix(record);
  const Matrix recon = model.net.forward(target);
  return nn::mean_absolute_error(recon, target);
}

double select_threshold(const std::vector<double>& validation_errors,
                        const ThresholdPolicy& policy) {
  if (std::holds_alternative<FixedThresholdPolicy>(policy)) {
    return std::get<FixedThresholdPolicy>(policy).value;
  }
  if (validation_errors.empty()) {
    throw std::invalid_argument("select_threshold: empty validation error list");
  }
  const double max_err = *std::max_element(validation_errors.begin(), validation_errors.end());
  return max_err * std::get<MaxTimesFactorPolicy>(policy).factor;
}

AnomalyResult detect_anomaly(AutoencoderModel& model, const LabeledRecord& record) {
  if (!model.threshold) throw std::logic_error("detect_anomaly: threshold not set");
  AnomalyResult out;
  out.mae = reconstruction_mae(model, record);
  out.anomalous = out.mae > *model.threshold;
  return out;
}

IntegratedResult integrated_detect(AutoencoderModel& autoencoder, ClassifierModel& classifier,
                                   const LabeledRecord& record) {
  IntegratedResult out;
  const AnomalyResult stage1 = detect_anomaly(autoencoder, record);
  out.mae = stage1.mae;
  if (!stage1.anomalous) return out;  // accepted without invoking the classifier

  out.used_classifier = true;
  out.classifier_label = classify(classifier, record).label;
  if (out.classifier_label == kLabelUfOfTrip) {
    out.alert = true;
    out.alert_kind = TripLabel::UfOf;
  } else if (out.classifier_label == kLabelRocofTrip) {
    out.alert = true;
    out.alert_kind = TripLabel::Rocof;
  }
  return out;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (const auto& row : counts) {
    for (auto c : row) n += c;
  }
  return n;
}

double ConfusionMatrix::accuracy() const {
  const std::size_t n = total();
  if (n == 0) return 0.0;
  std::size_t correct = 0;
  for (int i = 0; i < 4; ++i) correct += counts[i][i];
  return static_cast<double>(correct) / static_cast<double>(n);
}

double ConfusionMatrix::recall(int label) const {
  const auto i = static_cast<std::size_t>(label - 1);
  std::size_t row = 0;
  for (auto c : counts[i]) row += c;
  if (row == 0) return 0.0;
  return static_cast<double>(counts[i][i]) / static_cast<double>(row);
}

double ConfusionMatrix::precision(int label) const {
  const auto j = static_cast<std::size_t>(label - 1);
  std::size_t col = 0;
  for (int i = 0; i < 4; ++i) col += counts[static_cast<std::size_t>(i)][j];
  if (col == 0) return 0.0;
  return static_cast<double>(counts[j][j]) / static_cast<double>(col);
}

EvaluationReport evaluate(AutoencoderModel& autoencoder, ClassifierModel& classifier,
                          const std::vector<LabeledRecord>& test) {
  if (test.empty()) throw std::invalid_argument("evaluate: empty test split");

  EvaluationReport report;
  std::size_t clf_binary_ok = 0;
  std::size_t ae_binary_ok = 0;
  std::size_t clf_trip_ok = 0;
  std::size_t ae_trip_ok = 0;
  std::size_t pipeline_trip_ok = 0;

  for (const auto& rec : test) {
    const bool truth_anomalous = rec.label != kLabelNormal;
    const bool truth_trip = rec.label == kLabelUfOfTrip || rec.label == kLabelRocofTrip;

    const int predicted = classify(classifier, rec).label;
    report.confusion.counts[static_cast<std::size_t>(rec.label - 1)]
                           [static_cast<std::size_t>(predicted - 1)] += 1;
    if ((predicted != kLabelNormal) == truth_anomalous) ++clf_binary_ok;
    const bool clf_trip = predicted == kLabelUfOfTrip || predicted == kLabelRocofTrip;
    if (clf_trip == truth_trip) ++clf_trip_ok;

    const AnomalyResult anomaly = detect_anomaly(autoencoder, rec);
    if (anomaly.anomalous == truth_anomalous) ++ae_binary_ok;
    // without labels, an anomaly flag is the detector's trip prediction
    if (anomaly.anomalous == truth_trip) ++ae_trip_ok;
    if (rec.label == kLabelNormal && anomaly.anomalous) ++report.autoencoder_false_alarms_normal;

    const IntegratedResult pipe = integrated_detect(autoencoder, classifier, rec);
    if (pipe.alert == truth_trip) ++pipeline_trip_ok;
    if (rec.label == kLabelNormal && pipe.alert) ++report.integrated_false_alarms_normal;
  }

  const double n = static_cast<double>(test.size());
  report.classifier_accuracy = report.confusion.accuracy();
  report.classifier_binary_accuracy = static_cast<double>(clf_binary_ok) / n;
  report.autoencoder_binary_accuracy = static_cast<double>(ae_binary_ok) / n;
  report.classifier_trip_accuracy = static_cast<double>(clf_trip_ok) / n;
  report.autoencoder_trip_accuracy = static_cast<double>(ae_trip_ok) / n;
  report.integrated_trip_accuracy = static_cast<double>(pipeline_trip_ok) / n;
  for (int c = 1; c <= 4; ++c) {
    report.per_class_recall[static_cast<std::size_t>(c - 1)] = report.confusion.recall(c);
    report.per_class_precision[static_cast<std::size_t>(c - 1)] = report.confusion.precision(c);
  }
  return report;
}

}  // namespace lfc

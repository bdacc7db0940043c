#include "lfc/protection.hpp"

#include <cmath>
#include <stdexcept>

namespace lfc {

void RelaySettings::validate() const {
  if (!(uf_threshold_hz < base_frequency_hz && base_frequency_hz < of_threshold_hz)) {
    throw std::invalid_argument("RelaySettings: need uf < base < of");
  }
  if (!(uf_threshold_hz > 0.0) || !(rocof_threshold_hzps > 0.0)) {
    throw std::invalid_argument("RelaySettings: thresholds must be positive");
  }
  if (uf_clearing_s < 0.0 || of_clearing_s < 0.0 || rocof_clearing_s < 0.0) {
    throw std::invalid_argument("RelaySettings: clearing times must be >= 0");
  }
}

std::string to_string(TripKind kind) {
  switch (kind) {
    case TripKind::UF: return "UF";
    case TripKind::OF: return "OF";
    case TripKind::ROCOF: return "ROCOF";
  }
  return "?";
}

std::optional<TripKind> trip_kind_from_string(const std::string& s) {
  if (s == "UF") return TripKind::UF;
  if (s == "OF") return TripKind::OF;
  if (s == "ROCOF") return TripKind::ROCOF;
  return std::nullopt;
}

bool in_safe_set(double dw_meas, double rocof_meas, const RelaySettings& settings) {
  const double f = (1.0 + dw_meas) * settings.base_frequency_hz;
  const double df = std::abs(rocof_meas) * settings.base_frequency_hz;
  return settings.uf_threshold_hz <= f && f <= settings.of_threshold_hz &&
         df <= settings.rocof_threshold_hzps;
}

std::optional<TripKind> safe_set_violation(double dw_meas, double rocof_meas,
                                           const RelaySettings& settings) {
  const double f = (1.0 + dw_meas) * settings.base_frequency_hz;
  const double df = std::abs(rocof_meas) * settings.base_frequency_hz;
  if (df > settings.rocof_threshold_hzps) return TripKind::ROCOF;
  if (f < settings.uf_threshold_hz) return TripKind::UF;
  if (f > settings.of_threshold_hz) return TripKind::OF;
  return std::nullopt;
}

RelayMonitor::RelayMonitor(RelaySettings settings) : settings_(settings) {
  settings_.validate();
}

std::optional<TripEvent> RelayMonitor::step(double dw_meas, double rocof_meas, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("RelayMonitor::step: dt must be > 0");
  if (trip_) {
    elapsed_ += dt;
    return trip_;
  }
  elapsed_ += dt;

  const double f = (1.0 + dw_meas) * settings_.base_frequency_hz;
  const double df = std::abs(rocof_meas) * settings_.base_frequency_hz;

  uf_timer_ = f < settings_.uf_threshold_hz ? uf_timer_ + dt : 0.0;
  of_timer_ = f > settings_.of_threshold_hz ? of_timer_ + dt : 0.0;
  rocof_timer_ = df > settings_.rocof_threshold_hzps ? rocof_timer_ + dt : 0.0;

  // small slack so clearing times that are exact multiples of dt latch on
  // the expected sample despite accumulated rounding
  constexpr double kTimerSlack = 1e-9;
  if (rocof_timer_ > 0.0 && rocof_timer_ >= settings_.rocof_clearing_s - kTimerSlack) {
    trip_ = TripEvent{TripKind::ROCOF, elapsed_};
  } else if (uf_timer_ > 0.0 && uf_timer_ >= settings_.uf_clearing_s - kTimerSlack) {
    trip_ = TripEvent{TripKind::UF, elapsed_};
  } else if (of_timer_ > 0.0 && of_timer_ >= settings_.of_clearing_s - kTimerSlack) {
    trip_ = TripEvent{TripKind::OF, elapsed_};
  }
  return trip_;
}

void RelayMonitor::reset() {
  elapsed_ = 0.0;
  uf_timer_ = 0.0;
  of_timer_ = 0.0;
  rocof_timer_ = 0.0;
  trip_.reset();
}

TripLabel classify_trip(const std::optional<TripEvent>& event) {
  if (!event) return TripLabel::None;
  return event->kind == TripKind::ROCOF ? TripLabel::Rocof : TripLabel::UfOf;
}

TripLabel classify_trip(const std::optional<TripKind>& kind) {
  if (!kind) return TripLabel::None;
  return *kind == TripKind::ROCOF ? TripLabel::Rocof : TripLabel::UfOf;
}

}  // namespace lfc

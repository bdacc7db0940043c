#pragma once

#include <optional>
#include <string>

namespace lfc {

/// IEEE 1547 Category III frequency relay settings.
struct RelaySettings {
  double of_threshold_hz = 62.0;
  double of_clearing_s = 0.160;
  double uf_threshold_hz = 56.5;
  double uf_clearing_s = 0.160;
  double rocof_threshold_hzps = 3.0;
  double rocof_clearing_s = 0.0;  // trips on the first violating sample
  double base_frequency_hz = 60.0;

  void validate() const;
};

enum class TripKind { UF, OF, ROCOF };

std::string to_string(TripKind kind);
std::optional<TripKind> trip_kind_from_string(const std::string& s);

struct TripEvent {
  TripKind kind;
  double time_s;
};

/// True iff the measured frequency and its rate lie inside the safe set:
/// uf <= (1 + dw_meas) * base <= of and |rocof_meas| * base <= rocof threshold.
bool in_safe_set(double dw_meas, double rocof_meas, const RelaySettings& settings);

/// Which bound a safe-set exit violated. ROCOF takes precedence when both
/// the frequency band and the rate bound are violated on the same sample.
std::optional<TripKind> safe_set_violation(double dw_meas, double rocof_meas,
                                           const RelaySettings& settings);

/// Timed relay model. Each function's timer accumulates while its threshold
/// is exceeded and resets to zero otherwise; the first timer to reach its
/// clearing time latches a trip for the rest of the episode.
class RelayMonitor {
 public:
  explicit RelayMonitor(RelaySettings settings = {});

  /// Advances all relay timers by dt given the measured states at the end of
  /// the interval. Returns the latched trip, if any.
  std::optional<TripEvent> step(double dw_meas, double rocof_meas, double dt);

  const std::optional<TripEvent>& trip() const { return trip_; }
  const RelaySettings& settings() const { return settings_; }
  double elapsed() const { return elapsed_; }

  void reset();

 private:
  RelaySettings settings_;
  double elapsed_ = 0.0;
  double uf_timer_ = 0.0;
  double of_timer_ = 0.0;
  double rocof_timer_ = 0.0;
  std::optional<TripEvent> trip_;
};

enum class TripLabel { None, UfOf, Rocof };

/// Collapses UF and OF into one dataset category; ROCOF keeps its own.
TripLabel classify_trip(const std::optional<TripEvent>& event);
TripLabel classify_trip(const std::optional<TripKind>& kind);

}  // namespace lfc

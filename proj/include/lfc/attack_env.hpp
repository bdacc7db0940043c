#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "lfc/grid_model.hpp"
#include "lfc/load_process.hpp"
#include "lfc/protection.hpp"
#include "lfc/rng.hpp"

namespace lfc {

/// Which component of the attack vector the agent drives. Exactly one
/// channel is active per environment instance.
enum class AttackChannel { FreqMeasurement, GenControl, TieLineMeas, LoadSwitch };

std::string to_string(AttackChannel c);
std::optional<AttackChannel> attack_channel_from_string(const std::string& s);

int attack_channel_index(AttackChannel c);

/// Scales of the two reward functions. The frequency scales are the relay
/// deviation bounds in pu (2 Hz and 5 Hz on a 60 Hz base); the rate scale is
/// the 3 Hz/s ROCOF setting in pu/s.
struct RewardConfig {
  double rocof_scale = 0.05;
  double freq_scale_fdi = 2.0 / 60.0;
  double freq_scale_switch = 5.0 / 60.0;
  double trip_bonus = 20.0;
  double uf_of_penalty_fdi = 20.0;

  void validate() const;
};

enum class RewardKind { Fdi, Switch };
enum class TerminationMode { SafeSet, TimedRelay };

/// Raw actions live in the policy head's natural range: [-1, 1] for tanh
/// heads, [0, 1] for sigmoid heads.
struct RawActionRange {
  double lo = -1.0;
  double hi = 1.0;
};

struct EnvConfig {
  SystemParams params;
  AttackChannel channel = AttackChannel::FreqMeasurement;
  double bound_lo = -0.1;
  double bound_hi = 0.1;
  RawActionRange raw_range;
  bool discrete_switching = false;
  double p_sw = 0.0;  // aggregate compromised load, pu; required for LoadSwitch
  double episode_limit_s = 15.0;
  double agent_step_s = 0.05;
  double internal_dt_s = kDefaultInternalDt;
  RewardConfig reward;
  RewardKind reward_kind = RewardKind::Fdi;
  TerminationMode termination = TerminationMode::SafeSet;
  RelaySettings relays;
  /// When set, episodes run on top of a freshly sampled demand trace.
  std::optional<LoadProcessConfig> background_load;

  void validate() const;
};

struct Observation {
  double dw_meas = 0.0;
  double rocof_meas = 0.0;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  std::optional<TripKind> trip;
  double elapsed_s = 0.0;
};

/// Clamps raw to [-1, 1] and maps it affinely onto [lo, hi].
double scale_action(double raw, double lo, double hi);

/// Full-load switching: off below P_sw/2, on at or above it.
double discretize_switch(double p4_raw, double p_sw);

/// FDI reward: rate-of-change incentive gated by a small-frequency window,
/// +trip_bonus on a ROCOF exit and -uf_of_penalty on a UF/OF exit.
double reward_fdi(double dw_meas, double rocof_meas, const std::optional<TripKind>& trip,
                  const RewardConfig& cfg);

/// Switching reward: frequency and rate deviations both count, any exit
/// from the safe set earns +trip_bonus.
double reward_switch(double dw_meas, double rocof_meas, const std::optional<TripKind>& trip,
                     const RewardConfig& cfg);

/// Episodic environment wrapping the plant and the protection model.
class AttackEnv {
 public:
  explicit AttackEnv(EnvConfig config);

  Observation reset(std::uint64_t seed);

  /// Applies one agent action for agent_step seconds (integrating at the
  /// internal dt and updating relays each internal sample). Throws if the
  /// episode is already done.
  StepResult env_step(double raw_action);

  const EnvConfig& config() const { return config_; }
  const Trace& trace() const { return trace_; }
  bool done() const { return done_; }
  double elapsed() const { return elapsed_; }
  const std::optional<TripKind>& trip() const { return trip_; }
  double trip_time() const { return trip_time_; }

  /// The physical attack value the last raw action mapped to.
  double shape_action(double raw_action) const;

 private:
  Observation observe() const;
  std::optional<TripKind> check_termination(double dt);

  EnvConfig config_;
  StateMatrices matrices_;
  PlantState state_ = PlantState::Zero();
  RelayMonitor monitor_;
  LoadSchedule load_;
  double elapsed_ = 0.0;
  bool done_ = false;
  bool started_ = false;
  std::optional<TripKind> trip_;
  double trip_time_ = 0.0;
  Trace trace_;  // sampled at every agent step
};

enum class OracleWaveform { Sine, Square };

/// Periodic attack at the dominant oscillatory eigenmode frequency of A.
/// The sinusoid is cosine-phased (full amplitude at t = 0); the square wave
/// has 50% duty, starting in the high half-cycle. For the load-switch
/// channel the waveform swings between 0 and amplitude instead of
/// +/- amplitude.
AttackSchedule oracle_attack(const SystemParams& params, AttackChannel channel,
                             double amplitude, OracleWaveform waveform);

/// Constant-bias baseline on the same channel.
AttackSchedule constant_attack(AttackChannel channel, double value);

/// Runs an attack schedule open-loop until safe-set exit or the horizon.
struct RolloutResult {
  Trace trace;
  std::optional<TripKind> trip;
  double trip_time_s = 0.0;
};

RolloutResult rollout_schedule(const SystemParams& params, const AttackSchedule& attack,
                               const RelaySettings& relays, double horizon_s,
                               double sample_dt_s, double internal_dt_s = kDefaultInternalDt,
                               TerminationMode termination = TerminationMode::SafeSet);

}  // namespace lfc

#include "lfc/attack_env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lfc {

std::string to_string(AttackChannel c) {
  switch (c) {
    case AttackChannel::FreqMeasurement: return "freq";
    case AttackChannel::GenControl: return "gen";
    case AttackChannel::TieLineMeas: return "tie";
    case AttackChannel::LoadSwitch: return "load";
  }
  return "?";
}

std::optional<AttackChannel> attack_channel_from_string(const std::string& s) {
  if (s == "freq" || s == "p1") return AttackChannel::FreqMeasurement;
  if (s == "gen" || s == "p2") return AttackChannel::GenControl;
  if (s == "tie" || s == "p3") return AttackChannel::TieLineMeas;
  if (s == "load" || s == "p4") return AttackChannel::LoadSwitch;
  return std::nullopt;
}

int attack_channel_index(AttackChannel c) { return static_cast<int>(c); }

void RewardConfig::validate() const {
  if (!(rocof_scale > 0.0) || !(freq_scale_fdi > 0.0) || !(freq_scale_switch > 0.0)) {
    throw std::invalid_argument("RewardConfig: scales must be positive");
  }
}

void EnvConfig::validate() const {
  params.validate();
  reward.validate();
  relays.validate();
  if (!(bound_lo < bound_hi)) throw std::invalid_argument("EnvConfig: need bound_lo < bound_hi");
  if (!(raw_range.lo < raw_range.hi)) {
    throw std::invalid_argument("EnvConfig: need raw_range.lo < raw_range.hi");
  }
  if (channel == AttackChannel::LoadSwitch) {
    if (!(p_sw > 0.0)) throw std::invalid_argument("EnvConfig: LoadSwitch requires p_sw > 0");
    if (bound_lo < 0.0) {
      throw std::invalid_argument("EnvConfig: switched load cannot be negative");
    }
  }
  if (!(episode_limit_s > 0.0)) throw std::invalid_argument("EnvConfig: episode_limit must be > 0");
  if (!(agent_step_s > 0.0) || !(internal_dt_s > 0.0)) {
    throw std::invalid_argument("EnvConfig: step sizes must be > 0");
  }
  const double sub = agent_step_s / internal_dt_s;
  if (std::abs(sub - std::lround(sub)) > 1e-9 || sub < 1.0) {
    throw std::invalid_argument("EnvConfig: internal_dt must divide agent_step");
  }
  if (background_load) background_load->validate();
}

double scale_action(double raw, double lo, double hi) {
  const double r = std::clamp(raw, -1.0, 1.0);
  return lo + (r + 1.0) / 2.0 * (hi - lo);
}

static double scale_action_from(double raw, const RawActionRange& range, double lo, double hi) {
  const double r = std::clamp(raw, range.lo, range.hi);
  return lo + (r - range.lo) / (range.hi - range.lo) * (hi - lo);
}

double discretize_switch(double p4_raw, double p_sw) {
  return p4_raw < p_sw / 2.0 ? 0.0 : p_sw;
}

double reward_fdi(double dw_meas, double rocof_meas, const std::optional<TripKind>& trip,
                  const RewardConfig& cfg) {
  const double rate = rocof_meas / cfg.rocof_scale;
  const double freq = dw_meas / cfg.freq_scale_fdi;
  double r = rate * rate * std::max(0.0, 1.0 - freq * freq);
  if (trip) {
    if (*trip == TripKind::ROCOF) {
      r += cfg.trip_bonus;
    } else {
      r -= cfg.uf_of_penalty_fdi;
    }
  }
  return r;
}

double reward_switch(double dw_meas, double rocof_meas, const std::optional<TripKind>& trip,
                     const RewardConfig& cfg) {
  const double rate = rocof_meas / cfg.rocof_scale;
  const double freq = dw_meas / cfg.freq_scale_switch;
  double r = rate * rate + freq * freq;
  if (trip) r += cfg.trip_bonus;
  return r;
}

AttackEnv::AttackEnv(EnvConfig config)
    : config_(std::move(config)),
      matrices_(build_state_matrices(config_.params)),
      monitor_(config_.relays) {
  config_.validate();
}

Observation AttackEnv::observe() const {
  return Observation{state_(kStateDwMeas), state_(kStateRocofMeas)};
}

Observation AttackEnv::reset(std::uint64_t seed) {
  state_.setZero();
  monitor_.reset();
  elapsed_ = 0.0;
  done_ = false;
  started_ = true;
  trip_.reset();
  trip_time_ = 0.0;
  trace_ = Trace{};
  trace_.dt = config_.agent_step_s;

  if (config_.background_load) {
    load_ = sample_load_trace(*config_.background_load,
                              config_.episode_limit_s + config_.agent_step_s, seed);
  } else {
    load_ = LoadSchedule{};
  }

  trace_.states.push_back(state_);
  trace_.inputs.push_back(ExogenousInput(load_.at(0.0), 0.0));
  trace_.attacks.push_back(AttackVector::Zero());
  return observe();
}

double AttackEnv::shape_action(double raw_action) const {
  if (!std::isfinite(raw_action)) throw std::invalid_argument("env_step: non-finite action");
  double value = scale_action_from(raw_action, config_.raw_range, config_.bound_lo,
                                   config_.bound_hi);
  if (config_.channel == AttackChannel::LoadSwitch && config_.discrete_switching) {
    value = discretize_switch(value, config_.p_sw);
  }
  return value;
}

std::optional<TripKind> AttackEnv::check_termination(double dt) {
  const Observation obs = observe();
  // relays watch the measured states, advanced every internal sample
  const auto relay_trip = monitor_.step(obs.dw_meas, obs.rocof_meas, dt);
  if (config_.termination == TerminationMode::TimedRelay) {
    if (relay_trip) return relay_trip->kind;
    return std::nullopt;
  }
  return safe_set_violation(obs.dw_meas, obs.rocof_meas, config_.relays);
}

StepResult AttackEnv::env_step(double raw_action) {
  if (!started_) throw std::logic_error("env_step: call reset() first");
  if (done_) throw std::logic_error("env_step: episode already done");

  const double value = shape_action(raw_action);
  AttackVector p = AttackVector::Zero();
  p(attack_channel_index(config_.channel)) = value;

  const int sub = static_cast<int>(std::lround(config_.agent_step_s / config_.internal_dt_s));
  for (int j = 0; j < sub && !trip_; ++j) {
    const ExogenousInput u(load_.at(elapsed_), 0.0);
    state_ = step(state_, u, p, matrices_, config_.internal_dt_s);
    elapsed_ += config_.internal_dt_s;
    if (auto cause = check_termination(config_.internal_dt_s)) {
      trip_ = cause;
      trip_time_ = elapsed_;
    }
  }

  if (trip_) {
    done_ = true;
  } else if (elapsed_ >= config_.episode_limit_s - 1e-9) {
    done_ = true;
  }

  trace_.states.push_back(state_);
  trace_.inputs.push_back(ExogenousInput(load_.at(elapsed_), 0.0));
  trace_.attacks.push_back(p);

  const Observation obs = observe();
  StepResult result;
  result.observation = obs;
  result.done = done_;
  result.trip = trip_;
  result.elapsed_s = elapsed_;
  result.reward = config_.reward_kind == RewardKind::Fdi
                      ? reward_fdi(obs.dw_meas, obs.rocof_meas, trip_, config_.reward)
                      : reward_switch(obs.dw_meas, obs.rocof_meas, trip_, config_.reward);
  return result;
}

AttackSchedule oracle_attack(const SystemParams& params, AttackChannel channel,
                             double amplitude, OracleWaveform waveform) {
  const double w_m = dominant_mode_frequency(params);  // throws without a pair
  const int idx = attack_channel_index(channel);
  const bool unipolar = channel == AttackChannel::LoadSwitch;
  const double period = 2.0 * M_PI / w_m;
  return [=](double t) {
    double v = 0.0;
    switch (waveform) {
      case OracleWaveform::Sine: {
        // cosine-phased: full amplitude from the first sample
        const double carrier = std::cos(w_m * t);
        v = unipolar ? amplitude * (1.0 + carrier) / 2.0 : amplitude * carrier;
        break;
      }
      case OracleWaveform::Square: {
        // high for the first half of each period; the half-period first kick
        // pumps the mode noticeably harder than a quarter-period one
        const double phase = t / period - std::floor(t / period);
        const bool high = phase < 0.5;
        v = unipolar ? (high ? amplitude : 0.0) : (high ? amplitude : -amplitude);
        break;
      }
    }
    AttackVector p = AttackVector::Zero();
    p(idx) = v;
    return p;
  };
}

AttackSchedule constant_attack(AttackChannel channel, double value) {
  const int idx = attack_channel_index(channel);
  return [=](double) {
    AttackVector p = AttackVector::Zero();
    p(idx) = value;
    return p;
  };
}

RolloutResult rollout_schedule(const SystemParams& params, const AttackSchedule& attack,
                               const RelaySettings& relays, double horizon_s,
                               double sample_dt_s, double internal_dt_s,
                               TerminationMode termination) {
  const StateMatrices m = build_state_matrices(params);
  RelayMonitor monitor(relays);
  const ExogenousInput u = ExogenousInput::Zero();

  RolloutResult out;
  out.trace.dt = sample_dt_s;
  const int sub = static_cast<int>(std::lround(sample_dt_s / internal_dt_s));
  if (sub < 1 || std::abs(sample_dt_s / internal_dt_s - sub) > 1e-9) {
    throw std::invalid_argument("rollout_schedule: internal dt must divide sample dt");
  }
  const auto n = static_cast<std::size_t>(std::lround(horizon_s / sample_dt_s));

  PlantState x = PlantState::Zero();
  out.trace.states.push_back(x);
  out.trace.inputs.push_back(u);
  out.trace.attacks.push_back(attack(0.0));

  double t = 0.0;
  for (std::size_t i = 0; i < n && !out.trip; ++i) {
    AttackVector p_sample = AttackVector::Zero();
    for (int j = 0; j < sub && !out.trip; ++j) {
      const AttackVector p = attack(t);
      p_sample = p;
      x = step(x, u, p, m, internal_dt_s);
      t += internal_dt_s;
      const auto relay_trip = monitor.step(x(kStateDwMeas), x(kStateRocofMeas), internal_dt_s);
      std::optional<TripKind> cause;
      if (termination == TerminationMode::TimedRelay) {
        if (relay_trip) cause = relay_trip->kind;
      } else {
        cause = safe_set_violation(x(kStateDwMeas), x(kStateRocofMeas), relays);
      }
      if (cause) {
        out.trip = cause;
        out.trip_time_s = t;
      }
    }
    out.trace.states.push_back(x);
    out.trace.inputs.push_back(u);
    out.trace.attacks.push_back(p_sample);
  }
  return out;
}

}  // namespace lfc

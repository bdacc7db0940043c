#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "lfc/attack_env.hpp"
#include "lfc/nn/network.hpp"
#include "lfc/nn/optimizer.hpp"

namespace lfc {

struct Experience {
  Observation s;
  double a = 0.0;  // raw action in the policy head's range
  double r = 0.0;
  Observation s_next;
  bool terminal = false;
};

/// Fixed-capacity FIFO ring with uniform sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Experience& e);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Experience& at(std::size_t i) const { return items_[i]; }

  /// Uniform sample with replacement. Requires size() >= count.
  std::vector<Experience> sample(std::size_t count, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Experience> items_;
};

enum class OutputActivation { Tanh, Sigmoid };

struct AgentConfig {
  std::size_t batch_size = 128;           // M
  double actor_lr = 1e-4;                 // alpha_theta
  double critic_lr = 1e-3;                // alpha_phi
  double gamma = 0.99;
  double tau = 1e-3;
  double noise_std = 0.3;                 // in raw action units
  double noise_decay = 1.0;               // per-episode multiplier
  /// Exploration noise correlation time (s). 0 draws independent samples;
  /// positive values use an AR(1) process with the same N(0, std^2)
  /// stationary marginal. The band-limited plant never leaves the safe set
  /// under white 50 ms noise, so correlated exploration is the default.
  double noise_correlation_s = 0.4;
  /// Count only ROCOF trips toward the early-stop rate (the FDI reward
  /// treats UF/OF exits as failures).
  bool stop_on_rocof_only = false;
  std::size_t buffer_capacity = 1'000'000;
  int max_episodes = 3000;
  OutputActivation output_activation = OutputActivation::Tanh;
  int target_update_period = 1;           // in training steps
  /// Early stop when the moving trip rate over trip_window episodes
  /// reaches trip_rate_stop (set >= 1.1 to disable).
  int trip_window = 50;
  double trip_rate_stop = 0.95;
  /// Observation normalization scales for the network inputs (pu).
  double obs_scale = 0.1;
  /// Update rules for the two gradient steps. A plain gradient step at
  /// these learning rates stalls far short of a working attack policy
  /// (verified over the full 3000-episode budget), so Adam is the default;
  /// Sgd remains selectable.
  nn::OptimizerKind critic_optimizer = nn::OptimizerKind::Adam;
  nn::OptimizerKind actor_optimizer = nn::OptimizerKind::Adam;

  void validate() const;
};

struct AgentNets {
  nn::Network actor;
  nn::Network critic;
  nn::Network target_actor;
  nn::Network target_critic;
};

/// Actor: obs(2) -> norm -> fc100 -> relu -> fc50 -> relu -> fc1 -> head.
/// Critic: obs branch 2 -> norm -> fc100 -> relu -> fc50, action branch
/// 1 -> norm -> fc50, elementwise sum -> relu -> fc1. Targets start as
/// exact copies of the online networks.
AgentNets build_nets(const AgentConfig& config, Rng& init_rng);

/// Raw action range implied by the output activation.
RawActionRange raw_range_for(OutputActivation activation);

/// pi(S) plus Gaussian exploration noise, clamped to the raw action range.
double select_action(AgentNets& nets, const Observation& s, double noise_std,
                     OutputActivation activation, Rng& rng);

/// y_i = R_i for terminal transitions, else R_i + gamma * Q_t(S', pi_t(S')).
Eigen::VectorXd td_target(const std::vector<Experience>& batch, AgentNets& nets, double gamma);

/// One SGD step on the critic against the mean squared TD error.
/// Returns the pre-step loss.
double critic_update(AgentNets& nets, const std::vector<Experience>& batch,
                     const Eigen::VectorXd& targets, nn::Optimizer& critic_opt);

/// One ascent step on the deterministic policy gradient. Returns the
/// pre-step objective (1/M) sum Q(S_i, pi(S_i)).
double actor_update(AgentNets& nets, const std::vector<Experience>& batch,
                    nn::Optimizer& actor_opt);

/// targets <- tau * online + (1 - tau) * targets, both actor and critic.
void soft_update(AgentNets& nets, double tau);

struct EpisodeSummary {
  int index = 0;
  double episode_return = 0.0;
  int steps = 0;
  std::optional<TripKind> trip;
  double trip_time_s = 0.0;
  Observation final_observation;
  double noise_std = 0.0;
};

struct TrainingLog {
  std::vector<EpisodeSummary> episodes;

  double recent_trip_rate(int window) const;
  double recent_trip_rate(int window, bool rocof_only) const;
};

/// Optional per-episode hook; receives the finished episode's trace and
/// returns whether training should continue.
using EpisodeSink =
    std::function<bool(const EpisodeSummary&, const Trace&)>;

struct TrainResult {
  AgentNets nets;
  TrainingLog log;
};

/// Full training loop of the attack agent: select -> step -> store ->
/// sample -> TD target -> critic update -> actor update -> soft update,
/// episodes ending on safe-set exit or the episode limit.
TrainResult train(AttackEnv& env, const AgentConfig& config, std::uint64_t seed,
                  const EpisodeSink& sink = {});

/// Greedy rollout (no noise) of a trained actor. Returns the episode
/// summary and trace via the same shapes as training.
EpisodeSummary evaluate_episode(AttackEnv& env, AgentNets& nets, OutputActivation activation,
                                std::uint64_t seed, Trace* trace_out = nullptr);

}  // namespace lfc

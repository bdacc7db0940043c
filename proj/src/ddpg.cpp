#include "lfc/ddpg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lfc {

using nn::Matrix;

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be > 0");
  items_.reserve(std::min<std::size_t>(capacity, 1 << 20));
}

void ReplayBuffer::push(const Experience& e) {
  if (items_.size() < capacity_) {
    items_.push_back(e);
  } else {
    items_[next_] = e;  // FIFO eviction
    next_ = (next_ + 1) % capacity_;
  }
}

std::vector<Experience> ReplayBuffer::sample(std::size_t count, Rng& rng) const {
  if (items_.size() < count) throw std::logic_error("ReplayBuffer::sample: not enough items");
  std::vector<Experience> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(items_[rng.uniform_index(items_.size())]);
  }
  return out;
}

void AgentConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("AgentConfig: gamma in (0, 1]");
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("AgentConfig: tau in (0, 1]");
  if (batch_size < 1) throw std::invalid_argument("AgentConfig: batch size must be >= 1");
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) {
    throw std::invalid_argument("AgentConfig: learning rates must be > 0");
  }
  if (noise_std < 0.0) throw std::invalid_argument("AgentConfig: noise std must be >= 0");
  if (!(noise_decay > 0.0 && noise_decay <= 1.0)) {
    throw std::invalid_argument("AgentConfig: noise decay in (0, 1]");
  }
  if (target_update_period < 1) {
    throw std::invalid_argument("AgentConfig: target update period must be >= 1");
  }
  if (!(obs_scale > 0.0)) throw std::invalid_argument("AgentConfig: obs scale must be > 0");
}

RawActionRange raw_range_for(OutputActivation activation) {
  return activation == OutputActivation::Tanh ? RawActionRange{-1.0, 1.0}
                                              : RawActionRange{0.0, 1.0};
}

namespace {

std::unique_ptr<nn::Layer> make_norm(double scale, int channels) {
  Eigen::RowVectorXd s = Eigen::RowVectorXd::Constant(channels, 1.0 / scale);
  Eigen::RowVectorXd o = Eigen::RowVectorXd::Zero(channels);
  return std::make_unique<nn::FixedAffine>(s, o);
}

Matrix obs_matrix(const std::vector<Experience>& batch, bool next) {
  Matrix m(static_cast<Eigen::Index>(batch.size()), 2);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Observation& o = next ? batch[i].s_next : batch[i].s;
    m(static_cast<Eigen::Index>(i), 0) = o.dw_meas;
    m(static_cast<Eigen::Index>(i), 1) = o.rocof_meas;
  }
  return m;
}

Matrix action_matrix(const std::vector<Experience>& batch) {
  Matrix m(static_cast<Eigen::Index>(batch.size()), 1);
  for (std::size_t i = 0; i < batch.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = batch[i].a;
  return m;
}

}  // namespace

AgentNets build_nets(const AgentConfig& config, Rng& init_rng) {
  config.validate();
  AgentNets nets;

  nets.actor.add(make_norm(config.obs_scale, 2));
  nets.actor.add(std::make_unique<nn::Dense>(2, 100, init_rng));
  nets.actor.add(std::make_unique<nn::Relu>());
  nets.actor.add(std::make_unique<nn::Dense>(100, 50, init_rng));
  nets.actor.add(std::make_unique<nn::Relu>());
  nets.actor.add(std::make_unique<nn::Dense>(50, 1, init_rng));
  if (config.output_activation == OutputActivation::Tanh) {
    nets.actor.add(std::make_unique<nn::Tanh>());
  } else {
    nets.actor.add(std::make_unique<nn::Sigmoid>());
  }

  nets.critic.add(make_norm(config.obs_scale, 2));
  nets.critic.add(std::make_unique<nn::Dense>(2, 100, init_rng));
  nets.critic.add(std::make_unique<nn::Relu>());
  nets.critic.add(std::make_unique<nn::Dense>(100, 50, init_rng));
  nets.critic.add_side(make_norm(1.0, 1));  // raw actions are already unit-range
  nets.critic.add_side(std::make_unique<nn::Dense>(1, 50, init_rng));
  nets.critic.add_head(std::make_unique<nn::Relu>());
  nets.critic.add_head(std::make_unique<nn::Dense>(50, 1, init_rng));

  nets.target_actor = nets.actor.clone();
  nets.target_critic = nets.critic.clone();
  return nets;
}

double select_action(AgentNets& nets, const Observation& s, double noise_std,
                     OutputActivation activation, Rng& rng) {
  Matrix in(1, 2);
  in(0, 0) = s.dw_meas;
  in(0, 1) = s.rocof_meas;
  double a = nets.actor.forward(in)(0, 0);
  if (noise_std > 0.0) a += rng.normal(0.0, noise_std);
  const RawActionRange range = raw_range_for(activation);
  return std::clamp(a, range.lo, range.hi);
}

Eigen::VectorXd td_target(const std::vector<Experience>& batch, AgentNets& nets, double gamma) {
  if (batch.empty()) throw std::invalid_argument("td_target: empty batch");
  const Matrix s_next = obs_matrix(batch, true);
  const Matrix a_next = nets.target_actor.forward(s_next);
  const Matrix q_next = nets.target_critic.forward2(s_next, a_next);

  Eigen::VectorXd y(static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    y(idx) = batch[i].terminal ? batch[i].r : batch[i].r + gamma * q_next(idx, 0);
  }
  return y;
}

double critic_update(AgentNets& nets, const std::vector<Experience>& batch,
                     const Eigen::VectorXd& targets, nn::Optimizer& critic_opt) {
  const auto M = static_cast<Eigen::Index>(batch.size());
  if (targets.size() != M) throw std::invalid_argument("critic_update: target size mismatch");

  const Matrix s = obs_matrix(batch, false);
  const Matrix a = action_matrix(batch);
  const Matrix q = nets.critic.forward2(s, a);

  const Eigen::VectorXd err = q.col(0) - targets;
  const double loss = err.squaredNorm() / static_cast<double>(M);

  Matrix grad = (2.0 / static_cast<double>(M)) * err;
  nets.critic.zero_grads();
  nets.critic.backward2(grad);
  critic_opt.step(nets.critic.params());
  return loss;
}

double actor_update(AgentNets& nets, const std::vector<Experience>& batch,
                    nn::Optimizer& actor_opt) {
  const auto M = static_cast<Eigen::Index>(batch.size());
  const double scale = 1.0 / static_cast<double>(M);

  const Matrix s = obs_matrix(batch, false);
  const Matrix a = nets.actor.forward(s);
  const Matrix q = nets.critic.forward2(s, a);
  const double objective = q.col(0).sum() * scale;

  // dJ/dA through the critic's action branch; the critic's own gradients
  // are scratch here and cleared afterwards
  nets.critic.zero_grads();
  const Matrix dq = Matrix::Constant(M, 1, scale);
  auto [g_obs, g_action] = nets.critic.backward2(dq);
  (void)g_obs;
  nets.critic.zero_grads();

  // ascend: accumulate dJ/dtheta, then step against its negation
  nets.actor.zero_grads();
  nets.actor.backward(g_action);
  for (auto& p : nets.actor.params()) *p.grad = -*p.grad;
  actor_opt.step(nets.actor.params());
  return objective;
}

void soft_update(AgentNets& nets, double tau) {
  auto blend = [tau](nn::Network& target, nn::Network& online) {
    auto t = target.params();
    auto o = online.params();
    for (std::size_t i = 0; i < t.size(); ++i) {
      *t[i].value = tau * *o[i].value + (1.0 - tau) * *t[i].value;
    }
  };
  blend(nets.target_actor, nets.actor);
  blend(nets.target_critic, nets.critic);
}

double TrainingLog::recent_trip_rate(int window) const {
  return recent_trip_rate(window, false);
}

double TrainingLog::recent_trip_rate(int window, bool rocof_only) const {
  if (episodes.empty() || window <= 0) return 0.0;
  const std::size_t n = std::min<std::size_t>(window, episodes.size());
  std::size_t trips = 0;
  for (std::size_t i = episodes.size() - n; i < episodes.size(); ++i) {
    if (!episodes[i].trip) continue;
    if (!rocof_only || *episodes[i].trip == TripKind::ROCOF) ++trips;
  }
  return static_cast<double>(trips) / static_cast<double>(n);
}

TrainResult train(AttackEnv& env, const AgentConfig& config, std::uint64_t seed,
                  const EpisodeSink& sink) {
  config.validate();
  Rng rng(seed);
  Rng init_rng = rng.split(1);
  Rng noise_rng = rng.split(2);
  Rng sample_rng = rng.split(3);

  TrainResult result{build_nets(config, init_rng), {}};
  AgentNets& nets = result.nets;

  nn::Optimizer actor_opt(config.actor_optimizer, config.actor_lr);
  nn::Optimizer critic_opt(config.critic_optimizer, config.critic_lr);
  ReplayBuffer buffer(config.buffer_capacity);

  double noise_std = config.noise_std;
  long train_steps = 0;
  // AR(1) exploration: rho keeps the stationary marginal at N(0, std^2)
  const double rho = config.noise_correlation_s > 0.0
                         ? std::exp(-env.config().agent_step_s / config.noise_correlation_s)
                         : 0.0;
  const double innovation = std::sqrt(1.0 - rho * rho);

  for (int episode = 0; episode < config.max_episodes; ++episode) {
    Observation obs = env.reset(rng.next_u64());
    EpisodeSummary summary;
    summary.index = episode;
    summary.noise_std = noise_std;
    double noise_state = noise_std > 0.0 ? noise_rng.normal(0.0, noise_std) : 0.0;

    while (!env.done()) {
      noise_state = rho * noise_state + innovation * noise_rng.normal(0.0, noise_std);
      const double action =
          select_action(nets, obs, 0.0, config.output_activation, noise_rng) +
          (noise_std > 0.0 ? noise_state : 0.0);
      const RawActionRange range = raw_range_for(config.output_activation);
      const double clamped = std::clamp(action, range.lo, range.hi);
      const StepResult sr = env.env_step(clamped);
      if (!std::isfinite(sr.reward)) {
        throw std::runtime_error("train: non-finite reward at episode " +
                                 std::to_string(episode));
      }
      buffer.push({obs, clamped, sr.reward, sr.observation, sr.done && sr.trip.has_value()});
      obs = sr.observation;
      summary.episode_return += sr.reward;
      summary.steps += 1;

      if (buffer.size() >= config.batch_size) {
        const auto batch = buffer.sample(config.batch_size, sample_rng);
        const Eigen::VectorXd y = td_target(batch, nets, config.gamma);
        const double loss = critic_update(nets, batch, y, critic_opt);
        if (!std::isfinite(loss)) {
          throw std::runtime_error("train: non-finite critic loss at episode " +
                                   std::to_string(episode));
        }
        actor_update(nets, batch, actor_opt);
        ++train_steps;
        if (train_steps % config.target_update_period == 0) {
          soft_update(nets, config.tau);
        }
      }
    }

    summary.trip = env.trip();
    summary.trip_time_s = env.trip_time();
    summary.final_observation = obs;
    result.log.episodes.push_back(summary);
    if (sink && !sink(summary, env.trace())) break;

    noise_std *= config.noise_decay;

    if (static_cast<int>(result.log.episodes.size()) >= config.trip_window &&
        result.log.recent_trip_rate(config.trip_window, config.stop_on_rocof_only) >=
            config.trip_rate_stop) {
      break;
    }
  }
  return result;
}

EpisodeSummary evaluate_episode(AttackEnv& env, AgentNets& nets, OutputActivation activation,
                                std::uint64_t seed, Trace* trace_out) {
  Rng rng(seed);
  Observation obs = env.reset(seed);
  EpisodeSummary summary;
  while (!env.done()) {
    const double action = select_action(nets, obs, 0.0, activation, rng);
    const StepResult sr = env.env_step(action);
    obs = sr.observation;
    summary.episode_return += sr.reward;
    summary.steps += 1;
  }
  summary.trip = env.trip();
  summary.trip_time_s = env.trip_time();
  summary.final_observation = obs;
  if (trace_out) *trace_out = env.trace();
  return summary;
}

}  // namespace lfc

#include "lfc/run_config.hpp"

#include <stdexcept>

namespace lfc {

using nlohmann::json;

namespace {

SystemParams system_params_from_json(const json& doc, const SystemParams& base) {
  SystemParams p = base;
  p.agc_gain = doc.value("agc_gain", p.agc_gain);
  p.droop_gain = doc.value("droop_gain", p.droop_gain);
  p.governor_tc = doc.value("governor_tc", p.governor_tc);
  p.turbine_tc = doc.value("turbine_tc", p.turbine_tc);
  p.inertia = doc.value("inertia", p.inertia);
  p.damping = doc.value("damping", p.damping);
  p.freq_sensor_tc = doc.value("freq_sensor_tc", p.freq_sensor_tc);
  p.rocof_sensor_tc = doc.value("rocof_sensor_tc", p.rocof_sensor_tc);
  p.measurement_gain = doc.value("measurement_gain", p.measurement_gain);
  p.base_frequency = doc.value("base_frequency", p.base_frequency);
  return p;
}

json system_params_to_json(const SystemParams& p) {
  return {{"agc_gain", p.agc_gain},
          {"droop_gain", p.droop_gain},
          {"governor_tc", p.governor_tc},
          {"turbine_tc", p.turbine_tc},
          {"inertia", p.inertia},
          {"damping", p.damping},
          {"freq_sensor_tc", p.freq_sensor_tc},
          {"rocof_sensor_tc", p.rocof_sensor_tc},
          {"measurement_gain", p.measurement_gain},
          {"base_frequency", p.base_frequency}};
}

RelaySettings relays_from_json(const json& doc, const RelaySettings& base) {
  RelaySettings r = base;
  r.of_threshold_hz = doc.value("of_threshold_hz", r.of_threshold_hz);
  r.of_clearing_s = doc.value("of_clearing_s", r.of_clearing_s);
  r.uf_threshold_hz = doc.value("uf_threshold_hz", r.uf_threshold_hz);
  r.uf_clearing_s = doc.value("uf_clearing_s", r.uf_clearing_s);
  r.rocof_threshold_hzps = doc.value("rocof_threshold_hzps", r.rocof_threshold_hzps);
  r.rocof_clearing_s = doc.value("rocof_clearing_s", r.rocof_clearing_s);
  r.base_frequency_hz = doc.value("base_frequency_hz", r.base_frequency_hz);
  return r;
}

json relays_to_json(const RelaySettings& r) {
  return {{"of_threshold_hz", r.of_threshold_hz},   {"of_clearing_s", r.of_clearing_s},
          {"uf_threshold_hz", r.uf_threshold_hz},   {"uf_clearing_s", r.uf_clearing_s},
          {"rocof_threshold_hzps", r.rocof_threshold_hzps},
          {"rocof_clearing_s", r.rocof_clearing_s}, {"base_frequency_hz", r.base_frequency_hz}};
}

RewardConfig reward_from_json(const json& doc, const RewardConfig& base) {
  RewardConfig r = base;
  r.rocof_scale = doc.value("rocof_scale", r.rocof_scale);
  r.freq_scale_fdi = doc.value("freq_scale_fdi", r.freq_scale_fdi);
  r.freq_scale_switch = doc.value("freq_scale_switch", r.freq_scale_switch);
  r.trip_bonus = doc.value("trip_bonus", r.trip_bonus);
  r.uf_of_penalty_fdi = doc.value("uf_of_penalty_fdi", r.uf_of_penalty_fdi);
  return r;
}

json reward_to_json(const RewardConfig& r) {
  return {{"rocof_scale", r.rocof_scale},
          {"freq_scale_fdi", r.freq_scale_fdi},
          {"freq_scale_switch", r.freq_scale_switch},
          {"trip_bonus", r.trip_bonus},
          {"uf_of_penalty_fdi", r.uf_of_penalty_fdi}};
}

LoadProcessConfig load_from_json(const json& doc, const LoadProcessConfig& base) {
  LoadProcessConfig l = base;
  l.sigma_fast = doc.value("sigma_fast", l.sigma_fast);
  l.sigma_slow = doc.value("sigma_slow", l.sigma_slow);
  l.fast_step_s = doc.value("fast_step_s", l.fast_step_s);
  l.slow_step_s = doc.value("slow_step_s", l.slow_step_s);
  if (doc.contains("clamp_pu") && !doc.at("clamp_pu").is_null()) {
    l.clamp_pu = doc.at("clamp_pu").get<double>();
  }
  return l;
}

json load_to_json(const LoadProcessConfig& l) {
  json doc{{"sigma_fast", l.sigma_fast},
           {"sigma_slow", l.sigma_slow},
           {"fast_step_s", l.fast_step_s},
           {"slow_step_s", l.slow_step_s}};
  if (l.clamp_pu) doc["clamp_pu"] = *l.clamp_pu;
  return doc;
}

}  // namespace

json env_config_to_json(const EnvConfig& cfg) {
  json doc;
  doc["system"] = system_params_to_json(cfg.params);
  doc["channel"] = to_string(cfg.channel);
  doc["bounds"] = {cfg.bound_lo, cfg.bound_hi};
  doc["raw_range"] = {cfg.raw_range.lo, cfg.raw_range.hi};
  doc["discrete_switching"] = cfg.discrete_switching;
  doc["p_sw"] = cfg.p_sw;
  doc["episode_limit_s"] = cfg.episode_limit_s;
  doc["agent_step_s"] = cfg.agent_step_s;
  doc["internal_dt_s"] = cfg.internal_dt_s;
  doc["reward"] = cfg.reward_kind == RewardKind::Fdi ? "fdi" : "switch";
  doc["reward_config"] = reward_to_json(cfg.reward);
  doc["termination"] = cfg.termination == TerminationMode::SafeSet ? "safe-set" : "timed-relay";
  doc["relays"] = relays_to_json(cfg.relays);
  if (cfg.background_load) doc["background_load"] = load_to_json(*cfg.background_load);
  return doc;
}

EnvConfig env_config_from_json(const json& doc, const EnvConfig& base) {
  EnvConfig cfg = base;
  if (doc.contains("system")) {
    if (doc.at("system").is_string()) {
      cfg.params = mg_preset(doc.at("system").get<std::string>());
    } else {
      cfg.params = system_params_from_json(doc.at("system"), cfg.params);
    }
  }
  if (doc.contains("channel")) {
    const auto channel = attack_channel_from_string(doc.at("channel").get<std::string>());
    if (!channel) throw std::invalid_argument("config: unknown channel");
    cfg.channel = *channel;
  }
  if (doc.contains("bounds")) {
    cfg.bound_lo = doc.at("bounds").at(0).get<double>();
    cfg.bound_hi = doc.at("bounds").at(1).get<double>();
  }
  if (doc.contains("raw_range")) {
    cfg.raw_range.lo = doc.at("raw_range").at(0).get<double>();
    cfg.raw_range.hi = doc.at("raw_range").at(1).get<double>();
  }
  cfg.discrete_switching = doc.value("discrete_switching", cfg.discrete_switching);
  cfg.p_sw = doc.value("p_sw", cfg.p_sw);
  cfg.episode_limit_s = doc.value("episode_limit_s", cfg.episode_limit_s);
  cfg.agent_step_s = doc.value("agent_step_s", cfg.agent_step_s);
  cfg.internal_dt_s = doc.value("internal_dt_s", cfg.internal_dt_s);
  if (doc.contains("reward")) {
    const auto kind = doc.at("reward").get<std::string>();
    if (kind == "fdi") {
      cfg.reward_kind = RewardKind::Fdi;
    } else if (kind == "switch") {
      cfg.reward_kind = RewardKind::Switch;
    } else {
      throw std::invalid_argument("config: reward must be fdi or switch");
    }
  }
  if (doc.contains("reward_config")) {
    cfg.reward = reward_from_json(doc.at("reward_config"), cfg.reward);
  }
  if (doc.contains("termination")) {
    const auto mode = doc.at("termination").get<std::string>();
    if (mode == "safe-set") {
      cfg.termination = TerminationMode::SafeSet;
    } else if (mode == "timed-relay") {
      cfg.termination = TerminationMode::TimedRelay;
    } else {
      throw std::invalid_argument("config: termination must be safe-set or timed-relay");
    }
  }
  if (doc.contains("relays")) cfg.relays = relays_from_json(doc.at("relays"), cfg.relays);
  if (doc.contains("background_load")) {
    cfg.background_load = load_from_json(doc.at("background_load"), LoadProcessConfig{});
  }
  return cfg;
}

json agent_config_to_json(const AgentConfig& cfg) {
  json doc;
  doc["batch_size"] = cfg.batch_size;
  doc["actor_lr"] = cfg.actor_lr;
  doc["critic_lr"] = cfg.critic_lr;
  doc["gamma"] = cfg.gamma;
  doc["tau"] = cfg.tau;
  doc["noise_std"] = cfg.noise_std;
  doc["noise_decay"] = cfg.noise_decay;
  doc["noise_correlation_s"] = cfg.noise_correlation_s;
  doc["buffer_capacity"] = cfg.buffer_capacity;
  doc["max_episodes"] = cfg.max_episodes;
  doc["output_activation"] =
      cfg.output_activation == OutputActivation::Tanh ? "tanh" : "sigmoid";
  doc["target_update_period"] = cfg.target_update_period;
  doc["trip_window"] = cfg.trip_window;
  doc["trip_rate_stop"] = cfg.trip_rate_stop;
  doc["stop_on_rocof_only"] = cfg.stop_on_rocof_only;
  doc["obs_scale"] = cfg.obs_scale;
  doc["critic_optimizer"] = cfg.critic_optimizer == nn::OptimizerKind::Adam ? "adam" : "sgd";
  doc["actor_optimizer"] = cfg.actor_optimizer == nn::OptimizerKind::Adam ? "adam" : "sgd";
  return doc;
}

AgentConfig agent_config_from_json(const json& doc, const AgentConfig& base) {
  AgentConfig cfg = base;
  cfg.batch_size = doc.value("batch_size", cfg.batch_size);
  cfg.actor_lr = doc.value("actor_lr", cfg.actor_lr);
  cfg.critic_lr = doc.value("critic_lr", cfg.critic_lr);
  cfg.gamma = doc.value("gamma", cfg.gamma);
  cfg.tau = doc.value("tau", cfg.tau);
  cfg.noise_std = doc.value("noise_std", cfg.noise_std);
  cfg.noise_decay = doc.value("noise_decay", cfg.noise_decay);
  cfg.noise_correlation_s = doc.value("noise_correlation_s", cfg.noise_correlation_s);
  cfg.buffer_capacity = doc.value("buffer_capacity", cfg.buffer_capacity);
  cfg.max_episodes = doc.value("max_episodes", cfg.max_episodes);
  if (doc.contains("output_activation")) {
    const auto head = doc.at("output_activation").get<std::string>();
    if (head == "tanh") {
      cfg.output_activation = OutputActivation::Tanh;
    } else if (head == "sigmoid") {
      cfg.output_activation = OutputActivation::Sigmoid;
    } else {
      throw std::invalid_argument("config: output_activation must be tanh or sigmoid");
    }
  }
  cfg.target_update_period = doc.value("target_update_period", cfg.target_update_period);
  cfg.trip_window = doc.value("trip_window", cfg.trip_window);
  cfg.trip_rate_stop = doc.value("trip_rate_stop", cfg.trip_rate_stop);
  cfg.stop_on_rocof_only = doc.value("stop_on_rocof_only", cfg.stop_on_rocof_only);
  cfg.obs_scale = doc.value("obs_scale", cfg.obs_scale);
  auto opt_kind = [](const std::string& s) {
    if (s == "adam") return nn::OptimizerKind::Adam;
    if (s == "sgd") return nn::OptimizerKind::Sgd;
    throw std::invalid_argument("config: optimizer must be adam or sgd");
  };
  if (doc.contains("critic_optimizer")) {
    cfg.critic_optimizer = opt_kind(doc.at("critic_optimizer").get<std::string>());
  }
  if (doc.contains("actor_optimizer")) {
    cfg.actor_optimizer = opt_kind(doc.at("actor_optimizer").get<std::string>());
  }
  return cfg;
}

RunConfig RunConfig::defaults() {
  RunConfig cfg;
  cfg.system_preset = "MG2";
  cfg.params = mg_preset("MG2");
  cfg.env.params = cfg.params;
  cfg.env.channel = AttackChannel::FreqMeasurement;
  cfg.env.bound_lo = -0.1;
  cfg.env.bound_hi = 0.1;
  cfg.env.reward_kind = RewardKind::Fdi;
  cfg.agent.stop_on_rocof_only = true;
  return cfg;
}

RunConfig RunConfig::from_json(const json& doc) {
  RunConfig cfg = defaults();
  if (doc.contains("system")) {
    if (doc.at("system").is_string()) {
      cfg.system_preset = doc.at("system").get<std::string>();
      cfg.params = mg_preset(cfg.system_preset);
    } else {
      cfg.system_preset = "custom";
      cfg.params = system_params_from_json(doc.at("system"), cfg.params);
    }
    cfg.env.params = cfg.params;
  }
  cfg.env = env_config_from_json(doc.value("env", json::object()), cfg.env);
  if (doc.contains("system") && !doc.value("env", json::object()).contains("system")) {
    cfg.env.params = cfg.params;
  }
  cfg.agent = agent_config_from_json(doc.value("agent", json::object()), cfg.agent);

  if (doc.contains("dataset")) {
    const auto& d = doc.at("dataset");
    cfg.dataset.quota = d.value("quota", cfg.dataset.quota);
    if (d.contains("fractions")) {
      cfg.dataset.fractions.train = d.at("fractions").at(0).get<double>();
      cfg.dataset.fractions.validation = d.at("fractions").at(1).get<double>();
      cfg.dataset.fractions.test = d.at("fractions").at(2).get<double>();
    }
    cfg.dataset.crop_min = d.value("crop_min", cfg.dataset.crop_min);
    cfg.dataset.crop_max = d.value("crop_max", cfg.dataset.crop_max);
    cfg.dataset.normal_sim_duration_s =
        d.value("normal_sim_duration_s", cfg.dataset.normal_sim_duration_s);
    if (d.contains("load")) cfg.dataset.load = load_from_json(d.at("load"), cfg.dataset.load);
    if (d.contains("collection")) {
      for (const auto& jdoc : d.at("collection")) {
        CollectionJob job;
        job.name = jdoc.value("name", std::string("job"));
        job.env = env_config_from_json(jdoc.value("env", json::object()), cfg.env);
        job.agent = agent_config_from_json(jdoc.value("agent", json::object()), cfg.agent);
        job.seed_offset = jdoc.value("seed_offset", std::uint64_t{0});
        job.harvest_from_episode = jdoc.value("harvest_from_episode", 0);
        cfg.dataset.collection.push_back(std::move(job));
      }
    }
  }

  if (doc.contains("detector")) {
    const auto& d = doc.at("detector");
    cfg.detector.learning_rate = d.value("learning_rate", cfg.detector.learning_rate);
    cfg.detector.batch_size = d.value("batch_size", cfg.detector.batch_size);
    cfg.detector.max_epochs = d.value("max_epochs", cfg.detector.max_epochs);
    cfg.detector.patience = d.value("patience", cfg.detector.patience);
  }

  if (doc.contains("threshold")) {
    const auto& t = doc.at("threshold");
    const auto kind = t.value("kind", std::string("max_times_factor"));
    if (kind == "max_times_factor") {
      cfg.threshold.policy = MaxTimesFactorPolicy{t.value("factor", 1.05)};
    } else if (kind == "fixed") {
      cfg.threshold.policy = FixedThresholdPolicy{t.value("value", 0.2)};
    } else {
      throw std::invalid_argument("config: threshold kind must be max_times_factor or fixed");
    }
  }

  cfg.seed = doc.value("seed", cfg.seed);
  cfg.out_dir = doc.value("out", cfg.out_dir);
  return cfg;
}

json RunConfig::to_json() const {
  json doc;
  doc["system"] = system_preset == "custom" ? system_params_to_json(params) : json(system_preset);
  doc["env"] = env_config_to_json(env);
  doc["agent"] = agent_config_to_json(agent);
  json d;
  d["quota"] = dataset.quota;
  d["fractions"] = {dataset.fractions.train, dataset.fractions.validation,
                    dataset.fractions.test};
  d["crop_min"] = dataset.crop_min;
  d["crop_max"] = dataset.crop_max;
  d["normal_sim_duration_s"] = dataset.normal_sim_duration_s;
  d["load"] = load_to_json(dataset.load);
  doc["dataset"] = std::move(d);
  doc["detector"] = {{"learning_rate", detector.learning_rate},
                     {"batch_size", detector.batch_size},
                     {"max_epochs", detector.max_epochs},
                     {"patience", detector.patience}};
  if (std::holds_alternative<MaxTimesFactorPolicy>(threshold.policy)) {
    doc["threshold"] = {{"kind", "max_times_factor"},
                        {"factor", std::get<MaxTimesFactorPolicy>(threshold.policy).factor}};
  } else {
    doc["threshold"] = {{"kind", "fixed"},
                        {"value", std::get<FixedThresholdPolicy>(threshold.policy).value}};
  }
  doc["seed"] = seed;
  doc["out"] = out_dir;
  return doc;
}

std::vector<CollectionJob> default_collection_plan(const RunConfig& cfg) {
  std::vector<CollectionJob> plan;

  // full-rate FDI runs: their pre-convergence phase supplies UF/OF trips,
  // the converged tail supplies fast ROCOF attacks
  EnvConfig fdi = cfg.env;
  fdi.channel = AttackChannel::FreqMeasurement;
  fdi.bound_lo = -0.1;
  fdi.bound_hi = 0.1;
  fdi.reward_kind = RewardKind::Fdi;
  fdi.discrete_switching = false;
  // converging attackers supply fast ROCOF episodes; their pre-convergence
  // phases add no-trip and UF/OF variety
  auto fdi_full = [&](int i) {
    CollectionJob job;
    job.name = "fdi_full_" + std::to_string(i);
    job.env = fdi;
    job.agent = cfg.agent;
    job.agent.max_episodes = 200;
    job.agent.trip_rate_stop = 0.95;
    job.agent.stop_on_rocof_only = true;
    job.seed_offset = 100 + static_cast<std::uint64_t>(i);
    job.target_classes = {kLabelRocofTrip};
    return job;
  };
  for (int i = 0; i < 10; ++i) plan.push_back(fdi_full(i));

  // aggregate load switching on the base microgrid (0.3 pu compromised)
  {
    CollectionJob job;
    job.name = "switch_aggregate";
    job.env = cfg.env;
    job.env.params = mg_preset("MG1");
    job.env.channel = AttackChannel::LoadSwitch;
    job.env.bound_lo = 0.0;
    job.env.bound_hi = 0.3;
    job.env.p_sw = 0.3;
    job.env.discrete_switching = false;
    job.env.reward_kind = RewardKind::Switch;
    job.agent = cfg.agent;
    job.agent.noise_decay = 0.995;
    job.agent.max_episodes = 400;
    job.agent.trip_rate_stop = 1.1;
    job.agent.stop_on_rocof_only = false;
    job.seed_offset = 70;
    job.target_classes = {kLabelRocofTrip};
    plan.push_back(std::move(job));
  }

  // update-free exploration with slow, large noise: a wandering bias that
  // rides into the frequency band (UF/OF) or meanders safely. M larger than
  // any episode suppresses learning, per the replay sampling precondition.
  {
    CollectionJob job;
    job.name = "fdi_slow_bias";
    job.env = fdi;
    job.agent = cfg.agent;
    job.agent.batch_size = 1 << 20;
    job.agent.noise_std = 1.0;
    job.agent.noise_correlation_s = 8.0;
    job.agent.max_episodes = 6000;
    job.agent.trip_rate_stop = 1.1;
    job.agent.stop_on_rocof_only = false;
    job.seed_offset = 60;
    job.target_classes = {kLabelUfOfTrip};
    plan.push_back(std::move(job));
  }

  // update-free light-noise exploration: almost every episode survives the
  // limit, filling the attack-no-trip class. Kept last so top-up passes can
  // clone it by position.
  {
    CollectionJob job;
    job.name = "fdi_explore";
    job.env = fdi;
    job.agent = cfg.agent;
    job.agent.batch_size = 1 << 20;
    job.agent.noise_std = 0.15;
    job.agent.max_episodes = 6000;
    job.agent.trip_rate_stop = 1.1;
    job.agent.stop_on_rocof_only = false;
    job.seed_offset = 50;
    job.target_classes = {kLabelAttackNoTrip};
    plan.push_back(std::move(job));
  }
  return plan;
}

}  // namespace lfc

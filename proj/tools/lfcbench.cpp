// lfcbench: load-frequency-control attack synthesis and detection workbench.
//
// Subcommands: simulate-normal, eig, train-attacker, rollout, build-dataset,
// train-detector, train-autoencoder, evaluate, report. All runs are seeded
// through the config (or --seed) and write a manifest with content digests.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "lfc/attack_env.hpp"
#include "lfc/ddpg.hpp"
#include "lfc/manifest.hpp"
#include "lfc/nn/checkpoint.hpp"
#include "lfc/pipeline.hpp"
#include "lfc/run_config.hpp"
#include "lfc/trace_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lfc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitAssert = 4;

struct CliError : std::runtime_error {
  int code;
  CliError(int code_, const std::string& what_) : std::runtime_error(what_), code(code_) {}
};

void fail_config(const std::string& message) { throw CliError(kExitConfig, message); }

json load_json_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail_config("cannot open: " + path);
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    fail_config(std::string("JSON parse error in ") + path + ": " + e.what());
  }
  return {};
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool out_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "run configuration JSON");
  cmd->add_option("--out", opts.out_dir, "output directory")->each([&](const std::string&) {
    opts.out_set = true;
  });
  cmd->add_option("--seed", opts.seed, "seed override")->each([&](const std::string&) {
    opts.seed_set = true;
  });
}

RunConfig resolve_config(const CommonOpts& opts) {
  RunConfig cfg = RunConfig::defaults();
  if (!opts.config_path.empty()) {
    try {
      cfg = RunConfig::from_json(load_json_file(opts.config_path));
    } catch (const CliError&) {
      throw;
    } catch (const std::exception& e) {
      fail_config(e.what());
    }
  } else if (const char* root = std::getenv("LFCBENCH_OUT")) {
    cfg.out_dir = root;
  }
  if (opts.seed_set) cfg.seed = opts.seed;
  if (opts.out_set) cfg.out_dir = opts.out_dir;
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CliError(kExitRuntime, "cannot write " + path.string());
  os << text;
  if (!os) throw CliError(kExitRuntime, "write failed: " + path.string());
}

void write_json_file(const fs::path& path, const json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

// ------------------------------------------------------------ simulate-normal

int cmd_simulate_normal(const CommonOpts& opts, double duration, double sample_dt) {
  RunConfig cfg = resolve_config(opts);
  if (!(duration > 0.0)) fail_config("--duration must be > 0");
  if (!(sample_dt > 0.0)) fail_config("--sample-dt must be > 0");

  const LoadSchedule load = sample_load_trace(cfg.dataset.load, duration, cfg.seed);
  const Trace trace = simulate(cfg.params, load.as_input(),
                               [](double) { return AttackVector::Zero(); }, duration, sample_dt,
                               cfg.env.internal_dt_s);

  ManifestWriter manifest(cfg.out_dir);
  manifest.set_subcommand("simulate-normal");
  manifest.set_seed(cfg.seed);
  manifest.set_config(cfg.to_json());
  write_trace_csv_file((fs::path(cfg.out_dir) / "normal_trace.csv").string(), trace);
  manifest.record("normal_trace.csv");
  manifest.write();
  std::cout << "wrote " << (fs::path(cfg.out_dir) / "normal_trace.csv").string() << " ("
            << trace.size() << " samples)\n";
  return kExitOk;
}

// ------------------------------------------------------------------------ eig

int cmd_eig(const CommonOpts& opts, const std::string& system) {
  RunConfig cfg = resolve_config(opts);
  SystemParams params = cfg.params;
  if (!system.empty()) params = mg_preset(system);

  const auto eigs = eigenmodes(params);
  json doc;
  json list = json::array();
  for (const auto& z : eigs) {
    list.push_back({{"real", z.real()}, {"imag", z.imag()}});
  }
  doc["eigenvalues"] = std::move(list);
  try {
    const double w_m = dominant_mode_frequency(params);
    doc["dominant_mode_rad_per_s"] = w_m;
    doc["dominant_mode_period_s"] = 2.0 * 3.14159265358979323846 / w_m;
  } catch (const std::runtime_error&) {
    doc["dominant_mode_rad_per_s"] = nullptr;
  }

  ManifestWriter manifest(cfg.out_dir);
  manifest.set_subcommand("eig");
  manifest.set_seed(cfg.seed);
  manifest.set_config(cfg.to_json());
  write_json_file(fs::path(cfg.out_dir) / "eigenmodes.json", doc);
  manifest.record("eigenmodes.json");
  manifest.write();
  std::cout << doc.dump(2) << '\n';
  return kExitOk;
}

// -------------------------------------------------------------- train-attacker

json summary_to_json(const EpisodeSummary& ep) {
  json doc;
  doc["episode"] = ep.index;
  doc["return"] = ep.episode_return;
  doc["steps"] = ep.steps;
  doc["trip"] = ep.trip ? json(to_string(*ep.trip)) : json(nullptr);
  doc["trip_time_s"] = ep.trip_time_s;
  doc["final_dw_meas"] = ep.final_observation.dw_meas;
  doc["final_rocof_meas"] = ep.final_observation.rocof_meas;
  doc["noise_std"] = ep.noise_std;
  return doc;
}

int cmd_train_attacker(const CommonOpts& opts, int save_traces) {
  RunConfig cfg = resolve_config(opts);
  AttackEnv env(cfg.env);

  const fs::path out(cfg.out_dir);
  fs::create_directories(out);
  std::ofstream log_os(out / "trainlog.jsonl", std::ios::binary);
  if (!log_os) throw CliError(kExitRuntime, "cannot write trainlog.jsonl");

  ManifestWriter manifest(cfg.out_dir);
  manifest.set_subcommand("train-attacker");
  manifest.set_seed(cfg.seed);
  manifest.set_config(cfg.to_json());

  int trace_count = 0;
  TrainResult result = train(env, cfg.agent, cfg.seed,
                             [&](const EpisodeSummary& ep, const Trace& trace) {
                               log_os << summary_to_json(ep).dump() << '\n';
                               if (trace_count < save_traces) {
                                 const std::string name =
                                     "episode_" + std::to_string(ep.index) + ".csv";
                                 std::optional<TripEvent> event;
                                 if (ep.trip) event = TripEvent{*ep.trip, ep.trip_time_s};
                                 write_trace_csv_file((out / name).string(), trace, event);
                                 manifest.record(name);
                                 ++trace_count;
                               }
                               return true;
                             });
  log_os.close();

  nn::save_network((out / "actor.json").string(), result.nets.actor,
                   {{"role", "actor"}, {"agent", agent_config_to_json(cfg.agent)},
                    {"env", env_config_to_json(cfg.env)}});
  nn::save_network((out / "critic.json").string(), result.nets.critic, {{"role", "critic"}});
  manifest.record("actor.json");
  manifest.record("critic.json");
  manifest.record("trainlog.jsonl");
  manifest.write();

  const double rate = result.log.recent_trip_rate(50);
  std::cout << "trained " << result.log.episodes.size() << " episodes; trailing trip rate "
            << rate << "\n";
  return kExitOk;
}

// ----------------------------------------------------------------------- rollout

int cmd_rollout(const CommonOpts& opts, const std::string& policy_path,
                const std::string& baseline, double amplitude, double bias,
                const std::string& waveform, const std::string& system,
                const std::string& channel_name, double p_sw, int repeat) {
  RunConfig cfg = resolve_config(opts);
  if (!system.empty()) {
    cfg.params = mg_preset(system);
    cfg.env.params = cfg.params;
  }
  if (!channel_name.empty()) {
    const auto channel = attack_channel_from_string(channel_name);
    if (!channel) fail_config("unknown channel: " + channel_name);
    cfg.env.channel = *channel;
    if (*channel == AttackChannel::LoadSwitch) {
      cfg.env.bound_lo = 0.0;
      cfg.env.bound_hi = p_sw > 0.0 ? p_sw : cfg.env.p_sw;
      cfg.env.discrete_switching = true;
      cfg.env.reward_kind = RewardKind::Switch;
    }
  }
  if (p_sw > 0.0) cfg.env.p_sw = p_sw;

  const fs::path out(cfg.out_dir);
  ManifestWriter manifest(cfg.out_dir);
  manifest.set_subcommand("rollout");
  manifest.set_seed(cfg.seed);
  manifest.set_config(cfg.to_json());

  json reports = json::array();
  for (int rep = 0; rep < repeat; ++rep) {
    Trace trace;
    std::optional<TripKind> trip;
    double trip_time = 0.0;

    if (!policy_path.empty()) {
      auto loaded = nn::load_network(policy_path);
      AgentNets nets;
      nets.actor = std::move(loaded.net);
      AttackEnv env(cfg.env);
      OutputActivation head = OutputActivation::Tanh;
      if (loaded.extra.contains("agent")) {
        head = loaded.extra.at("agent").value("output_activation", "tanh") == std::string("sigmoid")
                   ? OutputActivation::Sigmoid
                   : OutputActivation::Tanh;
      }
      const EpisodeSummary ep =
          evaluate_episode(env, nets, head, cfg.seed + static_cast<std::uint64_t>(rep), &trace);
      trip = ep.trip;
      trip_time = ep.trip_time_s;
    } else if (baseline == "oracle") {
      const auto schedule =
          oracle_attack(cfg.env.params, cfg.env.channel,
                        amplitude > 0.0 ? amplitude : cfg.env.bound_hi,
                        waveform == "square" ? OracleWaveform::Square : OracleWaveform::Sine);
      const auto result = rollout_schedule(cfg.env.params, schedule, cfg.env.relays,
                                           cfg.env.episode_limit_s, cfg.env.agent_step_s,
                                           cfg.env.internal_dt_s, cfg.env.termination);
      trace = result.trace;
      trip = result.trip;
      trip_time = result.trip_time_s;
    } else if (baseline == "constant") {
      const auto result = rollout_schedule(cfg.env.params,
                                           constant_attack(cfg.env.channel, bias),
                                           cfg.env.relays, cfg.env.episode_limit_s,
                                           cfg.env.agent_step_s, cfg.env.internal_dt_s,
                                           cfg.env.termination);
      trace = result.trace;
      trip = result.trip;
      trip_time = result.trip_time_s;
    } else {
      fail_config("rollout needs --policy or --baseline oracle|constant");
    }

    const std::string name = repeat == 1 ? "rollout.csv" : "rollout_" + std::to_string(rep) +
                                                               ".csv";
    std::optional<TripEvent> event;
    if (trip) event = TripEvent{*trip, trip_time};
    write_trace_csv_file((out / name).string(), trace, event);
    manifest.record(name);

    json r;
    r["trace"] = name;
    r["trip"] = trip ? json(to_string(*trip)) : json(nullptr);
    r["trip_time_s"] = trip_time;
    reports.push_back(std::move(r));
  }

  json doc;
  doc["rollouts"] = std::move(reports);
  write_json_file(out / "trip_report.json", doc);
  manifest.record("trip_report.json");
  manifest.write();
  std::cout << doc.dump(2) << '\n';
  return kExitOk;
}

// ------------------------------------------------------------------ build-dataset

int cmd_build_dataset(const CommonOpts& opts) {
  RunConfig cfg = resolve_config(opts);
  const fs::path out(cfg.out_dir);

  BuiltDataset built = build_dataset(cfg, cfg.seed,
                                     [](const std::string& msg) { std::cout << msg << '\n'; });

  ManifestWriter manifest(cfg.out_dir);
  manifest.set_subcommand("build-dataset");
  manifest.set_seed(cfg.seed);
  manifest.set_config(cfg.to_json());
  save_split(out.string(), built.split);
  manifest.record("train.jsonl");
  manifest.record("validation.jsonl");
  manifest.record("test.jsonl");

  json stats;
  stats["episodes_run"] = built.stats.episodes;
  stats["pool_normal"] = built.stats.normal;
  stats["pool_no_trip"] = built.stats.no_trip;
  stats["pool_uf_of"] = built.stats.uf_of;
  stats["pool_rocof"] = built.stats.rocof;
  stats["sources"] = built.stats.sources;
  stats["train_records"] = built.split.train.size();
  stats["validation_records"] = built.split.validation.size();
  stats["test_records"] = built.split.test.size();
  write_json_file(out / "dataset_stats.json", stats);
  manifest.record("dataset_stats.json");
  manifest.write();
  std::cout << stats.dump(2) << '\n';
  return kExitOk;
}

// ------------------------------------------------------- train-detector / -autoencoder

int cmd_train_detector(const CommonOpts& opts, const std::string& dataset_dir) {
  RunConfig cfg = resolve_config(opts);
  if (dataset_dir.empty()) fail_config("--dataset is required");
  const DatasetSplit split = load_split(dataset_dir);

  ClassifierModel model = train_classifier(split.train, split.validation, cfg.detector, cfg.seed);

  const fs::path out(cfg.out_dir);
  ManifestWriter manifest(cfg.out_dir);
  manifest.set_subcommand("train-detector");
  manifest.set_seed(cfg.seed);
  manifest.set_config(cfg.to_json());
  json extra;
  extra["role"] = "classifier";
  extra["selected_epoch"] = model.history.selected_epoch;
  extra["train_loss"] = model.history.train_loss;
  extra["validation_loss"] = model.history.validation_loss;
  nn::save_network((out / "classifier.json").string(), model.net, extra);
  manifest.record("classifier.json");
  manifest.write();
  std::cout << "classifier selected epoch " << model.history.selected_epoch << " of "
            << model.history.validation_loss.size() << "\n";
  return kExitOk;
}

int cmd_train_autoencoder(const CommonOpts& opts, const std::string& dataset_dir) {
  RunConfig cfg = resolve_config(opts);
  if (dataset_dir.empty()) fail_config("--dataset is required");
  const DatasetSplit split = load_split(dataset_dir);

  std::vector<LabeledRecord> normal_train, normal_val;
  for (const auto& rec : split.train) {
    if (rec.label == kLabelNormal) normal_train.push_back(rec);
  }
  for (const auto& rec : split.validation) {
    if (rec.label == kLabelNormal) normal_val.push_back(rec);
  }
  AutoencoderModel model = train_autoencoder(normal_train, normal_val, cfg.detector, cfg.seed);

  std::vector<double> val_errors;
  for (const auto& rec : normal_val) val_errors.push_back(reconstruction_mae(model, rec));
  model.threshold = select_threshold(val_errors, cfg.threshold.policy);

  const fs::path out(cfg.out_dir);
  ManifestWriter manifest(cfg.out_dir);
  manifest.set_subcommand("train-autoencoder");
  manifest.set_seed(cfg.seed);
  manifest.set_config(cfg.to_json());
  json extra;
  extra["role"] = "autoencoder";
  extra["threshold"] = *model.threshold;
  extra["selected_epoch"] = model.history.selected_epoch;
  extra["validation_mae"] = val_errors;
  nn::save_network((out / "autoencoder.json").string(), model.net, extra);
  manifest.record("autoencoder.json");
  manifest.write();
  std::cout << "autoencoder threshold " << *model.threshold << "\n";
  return kExitOk;
}

// --------------------------------------------------------------------- evaluate

int cmd_evaluate(const CommonOpts& opts, const std::string& dataset_dir,
                 const std::string& classifier_path, const std::string& autoencoder_path,
                 bool assert_floors) {
  RunConfig cfg = resolve_config(opts);
  if (dataset_dir.empty()) fail_config("--dataset is required");
  if (classifier_path.empty() || autoencoder_path.empty()) {
    fail_config("--classifier and --autoencoder are required");
  }
  const DatasetSplit split = load_split(dataset_dir);

  auto clf_loaded = nn::load_network(classifier_path);
  ClassifierModel clf{std::move(clf_loaded.net), {}};
  auto ae_loaded = nn::load_network(autoencoder_path);
  AutoencoderModel ae{std::move(ae_loaded.net), std::nullopt, {}};
  if (!ae_loaded.extra.contains("threshold")) {
    fail_config("autoencoder checkpoint carries no threshold");
  }
  ae.threshold = ae_loaded.extra.at("threshold").get<double>();

  const EvaluationReport report = evaluate(ae, clf, split.test);
  json doc = evaluation_to_json(report);

  const fs::path out(cfg.out_dir);
  ManifestWriter manifest(cfg.out_dir);
  manifest.set_subcommand("evaluate");
  manifest.set_seed(cfg.seed);
  manifest.set_config(cfg.to_json());
  write_json_file(out / "metrics.json", doc);
  manifest.record("metrics.json");

  // reconstruction examples for plotting: first normal test record,
  // original vs reconstruction
  for (const auto& rec : split.test) {
    if (rec.label != kLabelNormal) continue;
    const nn::Matrix input = record_matrix(rec);
    const nn::Matrix recon = ae.net.forward(input);
    std::ostringstream csv;
    csv << "t,de,dw_meas,de_recon,dw_meas_recon\n";
    for (Eigen::Index i = 0; i < input.rows(); ++i) {
      csv << format_double(static_cast<double>(i) * rec.dt) << ',' << format_double(input(i, 0))
          << ',' << format_double(input(i, 1)) << ',' << format_double(recon(i, 0)) << ','
          << format_double(recon(i, 1)) << '\n';
    }
    write_text(out / "reconstruction_example.csv", csv.str());
    manifest.record("reconstruction_example.csv");
    break;
  }
  manifest.write();
  std::cout << doc.dump(2) << '\n';

  if (assert_floors) {
    const bool ok = report.classifier_accuracy >= 0.90 &&
                    report.classifier_binary_accuracy >= 0.97 &&
                    report.autoencoder_binary_accuracy >= 0.95 &&
                    report.classifier_trip_accuracy - report.autoencoder_trip_accuracy >= 0.10 &&
                    report.per_class_recall[1] >= 0.85 &&
                    report.integrated_false_alarms_normal <=
                        report.autoencoder_false_alarms_normal &&
                    std::abs(report.integrated_trip_accuracy - report.classifier_trip_accuracy) <=
                        0.01 + 1e-12;
    if (!ok) throw CliError(kExitAssert, "detector metrics below the acceptance floors");
  }
  return kExitOk;
}

// ----------------------------------------------------------------------- report

int cmd_report(const CommonOpts& opts) {
  RunConfig cfg = resolve_config(opts);
  const fs::path out(cfg.out_dir);
  ManifestWriter manifest(cfg.out_dir);
  manifest.set_subcommand("report");
  manifest.set_seed(cfg.seed);
  manifest.set_config(cfg.to_json());

  // reward surfaces on a grid (plot-ready)
  {
    std::ostringstream csv;
    csv << "dw_meas,rocof_meas,reward_fdi,reward_switch\n";
    for (int i = -30; i <= 30; ++i) {
      for (int j = -30; j <= 30; ++j) {
        const double dw = 0.002 * i;
        const double rc = 0.004 * j;
        csv << format_double(dw) << ',' << format_double(rc) << ','
            << format_double(reward_fdi(dw, rc, std::nullopt, cfg.env.reward)) << ','
            << format_double(reward_switch(dw, rc, std::nullopt, cfg.env.reward)) << '\n';
      }
    }
    write_text(out / "reward_surfaces.csv", csv.str());
    manifest.record("reward_surfaces.csv");
  }

  // normal-operation example: demand walk and the frequency response
  {
    const double duration = 600.0;
    const LoadSchedule load = sample_load_trace(cfg.dataset.load, duration, cfg.seed);
    const Trace trace = simulate(cfg.params, load.as_input(),
                                 [](double) { return AttackVector::Zero(); }, duration, 0.05,
                                 cfg.env.internal_dt_s);
    write_trace_csv_file((out / "normal_example.csv").string(), trace);
    manifest.record("normal_example.csv");
  }

  // eigenmodes of the three presets
  {
    std::ostringstream csv;
    csv << "system,real,imag\n";
    for (const char* name : {"MG1", "MG2", "MG3"}) {
      for (const auto& z : eigenmodes(mg_preset(name))) {
        csv << name << ',' << format_double(z.real()) << ',' << format_double(z.imag()) << '\n';
      }
    }
    write_text(out / "eigenmodes.csv", csv.str());
    manifest.record("eigenmodes.csv");
  }

  // oracle sine vs constant-bias sweep on the configured system
  {
    std::ostringstream csv;
    csv << "attack,parameter,trip,trip_time_s\n";
    const auto oracle = oracle_attack(cfg.env.params, AttackChannel::FreqMeasurement, 0.1,
                                      OracleWaveform::Sine);
    const auto oracle_run = rollout_schedule(cfg.env.params, oracle, cfg.env.relays, 15.0, 0.05,
                                             cfg.env.internal_dt_s);
    csv << "oracle_sine,0.1," << (oracle_run.trip ? to_string(*oracle_run.trip) : "none") << ','
        << format_double(oracle_run.trip_time_s) << '\n';
    for (int i = -10; i <= 10; ++i) {
      const double bias = 0.01 * i;
      const auto run = rollout_schedule(cfg.env.params,
                                        constant_attack(AttackChannel::FreqMeasurement, bias),
                                        cfg.env.relays, 15.0, 0.05, cfg.env.internal_dt_s);
      csv << "constant," << format_double(bias) << ','
          << (run.trip ? to_string(*run.trip) : "none") << ','
          << format_double(run.trip ? run.trip_time_s : 0.0) << '\n';
    }
    write_text(out / "oracle_vs_constant.csv", csv.str());
    manifest.record("oracle_vs_constant.csv");
  }

  // oracle switching attack trace against MG1 (plot-ready)
  {
    const auto schedule = oracle_attack(mg_preset("MG1"), AttackChannel::LoadSwitch, 0.18,
                                        OracleWaveform::Square);
    const auto run = rollout_schedule(mg_preset("MG1"), schedule, cfg.env.relays, 15.0, 0.05,
                                      cfg.env.internal_dt_s);
    std::optional<TripEvent> event;
    if (run.trip) event = TripEvent{*run.trip, run.trip_time_s};
    write_trace_csv_file((out / "oracle_switching_mg1.csv").string(), run.trace, event);
    manifest.record("oracle_switching_mg1.csv");
  }

  manifest.write();
  std::cout << "report artifacts written under " << out.string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"load-frequency-control attack synthesis and detection workbench"};
  app.require_subcommand(1);

  CommonOpts opts;

  auto* sim = app.add_subcommand("simulate-normal", "simulate normal demand-following operation");
  double duration = 600.0;
  double sample_dt = 0.05;
  sim->add_option("--duration", duration, "simulation horizon in seconds");
  sim->add_option("--sample-dt", sample_dt, "trace sample period in seconds");
  add_common(sim, opts);

  auto* eig = app.add_subcommand("eig", "eigenmode report for a system");
  std::string eig_system;
  eig->add_option("--system", eig_system, "preset name (MG1, MG2, MG3)");
  add_common(eig, opts);

  auto* train_cmd = app.add_subcommand("train-attacker", "train the DDPG attack agent");
  int save_traces = 0;
  train_cmd->add_option("--save-traces", save_traces, "write the first N episode traces");
  add_common(train_cmd, opts);

  auto* roll = app.add_subcommand("rollout", "run a frozen policy or a baseline attack");
  std::string policy_path, baseline, waveform = "sine", roll_system, roll_channel;
  double amplitude = 0.0, bias = 0.0, p_sw = 0.0;
  int repeat = 1;
  roll->add_option("--policy", policy_path, "actor checkpoint JSON");
  roll->add_option("--baseline", baseline, "oracle | constant");
  roll->add_option("--amplitude", amplitude, "baseline amplitude (pu)");
  roll->add_option("--bias", bias, "constant-bias value (pu)");
  roll->add_option("--waveform", waveform, "sine | square");
  roll->add_option("--system", roll_system, "preset override");
  roll->add_option("--channel", roll_channel, "attack channel (freq|gen|tie|load)");
  roll->add_option("--psw", p_sw, "compromised load for the switch channel (pu)");
  roll->add_option("--repeat", repeat, "number of rollouts");
  add_common(roll, opts);

  auto* build = app.add_subcommand("build-dataset", "generate the labeled detector dataset");
  add_common(build, opts);

  auto* td = app.add_subcommand("train-detector", "train the supervised attack classifier");
  std::string dataset_dir;
  td->add_option("--dataset", dataset_dir, "dataset directory (train/validation/test.jsonl)");
  add_common(td, opts);

  auto* ta = app.add_subcommand("train-autoencoder", "train the anomaly autoencoder");
  ta->add_option("--dataset", dataset_dir, "dataset directory");
  add_common(ta, opts);

  auto* ev = app.add_subcommand("evaluate", "evaluate detectors and the integrated pipeline");
  std::string classifier_path, autoencoder_path;
  bool assert_floors = false;
  ev->add_option("--dataset", dataset_dir, "dataset directory");
  ev->add_option("--classifier", classifier_path, "classifier checkpoint");
  ev->add_option("--autoencoder", autoencoder_path, "autoencoder checkpoint");
  ev->add_flag("--assert", assert_floors, "fail (exit 4) when metrics miss the floors");
  add_common(ev, opts);

  auto* rep = app.add_subcommand("report", "emit plot-ready CSV data");
  add_common(rep, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (sim->parsed()) return cmd_simulate_normal(opts, duration, sample_dt);
    if (eig->parsed()) return cmd_eig(opts, eig_system);
    if (train_cmd->parsed()) return cmd_train_attacker(opts, save_traces);
    if (roll->parsed()) {
      return cmd_rollout(opts, policy_path, baseline, amplitude, bias, waveform, roll_system,
                         roll_channel, p_sw, repeat);
    }
    if (build->parsed()) return cmd_build_dataset(opts);
    if (td->parsed()) return cmd_train_detector(opts, dataset_dir);
    if (ta->parsed()) return cmd_train_autoencoder(opts, dataset_dir);
    if (ev->parsed()) {
      return cmd_evaluate(opts, dataset_dir, classifier_path, autoencoder_path, assert_floors);
    }
    if (rep->parsed()) return cmd_report(opts);
  } catch (const CliError& e) {
    json err;
    err["error"] = e.what();
    err["exit_code"] = e.code;
    std::cerr << err.dump() << '\n';
    return e.code;
  } catch (const std::invalid_argument& e) {
    json err;
    err["error"] = e.what();
    err["exit_code"] = kExitConfig;
    std::cerr << err.dump() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    json err;
    err["error"] = e.what();
    err["exit_code"] = kExitRuntime;
    std::cerr << err.dump() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

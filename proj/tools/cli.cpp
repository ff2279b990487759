// Copyright 2026 The crowdqf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "crowdqf/crowdqf.hpp"

namespace crowdqf::cli {
namespace {

namespace fs = std::filesystem;

// `dir/name.csv` + ".history.csv" -> `dir/name.history.csv`
std::string sibling(const std::string& path, const std::string& suffix) {
  const fs::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

std::vector<std::string> csv_files(const std::string& where) {
  std::error_code ec;
  if (fs::is_regular_file(where, ec)) return {where};
  if (!fs::is_directory(where, ec)) throw MalformedInput("no such file or directory: " + where);
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(where)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<CrowdTrajectory> load_crowds(const std::vector<std::string>& sources) {
  std::vector<CrowdTrajectory> crowds;
  for (const std::string& source : sources) {
    for (const std::string& file : csv_files(source)) {
      try {
        crowds.push_back(load_canonical(file));
      } catch (const MalformedInput& e) {
        throw MalformedInput(file + ": " + e.what());
      }
    }
  }
  return crowds;
}

std::string history_csv(const char* column, const std::vector<double>& values) {
  std::string s = std::string("generation,") + column + "\n";
  for (std::size_t g = 0; g < values.size(); ++g) s += std::to_string(g) + "," + text::format_double(values[g]) + "\n";
  return s;
}

std::string features_csv(const FeatureMap& features, const CrowdTrajectory& crowd) {
  std::string s = "feature,agent_id,t,value\n";
  for (const FeatureSamples& f : features) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      s += code_of(f.id);
      s += ',';
      if (f.agent_ids[i] >= 0) s += std::to_string(f.agent_ids[i]);
      s += ',';
      if (f.steps[i] >= 0) s += text::format_double(crowd.t0 + static_cast<double>(f.steps[i]) * crowd.dt);
      s += ',' + text::format_double(f.values[i]) + '\n';
    }
  }
  return s;
}

std::string breakdown_csv(const QualityScore& q, const WeightVector& w) {
  std::string s = "feature,cost,weight,contribution,radar\n";
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    s += std::string(kFeatureCodes[i]) + ',' + text::format_double(q.cost[i]) + ',' +
         text::format_double(w.values()[i]) + ',' + text::format_double(q.contribution[i]) + ',' +
         text::format_double(1.0 - q.cost[i]) + '\n';
  }
  return s;
}

void add_ga_options(CLI::App* sub, GaConfig& ga) {
  sub->add_option("--population", ga.population_size, "GA population size");
  sub->add_option("--generations", ga.max_generations, "GA generation cap");
  sub->add_option("--crossover-rate", ga.crossover_rate, "probability of uniform crossover");
  sub->add_option("--mutation-rate", ga.mutation_rate, "per-gene mutation probability");
  sub->add_option("--mutation-scale", ga.mutation_scale, "mutation std-dev as a fraction of the gene range");
  sub->add_option("--elitism", ga.elitism_count, "individuals copied unchanged");
  sub->add_option("--plateau", ga.plateau_generations, "stop after this many stagnant generations (0 = never)");
}

std::vector<DegradeMode> parse_modes(const std::vector<std::string>& names) {
  std::vector<DegradeMode> modes;
  for (const std::string& n : names) modes.push_back(parse_degrade_mode(n));
  return modes;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  for (std::string_view part : text::split(s, ',')) {
    if (!text::trim(part).empty()) out.emplace_back(text::trim(part));
  }
  return out;
}

RunManifest capture(const CLI::App& sub, std::uint64_t seed) {
  RunManifest m;
  m.subcommand = sub.get_name();
  m.seed = seed;
  m.version = CROWDQF_VERSION;
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string& name = opt->get_single_name();
    if (name == "help") continue;
    if (opt->get_expected_min() == 0) {
      if (opt->count() > 0) m.switches.push_back(name);
      continue;
    }
    std::string value;
    if (opt->count() > 0) {
      for (const std::string& r : opt->results()) value += (value.empty() ? "" : ",") + r;
    } else {
      value = opt->get_default_str();
      // CLI11 renders an empty list default as "{}" or "[]".
      if (value == "{}" || value == "[]") value.clear();
    }
    if (!value.empty()) m.options.emplace_back(name, value);
  }
  return m;
}

const std::vector<std::string> kModeNames = {"no-avoidance", "jitter", "speed-scale", "freeze"};
const std::vector<std::string> kKindNames = {"circle", "crossing", "random"};

}  // namespace

std::string manifest_to_text(const RunManifest& m) {
  text::KeyValues kv;
  kv.emplace_back("subcommand", m.subcommand);
  kv.emplace_back("version", m.version);
  kv.emplace_back("seed", std::to_string(m.seed));
  for (const auto& [k, v] : m.options) kv.emplace_back("option." + k, v);
  for (const std::string& s : m.switches) kv.emplace_back("switch." + s, "true");
  std::ostringstream out;
  text::write_key_values(out, kv);
  return out.str();
}

RunManifest parse_manifest(std::istream& in) {
  RunManifest m;
  bool have_subcommand = false;
  for (const auto& [k, v] : text::parse_key_values(in)) {
    if (k == "subcommand") {
      m.subcommand = v;
      have_subcommand = true;
    } else if (k == "version") {
      m.version = v;
    } else if (k == "seed") {
      const auto seed = text::parse_int(v);
      if (!seed || *seed < 0) throw MalformedInput("manifest seed is not a non-negative integer: '" + v + "'");
      m.seed = static_cast<std::uint64_t>(*seed);
    } else if (k.rfind("option.", 0) == 0) {
      m.options.emplace_back(k.substr(7), v);
    } else if (k.rfind("switch.", 0) == 0) {
      m.switches.push_back(k.substr(7));
    } else {
      throw MalformedInput("unknown manifest key '" + k + "'");
    }
  }
  if (!have_subcommand) throw MalformedInput("manifest lacks a subcommand");
  return m;
}

RunManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open " + path);
  return parse_manifest(in);
}

std::vector<std::string> manifest_arguments(const RunManifest& m) {
  std::vector<std::string> args = {"--seed", std::to_string(m.seed), m.subcommand};
  for (const auto& [k, v] : m.options) {
    args.push_back("--" + k);
    args.push_back(v);
  }
  for (const std::string& s : m.switches) args.push_back("--" + s);
  return args;
}

int exit_code(ErrorKind kind) noexcept {
  return kind == ErrorKind::kConfiguration ? kExitConfig : kExitData;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Crowd trajectory quality scoring, weight training and simulator tuning", "crowdqf"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", std::string(CROWDQF_VERSION));

  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string manifest_path;
  app.add_option("--seed", seed, "seed for every random stream");
  app.add_option("--threads", threads, "worker threads; never changes results");
  app.add_option("--manifest", manifest_path, "where to write the run manifest");

  // fit-reference
  std::vector<std::string> golden;
  std::string out_path;
  double bin_width = kDefaultDensityBinWidth;
  CLI::App* fit = app.add_subcommand("fit-reference", "fit per-feature reference statistics on golden trajectories");
  fit->add_option("--golden", golden, "golden trajectory CSV files or directories")->required()->delimiter(',');
  fit->add_option("--out", out_path, "output stats file")->required();
  fit->add_option("--bin-width", bin_width, "fundamental-diagram density bin width (1/m^2)");

  // train-weights
  std::vector<std::string> degraded_dirs;
  std::string stats_path, weights_path, history_path, modes_list;
  double degraded_target = 0.0;
  GaConfig train_ga = default_weight_ga();
  CLI::App* train = app.add_subcommand("train-weights", "learn feature weights from golden and degraded trajectories");
  train->add_option("--golden", golden, "golden trajectory CSV files or directories")->required()->delimiter(',');
  train->add_option("--degraded", degraded_dirs, "degraded trajectory CSV files or directories")->delimiter(',');
  train->add_option("--degraded-target", degraded_target, "target score of loaded degraded trajectories");
  train->add_flag("--auto-degrade", "derive degraded examples from the golden set");
  train->add_option("--modes", modes_list, "degrade modes for --auto-degrade")->default_str("no-avoidance,jitter");
  train->add_option("--stats", stats_path, "reference stats file")->required();
  train->add_option("--out", out_path, "output weights file")->required();
  train->add_option("--history", history_path, "fitness history CSV (default: next to --out)");
  train->add_flag("--init-pretrained", "seed the population with the published weights");
  add_ga_options(train, train_ga);

  // score
  std::string trajectory_path, breakdown_path;
  std::optional<std::size_t> window_steps;
  std::size_t window_start = 0;
  CLI::App* score_cmd = app.add_subcommand("score", "score a trajectory");
  score_cmd->add_option("--trajectory", trajectory_path, "trajectory CSV")->required();
  score_cmd->add_option("--stats", stats_path, "reference stats file")->required();
  score_cmd->add_option("--weights", weights_path, "weights file (default: published weights)");
  score_cmd->add_option("--breakdown", breakdown_path, "per-feature breakdown CSV (default: next to the trajectory)");
  score_cmd->add_option("--window-steps", window_steps, "score only this many steps");
  score_cmd->add_option("--window-start", window_start, "first step of the window");

  // features
  CLI::App* features_cmd = app.add_subcommand("features", "dump feature samples as CSV");
  features_cmd->add_option("--trajectory", trajectory_path, "trajectory CSV")->required();
  features_cmd->add_option("--stats", stats_path, "stats file whose density-speed curve FDG uses");
  features_cmd->add_option("--out", out_path, "output CSV (default: standard output)");

  // degrade
  std::string mode_name;
  DegradeOptions degrade_opts;
  CLI::App* degrade_cmd = app.add_subcommand("degrade", "write an artifact-bearing copy of a trajectory");
  degrade_cmd->add_option("--trajectory", trajectory_path, "trajectory CSV")->required();
  degrade_cmd->add_option("--mode", mode_name, "degrade mode")->required()->check(CLI::IsMember(kModeNames));
  degrade_cmd->add_option("--out", out_path, "output trajectory CSV")->required();
  degrade_cmd->add_option("--jitter", degrade_opts.jitter_amplitude, "heading noise std-dev (rad)");
  degrade_cmd->add_option("--speed-factor", degrade_opts.speed_factor, "speed multiplier");
  degrade_cmd->add_option("--freeze-fraction", degrade_opts.freeze_fraction, "share of agents that freeze");

  // simulate
  Scenario scenario;
  std::string kind_name = "circle", params_path;
  double duration = 10.0;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "run the social-forces simulator on a generated scenario");
  sim_cmd->add_option("--kind", kind_name, "scenario kind")->check(CLI::IsMember(kKindNames));
  sim_cmd->add_option("--agents", scenario.agent_count, "number of agents");
  sim_cmd->add_option("--density", scenario.density, "spawn density (persons/m^2)");
  sim_cmd->add_option("--angle", scenario.crossing_angle_deg, "crossing angle (deg)");
  sim_cmd->add_option("--radius", scenario.radius, "circle radius (m)");
  sim_cmd->add_option("--params", params_path, "simulator parameter file");
  sim_cmd->add_option("--duration", duration, "simulated time (s)");
  sim_cmd->add_option("--out", out_path, "output trajectory CSV")->required();

  // tune
  std::string tune_mode = "single", kinds_list, best_path;
  double decay = 0.97;
  std::size_t snapshot_every = 0;
  GaConfig tune_ga = default_tune_ga();
  CLI::App* tune_cmd = app.add_subcommand("tune", "search simulator parameters that maximize the score");
  tune_cmd->add_option("--mode", tune_mode, "single or generic")->check(CLI::IsMember({"single", "generic"}));
  tune_cmd->add_option("--kind", kinds_list, "comma-separated scenario kinds, one scenario each")->default_str("circle");
  tune_cmd->add_option("--agents", scenario.agent_count, "agents per scenario");
  tune_cmd->add_option("--density", scenario.density, "spawn density (persons/m^2)");
  tune_cmd->add_option("--angle", scenario.crossing_angle_deg, "crossing angle (deg)");
  tune_cmd->add_option("--radius", scenario.radius, "circle radius (m)");
  tune_cmd->add_option("--stats", stats_path, "reference stats file")->required();
  tune_cmd->add_option("--weights", weights_path, "weights file (default: published weights)");
  tune_cmd->add_option("--duration", duration, "simulated time per evaluation (s)");
  tune_cmd->add_option("--decay", decay, "per-generation mutation-scale factor");
  tune_cmd->add_option("--out", out_path, "output parameter file")->required();
  tune_cmd->add_option("--history", history_path, "score history CSV (default: next to --out)");
  tune_cmd->add_option("--best-trajectory", best_path, "trajectory of the best parameters (default: next to --out)");
  tune_cmd->add_option("--snapshot-every", snapshot_every, "also write each k-th generation's best trajectory (0 = off)");
  add_ga_options(tune_cmd, tune_ga);

  // replay
  std::string replay_path;
  CLI::App* replay_cmd = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  replay_cmd->add_option("manifest", replay_path, "manifest file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << CROWDQF_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (threads == 0) throw ConfigurationError("--threads must be at least 1");
    const CLI::App* sub = app.get_subcommands().front();

    if (sub == replay_cmd) {
      std::vector<std::string> replay_args = manifest_arguments(load_manifest(replay_path));
      replay_args.insert(replay_args.begin(), {"--threads", std::to_string(threads)});
      return run(replay_args, out, err);
    }

    std::string primary;  // output the manifest sits next to
    if (sub == fit) {
      std::vector<FeatureMap> maps;
      for (const CrowdTrajectory& c : load_crowds(golden)) maps.push_back(extract(c));
      if (maps.empty()) throw InsufficientData("no golden trajectories found");
      text::save_text(out_path, stats_to_text(fit_reference(maps, bin_width)));
      primary = out_path;
    } else if (sub == train) {
      const ReferenceStats stats = load_stats(stats_path);
      const std::vector<CrowdTrajectory> good = load_crowds(golden);
      if (good.empty()) throw InsufficientData("no golden trajectories found");
      std::vector<LabeledCrowd> bad;
      for (CrowdTrajectory& c : load_crowds(degraded_dirs)) bad.push_back({std::move(c), degraded_target});
      if (train->count("--auto-degrade") > 0) {
        const std::vector<DegradeMode> modes = parse_modes(split_list(modes_list.empty() ? "no-avoidance,jitter" : modes_list));
        for (std::size_t i = 0; i < good.size(); ++i) {
          for (std::size_t m = 0; m < modes.size(); ++m) {
            bad.push_back({degrade(good[i], modes[m], split_seed(seed, i, m)), 0.0});
          }
        }
      }
      if (bad.empty()) err << "warning: no degraded examples; all-zero weights fit trivially\n";
      const std::vector<TrainingExample> examples = build_training_set(good, bad);
      if (examples.size() >= 2) {
        std::string pairs;
        std::size_t flagged = 0;
        for (const FeatureCorrelation& c : check_correlations(examples)) {
          if (!c.flagged) continue;
          ++flagged;
          pairs += ' ' + std::string(code_of(c.a)) + '~' + std::string(code_of(c.b)) + '(' + text::format_fixed(c.rho, 2) + ')';
        }
        if (flagged > 0) err << "warning: " << flagged << " feature pairs correlate above 0.8:" << pairs << '\n';
      }
      train_ga.seed = seed;
      train_ga.threads = threads;
      TrainOptions options;
      if (train->count("--init-pretrained") > 0) options.initial.push_back(WeightVector::pretrained());
      const TrainResult result = train_weights(examples, stats, train_ga, options);
      text::save_text(out_path, weights_to_text(result.weights));
      text::save_text(history_path.empty() ? sibling(out_path, ".history.csv") : history_path,
                      history_csv("best_fitness", result.history));
      out << "fitness=" << text::format_fixed(result.fitness, 4) << '\n';
      primary = out_path;
    } else if (sub == score_cmd) {
      const CrowdTrajectory crowd = load_canonical(trajectory_path);
      const ReferenceStats stats = load_stats(stats_path);
      const WeightVector weights = weights_path.empty() ? WeightVector::pretrained() : load_weights(weights_path);
      ScoreOptions options;
      options.window_steps = window_steps;
      options.window_start = window_start;
      const QualityScore q = score(crowd, stats, weights, options);
      primary = breakdown_path.empty() ? sibling(trajectory_path, ".breakdown.csv") : breakdown_path;
      text::save_text(primary, breakdown_csv(q, weights));
      out << "S_QF=" << text::format_fixed(q.total, 4) << '\n';
      out << "quartile=" << to_string(quartile(std::clamp(q.total, 0.0, 1.0))) << '\n';
    } else if (sub == features_cmd) {
      const CrowdTrajectory crowd = load_canonical(trajectory_path);
      FeatureParams params;
      if (!stats_path.empty()) params.fd_curve = load_stats(stats_path).curve;
      const std::string csv = features_csv(extract(crowd, params), crowd);
      if (out_path.empty()) {
        out << csv;
      } else {
        text::save_text(out_path, csv);
        primary = out_path;
      }
    } else if (sub == degrade_cmd) {
      const CrowdTrajectory crowd = load_canonical(trajectory_path);
      save_trajectory_csv(out_path, degrade(crowd, parse_degrade_mode(mode_name), seed, degrade_opts));
      primary = out_path;
    } else if (sub == sim_cmd) {
      scenario.kind = parse_scenario_kind(kind_name);
      scenario.seed = seed;
      const SocialForcesParams params = params_path.empty() ? SocialForcesParams{} : load_params(params_path);
      save_trajectory_csv(out_path, simulate(scenario, params, duration));
      primary = out_path;
    } else if (sub == tune_cmd) {
      const ReferenceStats stats = load_stats(stats_path);
      const WeightVector weights = weights_path.empty() ? WeightVector::pretrained() : load_weights(weights_path);
      TuneConfig config;
      config.mode = tune_mode == "generic" ? TuneMode::kGeneric : TuneMode::kSingleScenario;
      config.duration = duration;
      config.exploration_decay = decay;
      config.ga = tune_ga;
      config.ga.seed = seed;
      config.ga.threads = threads;
      const std::vector<std::string> kinds = split_list(kinds_list.empty() ? "circle" : kinds_list);
      for (std::size_t i = 0; i < kinds.size(); ++i) {
        Scenario s = scenario;
        s.kind = parse_scenario_kind(kinds[i]);
        s.seed = seed + i;
        config.scenarios.push_back(s);
      }
      const TuneResult result = tune(config, stats, weights);
      text::save_text(out_path, params_to_text(result.p_opt));
      text::save_text(history_path.empty() ? sibling(out_path, ".history.csv") : history_path,
                      history_csv("best_score", result.best_score_history));
      const std::string best = best_path.empty() ? sibling(out_path, ".best.csv") : best_path;
      save_trajectory_csv(best, simulate(config.scenarios.front(), result.p_opt, duration));
      if (snapshot_every > 0) {
        for (std::size_t g = 0; g < result.generation_best.size(); ++g) {
          if (g % snapshot_every != 0 && g + 1 != result.generation_best.size()) continue;
          const Scenario s = scenarios_for_generation(config, g).front();
          save_trajectory_csv(sibling(best, ".gen" + std::to_string(g) + ".csv"),
                              simulate(s, decode_params(result.generation_best[g]), duration));
        }
      }
      out << "S_QF=" << text::format_fixed(result.final_score, 4) << '\n';
      primary = out_path;
    }

    if (!manifest_path.empty() || !primary.empty()) {
      const std::string path = manifest_path.empty() ? sibling(primary, ".manifest.txt") : manifest_path;
      text::save_text(path, manifest_to_text(capture(*sub, seed)));
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace crowdqf::cli

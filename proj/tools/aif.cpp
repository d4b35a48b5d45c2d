// Command-line front end: run experiments, calibrate mazes, report planning
// cost, list presets.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aif/config.hpp"
#include "aif/harness.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kIoError = 3;
constexpr int kCalibrationFailure = 4;

fs::path output_root() {
  if (const char* root = std::getenv("AIF_OUTPUT_ROOT"); root && *root) return root;
  return "runs";
}

template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    std::stringstream one(item);
    T v{};
    if (!(one >> v) || !(one >> std::ws).eof()) {
      throw aif::ConfigError(0, what, "cannot parse '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw aif::ConfigError(0, what, "empty list");
  return out;
}

struct RunArgs {
  std::string config;
  std::string preset;
  std::string seeds;
  std::size_t workers = 1;
  bool trace = false;
  bool quiet = false;
};

int cmd_run(const RunArgs& a) {
  aif::ExperimentConfig cfg;
  if (!a.preset.empty()) {
    cfg = aif::parse_config(aif::builtin_preset(a.preset));
  } else {
    cfg = aif::load_config(a.config);
  }
  if (!a.seeds.empty()) cfg.seeds = parse_list<std::uint64_t>(a.seeds, "--seeds");
  if (a.trace) cfg.trace = true;
  cfg.validate();

  const fs::path dir = output_root() / cfg.output_dir;
  std::cout << "experiment: " << cfg.name << "\n"
            << "output directory: " << fs::absolute(dir).string() << "\n"
            << "episodes: " << cfg.episodes << ", seeds: " << cfg.seeds.size()
            << ", workers: " << a.workers << std::endl;

  aif::RunOptions opts;
  opts.workers = a.workers;
  opts.trace = cfg.trace;
  std::mutex io;
  if (!a.quiet) {
    opts.on_episode = [&](std::uint64_t seed, const aif::EpisodeRecord& r) {
      if ((r.episode + 1) % 50 != 0 && r.episode + 1 != cfg.episodes) return;
      std::lock_guard lock(io);
      std::cerr << "seed " << seed << " episode " << r.episode + 1 << "/" << cfg.episodes
                << " steps " << r.steps << "\n";
    };
  }
  const aif::RunResult result = aif::run_experiment(cfg, opts);
  for (const auto& p : aif::emit_metrics(result, dir)) std::cout << "wrote " << p.string() << "\n";
  return kOk;
}

struct CalibrateArgs {
  std::string env;
  std::string config;
  std::string band;
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  double cap_factor = 1000.0;
};

int cmd_calibrate(const CalibrateArgs& a) {
  std::optional<std::array<double, 2>> band;
  std::size_t trials = a.trials;
  double cap = a.cap_factor;
  if (!a.config.empty()) {
    const aif::ExperimentConfig cfg = aif::load_config(a.config);
    band = cfg.calibration_band;
    trials = cfg.calibration_trials;
    cap = cfg.calibration_cap_factor;
  }
  if (!a.band.empty()) {
    const auto v = parse_list<double>(a.band, "--band");
    if (v.size() != 2 || v[0] > v[1]) throw aif::ConfigError(0, "--band", "expected lo,hi");
    band = std::array<double, 2>{v[0], v[1]};
  }
  std::cout << "maze: " << a.env << std::endl;
  aif::GridSpec spec;
  try {
    spec = aif::GridSpec::parse(aif::maze_text(a.env, "."), 1, a.env);
  } catch (const std::invalid_argument& e) {
    throw aif::ConfigError(0, "--env", e.what());
  }
  aif::Rng rng(a.seed);
  const auto c = aif::validate_maze_calibration(spec, rng, trials, cap);
  std::printf("optimal path length: %zu\n", c.optimal);
  std::printf("random-walk mean: %.1f +/- %.1f (stderr, %zu trials, %zu capped at %.0fx optimal)\n",
              c.mean_steps, c.stderr_steps, c.trials, c.capped, cap);
  if (!band) {
    std::printf("band: none given; PASS (solvable)\n");
    return kOk;
  }
  const bool pass = c.mean_steps >= (*band)[0] && c.mean_steps <= (*band)[1];
  std::printf("band: [%.0f, %.0f] %s\n", (*band)[0], (*band)[1], pass ? "PASS" : "FAIL");
  return pass ? kOk : kCalibrationFailure;
}

struct ComplexityArgs {
  std::string depths = "5,25,50,100";
  std::size_t states = 900;
  std::size_t actions = 4;
  std::string env;
  bool no_time = false;
  std::string output;
};

int cmd_complexity(const ComplexityArgs& a) {
  const auto depths = parse_list<std::size_t>(a.depths, "--depths");
  aif::GenerativeModel model = aif::GenerativeModel::fully_observable(a.states, a.actions, 1);
  if (!a.env.empty()) {
    model = aif::learned_maze_model(aif::GridSpec::parse(aif::maze_text(a.env, "."), 1, a.env));
    std::cout << "timing model: " << a.env << " (learned transitions)\n";
  }
  const auto rows = aif::complexity_report(model, depths, !a.no_time);
  const std::string table = aif::complexity_table(rows);
  std::cout << table;
  if (!a.output.empty()) {
    std::ofstream out(a.output);
    if (!out || !(out << table)) throw std::ios_base::failure("cannot write " + a.output);
    std::cout << "wrote " << a.output << "\n";
  }
  return kOk;
}

int cmd_presets_list() {
  for (const auto& [name, text] : aif::builtin_presets()) {
    std::string first(text.substr(0, text.find('\n')));
    if (first.rfind("# ", 0) == 0) first = first.substr(2);
    std::printf("%-28s %s\n", name.c_str(), first.c_str());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabular active-inference agents: planning (DPEFE), counterfactual learning, mixed"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "run an experiment and write metrics");
  auto* cfg_opt = run_cmd->add_option("--config", run.config, "experiment config file");
  auto* preset_opt = run_cmd->add_option("--preset", run.preset, "builtin preset name");
  cfg_opt->excludes(preset_opt);
  run_cmd->add_option("--seeds", run.seeds, "comma-separated seeds (overrides config)");
  run_cmd->add_option("--workers", run.workers, "parallel seed workers")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--trace", run.trace, "write per-step and per-state traces");
  run_cmd->add_flag("--quiet", run.quiet, "no progress output");

  CalibrateArgs cal;
  auto* cal_cmd = app.add_subcommand("calibrate", "random-walk and shortest-path check of a maze");
  cal_cmd->add_option("--env", cal.env, "maze file or builtin:<name>")->required();
  cal_cmd->add_option("--config", cal.config, "take band, trials and cap from a config");
  cal_cmd->add_option("--band", cal.band, "accepted mean range lo,hi");
  cal_cmd->add_option("--trials", cal.trials, "random-walk trials")->check(CLI::PositiveNumber);
  cal_cmd->add_option("--seed", cal.seed, "random seed");
  cal_cmd->add_option("--cap-factor", cal.cap_factor, "walk cap as a multiple of the optimum");

  ComplexityArgs cx;
  auto* cx_cmd = app.add_subcommand("complexity", "planning cost per depth");
  cx_cmd->add_option("--depths", cx.depths, "comma-separated planning depths");
  cx_cmd->add_option("--states", cx.states, "number of states")->check(CLI::PositiveNumber);
  cx_cmd->add_option("--actions", cx.actions, "number of actions")->check(CLI::PositiveNumber);
  cx_cmd->add_option("--env", cx.env, "time on a maze's learned model instead");
  cx_cmd->add_flag("--no-time", cx.no_time, "analytic counts only");
  cx_cmd->add_option("--output", cx.output, "also write the table to this CSV");

  auto* presets_cmd = app.add_subcommand("presets", "builtin experiment presets");
  presets_cmd->require_subcommand(1);
  auto* list_cmd = presets_cmd->add_subcommand("list", "list preset names");
  std::string show_name;
  auto* show_cmd = presets_cmd->add_subcommand("show", "print a preset config");
  show_cmd->add_option("name", show_name)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (run_cmd->parsed()) {
      if (run.config.empty() && run.preset.empty()) {
        std::cerr << "error: run needs --config or --preset\n";
        return kConfigError;
      }
      return cmd_run(run);
    }
    if (cal_cmd->parsed()) return cmd_calibrate(cal);
    if (cx_cmd->parsed()) return cmd_complexity(cx);
    if (list_cmd->parsed()) return cmd_presets_list();
    if (show_cmd->parsed()) {
      std::cout << aif::builtin_preset(show_name);
      return kOk;
    }
  } catch (const aif::UnsolvableMaze& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cal_cmd->parsed() ? kCalibrationFailure : kConfigError;
  } catch (const aif::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  return kOk;
}

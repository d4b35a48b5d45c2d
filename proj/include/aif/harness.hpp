#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aif/agent.hpp"
#include "aif/environments.hpp"

namespace aif {

struct EnvironmentConfig {
  enum class Kind { grid, cartpole };
  Kind kind = Kind::grid;
  std::string source;  // maze reference ("builtin:hard" or a path); empty for cart-pole
  GridSpec grid;
  CartPoleSpec cartpole;

  std::unique_ptr<Environment> make() const;
};

struct PhaseConfig {
  std::size_t episode = 0;
  EnvironmentConfig env;
};

struct ExperimentConfig {
  std::string name;
  std::vector<PhaseConfig> phases;  // phases[0] starts at episode 0
  AgentConfig agent;
  std::size_t episodes = 1;
  std::vector<std::uint64_t> seeds;
  std::string output_dir;
  bool trace = false;
  // Wall-clock timing makes output nondeterministic; off by default.
  bool record_wall_time = false;
  // Accepted random-walk mean range for `calibrate`; unset means report only.
  std::optional<std::array<double, 2>> calibration_band;
  std::size_t calibration_trials = 200;
  double calibration_cap_factor = 1000.0;

  void validate() const;
  MutationSchedule schedule() const;
};

struct EpisodeRecord {
  std::uint64_t seed = 0;
  std::size_t episode = 0;
  std::size_t steps = 0;
  bool goal = false;
  double gamma_mean = 0.0;
  double gamma_final = 0.0;
  double beta_mean = 0.0;      // over states visited this episode, at episode end
  double beta_all_mean = 0.0;  // over every state, at episode end
  std::uint64_t plan_ops = 0;
  double wall_ms = 0.0;
};

struct StepTrace {
  std::size_t episode;
  std::size_t t;
  std::size_t state;
  std::size_t action;
  double gamma;
  double beta;
};

struct SeedRun {
  std::uint64_t seed = 0;
  std::vector<EpisodeRecord> episodes;
  std::vector<StepTrace> steps;                  // when tracing
  std::vector<std::vector<double>> beta_states;  // per episode end, when tracing
};

struct RunResult {
  std::string name;
  std::vector<SeedRun> runs;  // in config seed order
};

struct RunOptions {
  std::size_t workers = 1;
  bool trace = false;
  // Called after each finished episode (from worker threads).
  std::function<void(std::uint64_t seed, const EpisodeRecord&)> on_episode;
};

// One seed: fresh agent, episode loop honoring the mutation schedule. Learned
// tables persist across mutation; only the preference follows the new goal.
SeedRun run_seed(const ExperimentConfig& config, std::uint64_t seed, bool trace,
                 bool parallel_planner,
                 const std::function<void(std::uint64_t, const EpisodeRecord&)>& on_episode = {});

RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

inline constexpr const char* kEpisodeCsvHeader =
    "seed,episode,steps,goal,gamma_mean,gamma_final,beta_mean,plan_ops,wall_ms";

std::string episodes_csv(const RunResult& result);
std::string summary_json(const RunResult& result);

// Writes episodes.csv, summary.json and (when traced) per-seed traces into
// dir. Returns the written paths. Throws std::ios_base::failure on I/O errors.
std::vector<std::filesystem::path> emit_metrics(const RunResult& result,
                                                const std::filesystem::path& dir);

struct Quantiles {
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
};
// Linear-interpolated quartiles; throws on empty input.
Quantiles quantiles(std::vector<double> values);

// Per-episode median of a field across seeds.
std::vector<double> median_curve(const RunResult& result,
                                 const std::function<double(const EpisodeRecord&)>& field);

struct ComplexityRow {
  std::size_t depth = 0;
  double enumeration = 0.0;  // |U|^N
  double tree_search = 0.0;  // (|U||O|)^N
  bool tree_overflow = false;
  std::uint64_t dpefe = 0;
  std::uint64_t cl = 0;
  double dpefe_ms = 0.0;  // measured, 0 when not timed
};

// Analytic counts per depth for the model's dimensions (|O| = |S|), plus the
// measured evaluate_efe wall time on that model when timed (best of repeats).
std::vector<ComplexityRow> complexity_report(const GenerativeModel& model,
                                             const std::vector<std::size_t>& depths,
                                             bool timed = true, std::size_t repeats = 5);
// Fully observable model whose transitions have been learned from one visit
// of every (cell, action) pair of the maze.
GenerativeModel learned_maze_model(const GridSpec& spec);

std::string complexity_table(const std::vector<ComplexityRow>& rows);

}  // namespace aif

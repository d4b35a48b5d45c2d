#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aif/categorical.hpp"
#include "aif/rng.hpp"

namespace aif {

// Thrown when a maze has no start-to-goal path.
class UnsolvableMaze : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct StepResult {
  std::size_t state = 0;
  bool goal_reached = false;
  bool failure = false;
  bool horizon_hit = false;
  bool done() const { return goal_reached || failure || horizon_hit; }
};

// ---------------------------------------------------------------- grid maze

enum GridAction : std::size_t { kLeft = 0, kRight = 1, kUp = 2, kDown = 3 };
inline constexpr std::size_t kGridActions = 4;

struct GridSpec {
  std::string name;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<bool> walls;  // row-major
  std::size_t start = 0;
  std::size_t goal = 0;
  std::size_t step_limit = 1;

  std::size_t num_states() const { return width * height; }
  std::size_t index(std::size_t row, std::size_t col) const { return row * width + col; }
  bool is_wall(std::size_t state) const { return walls.at(state); }

  // Parses the `#.SG` text format. Throws std::invalid_argument on malformed
  // text and UnsolvableMaze when the goal cannot be reached.
  static GridSpec parse(std::string_view text, std::size_t step_limit, std::string name = "");
  static GridSpec load(const std::filesystem::path& path, std::size_t step_limit);
};

// Breadth-first shortest path length from start to goal.
std::optional<std::size_t> shortest_path_length(const GridSpec& spec);
std::vector<std::size_t> shortest_path_actions(const GridSpec& spec);

std::size_t grid_reset(const GridSpec& spec);
// Pure transition; steps_taken is the count before this step and drives the
// horizon event.
StepResult grid_step(const GridSpec& spec, std::size_t state, std::size_t action,
                     std::size_t steps_taken = 0);

struct MazeCalibration {
  double mean_steps = 0.0;
  double stderr_steps = 0.0;
  std::size_t optimal = 0;
  std::size_t trials = 0;
  std::size_t capped = 0;
};

// Monte-Carlo random-walk episode length (capped at cap_factor * optimal)
// plus the exact shortest path.
MazeCalibration validate_maze_calibration(const GridSpec& spec, Rng& rng, std::size_t trials,
                                          double cap_factor = 1000.0);

// ---------------------------------------------------------------- cart-pole

inline constexpr double kDegree = 3.14159265358979323846 / 180.0;

struct CartPoleSpec {
  double gravity = 9.8;
  double cart_mass = 1.0;
  double pole_mass = 0.1;
  double half_length = 0.5;
  double force = 10.0;
  double dt = 0.02;
  double angle_threshold = 12.0 * kDegree;
  double position_threshold = 2.4;
  std::array<std::size_t, 4> bins{6, 6, 12, 12};
  std::array<double, 4> clip{2.4, 3.0, 12.0 * kDegree, 3.5};
  std::size_t max_steps = 500;

  void validate() const;
  // Same physics and discretization, thresholds halved.
  CartPoleSpec mutated() const;
  std::size_t num_bins() const { return bins[0] * bins[1] * bins[2] * bins[3]; }
  // Binned states plus one terminal failure state.
  std::size_t num_states() const { return num_bins() + 1; }
  std::size_t failure_state() const { return num_bins(); }
};

struct CartPoleState {
  double x = 0.0;
  double x_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;
};

enum CartPoleAction : std::size_t { kPushLeft = 0, kPushRight = 1 };

std::size_t discretize(const CartPoleSpec& spec, const CartPoleState& s);
CartPoleState cartpole_reset(const CartPoleSpec& spec, Rng& rng);

struct CartPoleStep {
  CartPoleState next;
  StepResult result;
};
CartPoleStep cartpole_step(const CartPoleSpec& spec, const CartPoleState& s, std::size_t action,
                           std::size_t steps_taken = 0);

// ---------------------------------------------------------------- interface

class Environment {
 public:
  virtual ~Environment() = default;
  virtual std::size_t num_states() const = 0;
  virtual std::size_t num_actions() const = 0;
  virtual std::size_t step_limit() const = 0;
  virtual Categorical preference() const = 0;
  // Survival tasks count reaching the step limit as success.
  virtual bool survival_task() const = 0;
  virtual std::size_t reset(Rng& rng) = 0;
  virtual StepResult step(std::size_t action) = 0;
  // Fresh instance with the same spec.
  virtual std::unique_ptr<Environment> clone() const = 0;
};

class GridWorld final : public Environment {
 public:
  explicit GridWorld(GridSpec spec) : spec_(std::move(spec)) {}
  const GridSpec& spec() const { return spec_; }
  std::size_t num_states() const override { return spec_.num_states(); }
  std::size_t num_actions() const override { return kGridActions; }
  std::size_t step_limit() const override { return spec_.step_limit; }
  Categorical preference() const override;
  bool survival_task() const override { return false; }
  std::size_t reset(Rng& rng) override;
  StepResult step(std::size_t action) override;
  std::unique_ptr<Environment> clone() const override;

 private:
  GridSpec spec_;
  std::size_t state_ = 0;
  std::size_t t_ = 0;
};

class CartPole final : public Environment {
 public:
  explicit CartPole(CartPoleSpec spec);
  const CartPoleSpec& spec() const { return spec_; }
  std::size_t num_states() const override { return spec_.num_states(); }
  std::size_t num_actions() const override { return 2; }
  std::size_t step_limit() const override { return spec_.max_steps; }
  Categorical preference() const override;
  bool survival_task() const override { return true; }
  std::size_t reset(Rng& rng) override;
  StepResult step(std::size_t action) override;
  std::unique_ptr<Environment> clone() const override;

 private:
  CartPoleSpec spec_;
  CartPoleState state_;
  std::size_t t_ = 0;
};

// Ordered (episode, environment) pairs; the first entry is at episode 0.
class MutationSchedule {
 public:
  struct Entry {
    std::size_t episode;
    std::shared_ptr<const Environment> prototype;
  };
  void add(std::size_t episode, std::shared_ptr<const Environment> env);
  void validate() const;
  const std::vector<Entry>& entries() const { return entries_; }
  // Index of the entry active at an episode.
  std::size_t active(std::size_t episode) const;

 private:
  std::vector<Entry> entries_;
};

}  // namespace aif

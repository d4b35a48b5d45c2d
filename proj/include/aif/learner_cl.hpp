#pragma once

#include <cstddef>
#include <vector>

#include "aif/categorical.hpp"

namespace aif {

inline constexpr double kClFloor = 1e-6;
inline constexpr double kRiskReset = 0.9;

struct LearnerConfig {
  double cl_floor = kClFloor;
  double initial_value = 1.0;
  // Multiply the time-averaged update by the episode length (literal form).
  // Switching it off applies the bare time average.
  bool scale_by_length = true;
};

enum class RiskEvent { step, goal_reached, risk_event, episode_start };

// Counterfactual-learning state: the state-action mapping, the risk trace and
// the buffer of steps taken in the current episode.
class ClState {
 public:
  struct BufferedStep {
    std::size_t state;
    std::size_t action;
    double gamma;
  };

  ClState() = default;
  // t_goal_estimate starts at the episode horizon.
  ClState(std::size_t states, std::size_t actions, std::size_t horizon, LearnerConfig config = {});

  std::size_t states() const { return states_; }
  std::size_t actions() const { return actions_; }
  double value(std::size_t action, std::size_t state) const { return cl_[state * actions_ + action]; }
  double gamma() const { return gamma_; }
  std::size_t t_goal_estimate() const { return t_goal_; }
  const std::vector<BufferedStep>& buffer() const { return buffer_; }
  const LearnerConfig& config() const { return config_; }

  // Normalized column: p(u) = cl[u,s] / sum_u cl[u,s].
  Categorical policy(std::size_t state) const;

  // Appends (state, action, current gamma); call before the step's gamma update.
  void record_step(std::size_t state, std::size_t action);

  // episode_start / risk_event reset gamma to 0.9; goal_reached stores t as the
  // goal-time estimate; step adds -1/(t_goal - t) for t != t_goal (a decay
  // before the estimate, growth after it), clamped to [0,1].
  void update_gamma(RiskEvent event, std::size_t t);

  // cl[u,s] += t * mean_k (1 - 2 gamma_k) [s_k = s, u_k = u], floored, then
  // clears the buffer. episode_length is t.
  void apply_update(std::size_t episode_length);

 private:
  std::size_t states_ = 0;
  std::size_t actions_ = 0;
  LearnerConfig config_;
  std::vector<double> cl_;
  double gamma_ = kRiskReset;
  std::size_t t_goal_ = 1;
  std::vector<BufferedStep> buffer_;
};

}  // namespace aif

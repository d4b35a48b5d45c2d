#include "aif/learner_cl.hpp"

#include <algorithm>
#include <stdexcept>

namespace aif {

ClState::ClState(std::size_t states, std::size_t actions, std::size_t horizon,
                 LearnerConfig config)
    : states_(states),
      actions_(actions),
      config_(config),
      cl_(states * actions, std::max(config.initial_value, config.cl_floor)),
      t_goal_(std::max<std::size_t>(horizon, 1)) {
  if (states == 0 || actions == 0) throw std::invalid_argument("empty CL table");
  if (!(config.cl_floor > 0.0)) throw std::invalid_argument("cl_floor must be positive");
}

Categorical ClState::policy(std::size_t state) const {
  if (state >= states_) throw std::out_of_range("state out of range");
  const auto first = cl_.begin() + static_cast<std::ptrdiff_t>(state * actions_);
  return Categorical::from_weights(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(actions_)));
}

void ClState::record_step(std::size_t state, std::size_t action) {
  if (state >= states_ || action >= actions_) throw std::out_of_range("step out of range");
  buffer_.push_back({state, action, gamma_});
}

void ClState::update_gamma(RiskEvent event, std::size_t t) {
  switch (event) {
    case RiskEvent::episode_start:
    case RiskEvent::risk_event:
      gamma_ = kRiskReset;
      break;
    case RiskEvent::goal_reached:
      t_goal_ = std::max<std::size_t>(t, 1);
      break;
    case RiskEvent::step:
      // Past the goal-time estimate 1/(T_goal - t) changes sign and risk
      // grows again; t == T_goal is the singular point and leaves gamma alone.
      if (t < t_goal_) {
        gamma_ -= 1.0 / static_cast<double>(t_goal_ - t);
      } else if (t > t_goal_) {
        gamma_ += 1.0 / static_cast<double>(t - t_goal_);
      }
      gamma_ = std::clamp(gamma_, 0.0, 1.0);
      break;
  }
}

void ClState::apply_update(std::size_t episode_length) {
  if (buffer_.empty()) return;
  const double n = static_cast<double>(buffer_.size());
  const double scale = config_.scale_by_length ? static_cast<double>(episode_length) / n : 1.0 / n;
  // Accumulate first so the floor applies once to the episode's net change.
  std::vector<double> delta(cl_.size(), 0.0);
  std::vector<bool> seen(cl_.size(), false);
  std::vector<std::size_t> touched;
  for (const auto& step : buffer_) {
    const std::size_t k = step.state * actions_ + step.action;
    if (!seen[k]) {
      seen[k] = true;
      touched.push_back(k);
    }
    delta[k] += (1.0 - 2.0 * step.gamma);
  }
  for (std::size_t k : touched) cl_[k] = std::max(config_.cl_floor, cl_[k] + scale * delta[k]);
  buffer_.clear();
}

}  // namespace aif

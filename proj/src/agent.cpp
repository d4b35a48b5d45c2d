#include "aif/agent.hpp"

#include <stdexcept>

namespace aif {

AgentConfig make_agent_config(AgentKind kind, PlannerConfig planner, MixerConfig mixer,
                              LearnerConfig learner) {
  AgentConfig c;
  c.kind = kind;
  c.planner = planner;
  c.mixer = mixer;
  c.learner = learner;
  if (kind == AgentKind::dpefe) {
    c.mixer.beta_prior = 1.0;
    c.mixer.frozen = true;
  } else if (kind == AgentKind::cl) {
    c.mixer.beta_prior = 0.0;
    c.mixer.frozen = true;
  }
  return c;
}

Agent::Agent(AgentConfig config, std::size_t states, std::size_t actions, std::size_t horizon,
             Categorical preference, std::uint64_t seed)
    : config_(config),
      model_(GenerativeModel::fully_observable(states, actions, horizon, config.transition_prior)),
      cl_(states, actions, horizon, config.learner),
      mix_(states, config.mixer),
      rng_(seed) {
  if (plans()) config_.planner.validate();
  model_.set_preference(std::move(preference));
}

void Agent::set_preference(Categorical preference) { model_.set_preference(std::move(preference)); }

void Agent::begin_episode() {
  if (plans()) {
    efe_ = evaluate_efe(model_, config_.planner);
    last_plan_ops_ = planning_cost(model_.num_states(), model_.num_actions(),
                                   config_.planner.plan_depth, mean_successors(model_));
  } else {
    last_plan_ops_ = 0;
  }
  ++refreshes_;
  transitions_.clear();
  belief_.reset();
  t_ = 0;
  cl_.update_gamma(RiskEvent::episode_start, 0);
}

std::size_t Agent::act(std::size_t obs) {
  const std::size_t m = model_.num_actions();
  AgentStep step;
  std::size_t s = 0;
  if (model_.identity_likelihood()) {
    // The posterior is one-hot at the observation whatever the prior, so the
    // expected EFE is that state's row.
    if (obs >= model_.num_states()) throw std::out_of_range("observation out of range");
    s = obs;
    if (plans()) {
      const auto row = efe_.row(1, s);
      std::vector<double> neg(row.size());
      for (std::size_t u = 0; u < m; ++u) neg[u] = -row[u];
      step.p_dpefe = softmax(neg, config_.planner.action_precision);
    }
  } else {
    const Categorical prior = belief_ ? predict_next(*belief_, last_.action, model_)
                                      : model_.state_prior();
    belief_ = infer_state(prior, obs, model_, t_);
    s = belief_->q_s.argmax();
    if (plans()) step.p_dpefe = dpefe_policy(efe_, belief_->q_s, config_.planner);
  }
  if (!plans()) step.p_dpefe = Categorical::uniform(m);
  step.state = s;
  step.p_cl = cl_.policy(s);

  const bool mixing = config_.kind == AgentKind::mixed;
  const bool update_first = config_.mixer.timing == BetaTiming::update_then_act;
  if (mixing && update_first) mix_.update(s, step.p_cl, step.p_dpefe);

  step.beta_used = mix_.beta(s);
  switch (config_.kind) {
    case AgentKind::dpefe:
      step.p_mm = step.p_dpefe;
      break;
    case AgentKind::cl:
      step.p_mm = step.p_cl;
      break;
    case AgentKind::mixed:
      step.p_mm = mixed_policy(step.beta_used, step.p_cl, step.p_dpefe);
      break;
  }
  step.action = sample(step.p_mm, rng_);
  step.gamma_used = cl_.gamma();
  cl_.record_step(s, step.action);

  if (mixing && !update_first) mix_.update(s, step.p_cl, step.p_dpefe);
  last_ = std::move(step);
  return last_.action;
}

void Agent::feedback(std::size_t next_obs, bool goal_reached, bool risk_event) {
  transitions_.push_back({last_.state, last_.action, next_obs});
  if (goal_reached) {
    cl_.update_gamma(RiskEvent::goal_reached, t_ + 1);
  } else if (risk_event) {
    cl_.update_gamma(RiskEvent::risk_event, t_);
  } else {
    cl_.update_gamma(RiskEvent::step, t_);
  }
  ++t_;
}

void Agent::end_episode(Outcome outcome) {
  cl_.apply_update(t_);
  for (const auto& tr : transitions_) {
    learn_transition(tr.state, tr.action, tr.next, model_, config_.learn_rate);
  }
  if (config_.absorbing_terminals && outcome != Outcome::horizon && !transitions_.empty()) {
    const std::size_t terminal = transitions_.back().next;
    for (std::size_t u = 0; u < model_.num_actions(); ++u) {
      learn_transition(terminal, u, terminal, model_, config_.learn_rate);
    }
  }
  transitions_.clear();
  belief_.reset();
}

}  // namespace aif

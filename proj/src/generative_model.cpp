#include "aif/generative_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aif {

GenerativeModel GenerativeModel::fully_observable(std::size_t states, std::size_t actions,
                                                  std::size_t horizon,
                                                  double transition_prior) {
  if (states == 0 || actions == 0 || horizon == 0) {
    throw std::invalid_argument("model dimensions must be positive");
  }
  GenerativeModel m;
  m.states_ = states;
  m.obs_ = states;
  m.actions_ = actions;
  m.horizon_ = horizon;
  m.identity_ = true;
  m.likelihood_.reserve(states);
  for (std::size_t s = 0; s < states; ++s) m.likelihood_.push_back(SparseColumn::one_hot(states, s));
  m.b_counts_ = DirichletCounts(states, states * actions, transition_prior);
  m.a_counts_ = DirichletCounts(states, states, 1.0);
  m.transitions_.assign(states * actions, m.b_counts_.normalized(0));
  m.preference_ = Categorical::uniform(states);
  m.state_prior_ = Categorical::uniform(states);
  m.action_prior_ = Categorical::uniform(actions);
  return m;
}

GenerativeModel GenerativeModel::with_likelihood(std::vector<Categorical> likelihood,
                                                 std::size_t actions, std::size_t horizon,
                                                 double transition_prior) {
  if (likelihood.empty()) throw std::invalid_argument("empty likelihood");
  const std::size_t states = likelihood.size();
  const std::size_t obs = likelihood.front().size();
  GenerativeModel m = fully_observable(states, actions, horizon, transition_prior);
  m.obs_ = obs;
  m.identity_ = false;
  m.likelihood_.clear();
  for (const auto& col : likelihood) {
    if (col.size() != obs) throw std::invalid_argument("ragged likelihood");
    m.likelihood_.push_back(SparseColumn::from_dense(col));
  }
  m.a_counts_ = DirichletCounts(obs, states, 1.0);
  m.preference_ = Categorical::uniform(obs);
  return m;
}

void GenerativeModel::set_preference(Categorical c) {
  if (c.size() != obs_) throw std::invalid_argument("preference size mismatch");
  preference_ = std::move(c);
}

void GenerativeModel::set_state_prior(Categorical d) {
  if (d.size() != states_) throw std::invalid_argument("state prior size mismatch");
  state_prior_ = std::move(d);
}

void GenerativeModel::set_action_prior(Categorical e) {
  if (e.size() != actions_) throw std::invalid_argument("action prior size mismatch");
  action_prior_ = std::move(e);
}

void GenerativeModel::set_transition(std::size_t state, std::size_t action,
                                     const Categorical& next) {
  if (state >= states_ || action >= actions_) throw std::out_of_range("transition index");
  if (next.size() != states_) throw std::invalid_argument("transition size mismatch");
  transitions_[state * actions_ + action] = SparseColumn::from_dense(next);
}

void GenerativeModel::add_transition_count(std::size_t state, std::size_t action,
                                           std::size_t next, double w) {
  if (state >= states_ || action >= actions_ || next >= states_) {
    throw std::out_of_range("transition index");
  }
  const std::size_t col = state * actions_ + action;
  b_counts_.add(col, next, w);
  transitions_[col] = b_counts_.normalized(col);
}

void GenerativeModel::add_likelihood_count(std::size_t state, std::size_t obs, double w) {
  if (state >= states_ || obs >= obs_) throw std::out_of_range("likelihood index");
  a_counts_.add(state, obs, w);
  likelihood_[state] = a_counts_.normalized(state);
  identity_ = false;
}

Categorical goal_preference(std::size_t num_obs, std::size_t goal, double spread) {
  if (goal >= num_obs) throw std::out_of_range("goal observation out of range");
  if (num_obs == 1) return Categorical::one_hot(1, 0);
  if (!(spread > 0.0 && spread < 1.0)) throw std::invalid_argument("spread must be in (0,1)");
  std::vector<double> c(num_obs, spread / static_cast<double>(num_obs - 1));
  c[goal] = 1.0 - spread;
  return Categorical::from_weights(std::move(c));
}

Categorical avoidance_preference(std::size_t num_obs, std::span<const std::size_t> avoided,
                                 double spread) {
  if (!(spread > 0.0 && spread < 1.0)) throw std::invalid_argument("spread must be in (0,1)");
  std::vector<double> w(num_obs, 1.0);
  for (std::size_t o : avoided) {
    if (o >= num_obs) throw std::out_of_range("avoided observation out of range");
    w[o] = spread;
  }
  return Categorical::from_weights(std::move(w));
}

BeliefState infer_state(const Categorical& prior, std::size_t obs, const GenerativeModel& model,
                        std::size_t time_index) {
  if (obs >= model.num_obs()) throw std::out_of_range("observation out of range");
  if (prior.size() != model.num_states()) throw std::invalid_argument("prior size mismatch");
  const std::size_t n = model.num_states();
  std::vector<double> w(n, 0.0);
  if (model.identity_likelihood()) {
    if (prior[obs] <= 0.0) throw std::domain_error("inconsistent observation");
    w[obs] = 1.0;
    return {Categorical::from_weights(std::move(w)), time_index};
  }
  std::vector<double> logits(n, -INFINITY);
  double peak = -INFINITY;
  for (std::size_t s = 0; s < n; ++s) {
    const double like = model.likelihood(s).prob(obs);
    if (prior[s] <= 0.0 || like <= 0.0) continue;
    logits[s] = std::log(prior[s]) + std::log(like);
    peak = std::max(peak, logits[s]);
  }
  if (!std::isfinite(peak)) throw std::domain_error("inconsistent observation");
  for (std::size_t s = 0; s < n; ++s) {
    if (std::isfinite(logits[s])) w[s] = std::exp(logits[s] - peak);
  }
  return {Categorical::from_weights(std::move(w)), time_index};
}

Categorical predict_next(const BeliefState& belief, std::size_t action,
                         const GenerativeModel& model) {
  if (action >= model.num_actions()) throw std::out_of_range("action out of range");
  const std::size_t n = model.num_states();
  std::vector<double> next(n, 0.0);
  double background = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    const double q = belief.q_s[s];
    if (q <= 0.0) continue;
    const SparseColumn& col = model.transition(s, action);
    background += q * col.background();
    for (const Peak& p : col.peaks()) next[p.index] += q * p.mass;
  }
  if (background > 0.0) {
    for (double& x : next) x += background;
  }
  return Categorical::from_weights(std::move(next));
}

void learn_transition(std::size_t prev_state, std::size_t action, std::size_t next_state,
                      GenerativeModel& model, double learn_rate) {
  model.add_transition_count(prev_state, action, next_state, learn_rate);
}

void learn_likelihood(std::size_t state, std::size_t obs, GenerativeModel& model,
                      double learn_rate) {
  if (!model.likelihood_learning()) return;
  model.add_likelihood_count(state, obs, learn_rate);
}

namespace {

double belief_term(const Categorical& q, std::size_t obs, const Categorical& predicted,
                   const GenerativeModel& model) {
  double f = 0.0;
  for (std::size_t s = 0; s < q.size(); ++s) {
    if (q[s] <= 0.0) continue;
    const double like = model.likelihood(s).prob(obs);
    f += q[s] * (std::log(q[s]) - safe_log(like) - safe_log(predicted[s]));
  }
  return f;
}

}  // namespace

double variational_free_energy(std::span<const TrajectoryStep> trajectory,
                               const GenerativeModel& model) {
  if (trajectory.empty()) throw std::invalid_argument("empty trajectory");
  double f = belief_term(trajectory[0].belief, trajectory[0].obs, model.state_prior(), model);
  for (std::size_t t = 1; t < trajectory.size(); ++t) {
    const auto& prev = trajectory[t - 1];
    const Categorical predicted = predict_next({prev.belief, t - 1}, prev.action, model);
    f += belief_term(trajectory[t].belief, trajectory[t].obs, predicted, model);
  }
  return f;
}

FreeEnergyDiagnostics free_energy_diagnostics(std::span<const TrajectoryStep> trajectory,
                                              const GenerativeModel& model) {
  FreeEnergyDiagnostics d;
  d.state_term = variational_free_energy(trajectory, model);
  for (const auto& step : trajectory) d.action_term -= safe_log(model.action_prior()[step.action]);
  d.parameter_term = model.transition_counts().kl_from_prior();
  if (model.likelihood_learning()) d.parameter_term += model.likelihood_counts().kl_from_prior();
  return d;
}

}  // namespace aif

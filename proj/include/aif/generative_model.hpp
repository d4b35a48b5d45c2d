#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "aif/categorical.hpp"
#include "aif/dirichlet.hpp"

namespace aif {

// Spread of preference mass away from the preferred outcome(s).
inline constexpr double kPreferenceSpread = 1e-3;

// Discrete-time POMDP generative model. Likelihood columns A[.|s] are over
// observations, transition columns B[.|s,u] over next states. B is always
// the normalization of the transition counts unless overridden column-wise.
class GenerativeModel {
 public:
  GenerativeModel() = default;

  // O = S with identity likelihood. Transition counts start flat at
  // transition_prior; preferences, state prior and action prior uniform.
  static GenerativeModel fully_observable(std::size_t states, std::size_t actions,
                                          std::size_t horizon, double transition_prior = 1.0);
  // Explicit likelihood, one column per state.
  static GenerativeModel with_likelihood(std::vector<Categorical> likelihood,
                                         std::size_t actions, std::size_t horizon,
                                         double transition_prior = 1.0);

  std::size_t num_states() const { return states_; }
  std::size_t num_obs() const { return obs_; }
  std::size_t num_actions() const { return actions_; }
  std::size_t horizon() const { return horizon_; }
  bool identity_likelihood() const { return identity_; }

  const SparseColumn& likelihood(std::size_t state) const { return likelihood_[state]; }
  const SparseColumn& transition(std::size_t state, std::size_t action) const {
    return transitions_[state * actions_ + action];
  }
  const Categorical& preference() const { return preference_; }
  const Categorical& state_prior() const { return state_prior_; }
  const Categorical& action_prior() const { return action_prior_; }
  const DirichletCounts& transition_counts() const { return b_counts_; }
  const DirichletCounts& likelihood_counts() const { return a_counts_; }

  void set_preference(Categorical c);
  void set_state_prior(Categorical d);
  void set_action_prior(Categorical e);
  // Overrides one transition column; the next learning update on the same
  // (state, action) pair renormalizes it from counts again.
  void set_transition(std::size_t state, std::size_t action, const Categorical& next);

  bool likelihood_learning() const { return learn_likelihood_; }
  void set_likelihood_learning(bool on) { learn_likelihood_ = on; }

  // Count-level mutation used by the learning operations below.
  void add_transition_count(std::size_t state, std::size_t action, std::size_t next, double w);
  void add_likelihood_count(std::size_t state, std::size_t obs, double w);

  friend void to_json(nlohmann::json& j, const GenerativeModel& m);
  friend void from_json(const nlohmann::json& j, GenerativeModel& m);

 private:
  std::size_t states_ = 0;
  std::size_t obs_ = 0;
  std::size_t actions_ = 0;
  std::size_t horizon_ = 1;
  bool identity_ = true;
  bool learn_likelihood_ = false;
  std::vector<SparseColumn> likelihood_;
  std::vector<SparseColumn> transitions_;
  Categorical preference_;
  Categorical state_prior_;
  Categorical action_prior_;
  DirichletCounts b_counts_;
  DirichletCounts a_counts_;
};

struct BeliefState {
  Categorical q_s;
  std::size_t time_index = 0;
};

// One-hot preference sharpened to (1 - spread) at the goal observation, the
// remaining mass spread uniformly over all other observations.
Categorical goal_preference(std::size_t num_obs, std::size_t goal,
                            double spread = kPreferenceSpread);

// Preference for avoiding a set of observations: every avoided observation
// gets `spread` times the mass of a preferred one.
Categorical avoidance_preference(std::size_t num_obs, std::span<const std::size_t> avoided,
                                 double spread = kPreferenceSpread);

// Posterior over states: softmax(ln prior + ln A[obs, .]). States with zero
// prior or zero likelihood are excluded exactly, so an identity likelihood
// yields a literal one-hot. Throws std::domain_error("inconsistent
// observation") when no state can explain obs.
BeliefState infer_state(const Categorical& prior, std::size_t obs, const GenerativeModel& model,
                        std::size_t time_index = 0);

// B[.|., action] * q_s.
Categorical predict_next(const BeliefState& belief, std::size_t action,
                         const GenerativeModel& model);

// Adds learn_rate to the Dirichlet count of (prev_state, action) -> next_state
// and renormalizes only that transition column.
void learn_transition(std::size_t prev_state, std::size_t action, std::size_t next_state,
                      GenerativeModel& model, double learn_rate = 1.0);

// Likelihood learning; a no-op unless likelihood learning is switched on.
void learn_likelihood(std::size_t state, std::size_t obs, GenerativeModel& model,
                      double learn_rate = 1.0);

struct TrajectoryStep {
  Categorical belief;
  std::size_t obs = 0;
  std::size_t action = 0;  // action taken after this observation
};

// Sum over steps of q . (ln q - ln A[o, .] - ln B q_prev), where the first
// step uses ln D in place of the transition prediction. In nats.
double variational_free_energy(std::span<const TrajectoryStep> trajectory,
                               const GenerativeModel& model);

struct FreeEnergyDiagnostics {
  double state_term = 0.0;      // variational_free_energy
  double action_term = 0.0;     // sum of -ln E(u) over taken actions
  double parameter_term = 0.0;  // KL of learned Dirichlet counts from their prior
  bool action_prior_is_e = true;
};

FreeEnergyDiagnostics free_energy_diagnostics(std::span<const TrajectoryStep> trajectory,
                                              const GenerativeModel& model);

}  // namespace aif

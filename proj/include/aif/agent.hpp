#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "aif/categorical.hpp"
#include "aif/generative_model.hpp"
#include "aif/learner_cl.hpp"
#include "aif/mixer.hpp"
#include "aif/planner.hpp"
#include "aif/rng.hpp"

namespace aif {

enum class AgentKind { dpefe, cl, mixed };

struct AgentConfig {
  AgentKind kind = AgentKind::mixed;
  PlannerConfig planner;
  MixerConfig mixer;
  LearnerConfig learner;
  // Flat Dirichlet concentration of every transition entry before learning.
  double transition_prior = kDirichletFloor;
  double learn_rate = 1.0;
  // Record terminal states (goal or failure) as absorbing in the learned
  // transitions at episode end.
  bool absorbing_terminals = true;
};

// Degenerate configurations: a pure planner is the mixed agent with beta held
// at 1, a pure CL agent the mixed agent with beta held at 0.
AgentConfig make_agent_config(AgentKind kind, PlannerConfig planner = {},
                              MixerConfig mixer = {}, LearnerConfig learner = {});

struct AgentStep {
  std::size_t state = 0;
  std::size_t action = 0;
  Categorical p_dpefe;
  Categorical p_cl;
  Categorical p_mm;
  double beta_used = 0.0;
  double gamma_used = 0.0;
};

enum class Outcome { goal, failure, horizon };

// Perceive -> plan -> mix -> act -> learn loop for one agent.
class Agent {
 public:
  Agent(AgentConfig config, std::size_t states, std::size_t actions, std::size_t horizon,
        Categorical preference, std::uint64_t seed);

  const AgentConfig& config() const { return config_; }
  bool plans() const { return config_.kind != AgentKind::cl; }

  // Replaces the preference over observations (e.g. a moved goal).
  void set_preference(Categorical preference);

  // Refreshes the EFE table from the current learned transitions (planning
  // kinds only) and resets the risk trace.
  void begin_episode();

  // One decision from an observation; records an AgentStep.
  std::size_t act(std::size_t obs);

  // Environment response to the last action.
  void feedback(std::size_t next_obs, bool goal_reached, bool risk_event);

  // CL batch update, transition learning from the episode, buffer reset.
  void end_episode(Outcome outcome);

  const GenerativeModel& model() const { return model_; }
  const ClState& learner() const { return cl_; }
  const MixState& mixer() const { return mix_; }
  const EfeTable& efe() const { return efe_; }
  const AgentStep& last_step() const { return last_; }
  std::size_t steps_this_episode() const { return t_; }
  std::size_t efe_refreshes() const { return refreshes_; }
  std::uint64_t last_plan_ops() const { return last_plan_ops_; }

 private:
  struct Transition {
    std::size_t state;
    std::size_t action;
    std::size_t next;
  };

  AgentConfig config_;
  GenerativeModel model_;
  ClState cl_;
  MixState mix_;
  EfeTable efe_;
  Rng rng_;
  std::optional<BeliefState> belief_;
  AgentStep last_;
  std::vector<Transition> transitions_;
  std::size_t t_ = 0;
  std::size_t refreshes_ = 0;
  std::uint64_t last_plan_ops_ = 0;
};

}  // namespace aif

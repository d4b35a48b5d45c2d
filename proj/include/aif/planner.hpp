#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "aif/categorical.hpp"
#include "aif/generative_model.hpp"

namespace aif {

// How the value of a successor state aggregates over its next actions.
enum class Continuation {
  softmax,   // expectation under sigma(-g) of the next stage
  hard_min,  // min over next actions; used to compare against exhaustive search
};

struct PlannerConfig {
  std::size_t plan_depth = 1;
  double action_precision = 1.0;
  Continuation continuation = Continuation::softmax;
  bool parallel = true;

  void validate() const;
};

// Expected free energy g(stage, state, action), stages numbered 1..depth.
class EfeTable {
 public:
  EfeTable() = default;
  EfeTable(std::size_t depth, std::size_t states, std::size_t actions);

  std::size_t depth() const { return depth_; }
  std::size_t states() const { return states_; }
  std::size_t actions() const { return actions_; }

  double at(std::size_t stage, std::size_t state, std::size_t action) const {
    return g_[offset(stage, state) + action];
  }
  std::span<const double> row(std::size_t stage, std::size_t state) const {
    return {g_.data() + offset(stage, state), actions_};
  }
  std::span<double> row(std::size_t stage, std::size_t state) {
    return {g_.data() + offset(stage, state), actions_};
  }
  std::span<const double> values() const { return g_; }

 private:
  std::size_t offset(std::size_t stage, std::size_t state) const {
    return ((stage - 1) * states_ + state) * actions_;
  }

  std::size_t depth_ = 0;
  std::size_t states_ = 0;
  std::size_t actions_ = 0;
  std::vector<double> g_;
};

// Risk plus ambiguity of landing in each state:
// KL(A[.|s] || C) + H(A[.|s]).
std::vector<double> outcome_costs(const GenerativeModel& model);

// Value a successor contributes given its next-stage row of g.
double continuation_value(std::span<const double> next_row, Continuation mode);

// Backward recursion from stage N to 1:
//   g(t,s,u) = sum_s' B(s'|s,u) [cost(s') + cont(g(t+1,s',.))]
// with no continuation at the last stage.
EfeTable evaluate_efe(const GenerativeModel& model, const PlannerConfig& config);

// Belief-weighted stage-1 EFE per action.
std::vector<double> expected_efe(const EfeTable& efe, const Categorical& belief);

// sigma(-precision * expected_efe).
Categorical dpefe_policy(const EfeTable& efe, const Categorical& belief,
                         const PlannerConfig& config);

// Operation count of one backward evaluation: depth * |S|^2 * |U| for dense
// transitions, or depth * k * |S| * |U| for an average of k successors.
std::uint64_t planning_cost(std::size_t states, std::size_t actions, std::size_t depth);
std::uint64_t planning_cost(std::size_t states, std::size_t actions, std::size_t depth,
                            double mean_successors);

// Average number of explicitly learned successors per transition column.
double mean_successors(const GenerativeModel& model);

}  // namespace aif

#include "aif/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "aif/efe_kernels.hpp"

namespace aif {

void PlannerConfig::validate() const {
  if (plan_depth < 1) throw std::invalid_argument("plan_depth must be >= 1");
  if (!(action_precision > 0.0)) throw std::invalid_argument("action_precision must be > 0");
}

EfeTable::EfeTable(std::size_t depth, std::size_t states, std::size_t actions)
    : depth_(depth), states_(states), actions_(actions), g_(depth * states * actions, 0.0) {}

std::vector<double> outcome_costs(const GenerativeModel& model) {
  const std::size_t n = model.num_states();
  std::vector<double> cost(n);
  const Categorical& pref = model.preference();
  for (std::size_t s = 0; s < n; ++s) {
    const SparseColumn& a = model.likelihood(s);
    if (a.background() == 0.0) {
      double risk = 0.0;
      double ambiguity = 0.0;
      for (const Peak& p : a.peaks()) {
        if (p.mass <= 0.0) continue;
        const double lp = std::log(p.mass);
        risk += p.mass * (lp - safe_log(pref[p.index]));
        ambiguity -= p.mass * lp;
      }
      cost[s] = std::max(risk, 0.0) + std::max(ambiguity, 0.0);
    } else {
      const Categorical col = a.dense();
      cost[s] = kl_divergence(col, pref) + entropy(col);
    }
  }
  return cost;
}

double continuation_value(std::span<const double> next_row, Continuation mode) {
  if (mode == Continuation::hard_min) {
    return *std::min_element(next_row.begin(), next_row.end());
  }
  // sum_u sigma(-g)(u) g(u), stabilized by the row minimum.
  const double lo = *std::min_element(next_row.begin(), next_row.end());
  double z = 0.0;
  double acc = 0.0;
  for (double g : next_row) {
    const double w = std::exp(lo - g);
    z += w;
    acc += w * g;
  }
  return acc / z;
}

EfeTable evaluate_efe(const GenerativeModel& model, const PlannerConfig& config) {
  EfeTable table;
  kernels::efe_sparse(model, config, table, config.parallel);
  return table;
}

std::vector<double> expected_efe(const EfeTable& efe, const Categorical& belief) {
  if (belief.size() != efe.states()) throw std::invalid_argument("belief size mismatch");
  std::vector<double> g(efe.actions(), 0.0);
  for (std::size_t s = 0; s < efe.states(); ++s) {
    const double q = belief[s];
    if (q <= 0.0) continue;
    const auto row = efe.row(1, s);
    for (std::size_t u = 0; u < g.size(); ++u) g[u] += q * row[u];
  }
  return g;
}

Categorical dpefe_policy(const EfeTable& efe, const Categorical& belief,
                         const PlannerConfig& config) {
  std::vector<double> g = expected_efe(efe, belief);
  for (double& x : g) x = -x;
  return softmax(g, config.action_precision);
}

std::uint64_t planning_cost(std::size_t states, std::size_t actions, std::size_t depth) {
  return static_cast<std::uint64_t>(depth) * states * states * actions;
}

std::uint64_t planning_cost(std::size_t states, std::size_t actions, std::size_t depth,
                            double mean_successors) {
  const double ops = static_cast<double>(depth) * mean_successors * static_cast<double>(states) *
                     static_cast<double>(actions);
  return static_cast<std::uint64_t>(std::llround(ops));
}

double mean_successors(const GenerativeModel& model) {
  const std::size_t cols = model.num_states() * model.num_actions();
  double total = 0.0;
  for (std::size_t s = 0; s < model.num_states(); ++s) {
    for (std::size_t u = 0; u < model.num_actions(); ++u) {
      // The flat background counts as one aggregated successor.
      const SparseColumn& c = model.transition(s, u);
      total += static_cast<double>(c.peaks().size()) + (c.background() > 0.0 ? 1.0 : 0.0);
    }
  }
  return total / static_cast<double>(cols);
}

}  // namespace aif

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aif/categorical.hpp"

namespace aif {

enum class MixMode {
  incremental,  // beta += alpha_mix * (H_cl - H_dpefe), clamped
  sigmoid,      // beta = logistic(cumulative H_cl - cumulative H_dpefe)
};

enum class BetaTiming { update_then_act, act_then_update };

struct MixerConfig {
  MixMode mode = MixMode::incremental;
  double alpha_mix = 0.25;
  double beta_prior = 0.5;
  BetaTiming timing = BetaTiming::update_then_act;
  // Hold beta at beta_prior; pure-planning and pure-CL agents use this.
  bool frozen = false;
};

// Per-state bias between the CL policy (beta = 0) and the planner (beta = 1).
class MixState {
 public:
  MixState() = default;
  MixState(std::size_t states, MixerConfig config = {});

  const MixerConfig& config() const { return config_; }
  double beta(std::size_t state) const { return beta_[state]; }
  std::span<const double> betas() const { return beta_; }
  double cumulative_entropy_dpefe(std::size_t state) const { return cum_h_dpefe_[state]; }
  double cumulative_entropy_cl(std::size_t state) const { return cum_h_cl_[state]; }

  void update_incremental(std::size_t state, const Categorical& p_cl, const Categorical& p_dpefe);
  void update_sigmoid(std::size_t state, double cumulative_h_dpefe, double cumulative_h_cl);

  // Dispatches on the configured mode; the sigmoid mode first accumulates the
  // two policies' entropies for this state. No-op when frozen.
  void update(std::size_t state, const Categorical& p_cl, const Categorical& p_dpefe);

 private:
  MixerConfig config_;
  std::vector<double> beta_;
  std::vector<double> cum_h_dpefe_;
  std::vector<double> cum_h_cl_;
};

// p(u) proportional to p_cl(u)^(1-beta) * p_dpefe(u)^beta, with both inputs
// floored at kProbFloor. beta = 0 and beta = 1 return the inputs unchanged.
Categorical mixed_policy(double beta, const Categorical& p_cl, const Categorical& p_dpefe);

// Log-partition-normalized EFE row: g + ln(sum exp(-precision g)) / precision,
// so that sigma(-precision g) = exp(-precision g_normalized).
std::vector<double> normalized_efe(std::span<const double> g, double precision);

// Sum over steps of u . (precision * g_normalized); equals the summed entropy
// of the planner's action distributions.
double cumulative_planning_entropy(std::span<const std::vector<double>> efe_rows, double precision);

// Sum over steps of -u . ln(normalized CL column); equals the summed entropy
// of the CL action distributions.
double cumulative_cl_entropy(std::span<const std::vector<double>> cl_columns);

}  // namespace aif

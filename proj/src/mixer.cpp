#include "aif/mixer.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace aif {

MixState::MixState(std::size_t states, MixerConfig config)
    : config_(config),
      beta_(states, std::clamp(config.beta_prior, 0.0, 1.0)),
      cum_h_dpefe_(states, 0.0),
      cum_h_cl_(states, 0.0) {
  if (!(config.alpha_mix > 0.0)) throw std::invalid_argument("alpha_mix must be positive");
  if (config.beta_prior < 0.0 || config.beta_prior > 1.0) {
    throw std::invalid_argument("beta_prior must be in [0,1]");
  }
}

void MixState::update_incremental(std::size_t state, const Categorical& p_cl,
                                  const Categorical& p_dpefe) {
  const double step = config_.alpha_mix * (entropy(p_cl) - entropy(p_dpefe));
  beta_.at(state) = std::clamp(beta_[state] + step, 0.0, 1.0);
}

void MixState::update_sigmoid(std::size_t state, double cumulative_h_dpefe,
                              double cumulative_h_cl) {
  beta_.at(state) = logistic(cumulative_h_cl - cumulative_h_dpefe);
}

void MixState::update(std::size_t state, const Categorical& p_cl, const Categorical& p_dpefe) {
  if (config_.frozen) return;
  if (config_.mode == MixMode::incremental) {
    update_incremental(state, p_cl, p_dpefe);
    return;
  }
  cum_h_dpefe_.at(state) += entropy(p_dpefe);
  cum_h_cl_[state] += entropy(p_cl);
  update_sigmoid(state, cum_h_dpefe_[state], cum_h_cl_[state]);
}

Categorical mixed_policy(double beta, const Categorical& p_cl, const Categorical& p_dpefe) {
  if (p_cl.size() != p_dpefe.size()) throw std::invalid_argument("policy size mismatch");
  if (beta < 0.0 || beta > 1.0) throw std::invalid_argument("beta must be in [0,1]");
  if (beta == 0.0) return p_cl;
  if (beta == 1.0) return p_dpefe;
  std::vector<double> logits(p_cl.size());
  for (std::size_t u = 0; u < logits.size(); ++u) {
    logits[u] = (1.0 - beta) * safe_log(p_cl[u]) + beta * safe_log(p_dpefe[u]);
  }
  try {
    return softmax(logits, 1.0);
  } catch (const std::invalid_argument&) {
    std::cerr << "warning: degenerate policy mixture, falling back to uniform\n";
    return Categorical::uniform(p_cl.size());
  }
}

std::vector<double> normalized_efe(std::span<const double> g, double precision) {
  const double lo = *std::min_element(g.begin(), g.end());
  double z = 0.0;
  for (double x : g) z += std::exp(-precision * (x - lo));
  const double log_partition = -precision * lo + std::log(z);
  std::vector<double> out(g.begin(), g.end());
  for (double& x : out) x += log_partition / precision;
  return out;
}

double cumulative_planning_entropy(std::span<const std::vector<double>> efe_rows,
                                   double precision) {
  double h = 0.0;
  for (const auto& row : efe_rows) {
    std::vector<double> neg(row.size());
    for (std::size_t u = 0; u < row.size(); ++u) neg[u] = -row[u];
    const Categorical u = softmax(neg, precision);
    const std::vector<double> gn = normalized_efe(row, precision);
    for (std::size_t k = 0; k < row.size(); ++k) h += u[k] * precision * gn[k];
  }
  return h;
}

double cumulative_cl_entropy(std::span<const std::vector<double>> cl_columns) {
  double h = 0.0;
  for (const auto& col : cl_columns) {
    const Categorical u = Categorical::from_weights(col);
    for (std::size_t k = 0; k < col.size(); ++k) {
      if (u[k] > 0.0) h -= u[k] * std::log(u[k]);
    }
  }
  return h;
}

}  // namespace aif

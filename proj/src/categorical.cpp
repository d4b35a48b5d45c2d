#include "aif/categorical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace aif {

Categorical Categorical::from_probs(std::vector<double> probs) {
  if (probs.empty()) throw std::invalid_argument("empty distribution");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("negative or non-finite probability");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw std::invalid_argument("probabilities sum to " + std::to_string(total));
  }
  return Categorical(std::move(probs));
}

Categorical Categorical::from_weights(std::vector<double> weights) {
  if (weights.empty()) throw std::invalid_argument("empty distribution");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("negative or non-finite weight");
    }
    total += w;
  }
  if (total <= 0.0) throw std::invalid_argument("weights sum to zero");
  for (double& w : weights) w /= total;
  return Categorical(std::move(weights));
}

Categorical Categorical::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("empty distribution");
  return Categorical(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Categorical Categorical::one_hot(std::size_t n, std::size_t k) {
  if (k >= n) throw std::out_of_range("one_hot index out of range");
  std::vector<double> p(n, 0.0);
  p[k] = 1.0;
  return Categorical(std::move(p));
}

std::size_t Categorical::argmax() const {
  return static_cast<std::size_t>(std::max_element(p_.begin(), p_.end()) - p_.begin());
}

double safe_log(double p) { return std::log(std::max(p, kProbFloor)); }

Categorical softmax(std::span<const double> values, double precision) {
  if (values.empty()) throw std::invalid_argument("empty logits");
  if (!(precision > 0.0)) throw std::invalid_argument("precision must be positive");
  double peak = -INFINITY;
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite logits");
    peak = std::max(peak, v);
  }
  std::vector<double> w(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    w[i] = std::exp(precision * (values[i] - peak));
  }
  return Categorical::from_weights(std::move(w));
}

double entropy(const Categorical& p) {
  double h = 0.0;
  for (double x : p.probs()) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return std::max(h, 0.0);
}

double kl_divergence(const Categorical& p, const Categorical& q) {
  if (p.size() != q.size()) throw std::invalid_argument("dimension mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) d += p[i] * (std::log(p[i]) - safe_log(q[i]));
  }
  return std::max(d, 0.0);
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::size_t sample(const Categorical& p, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    acc += p[i];
    last = i;
    if (u < acc) return i;
  }
  // Round-off left u above the accumulated mass.
  return last;
}

}  // namespace aif

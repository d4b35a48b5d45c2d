#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aif/rng.hpp"

namespace aif {

// Floor applied inside every logarithm of a probability.
inline constexpr double kProbFloor = 1e-10;
// Tolerance on the unit-sum invariant of a categorical distribution.
inline constexpr double kSumTolerance = 1e-9;

// Normalized probability vector over a finite label set.
class Categorical {
 public:
  Categorical() = default;

  // Validates non-negativity and unit sum (within kSumTolerance).
  static Categorical from_probs(std::vector<double> probs);
  // Normalizes non-negative weights; throws if they sum to zero.
  static Categorical from_weights(std::vector<double> weights);
  static Categorical uniform(std::size_t n);
  static Categorical one_hot(std::size_t n, std::size_t k);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> probs() const { return p_; }
  std::size_t argmax() const;

  bool operator==(const Categorical&) const = default;

 private:
  explicit Categorical(std::vector<double> p) : p_(std::move(p)) {}
  std::vector<double> p_;
};

// ln(max(p, kProbFloor)).
double safe_log(double p);

// sigma(precision * values), stabilized by max-subtraction.
// Throws std::invalid_argument("non-finite logits") on NaN/inf input.
Categorical softmax(std::span<const double> values, double precision = 1.0);

// Shannon entropy in nats with 0 ln 0 = 0.
double entropy(const Categorical& p);

// D_KL(p || q) in nats; q is floored at kProbFloor before the log.
double kl_divergence(const Categorical& p, const Categorical& q);

double logistic(double x);

// Inverse-CDF draw. Consumes exactly one uniform from rng.
std::size_t sample(const Categorical& p, Rng& rng);

}  // namespace aif

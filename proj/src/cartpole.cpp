#include <algorithm>
#include <cmath>

#include "aif/environments.hpp"
#include "aif/generative_model.hpp"

namespace aif {

void CartPoleSpec::validate() const {
  if (!(angle_threshold > 0.0) || !(position_threshold > 0.0)) {
    throw std::invalid_argument("cart-pole thresholds must be positive");
  }
  for (std::size_t b : bins) {
    if (b < 2) throw std::invalid_argument("cart-pole needs at least 2 bins per dimension");
  }
  for (double c : clip) {
    if (!(c > 0.0)) throw std::invalid_argument("cart-pole clip ranges must be positive");
  }
  if (!(dt > 0.0) || !(cart_mass > 0.0) || !(pole_mass > 0.0) || !(half_length > 0.0)) {
    throw std::invalid_argument("cart-pole physical constants must be positive");
  }
  if (max_steps == 0) throw std::invalid_argument("cart-pole max_steps must be positive");
}

CartPoleSpec CartPoleSpec::mutated() const {
  CartPoleSpec m = *this;
  m.angle_threshold = angle_threshold / 2.0;
  m.position_threshold = position_threshold / 2.0;
  return m;
}

std::size_t discretize(const CartPoleSpec& spec, const CartPoleState& s) {
  const std::array<double, 4> v{s.x, s.x_dot, s.theta, s.theta_dot};
  std::size_t index = 0;
  for (std::size_t d = 0; d < 4; ++d) {
    const double lo = -spec.clip[d];
    const double width = 2.0 * spec.clip[d] / static_cast<double>(spec.bins[d]);
    const double x = std::clamp(v[d], lo, spec.clip[d]);
    // Bins are [lo + k w, lo + (k+1) w); the upper clip edge joins the last bin.
    auto k = static_cast<std::size_t>(std::floor((x - lo) / width));
    k = std::min(k, spec.bins[d] - 1);
    index = index * spec.bins[d] + k;
  }
  return index;
}

CartPoleState cartpole_reset(const CartPoleSpec&, Rng& rng) {
  CartPoleState s;
  s.x = rng.uniform(-0.05, 0.05);
  s.x_dot = rng.uniform(-0.05, 0.05);
  s.theta = rng.uniform(-0.05, 0.05);
  s.theta_dot = rng.uniform(-0.05, 0.05);
  return s;
}

CartPoleStep cartpole_step(const CartPoleSpec& spec, const CartPoleState& s, std::size_t action,
                           std::size_t steps_taken) {
  if (action > 1) throw std::out_of_range("cart-pole action must be 0 or 1");
  const double force = action == kPushRight ? spec.force : -spec.force;
  const double total_mass = spec.cart_mass + spec.pole_mass;
  const double pole_ml = spec.pole_mass * spec.half_length;
  const double cos_t = std::cos(s.theta);
  const double sin_t = std::sin(s.theta);

  const double temp = (force + pole_ml * s.theta_dot * s.theta_dot * sin_t) / total_mass;
  const double theta_acc =
      (spec.gravity * sin_t - cos_t * temp) /
      (spec.half_length * (4.0 / 3.0 - spec.pole_mass * cos_t * cos_t / total_mass));
  const double x_acc = temp - pole_ml * theta_acc * cos_t / total_mass;

  // Semi-implicit Euler: velocities first, positions from the new velocities.
  CartPoleStep out;
  out.next.x_dot = s.x_dot + spec.dt * x_acc;
  out.next.x = s.x + spec.dt * out.next.x_dot;
  out.next.theta_dot = s.theta_dot + spec.dt * theta_acc;
  out.next.theta = s.theta + spec.dt * out.next.theta_dot;

  out.result.failure = std::abs(out.next.theta) > spec.angle_threshold ||
                       std::abs(out.next.x) > spec.position_threshold;
  out.result.state = out.result.failure ? spec.failure_state() : discretize(spec, out.next);
  out.result.horizon_hit = !out.result.failure && steps_taken + 1 >= spec.max_steps;
  return out;
}

CartPole::CartPole(CartPoleSpec spec) : spec_(spec) { spec_.validate(); }

Categorical CartPole::preference() const {
  const std::size_t failure = spec_.failure_state();
  return avoidance_preference(spec_.num_states(), std::span<const std::size_t>(&failure, 1));
}

std::size_t CartPole::reset(Rng& rng) {
  t_ = 0;
  state_ = cartpole_reset(spec_, rng);
  return discretize(spec_, state_);
}

StepResult CartPole::step(std::size_t action) {
  const CartPoleStep r = cartpole_step(spec_, state_, action, t_);
  state_ = r.next;
  ++t_;
  return r.result;
}

std::unique_ptr<Environment> CartPole::clone() const { return std::make_unique<CartPole>(spec_); }

}  // namespace aif

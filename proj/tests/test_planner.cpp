#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "aif/efe_kernels.hpp"
#include "aif/planner.hpp"
#include "aif/rng.hpp"

using namespace aif;

namespace {

GenerativeModel deterministic(std::size_t states, std::size_t actions, std::size_t depth,
                              const std::function<std::size_t(std::size_t, std::size_t)>& next) {
  auto m = GenerativeModel::fully_observable(states, actions, depth);
  for (std::size_t s = 0; s < states; ++s) {
    for (std::size_t u = 0; u < actions; ++u) m.set_transition(s, u, Categorical::one_hot(states, next(s, u)));
  }
  return m;
}

Categorical random_dist(Rng& rng, std::size_t n, bool sparse) {
  std::vector<double> w(n);
  for (double& x : w) x = (sparse && rng.uniform() < 0.5) ? 0.0 : rng.uniform() + 0.01;
  w[rng.next() % n] += 0.5;
  return Categorical::from_weights(w);
}

GenerativeModel random_model(Rng& rng, std::size_t states, std::size_t actions, std::size_t depth,
                             bool stochastic) {
  auto m = GenerativeModel::fully_observable(states, actions, depth);
  for (std::size_t s = 0; s < states; ++s) {
    for (std::size_t u = 0; u < actions; ++u) {
      m.set_transition(s, u, stochastic ? random_dist(rng, states, true)
                                        : Categorical::one_hot(states, rng.next() % states));
    }
  }
  m.set_preference(random_dist(rng, states, false));
  return m;
}

// Independent recursion over an explicit tree: value of taking u in s with
// `remaining` stages left, identity likelihood.
double tree_value(const GenerativeModel& m, std::size_t s, std::size_t u, std::size_t remaining,
                  Continuation mode) {
  double total = 0.0;
  for (std::size_t n = 0; n < m.num_states(); ++n) {
    const double p = m.transition(s, u).prob(n);
    if (p == 0.0) continue;
    double v = -std::log(m.preference()[n]);
    if (remaining > 1) {
      std::vector<double> next(m.num_actions());
      for (std::size_t k = 0; k < next.size(); ++k) next[k] = tree_value(m, n, k, remaining - 1, mode);
      if (mode == Continuation::hard_min) {
        v += *std::min_element(next.begin(), next.end());
      } else {
        double z = 0.0, acc = 0.0;
        const double lo = *std::min_element(next.begin(), next.end());
        for (double g : next) z += std::exp(-(g - lo));
        for (double g : next) acc += std::exp(-(g - lo)) / z * g;
        v += acc;
      }
    }
    total += p * v;
  }
  return total;
}

// Open-loop enumeration of all |U|^N action sequences on a deterministic
// model: summed KL of each visited outcome to C.
double best_sequence_cost(const GenerativeModel& m, std::size_t s, std::size_t first,
                          std::size_t depth) {
  const std::size_t actions = m.num_actions();
  std::size_t count = 1;
  for (std::size_t i = 1; i < depth; ++i) count *= actions;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t code = 0; code < count; ++code) {
    std::size_t state = s, c = code;
    double cost = 0.0;
    for (std::size_t i = 0; i < depth; ++i) {
      std::size_t u = first;
      if (i > 0) {
        u = c % actions;
        c /= actions;
      }
      state = m.transition(state, u).dense().argmax();
      cost += -std::log(m.preference()[state]);
    }
    best = std::min(best, cost);
  }
  return best;
}

PlannerConfig cfg(std::size_t depth, Continuation c = Continuation::softmax) {
  PlannerConfig p;
  p.plan_depth = depth;
  p.continuation = c;
  return p;
}

}  // namespace

TEST_CASE("single step on a two-state chain") {
  // Action 0 stays, action 1 moves to the goal state 1.
  auto m = deterministic(2, 2, 1, [](std::size_t s, std::size_t u) { return u == 1 ? 1 : s; });
  m.set_preference(goal_preference(2, 1));
  const auto g = evaluate_efe(m, cfg(1));
  const auto& c = m.preference();
  CHECK(g.at(1, 0, 0) == doctest::Approx(-std::log(c[0])));
  CHECK(g.at(1, 0, 1) == doctest::Approx(-std::log(c[1])));
  CHECK(g.at(1, 0, 1) < g.at(1, 0, 0));
}

TEST_CASE("two steps on a three-state line") {
  // 0 -> 1 -> 2 (goal) with "right" = 1, "left" = 0; the goal absorbs.
  auto m = deterministic(3, 2, 2, [](std::size_t s, std::size_t u) -> std::size_t {
    if (s == 2) return 2;
    return u == 1 ? s + 1 : 0;
  });
  m.set_preference(goal_preference(3, 2));
  for (auto mode : {Continuation::softmax, Continuation::hard_min}) {
    const auto g = evaluate_efe(m, cfg(2, mode));
    CHECK(g.at(1, 0, 1) < g.at(1, 0, 0));
  }
  const auto g = evaluate_efe(m, cfg(2, Continuation::hard_min));
  for (std::size_t u = 0; u < 2; ++u) {
    CHECK(g.at(1, 0, u) == doctest::Approx(best_sequence_cost(m, 0, u, 2)));
  }
}

TEST_CASE("no preference means no drive") {
  Rng rng(5);
  // Permutation transitions keep B doubly stochastic.
  auto m = deterministic(6, 3, 4, [](std::size_t s, std::size_t u) { return (s + u + 1) % 6; });
  const auto g = evaluate_efe(m, cfg(4));
  for (std::size_t stage = 1; stage <= 4; ++stage) {
    for (std::size_t s = 0; s < 6; ++s) {
      for (double x : g.row(stage, s)) CHECK(x == doctest::Approx(g.at(stage, 0, 0)).epsilon(1e-9));
    }
  }

  auto r = random_model(rng, 5, 3, 3, true);
  r.set_preference(Categorical::uniform(5));
  const auto gr = evaluate_efe(r, cfg(3));
  for (std::size_t s = 0; s < 5; ++s) {
    const auto p = dpefe_policy(gr, Categorical::one_hot(5, s), cfg(3));
    REQUIRE(p.size() == 3);
    for (double x : p.probs()) CHECK(x == doctest::Approx(1.0 / 3.0));
  }
}

TEST_CASE("policy examples") {
  EfeTable t(1, 1, 2);
  t.row(1, 0)[0] = 1.0;
  t.row(1, 0)[1] = 2.0;
  const auto p = dpefe_policy(t, Categorical::one_hot(1, 0), cfg(1));
  CHECK(p[0] == doctest::Approx(0.7311).epsilon(1e-4));
  CHECK(p[1] == doctest::Approx(0.2689).epsilon(1e-4));

  EfeTable flat(1, 1, 3);
  const auto uniform = dpefe_policy(flat, Categorical::one_hot(1, 0), cfg(1));
  for (double x : uniform.probs()) CHECK(x == doctest::Approx(1.0 / 3.0));

  auto sharp = cfg(1);
  sharp.action_precision = 1e3;
  CHECK(dpefe_policy(t, Categorical::one_hot(1, 0), sharp)[0] >= 0.999);

  // Belief-weighted lookup.
  EfeTable two(1, 2, 2);
  two.row(1, 0)[0] = 0.0;
  two.row(1, 0)[1] = 2.0;
  two.row(1, 1)[0] = 2.0;
  two.row(1, 1)[1] = 0.0;
  const auto mid = expected_efe(two, Categorical::from_probs({0.5, 0.5}));
  CHECK(mid[0] == doctest::Approx(1.0));
  CHECK(mid[1] == doctest::Approx(1.0));
}

TEST_CASE("shift invariance of the stage-1 policy") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    auto m = random_model(rng, 5, 3, 2, true);
    auto g = evaluate_efe(m, cfg(2));
    const auto belief = random_dist(rng, 5, false);
    const auto before = dpefe_policy(g, belief, cfg(2));
    const double shift = rng.uniform(-50.0, 50.0);
    for (std::size_t s = 0; s < 5; ++s) {
      for (double& x : g.row(1, s)) x += shift;
    }
    const auto after = dpefe_policy(g, belief, cfg(2));
    for (std::size_t u = 0; u < 3; ++u) CHECK(after[u] == doctest::Approx(before[u]).epsilon(1e-9));
  }
}

TEST_CASE("greedy action matches exhaustive sequence search") {
  Rng rng(2024);
  std::size_t compared = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t states = 2 + rng.next() % 4;
    const std::size_t actions = 2 + rng.next() % 2;
    const std::size_t depth = 1 + rng.next() % 3;
    const auto m = random_model(rng, states, actions, depth, false);
    const auto g = evaluate_efe(m, cfg(depth, Continuation::hard_min));
    for (std::size_t s = 0; s < states; ++s) {
      std::vector<double> oracle(actions);
      for (std::size_t u = 0; u < actions; ++u) {
        oracle[u] = best_sequence_cost(m, s, u, depth);
        CHECK(g.at(1, s, u) == doctest::Approx(oracle[u]).epsilon(1e-9));
      }
      std::vector<double> sorted = oracle;
      std::sort(sorted.begin(), sorted.end());
      if (sorted[1] - sorted[0] < 1e-9) continue;  // tie: any minimizer is fine
      const auto row = g.row(1, s);
      const auto greedy = std::min_element(row.begin(), row.end()) - row.begin();
      const auto best = std::min_element(oracle.begin(), oracle.end()) - oracle.begin();
      CHECK(greedy == best);
      ++compared;
    }
  }
  CHECK(compared >= 100);
}

TEST_CASE("recursion matches an explicit tree on stochastic models") {
  Rng rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t states = 2 + rng.next() % 4;
    const std::size_t actions = 2 + rng.next() % 2;
    const std::size_t depth = 1 + rng.next() % 3;
    const auto m = random_model(rng, states, actions, depth, true);
    for (auto mode : {Continuation::softmax, Continuation::hard_min}) {
      const auto g = evaluate_efe(m, cfg(depth, mode));
      for (std::size_t s = 0; s < states; ++s) {
        for (std::size_t u = 0; u < actions; ++u) {
          CHECK(g.at(1, s, u) == doctest::Approx(tree_value(m, s, u, depth, mode)).epsilon(1e-9));
          CHECK(g.at(depth, s, u) == doctest::Approx(tree_value(m, s, u, 1, mode)).epsilon(1e-9));
        }
      }
    }
  }
}

TEST_CASE("parallel kernel is bitwise equal to the serial paths") {
  Rng rng(13);
  auto m = GenerativeModel::fully_observable(200, 4, 8, kDirichletFloor);
  for (int i = 0; i < 600; ++i) {
    learn_transition(rng.next() % 200, rng.next() % 4, rng.next() % 200, m);
  }
  m.set_preference(goal_preference(200, 17));
  for (auto mode : {Continuation::softmax, Continuation::hard_min}) {
    const auto c = cfg(8, mode);
    EfeTable serial(8, 200, 4), threaded(8, 200, 4), reference(8, 200, 4);
    kernels::efe_sparse(m, c, serial, false);
    kernels::efe_sparse(m, c, threaded, true);
    kernels::efe_reference(m, c, reference);
    CHECK(std::equal(serial.values().begin(), serial.values().end(), threaded.values().begin()));
    for (std::size_t i = 0; i < serial.values().size(); ++i) {
      CHECK(serial.values()[i] == doctest::Approx(reference.values()[i]).epsilon(1e-9));
    }
    auto seq = c;
    seq.parallel = false;
    const auto a = evaluate_efe(m, seq);
    const auto b = evaluate_efe(m, c);
    CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  }
}

TEST_CASE("entries stay finite with near-zero preferences") {
  Rng rng(3);
  auto m = random_model(rng, 5, 2, 6, true);
  m.set_preference(Categorical::from_probs({1.0, 0.0, 0.0, 0.0, 0.0}));
  const auto g = evaluate_efe(m, cfg(6));
  for (double x : g.values()) CHECK(std::isfinite(x));
}

TEST_CASE("planning cost") {
  CHECK(planning_cost(900, 4, 50) == 162'000'000ULL);
  CHECK(planning_cost(900, 4, 0) == 0);
  for (std::size_t n : {1, 5, 25, 50}) {
    CHECK(planning_cost(900, 4, 2 * n) == 2 * planning_cost(900, 4, n));
    CHECK(planning_cost(900, 4, 2 * n, 3.0) == 2 * planning_cost(900, 4, n, 3.0));
  }
  CHECK(planning_cost(900, 4, 10, 2.0) == 10ULL * 2 * 900 * 4);
}

TEST_CASE("config validation") {
  PlannerConfig bad;
  bad.plan_depth = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.plan_depth = 1;
  bad.action_precision = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

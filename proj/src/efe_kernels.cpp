#include "aif/efe_kernels.hpp"

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace aif::kernels {

namespace {

// Successor weights for one stage: immediate cost plus the continuation from
// the following stage (absent at the last stage).
void stage_weights(const EfeTable& table, std::size_t stage, std::span<const double> cost,
                   Continuation mode, std::vector<double>& w, bool use_threads) {
  const auto n = static_cast<std::ptrdiff_t>(cost.size());
  const bool last = stage == table.depth();
#pragma omp parallel for schedule(static) if (use_threads)
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    const auto i = static_cast<std::size_t>(s);
    w[i] = last ? cost[i] : cost[i] + continuation_value(table.row(stage + 1, i), mode);
  }
}

}  // namespace

void efe_reference(const GenerativeModel& model, const PlannerConfig& config, EfeTable& out) {
  config.validate();
  const std::size_t n = model.num_states();
  const std::size_t m = model.num_actions();
  out = EfeTable(config.plan_depth, n, m);
  const std::vector<double> cost = outcome_costs(model);

  std::vector<std::vector<double>> dense(n * m);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t u = 0; u < m; ++u) {
      const Categorical col = model.transition(s, u).dense();
      dense[s * m + u].assign(col.probs().begin(), col.probs().end());
    }
  }

  std::vector<double> w(n);
  for (std::size_t stage = config.plan_depth; stage >= 1; --stage) {
    stage_weights(out, stage, cost, config.continuation, w, false);
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t u = 0; u < m; ++u) {
        const auto& p = dense[s * m + u];
        double g = 0.0;
        for (std::size_t next = 0; next < n; ++next) g += p[next] * w[next];
        out.row(stage, s)[u] = g;
      }
    }
  }
}

void efe_sparse(const GenerativeModel& model, const PlannerConfig& config, EfeTable& out,
                bool use_threads) {
  config.validate();
  const std::size_t n = model.num_states();
  const std::size_t m = model.num_actions();
  out = EfeTable(config.plan_depth, n, m);
  const std::vector<double> cost = outcome_costs(model);

  std::vector<double> w(n);
  for (std::size_t stage = config.plan_depth; stage >= 1; --stage) {
    stage_weights(out, stage, cost, config.continuation, w, use_threads);
    double total = 0.0;
    for (double x : w) total += x;

    const auto ns = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (use_threads)
    for (std::ptrdiff_t s = 0; s < ns; ++s) {
      const auto i = static_cast<std::size_t>(s);
      auto row = out.row(stage, i);
      for (std::size_t u = 0; u < m; ++u) row[u] = model.transition(i, u).expect(w, total);
    }
  }
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace aif::kernels

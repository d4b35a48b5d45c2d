#pragma once

#include "aif/generative_model.hpp"
#include "aif/planner.hpp"

// Backward-recursion kernels behind evaluate_efe. The reference kernel is a
// plain serial loop over dense transition columns and is kept for testing and
// benchmarking; the production kernel exploits the background-plus-peaks
// column layout and parallelizes the per-state loop with OpenMP.
namespace aif::kernels {

void efe_reference(const GenerativeModel& model, const PlannerConfig& config, EfeTable& out);

void efe_sparse(const GenerativeModel& model, const PlannerConfig& config, EfeTable& out,
                bool use_threads);

// Number of OpenMP threads the sparse kernel will use (1 without OpenMP).
int max_threads();

}  // namespace aif::kernels

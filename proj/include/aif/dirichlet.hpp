#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "aif/categorical.hpp"

namespace aif {

// Lower bound on any Dirichlet concentration parameter.
inline constexpr double kDirichletFloor = 1e-6;

struct Peak {
  std::uint32_t index;
  double mass;

  bool operator==(const Peak&) const = default;
};

// A categorical column stored as a uniform background mass shared by every
// outcome plus sparse extra mass on a few outcomes (kept sorted by index).
// Learned transition columns are almost always of this form, and expectations
// against them cost O(peaks) instead of O(outcomes).
class SparseColumn {
 public:
  SparseColumn() = default;

  static SparseColumn uniform(std::size_t n);
  static SparseColumn one_hot(std::size_t n, std::size_t k);
  static SparseColumn from_dense(const Categorical& p);
  // Takes ownership of background/peaks; validates unit mass.
  static SparseColumn from_parts(std::size_t n, double background, std::vector<Peak> peaks);

  std::size_t size() const { return n_; }
  double background() const { return background_; }
  std::span<const Peak> peaks() const { return peaks_; }

  double prob(std::size_t i) const;
  // sum_i p(i) * values[i]; values_sum must equal sum_i values[i].
  double expect(std::span<const double> values, double values_sum) const;
  Categorical dense() const;

  bool operator==(const SparseColumn&) const = default;

 private:
  std::size_t n_ = 0;
  double background_ = 0.0;
  std::vector<Peak> peaks_;
};

// Concentration parameters of one Dirichlet per column: a shared prior count on
// every entry plus sparse learned increments.
class DirichletCounts {
 public:
  DirichletCounts() = default;
  DirichletCounts(std::size_t outcomes, std::size_t columns, double prior = 1.0);

  std::size_t outcomes() const { return outcomes_; }
  std::size_t columns() const { return columns_; }
  double prior() const { return prior_; }

  double count(std::size_t outcome, std::size_t column) const;
  double column_total(std::size_t column) const { return totals_[column]; }
  // Learned increments of one column (count minus prior), sorted by outcome.
  std::span<const Peak> increments(std::size_t column) const { return extra_[column]; }

  // Adds weight (> 0) to entry (outcome, column).
  void add(std::size_t column, std::size_t outcome, double weight);

  SparseColumn normalized(std::size_t column) const;
  // Dense normalization of every column.
  std::vector<Categorical> normalize() const;

  // KL divergence between the Dirichlet posterior held here and the flat
  // prior it started from, summed over columns.
  double kl_from_prior() const;

  bool operator==(const DirichletCounts&) const = default;

 private:
  std::size_t outcomes_ = 0;
  std::size_t columns_ = 0;
  double prior_ = 1.0;
  std::vector<std::vector<Peak>> extra_;
  std::vector<double> totals_;
};

}  // namespace aif

#include "aif/dirichlet.hpp"

#include <algorithm>
#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <stdexcept>

namespace aif {

SparseColumn SparseColumn::uniform(std::size_t n) {
  return from_parts(n, 1.0 / static_cast<double>(n), {});
}

SparseColumn SparseColumn::one_hot(std::size_t n, std::size_t k) {
  if (k >= n) throw std::out_of_range("one_hot index out of range");
  return from_parts(n, 0.0, {Peak{static_cast<std::uint32_t>(k), 1.0}});
}

SparseColumn SparseColumn::from_dense(const Categorical& p) {
  std::vector<Peak> peaks;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) peaks.push_back({static_cast<std::uint32_t>(i), p[i]});
  }
  return from_parts(p.size(), 0.0, std::move(peaks));
}

SparseColumn SparseColumn::from_parts(std::size_t n, double background, std::vector<Peak> peaks) {
  if (n == 0) throw std::invalid_argument("empty column");
  std::sort(peaks.begin(), peaks.end(),
            [](const Peak& a, const Peak& b) { return a.index < b.index; });
  double total = background * static_cast<double>(n);
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    if (peaks[i].index >= n) throw std::out_of_range("peak index out of range");
    if (i > 0 && peaks[i].index == peaks[i - 1].index) {
      throw std::invalid_argument("duplicate peak index");
    }
    if (peaks[i].mass < 0.0) throw std::invalid_argument("negative peak mass");
    total += peaks[i].mass;
  }
  if (background < 0.0 || std::abs(total - 1.0) > kSumTolerance) {
    throw std::invalid_argument("column is not a distribution");
  }
  SparseColumn c;
  c.n_ = n;
  c.background_ = background;
  c.peaks_ = std::move(peaks);
  return c;
}

double SparseColumn::prob(std::size_t i) const {
  auto it = std::lower_bound(peaks_.begin(), peaks_.end(), i,
                             [](const Peak& p, std::size_t k) { return p.index < k; });
  double extra = (it != peaks_.end() && it->index == i) ? it->mass : 0.0;
  return background_ + extra;
}

double SparseColumn::expect(std::span<const double> values, double values_sum) const {
  double acc = background_ * values_sum;
  for (const Peak& p : peaks_) acc += p.mass * values[p.index];
  return acc;
}

Categorical SparseColumn::dense() const {
  std::vector<double> p(n_, background_);
  for (const Peak& pk : peaks_) p[pk.index] += pk.mass;
  return Categorical::from_weights(std::move(p));
}

DirichletCounts::DirichletCounts(std::size_t outcomes, std::size_t columns, double prior)
    : outcomes_(outcomes),
      columns_(columns),
      prior_(prior),
      extra_(columns),
      totals_(columns, prior * static_cast<double>(outcomes)) {
  if (outcomes == 0 || columns == 0) throw std::invalid_argument("empty counts table");
  if (!(prior >= kDirichletFloor)) {
    throw std::invalid_argument("Dirichlet prior below floor");
  }
}

double DirichletCounts::count(std::size_t outcome, std::size_t column) const {
  const auto& col = extra_.at(column);
  auto it = std::lower_bound(col.begin(), col.end(), outcome,
                             [](const Peak& p, std::size_t k) { return p.index < k; });
  double extra = (it != col.end() && it->index == outcome) ? it->mass : 0.0;
  return prior_ + extra;
}

void DirichletCounts::add(std::size_t column, std::size_t outcome, double weight) {
  if (column >= columns_ || outcome >= outcomes_) throw std::out_of_range("count index");
  if (!(weight > 0.0)) throw std::invalid_argument("count increment must be positive");
  auto& col = extra_[column];
  auto it = std::lower_bound(col.begin(), col.end(), outcome,
                             [](const Peak& p, std::size_t k) { return p.index < k; });
  if (it != col.end() && it->index == outcome) {
    it->mass += weight;
  } else {
    col.insert(it, Peak{static_cast<std::uint32_t>(outcome), weight});
  }
  totals_[column] += weight;
}

SparseColumn DirichletCounts::normalized(std::size_t column) const {
  const double total = totals_.at(column);
  std::vector<Peak> peaks;
  peaks.reserve(extra_[column].size());
  for (const Peak& p : extra_[column]) peaks.push_back({p.index, p.mass / total});
  return SparseColumn::from_parts(outcomes_, prior_ / total, std::move(peaks));
}

std::vector<Categorical> DirichletCounts::normalize() const {
  std::vector<Categorical> out;
  out.reserve(columns_);
  for (std::size_t j = 0; j < columns_; ++j) out.push_back(normalized(j).dense());
  return out;
}

double DirichletCounts::kl_from_prior() const {
  using boost::math::digamma;
  const double b0 = prior_ * static_cast<double>(outcomes_);
  double kl = 0.0;
  for (std::size_t j = 0; j < columns_; ++j) {
    if (extra_[j].empty()) continue;
    const double a0 = totals_[j];
    const double psi_a0 = digamma(a0);
    double col = std::lgamma(a0) - std::lgamma(b0);
    for (const Peak& p : extra_[j]) {
      const double a = prior_ + p.mass;
      col -= std::lgamma(a) - std::lgamma(prior_);
      col += p.mass * (digamma(a) - psi_a0);
    }
    kl += col;
  }
  return kl;
}

}  // namespace aif

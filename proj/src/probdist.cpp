#include "infocouple/probdist.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "infocouple/errors.hpp"

namespace infocouple {

namespace {

void clamp_and_check(std::vector<double>& masses, const char* what) {
  if (masses.empty()) {
    throw ValidationError(std::string(what) + ": empty");
  }
  for (std::size_t i = 0; i < masses.size(); ++i) {
    double& m = masses[i];
    if (!std::isfinite(m)) {
      throw ValidationError(std::string(what) + ": non-finite mass at index " + std::to_string(i));
    }
    if (m < 0.0) {
      if (m < -kNegativeClamp) {
        throw ValidationError(std::string(what) + ": negative mass " + std::to_string(m) +
                              " at index " + std::to_string(i));
      }
      m = 0.0;
    }
  }
  const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw ValidationError(std::string(what) + ": masses sum to " + std::to_string(total) +
                          ", expected 1");
  }
}

}  // namespace

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  clamp_and_check(probs_, "distribution");
}

Distribution Distribution::uniform(std::size_t n) {
  if (n == 0) throw ValidationError("distribution: empty");
  return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Distribution Distribution::point_mass(std::size_t n, std::size_t at) {
  if (at >= n) throw DomainError("point_mass: index out of range");
  std::vector<double> v(n, 0.0);
  v[at] = 1.0;
  return Distribution(std::move(v));
}

Distribution Distribution::normalized(std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("normalize: weights must be finite and >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw ValidationError("normalize: zero total weight");
  for (double& w : weights) w /= total;
  return Distribution(std::move(weights));
}

Coupling::Coupling(std::size_t rows, std::size_t cols, std::vector<double> cells)
    : rows_(rows), cols_(cols), cells_(std::move(cells)) {
  if (rows_ == 0 || cols_ == 0) throw ValidationError("coupling: empty alphabet");
  if (cells_.size() != rows_ * cols_) throw ValidationError("coupling: table shape mismatch");
  clamp_and_check(cells_, "coupling");
}

Coupling Coupling::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) throw ValidationError("coupling: empty table");
  const std::size_t cols = rows.front().size();
  std::vector<double> cells;
  cells.reserve(rows.size() * cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw ValidationError("coupling: ragged table at row " + std::to_string(r));
    }
    cells.insert(cells.end(), rows[r].begin(), rows[r].end());
  }
  return Coupling(rows.size(), cols, std::move(cells));
}

Coupling Coupling::diagonal(const Distribution& d) {
  const std::size_t n = d.size();
  std::vector<double> cells(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) cells[i * n + i] = d[i];
  return Coupling(n, n, std::move(cells));
}

Coupling Coupling::product(const Distribution& p, const Distribution& q) {
  std::vector<double> cells(p.size() * q.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) cells[i * q.size() + j] = p[i] * q[j];
  return Coupling(p.size(), q.size(), std::move(cells));
}

Distribution Coupling::row_marginal() const {
  std::vector<double> out(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out[r] += cells_[r * cols_ + c];
  return Distribution(std::move(out));
}

Distribution Coupling::col_marginal() const {
  std::vector<double> out(cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out[c] += cells_[r * cols_ + c];
  return Distribution(std::move(out));
}

std::vector<std::vector<double>> Coupling::to_rows() const {
  std::vector<std::vector<double>> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r].assign(row(r).begin(), row(r).end());
  return out;
}

Bits entropy_bits(std::span<const double> masses) noexcept {
  double h = 0.0;
  for (double p : masses)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

Bits entropy(const Distribution& d) noexcept { return entropy_bits(d.probs()); }

Bits binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binary_entropy: p outside [0,1]");
  const double pq[2] = {p, 1.0 - p};
  return entropy_bits(pq);
}

Bits merge_entropy_drop(double p, double q) {
  if (!(p > 0.0) || !(q > 0.0)) throw DomainError("merge_entropy_drop: arguments must be positive");
  return (p * std::log1p(q / p) + q * std::log1p(p / q)) / std::numbers::ln2;
}

Bits mutual_information(const Coupling& c) {
  const double mi = entropy(c.row_marginal()) + entropy(c.col_marginal()) - entropy_bits(c.cells());
  return std::abs(mi) < 1e-12 ? 0.0 : mi;
}

std::pair<Distribution, Distribution> marginals(const Coupling& c) {
  return {c.row_marginal(), c.col_marginal()};
}

Distribution conditional(const Coupling& c, std::size_t given_col) {
  if (given_col >= c.cols()) throw DomainError("conditional: column out of range");
  std::vector<double> col(c.rows());
  for (std::size_t r = 0; r < c.rows(); ++r) col[r] = c(r, given_col);
  const double total = std::accumulate(col.begin(), col.end(), 0.0);
  if (!(total > 0.0)) {
    throw ConditioningError("conditional: column " + std::to_string(given_col) + " has zero mass");
  }
  for (double& v : col) v /= total;
  return Distribution(std::move(col));
}

Distribution row_conditional(const Coupling& c, std::size_t given_row) {
  if (given_row >= c.rows()) throw DomainError("row_conditional: row out of range");
  auto row = c.row(given_row);
  std::vector<double> out(row.begin(), row.end());
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  if (!(total > 0.0)) {
    throw ConditioningError("row_conditional: row " + std::to_string(given_row) + " has zero mass");
  }
  for (double& v : out) v /= total;
  return Distribution(std::move(out));
}

}  // namespace infocouple

#pragma once

// Finite-alphabet probability primitives. All information quantities are in
// bits. Symbols are dense indices 0..n-1.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace infocouple {

// Information measured in bits (base-2 logarithm).
using Bits = double;

inline constexpr double kSumTolerance = 1e-9;
inline constexpr double kNegativeClamp = 1e-12;

// Probability vector. Immutable once constructed; construction validates.
class Distribution {
 public:
  // Entries in [-1e-12, 0) are clamped to zero; anything more negative, or a
  // total further than 1e-9 from one, throws ValidationError.
  explicit Distribution(std::vector<double> probs);

  static Distribution uniform(std::size_t n);
  static Distribution point_mass(std::size_t n, std::size_t at);
  // The only renormalizing entry point: scales nonnegative weights to sum 1.
  static Distribution normalized(std::vector<double> weights);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const noexcept { return probs_; }
  const std::vector<double>& vector() const noexcept { return probs_; }

  bool operator==(const Distribution&) const = default;

 private:
  std::vector<double> probs_;
};

// Joint probability table stored row-major.
class Coupling {
 public:
  Coupling(std::size_t rows, std::size_t cols, std::vector<double> cells);

  static Coupling from_rows(const std::vector<std::vector<double>>& rows);
  static Coupling diagonal(const Distribution& d);
  static Coupling product(const Distribution& p, const Distribution& q);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return cells_[r * cols_ + c]; }
  std::span<const double> cells() const noexcept { return cells_; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(cells_).subspan(r * cols_, cols_);
  }

  Distribution row_marginal() const;
  Distribution col_marginal() const;

  // Rows as nested vectors, for serialization.
  std::vector<std::vector<double>> to_rows() const;

  bool operator==(const Coupling&) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> cells_;
};

// -sum p log2 p over raw nonnegative masses, with 0 log 0 = 0. No validation.
Bits entropy_bits(std::span<const double> masses) noexcept;

Bits entropy(const Distribution& d) noexcept;
Bits binary_entropy(double p);

// Entropy decrease from merging two masses p and q into p + q.
Bits merge_entropy_drop(double p, double q);

Bits mutual_information(const Coupling& c);

std::pair<Distribution, Distribution> marginals(const Coupling& c);

// Column `given_col` normalized to sum one: p(row | col).
Distribution conditional(const Coupling& c, std::size_t given_col);
// Row `given_row` normalized to sum one: p(col | row).
Distribution row_conditional(const Coupling& c, std::size_t given_row);

}  // namespace infocouple

#pragma once

// Entropy-bounded information maximization: pick a coupling p_XT with fixed
// row marginal p_X that maximizes I(X;T) subject to H(T) <= R.

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "infocouple/probdist.hpp"

namespace infocouple::ebim {

// Slack on every H(T) <= R comparison.
inline constexpr double kRateSlack = 1e-9;

// A function g: X -> T, stored as the code cell of every input symbol.
// Cells are contiguous 0..num_cells-1 and each holds at least one symbol.
class DeterministicMapping {
 public:
  explicit DeterministicMapping(std::vector<std::size_t> cell_of);

  std::size_t input_size() const noexcept { return cell_of_.size(); }
  std::size_t num_cells() const noexcept { return num_cells_; }
  std::size_t cell_of(std::size_t x) const { return cell_of_[x]; }
  const std::vector<std::size_t>& cells() const noexcept { return cell_of_; }

  // p_T: total p_X mass of each cell.
  std::vector<double> code_masses(const Distribution& p_x) const;
  Coupling to_coupling(const Distribution& p_x) const;

  bool operator==(const DeterministicMapping&) const = default;

 private:
  std::vector<std::size_t> cell_of_;
  std::size_t num_cells_ = 0;
};

// Recovers g from a coupling with at most one nonzero per row. Zero rows are
// assigned to cell 0. Throws DomainError when the coupling is stochastic.
DeterministicMapping as_deterministic(const Coupling& c);
bool is_deterministic(const Coupling& c) noexcept;

// Greedy deterministic solver. Walks the chain of mappings obtained by
// repeatedly merging the two largest code cells, testing at each step the
// alternative that merges the two smallest, and returns the first mapping
// whose information fits under R. O(n log n).
DeterministicMapping solve_deterministic_mapping(const Distribution& p_x, Bits rate);
Coupling solve_deterministic(const Distribution& p_x, Bits rate);

enum class TraversalKind { merge_largest, merge_smallest };

struct TraversalStep {
  TraversalKind kind;
  std::size_t index;  // merge round; 0 for the identity mapping
  DeterministicMapping mapping;
  Coupling coupling;
  Bits info;
};

// Every mapping visited by the greedy solver, identity first, ending in the
// single-cell mapping. Information is non-increasing along the sequence.
std::vector<TraversalStep> traversal_sequence(const Distribution& p_x);

// floor(2^R) cells over consecutive blocks of ceil(n/m) symbols in the given
// order. Empty trailing cells are dropped.
DeterministicMapping uniform_quantizer_mapping(const Distribution& p_x, Bits rate);
Coupling uniform_quantizer(const Distribution& p_x, Bits rate);

// Symbols in descending-mass order, each assigned to the currently lightest
// cell (lowest index on ties). Cells that never receive a symbol are dropped.
DeterministicMapping greedy_fill_mapping(const Distribution& p_x, std::size_t num_codes);
Coupling greedy_fill_encoder(const Distribution& p_x, std::size_t num_codes);

// A single move of mass eps inside one row of a deterministic coupling.
struct PerturbationMove {
  std::size_t row;
  std::size_t from_col;
  std::size_t to_col;  // == cols() of the source coupling for a fresh column
  double ratio;        // exact dI/dH_T of the move at the requested eps
};

// Rate-increasing move: mass leaves its cell for a fresh all-zero column.
// Among rows whose cell holds more than eps, picks the one maximizing the
// exact finite-eps ratio dI/dH_T; as eps -> 0 this is the cell with the
// smallest column-normalized value. Ties go to the lowest row.
PerturbationMove select_perturb_up(const Coupling& c, double eps);
Coupling perturb_up(const Coupling& c, double eps);

// Rate-decreasing move: mass goes to the heaviest column (lowest index on
// ties). Picks the source row minimizing the exact dI/dH_T; as eps -> 0 this
// is the smallest cell of the lightest column.
PerturbationMove select_perturb_down(const Coupling& c, double eps);
Coupling perturb_down(const Coupling& c, double eps);

Coupling apply_move(const Coupling& c, const PerturbationMove& move, double eps);

enum class FrontierOrigin { deterministic, perturbed_up, perturbed_down };
std::string_view to_string(FrontierOrigin origin);

struct FrontierPoint {
  Bits rate;  // the grid rate R
  Bits info;  // I(X;T)
  Bits code_entropy;  // achieved H(T) <= R
  Coupling coupling;
  FrontierOrigin origin;
};

enum class FrontierCandidates { automatic, all_partitions, traversal };

// Partition enumeration is used automatically up to this many positive-mass
// symbols; all_partitions accepts up to kMaxBruteForceSize.
inline constexpr std::size_t kAutoExactSize = 8;
inline constexpr std::size_t kMaxBruteForceSize = 12;

// For each grid rate, the best information over candidate deterministic
// mappings and their single-row continuations toward that rate. The result
// is the running maximum, so it is non-decreasing in R.
std::vector<FrontierPoint> frontier_sweep(const Distribution& p_x, std::span<const Bits> rate_grid,
                                          FrontierCandidates candidates = FrontierCandidates::automatic);

// Calls visit(block_of, num_blocks) for every set partition of {0..n-1} in
// restricted-growth-string order. Returns the number of partitions visited.
std::size_t enumerate_partitions(
    std::size_t n, const std::function<void(std::span<const std::size_t>, std::size_t)>& visit);

struct BruteForceResult {
  DeterministicMapping mapping;
  Coupling coupling;
  Bits info;
  std::size_t partitions_enumerated;
};

// Exhaustive oracle: the partition with the largest I(X;T) = H(T) among those
// with H(T) <= R + kRateSlack. Alphabets above kMaxBruteForceSize throw SizeError.
BruteForceResult brute_force_deterministic(const Distribution& p_x, Bits rate);

}  // namespace infocouple::ebim

#include "infocouple/ebim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include "infocouple/errors.hpp"

namespace infocouple::ebim {

namespace {

constexpr std::size_t kNoCell = std::numeric_limits<std::size_t>::max();

inline double phi(double a) { return a > 0.0 ? -a * std::log2(a) : 0.0; }

// Entropy increase from splitting a mass `whole` into (whole - part, part).
inline double split_gain(double whole, double part) { return phi(whole - part) + phi(part) - phi(whole); }

void check_rate(Bits rate) {
  if (!(rate >= 0.0)) throw DomainError("rate must be >= 0, got " + std::to_string(rate));
}

// Indices sorted by descending mass; equal masses keep input order.
std::vector<std::size_t> descending_order(const Distribution& p) {
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
  return order;
}

// Renumbers cells by first appearance when symbols are read in `order`.
std::vector<std::size_t> relabel_by_first_use(const std::vector<std::size_t>& cell_of,
                                              const std::vector<std::size_t>& order) {
  std::vector<std::size_t> remap(cell_of.size() + 1, kNoCell);
  std::vector<std::size_t> out(cell_of.size());
  std::size_t next = 0;
  for (std::size_t x : order) {
    std::size_t& label = remap[cell_of[x]];
    if (label == kNoCell) label = next++;
    out[x] = label;
  }
  return out;
}

// The greedy chain over the positive masses in descending order. Holds the
// prefix sums and entropy suffix sums that make every step O(1).
class MergeChain {
 public:
  explicit MergeChain(const Distribution& p_x) : order_(descending_order(p_x)) {
    for (std::size_t x : order_) {
      if (p_x[x] > 0.0) sorted_.push_back(p_x[x]);
    }
    const std::size_t m = sorted_.size();
    prefix_.resize(m);
    std::partial_sum(sorted_.begin(), sorted_.end(), prefix_.begin());
    tail_.assign(m + 1, 0.0);
    for (std::size_t k = m; k-- > 0;) tail_[k] = tail_[k + 1] + phi(sorted_[k]);
  }

  std::size_t positive_count() const { return sorted_.size(); }

  // I of the mapping that has merged the i+1 largest masses into one cell.
  Bits info_largest(std::size_t i) const {
    if (i + 1 >= sorted_.size()) return 0.0;
    return phi(prefix_[i]) + tail_[i + 1];
  }

  // I of the mapping that merges the two smallest cells of merge_largest(i-1).
  Bits info_smallest(std::size_t i) const {
    const std::size_t m = sorted_.size();
    if (i + 1 >= m) return 0.0;
    const Bits merged = info_largest(i - 1) - merge_entropy_drop(sorted_[m - 2], sorted_[m - 1]);
    return std::max(merged, 0.0);
  }

  // Cell assignment over sorted positions; zero-mass symbols join the last cell.
  DeterministicMapping mapping(TraversalKind kind, std::size_t i) const {
    const std::size_t m = sorted_.size();
    const std::size_t n = order_.size();
    std::vector<std::size_t> by_rank(n);
    for (std::size_t k = 0; k < m; ++k) {
      if (kind == TraversalKind::merge_largest) {
        by_rank[k] = k <= i ? 0 : k - i;
      } else if (i + 1 >= m) {
        by_rank[k] = 0;
      } else {
        // Cells of merge_largest(i-1), then the last two singletons fused.
        const std::size_t base = k < i ? 0 : k - i + 1;
        by_rank[k] = k == m - 1 ? base - 1 : base;
      }
    }
    const std::size_t last = m == 0 ? 0 : by_rank[m - 1];
    for (std::size_t k = m; k < n; ++k) by_rank[k] = last;

    std::vector<std::size_t> cell_of(n);
    for (std::size_t k = 0; k < n; ++k) cell_of[order_[k]] = by_rank[k];
    return DeterministicMapping(std::move(cell_of));
  }

 private:
  std::vector<std::size_t> order_;
  std::vector<double> sorted_;
  std::vector<double> prefix_;
  std::vector<double> tail_;
};

struct RowCells {
  std::vector<std::size_t> col_of;  // kNoCell for zero rows
  std::vector<double> col_sums;
};

RowCells deterministic_rows(const Coupling& c) {
  RowCells out{std::vector<std::size_t>(c.rows(), kNoCell), std::vector<double>(c.cols(), 0.0)};
  for (std::size_t r = 0; r < c.rows(); ++r) {
    for (std::size_t col = 0; col < c.cols(); ++col) {
      const double v = c(r, col);
      if (v <= 0.0) continue;
      if (out.col_of[r] != kNoCell) {
        throw DomainError("coupling is not deterministic: row " + std::to_string(r) + " has two nonzero cells");
      }
      out.col_of[r] = col;
      out.col_sums[col] += v;
    }
  }
  return out;
}

}  // namespace

DeterministicMapping::DeterministicMapping(std::vector<std::size_t> cell_of) : cell_of_(std::move(cell_of)) {
  if (cell_of_.empty()) throw ValidationError("mapping: empty input alphabet");
  num_cells_ = *std::max_element(cell_of_.begin(), cell_of_.end()) + 1;
  std::vector<bool> used(num_cells_, false);
  for (std::size_t c : cell_of_) used[c] = true;
  if (std::find(used.begin(), used.end(), false) != used.end()) {
    throw ValidationError("mapping: code cells must be contiguous and nonempty");
  }
}

std::vector<double> DeterministicMapping::code_masses(const Distribution& p_x) const {
  if (p_x.size() != cell_of_.size()) throw ValidationError("mapping: alphabet size mismatch");
  std::vector<double> masses(num_cells_, 0.0);
  for (std::size_t x = 0; x < cell_of_.size(); ++x) masses[cell_of_[x]] += p_x[x];
  return masses;
}

Coupling DeterministicMapping::to_coupling(const Distribution& p_x) const {
  if (p_x.size() != cell_of_.size()) throw ValidationError("mapping: alphabet size mismatch");
  std::vector<double> cells(cell_of_.size() * num_cells_, 0.0);
  for (std::size_t x = 0; x < cell_of_.size(); ++x) cells[x * num_cells_ + cell_of_[x]] = p_x[x];
  return Coupling(cell_of_.size(), num_cells_, std::move(cells));
}

bool is_deterministic(const Coupling& c) noexcept {
  for (std::size_t r = 0; r < c.rows(); ++r) {
    auto row = c.row(r);
    if (std::count_if(row.begin(), row.end(), [](double v) { return v > 0.0; }) > 1) return false;
  }
  return true;
}

DeterministicMapping as_deterministic(const Coupling& c) {
  const RowCells rows = deterministic_rows(c);
  std::vector<std::size_t> label(c.cols(), kNoCell);
  std::size_t next = 0;
  for (std::size_t col = 0; col < c.cols(); ++col)
    if (rows.col_sums[col] > 0.0) label[col] = next++;
  std::vector<std::size_t> cell_of(c.rows());
  for (std::size_t r = 0; r < c.rows(); ++r) cell_of[r] = rows.col_of[r] == kNoCell ? 0 : label[rows.col_of[r]];
  return DeterministicMapping(std::move(cell_of));
}

DeterministicMapping solve_deterministic_mapping(const Distribution& p_x, Bits rate) {
  check_rate(rate);
  const MergeChain chain(p_x);
  const std::size_t m = chain.positive_count();
  if (chain.info_largest(0) <= rate + kRateSlack) {
    return chain.mapping(TraversalKind::merge_largest, 0);
  }
  for (std::size_t i = 1; i < m; ++i) {
    if (chain.info_smallest(i) <= rate + kRateSlack) return chain.mapping(TraversalKind::merge_smallest, i);
    if (chain.info_largest(i) <= rate + kRateSlack) return chain.mapping(TraversalKind::merge_largest, i);
  }
  // Unreachable: the final mapping has a single cell and zero information.
  return chain.mapping(TraversalKind::merge_largest, m == 0 ? 0 : m - 1);
}

Coupling solve_deterministic(const Distribution& p_x, Bits rate) {
  return solve_deterministic_mapping(p_x, rate).to_coupling(p_x);
}

std::vector<TraversalStep> traversal_sequence(const Distribution& p_x) {
  const MergeChain chain(p_x);
  const std::size_t m = chain.positive_count();
  std::vector<TraversalStep> steps;
  steps.reserve(2 * m);
  auto push = [&](TraversalKind kind, std::size_t i, Bits info) {
    DeterministicMapping mapping = chain.mapping(kind, i);
    Coupling coupling = mapping.to_coupling(p_x);
    steps.push_back(TraversalStep{kind, i, std::move(mapping), std::move(coupling), info});
  };
  push(TraversalKind::merge_largest, 0, chain.info_largest(0));
  for (std::size_t i = 1; i < m; ++i) {
    push(TraversalKind::merge_smallest, i, chain.info_smallest(i));
    push(TraversalKind::merge_largest, i, chain.info_largest(i));
  }
  return steps;
}

DeterministicMapping uniform_quantizer_mapping(const Distribution& p_x, Bits rate) {
  check_rate(rate);
  const std::size_t n = p_x.size();
  // 2^R with a hair of slack so R = log2(k) yields k cells despite rounding.
  const double bins = std::floor(std::exp2(std::min(rate, 64.0)) + 1e-9);
  const std::size_t m = bins >= static_cast<double>(n) ? n : static_cast<std::size_t>(bins);
  const std::size_t block = (n + m - 1) / m;
  std::vector<std::size_t> cell_of(n);
  for (std::size_t x = 0; x < n; ++x) cell_of[x] = x / block;
  return DeterministicMapping(std::move(cell_of));
}

Coupling uniform_quantizer(const Distribution& p_x, Bits rate) {
  return uniform_quantizer_mapping(p_x, rate).to_coupling(p_x);
}

DeterministicMapping greedy_fill_mapping(const Distribution& p_x, std::size_t num_codes) {
  if (num_codes == 0) throw DomainError("greedy_fill: num_codes must be >= 1");
  const auto order = descending_order(p_x);
  std::vector<double> load(num_codes, 0.0);
  std::vector<std::size_t> cell_of(p_x.size());
  for (std::size_t x : order) {
    const auto lightest = static_cast<std::size_t>(std::min_element(load.begin(), load.end()) - load.begin());
    cell_of[x] = lightest;
    load[lightest] += p_x[x];
  }
  return DeterministicMapping(relabel_by_first_use(cell_of, order));
}

Coupling greedy_fill_encoder(const Distribution& p_x, std::size_t num_codes) {
  return greedy_fill_mapping(p_x, num_codes).to_coupling(p_x);
}

PerturbationMove select_perturb_up(const Coupling& c, double eps) {
  if (!(eps > 0.0)) throw DomainError("perturb_up: eps must be > 0");
  const RowCells rows = deterministic_rows(c);
  std::optional<PerturbationMove> best;
  for (std::size_t r = 0; r < c.rows(); ++r) {
    const std::size_t col = rows.col_of[r];
    if (col == kNoCell) continue;
    const double cell = c(r, col);
    if (cell <= eps) continue;
    const double d_code = split_gain(rows.col_sums[col], eps);
    const double d_joint = split_gain(cell, eps);
    const double ratio = (d_code - d_joint) / d_code;
    if (!best || ratio > best->ratio + 1e-12) best = PerturbationMove{r, col, c.cols(), ratio};
  }
  if (!best) throw PerturbationError("perturb_up: eps is not smaller than any cell mass");
  return *best;
}

PerturbationMove select_perturb_down(const Coupling& c, double eps) {
  if (!(eps > 0.0)) throw DomainError("perturb_down: eps must be > 0");
  const RowCells rows = deterministic_rows(c);
  const auto used = std::count_if(rows.col_sums.begin(), rows.col_sums.end(), [](double s) { return s > 0.0; });
  if (used < 2) throw PerturbationError("perturb_down: coupling has a single code column");
  const auto heaviest =
      static_cast<std::size_t>(std::max_element(rows.col_sums.begin(), rows.col_sums.end()) - rows.col_sums.begin());
  const double heavy_sum = rows.col_sums[heaviest];

  std::optional<PerturbationMove> best;
  for (std::size_t r = 0; r < c.rows(); ++r) {
    const std::size_t col = rows.col_of[r];
    if (col == kNoCell || col == heaviest) continue;
    const double cell = c(r, col);
    if (cell <= eps) continue;
    const double light_sum = rows.col_sums[col];
    const double d_code = phi(light_sum - eps) + phi(heavy_sum + eps) - phi(light_sum) - phi(heavy_sum);
    const double d_joint = split_gain(cell, eps);
    const double ratio = (d_code - d_joint) / d_code;
    if (!best || ratio < best->ratio - 1e-12) best = PerturbationMove{r, col, heaviest, ratio};
  }
  if (!best) throw PerturbationError("perturb_down: eps is not smaller than any movable cell mass");
  return *best;
}

Coupling apply_move(const Coupling& c, const PerturbationMove& move, double eps) {
  if (move.row >= c.rows() || move.from_col >= c.cols() || move.to_col > c.cols()) {
    throw DomainError("apply_move: move outside the table");
  }
  if (!(eps > 0.0) || eps >= c(move.row, move.from_col)) {
    throw PerturbationError("perturbation too large: eps must be below the cell mass");
  }
  const std::size_t cols = move.to_col == c.cols() ? c.cols() + 1 : c.cols();
  std::vector<double> cells(c.rows() * cols, 0.0);
  for (std::size_t r = 0; r < c.rows(); ++r)
    for (std::size_t col = 0; col < c.cols(); ++col) cells[r * cols + col] = c(r, col);
  cells[move.row * cols + move.from_col] -= eps;
  cells[move.row * cols + move.to_col] += eps;
  return Coupling(c.rows(), cols, std::move(cells));
}

Coupling perturb_up(const Coupling& c, double eps) { return apply_move(c, select_perturb_up(c, eps), eps); }

Coupling perturb_down(const Coupling& c, double eps) { return apply_move(c, select_perturb_down(c, eps), eps); }

std::string_view to_string(FrontierOrigin origin) {
  switch (origin) {
    case FrontierOrigin::deterministic:
      return "deterministic";
    case FrontierOrigin::perturbed_up:
      return "perturbed-up";
    case FrontierOrigin::perturbed_down:
      return "perturbed-down";
  }
  return "unknown";
}

std::size_t enumerate_partitions(
    std::size_t n, const std::function<void(std::span<const std::size_t>, std::size_t)>& visit) {
  if (n == 0) return 0;
  // Restricted growth strings: a[0] = 0, a[i] <= 1 + max(a[0..i-1]).
  std::vector<std::size_t> a(n, 0);
  std::vector<std::size_t> prefix_max(n, 0);  // max(a[0..i-1]) for i >= 1
  std::size_t count = 0;
  while (true) {
    const std::size_t blocks = std::max(prefix_max[n - 1], a[n - 1]) + 1;
    visit(a, blocks);
    ++count;
    std::size_t i = n - 1;
    while (i > 0 && a[i] > prefix_max[i]) --i;
    if (i == 0) break;
    ++a[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      a[j] = 0;
      prefix_max[j] = std::max(prefix_max[j - 1], a[j - 1]);
    }
  }
  return count;
}

BruteForceResult brute_force_deterministic(const Distribution& p_x, Bits rate) {
  check_rate(rate);
  const std::size_t n = p_x.size();
  if (n > kMaxBruteForceSize) {
    throw SizeError("brute_force_deterministic: alphabet size " + std::to_string(n) + " exceeds " +
                    std::to_string(kMaxBruteForceSize));
  }
  std::vector<double> masses(n);
  std::vector<std::size_t> best_blocks;
  double best_info = -1.0;
  const std::size_t visited = enumerate_partitions(n, [&](std::span<const std::size_t> block, std::size_t k) {
    std::fill(masses.begin(), masses.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
    for (std::size_t x = 0; x < n; ++x) masses[block[x]] += p_x[x];
    const double h = entropy_bits(std::span<const double>(masses).first(k));
    if (h <= rate + kRateSlack && h > best_info) {
      best_info = h;
      best_blocks.assign(block.begin(), block.end());
    }
  });
  DeterministicMapping mapping(std::move(best_blocks));
  Coupling coupling = mapping.to_coupling(p_x);
  return BruteForceResult{std::move(mapping), std::move(coupling), best_info, visited};
}

namespace {

struct Candidate {
  std::vector<std::size_t> cell_of;  // over positive-mass symbols
  std::vector<double> code;
  double code_entropy;
};

struct Choice {
  double info = -1.0;
  double code_entropy = 0.0;
  FrontierOrigin origin = FrontierOrigin::deterministic;
  std::size_t candidate = 0;
  std::size_t row = 0;
  std::size_t to_cell = 0;
  double eps = 0.0;
};

// Solves code_entropy(eps) = target on [0, hi] for a monotone path, returning
// the end of the bracket that stays at or below the target.
template <typename Entropy>
double bisect_rate(Entropy&& at, double hi, double target, bool increasing) {
  double lo = 0.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double h = at(mid);
    if (std::abs(h - target) <= 1e-10 && h <= target) return mid;
    if ((h <= target) == increasing) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return increasing ? lo : hi;
}

}  // namespace

std::vector<FrontierPoint> frontier_sweep(const Distribution& p_x, std::span<const Bits> rate_grid,
                                          FrontierCandidates candidates) {
  if (rate_grid.empty()) throw DomainError("frontier_sweep: empty rate grid");
  for (Bits r : rate_grid) check_rate(r);

  std::vector<std::size_t> positive;
  for (std::size_t x = 0; x < p_x.size(); ++x)
    if (p_x[x] > 0.0) positive.push_back(x);
  std::vector<double> mass(positive.size());
  for (std::size_t k = 0; k < positive.size(); ++k) mass[k] = p_x[positive[k]];
  const std::size_t m = positive.size();

  bool exact = false;
  switch (candidates) {
    case FrontierCandidates::automatic:
      exact = m <= kAutoExactSize;
      break;
    case FrontierCandidates::all_partitions:
      if (m > kMaxBruteForceSize) {
        throw SizeError("frontier_sweep: " + std::to_string(m) + " symbols is too many for partition enumeration");
      }
      exact = true;
      break;
    case FrontierCandidates::traversal:
      exact = false;
      break;
  }

  std::vector<Candidate> pool;
  auto add_candidate = [&](std::vector<std::size_t> cell_of, std::size_t k) {
    std::vector<double> code(k, 0.0);
    for (std::size_t i = 0; i < m; ++i) code[cell_of[i]] += mass[i];
    const double h = entropy_bits(code);
    pool.push_back(Candidate{std::move(cell_of), std::move(code), h});
  };
  if (exact) {
    enumerate_partitions(m, [&](std::span<const std::size_t> block, std::size_t k) {
      add_candidate(std::vector<std::size_t>(block.begin(), block.end()), k);
    });
  } else {
    const Distribution reduced = Distribution::normalized(mass);
    for (const auto& step : traversal_sequence(reduced)) {
      add_candidate(step.mapping.cells(), step.mapping.num_cells());
    }
  }

  auto best_at = [&](double rate) {
    Choice best;
    // Ties within float noise keep the earlier offer, so deterministic points
    // win over perturbations that do not add information.
    auto offer = [&](const Choice& c) {
      if (c.info > best.info + 1e-12) best = c;
    };
    for (std::size_t ci = 0; ci < pool.size(); ++ci) {
      if (best.info >= rate - 1e-12) break;
      const Candidate& cand = pool[ci];
      const double h0 = cand.code_entropy;
      if (h0 <= rate + kRateSlack) {
        offer(Choice{h0, h0, FrontierOrigin::deterministic, ci, 0, 0, 0.0});
      }
      if (h0 < rate) {
        for (std::size_t i = 0; i < m; ++i) {
          const double whole = cand.code[cand.cell_of[i]];
          const double limit = std::min(mass[i], 0.5 * whole);
          if (h0 + split_gain(whole, limit) < rate) continue;
          auto h_at = [&](double e) { return h0 + split_gain(whole, e); };
          const double e = bisect_rate(h_at, limit, rate, true);
          const double h = h_at(e);
          offer(Choice{h - split_gain(mass[i], e), h, FrontierOrigin::perturbed_up, ci, i, cand.code.size(), e});
        }
      } else if (h0 > rate + kRateSlack && cand.code.size() >= 2) {
        const auto heavy = static_cast<std::size_t>(std::max_element(cand.code.begin(), cand.code.end()) -
                                                    cand.code.begin());
        const double heavy_sum = cand.code[heavy];
        for (std::size_t i = 0; i < m; ++i) {
          const std::size_t g = cand.cell_of[i];
          if (g == heavy) continue;
          const double light_sum = cand.code[g];
          auto h_at = [&](double e) {
            return h0 + phi(light_sum - e) + phi(heavy_sum + e) - phi(light_sum) - phi(heavy_sum);
          };
          if (h_at(mass[i]) > rate) continue;
          const double e = bisect_rate(h_at, mass[i], rate, false);
          const double h = h_at(e);
          offer(Choice{h - split_gain(mass[i], e), h, FrontierOrigin::perturbed_down, ci, i, heavy, e});
        }
      }
    }
    return best;
  };

  auto build = [&](const Choice& c) {
    const Candidate& cand = pool[c.candidate];
    const std::size_t k = cand.code.size() + (c.origin == FrontierOrigin::perturbed_up ? 1 : 0);
    std::vector<double> cells(p_x.size() * k, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t x = positive[i];
      cells[x * k + cand.cell_of[i]] = mass[i];
    }
    if (c.origin != FrontierOrigin::deterministic) {
      const std::size_t x = positive[c.row];
      cells[x * k + cand.cell_of[c.row]] -= c.eps;
      cells[x * k + c.to_cell] += c.eps;
    }
    return Coupling(p_x.size(), k, std::move(cells));
  };

  std::vector<std::size_t> by_rate(rate_grid.size());
  std::iota(by_rate.begin(), by_rate.end(), 0);
  std::stable_sort(by_rate.begin(), by_rate.end(), [&](std::size_t a, std::size_t b) { return rate_grid[a] < rate_grid[b]; });

  std::vector<std::optional<FrontierPoint>> points(rate_grid.size());
  std::optional<Choice> carried;
  for (std::size_t idx : by_rate) {
    Choice c = best_at(rate_grid[idx]);
    if (carried && carried->info > c.info + 1e-12) c = *carried;
    carried = c;
    // Float dust from summing masses is reported as zero, as in mutual_information.
    const double info = c.info < 1e-12 ? 0.0 : c.info;
    const double h = c.code_entropy < 1e-12 ? 0.0 : c.code_entropy;
    points[idx] = FrontierPoint{rate_grid[idx], info, h, build(c), c.origin};
  }
  std::vector<FrontierPoint> out;
  out.reserve(points.size());
  for (auto& p : points) out.push_back(std::move(*p));
  return out;
}

}  // namespace infocouple::ebim

#pragma once

// Shared generators and independent oracles for the test binaries.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "infocouple/ebim.hpp"
#include "infocouple/mdp.hpp"
#include "infocouple/probdist.hpp"
#include "infocouple/rng.hpp"

namespace testsupport {

using namespace infocouple;

inline std::size_t uniform_int(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.uniform() * static_cast<double>(hi - lo + 1));
}

// Dirichlet(1, ..., 1) via normalized exponentials.
inline Distribution dirichlet(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  for (double& v : w) v = -std::log1p(-rng.uniform()) + 1e-300;
  return Distribution::normalized(std::move(w));
}

// Random surjection of n inputs onto k cells.
inline ebim::DeterministicMapping random_mapping(Rng& rng, std::size_t n, std::size_t k) {
  while (true) {
    std::vector<std::size_t> cell(n);
    for (auto& c : cell) c = uniform_int(rng, 0, k - 1);
    std::vector<bool> hit(k, false);
    for (auto c : cell) hit[c] = true;
    if (std::all_of(hit.begin(), hit.end(), [](bool b) { return b; })) {
      // Relabel by first use so the cells are contiguous in canonical order.
      std::vector<std::size_t> label(k, k);
      std::size_t next = 0;
      for (auto& c : cell) {
        if (label[c] == k) label[c] = next++;
        c = label[c];
      }
      return ebim::DeterministicMapping(std::move(cell));
    }
  }
}

// Random joint table with the given shape; entries Dirichlet(1).
inline Coupling random_joint(Rng& rng, std::size_t rows, std::size_t cols) {
  const Distribution flat = dirichlet(rng, rows * cols);
  return Coupling(rows, cols, flat.vector());
}

// Entropy in bits straight from the definition.
inline double naive_entropy(const std::vector<double>& v) {
  double h = 0.0;
  for (double p : v)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

inline double naive_mi(const Coupling& c) {
  std::vector<double> r(c.rows(), 0.0), k(c.cols(), 0.0), all;
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) {
      r[i] += c(i, j);
      k[j] += c(i, j);
      all.push_back(c(i, j));
    }
  return naive_entropy(r) + naive_entropy(k) - naive_entropy(all);
}

// Plain value iteration on expected rewards; greedy action sets per state
// with every action within `slack` of the best Q value.
struct GreedySets {
  std::vector<std::vector<std::size_t>> actions;  // empty for terminal/obstacle states
  std::vector<double> value;
};

inline GreedySets value_iteration(const mdp::GridWorld& env, double tol = 1e-12, double slack = 1e-9) {
  const std::size_t n = env.num_states();
  std::vector<double> v(n, 0.0), nv(n, 0.0);
  auto active = [&](std::size_t s) { return !env.is_terminal(s) && !env.is_obstacle(s); };
  auto q_of = [&](std::size_t s, std::size_t a) {
    double q = 0.0;
    for (const auto& t : env.transitions(s, static_cast<mdp::Action>(a)))
      q += t.prob * (env.reward_on_entry(t.next) + env.gamma() * v[t.next]);
    return q;
  };
  for (int it = 0; it < 100000; ++it) {
    double change = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      if (!active(s)) continue;
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < mdp::kNumActions; ++a) best = std::max(best, q_of(s, a));
      nv[s] = best;
      change = std::max(change, std::abs(best - v[s]));
    }
    v.swap(nv);
    if (change < tol) break;
  }
  GreedySets out;
  out.value = v;
  out.actions.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    if (!active(s)) continue;
    double best = -std::numeric_limits<double>::infinity();
    std::array<double, mdp::kNumActions> q{};
    for (std::size_t a = 0; a < mdp::kNumActions; ++a) best = std::max(best, q[a] = q_of(s, a));
    for (std::size_t a = 0; a < mdp::kNumActions; ++a)
      if (q[a] >= best - slack) out.actions[s].push_back(a);
  }
  return out;
}

// Every single-mass move of eps out of a deterministic coupling: row x moves
// eps from its cell to another existing column or to a fresh one. Returns
// (dI, dH_T) per move, evaluated from the full tables.
struct MoveEffect {
  std::size_t row;
  std::size_t to_col;
  double d_info;
  double d_code;
};

inline std::vector<MoveEffect> all_single_moves(const Coupling& c, double eps) {
  const double i0 = naive_mi(c);
  std::vector<double> cs(c.cols(), 0.0);
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) cs[j] += c(i, j);
  const double h0 = naive_entropy(cs);
  std::vector<MoveEffect> out;
  const std::size_t cols = c.cols() + 1;
  for (std::size_t x = 0; x < c.rows(); ++x) {
    std::size_t from = c.cols();
    for (std::size_t j = 0; j < c.cols(); ++j)
      if (c(x, j) > 0.0) from = j;
    if (from == c.cols() || c(x, from) <= eps) continue;
    for (std::size_t t = 0; t < cols; ++t) {
      if (t == from) continue;
      std::vector<double> cells(c.rows() * cols, 0.0);
      for (std::size_t i = 0; i < c.rows(); ++i)
        for (std::size_t j = 0; j < c.cols(); ++j) cells[i * cols + j] = c(i, j);
      cells[x * cols + from] -= eps;
      cells[x * cols + t] += eps;
      const Coupling moved(c.rows(), cols, std::move(cells));
      std::vector<double> ms(cols, 0.0);
      for (std::size_t i = 0; i < c.rows(); ++i)
        for (std::size_t j = 0; j < cols; ++j) ms[j] += moved(i, j);
      out.push_back(MoveEffect{x, t, naive_mi(moved) - i0, naive_entropy(ms) - h0});
    }
  }
  return out;
}

// Two-proportion test: is p_hi - p_lo a drop that lies within the 95% CI?
inline bool within_ci(double p_lo, double p_hi, std::size_t n) {
  const double pooled = 0.5 * (p_lo + p_hi);
  const double se = std::sqrt(std::max(pooled * (1.0 - pooled), 1e-12) * 2.0 / static_cast<double>(n));
  return std::abs(p_hi - p_lo) <= 1.96 * se;
}

}  // namespace testsupport

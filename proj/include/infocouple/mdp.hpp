#pragma once

// Noisy grid world and maximum-entropy policy learning by soft Q iteration.

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "infocouple/probdist.hpp"
#include "infocouple/rng.hpp"

namespace infocouple::mdp {

enum class Action : std::size_t { left = 0, right = 1, up = 2, down = 3 };
inline constexpr std::size_t kNumActions = 4;
std::string_view to_string(Action a);

struct Cell {
  int row = 0;
  int col = 0;
  bool operator==(const Cell&) const = default;
};

struct GridLayout {
  int width = 8;
  int height = 8;
  Cell start{7, 0};
  Cell goal{0, 7};
  Cell trap{1, 7};
  std::vector<Cell> obstacles;
  double noise = 0.1;  // probability the move is deflected 90 degrees
  double gamma = 0.95;
  std::size_t step_cap = 200;
};

// The layout shipped as data/default_layout.json.
GridLayout default_layout();

struct Transition {
  std::size_t next;
  double prob;
};

class GridWorld {
 public:
  // Validates bounds, distinct start/goal/trap, and that none is an obstacle.
  explicit GridWorld(GridLayout layout);

  const GridLayout& layout() const noexcept { return layout_; }
  std::size_t num_states() const noexcept { return static_cast<std::size_t>(layout_.width * layout_.height); }
  std::size_t state_of(Cell c) const { return static_cast<std::size_t>(c.row * layout_.width + c.col); }
  Cell cell_of(std::size_t s) const {
    return Cell{static_cast<int>(s) / layout_.width, static_cast<int>(s) % layout_.width};
  }
  std::size_t start() const { return state_of(layout_.start); }
  bool is_terminal(std::size_t s) const { return s == goal_ || s == trap_; }
  bool is_obstacle(std::size_t s) const { return blocked_[s]; }
  double gamma() const noexcept { return layout_.gamma; }

  // Reward for entering s: +1 goal, -1 trap, 0 otherwise.
  double reward_on_entry(std::size_t s) const;

  // Outcome distribution of taking a in s; duplicate destinations merged.
  std::span<const Transition> transitions(std::size_t s, Action a) const;
  // Expected immediate reward of (s, a).
  double expected_reward(std::size_t s, Action a) const;

 private:
  std::size_t move(std::size_t s, Action a) const;

  GridLayout layout_;
  std::vector<bool> blocked_;
  std::size_t goal_;
  std::size_t trap_;
  std::vector<std::vector<Transition>> transitions_;  // [s * 4 + a]
};

struct StepResult {
  std::size_t next;
  double reward;
  bool done;
};

// Samples one transition. `steps_taken` counts the moves before this one; the
// episode is done on reaching goal or trap or after step_cap moves.
StepResult step(const GridWorld& env, std::size_t s, Action a, Rng& rng, std::size_t steps_taken = 0);

// beta * ln sum exp(v / beta), shifted by the max for overflow safety.
double soft_max(std::span<const double> values, double beta);

struct Policy {
  double beta = 0.0;
  std::vector<std::array<double, kNumActions>> q;
  std::vector<std::array<double, kNumActions>> probs;

  std::size_t num_states() const { return probs.size(); }
  Distribution action_dist(std::size_t s) const;
};

// Soft Bellman iteration Q(s,a) <- R(s,a) + gamma sum_s' P(s'|s,a) softmax_beta Q(s',.)
// until the sup-norm change is <= tol; the policy is softmax(Q(s,.)/beta).
// Terminal states have value zero. Throws ConvergenceError past max_iterations.
// If `residuals` is given, the sup-norm change of every sweep is appended.
Policy soft_q_iteration(const GridWorld& env, double beta, double tol = 1e-10,
                        std::size_t max_iterations = 100000, std::vector<double>* residuals = nullptr);

// Action entropy in bits at s.
Bits policy_entropy(const Policy& policy, std::size_t s);
// Mean action entropy over free, non-terminal states.
Bits mean_policy_entropy(const GridWorld& env, const Policy& policy);

}  // namespace infocouple::mdp

#include "infocouple/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "infocouple/errors.hpp"

namespace infocouple::mdp {

std::string_view to_string(Action a) {
  switch (a) {
    case Action::left:
      return "left";
    case Action::right:
      return "right";
    case Action::up:
      return "up";
    case Action::down:
      return "down";
  }
  return "?";
}

GridLayout default_layout() {
  GridLayout g;
  g.obstacles = {{1, 1}, {2, 1}, {1, 4}, {2, 4}, {3, 4}, {5, 2}, {5, 3}, {5, 6}, {6, 6}};
  return g;
}

namespace {

bool in_bounds(const GridLayout& g, Cell c) { return c.row >= 0 && c.col >= 0 && c.row < g.height && c.col < g.width; }

std::array<Action, 2> perpendicular(Action a) {
  if (a == Action::left || a == Action::right) return {Action::up, Action::down};
  return {Action::left, Action::right};
}

}  // namespace

GridWorld::GridWorld(GridLayout layout) : layout_(std::move(layout)) {
  const GridLayout& g = layout_;
  if (g.width <= 0 || g.height <= 0) throw ValidationError("grid: width and height must be positive");
  if (!(g.noise >= 0.0 && g.noise < 1.0)) throw ValidationError("grid: noise must be in [0, 1)");
  if (!(g.gamma > 0.0 && g.gamma <= 1.0)) throw ValidationError("grid: gamma must be in (0, 1]");
  if (g.step_cap == 0) throw ValidationError("grid: step_cap must be positive");
  for (Cell c : {g.start, g.goal, g.trap}) {
    if (!in_bounds(g, c)) throw ValidationError("grid: start/goal/trap out of bounds");
  }
  if (g.start == g.goal || g.start == g.trap || g.goal == g.trap) {
    throw ValidationError("grid: start, goal and trap must be distinct");
  }
  blocked_.assign(num_states(), false);
  for (Cell c : g.obstacles) {
    if (!in_bounds(g, c)) throw ValidationError("grid: obstacle out of bounds");
    if (c == g.start || c == g.goal || c == g.trap) {
      throw ValidationError("grid: obstacle on start, goal or trap");
    }
    blocked_[state_of(c)] = true;
  }
  goal_ = state_of(g.goal);
  trap_ = state_of(g.trap);

  transitions_.resize(num_states() * kNumActions);
  for (std::size_t s = 0; s < num_states(); ++s) {
    for (std::size_t ai = 0; ai < kNumActions; ++ai) {
      const auto a = static_cast<Action>(ai);
      auto& out = transitions_[s * kNumActions + ai];
      auto add = [&](std::size_t next, double p) {
        if (p <= 0.0) return;
        for (auto& t : out)
          if (t.next == next) {
            t.prob += p;
            return;
          }
        out.push_back(Transition{next, p});
      };
      add(move(s, a), 1.0 - g.noise);
      for (Action side : perpendicular(a)) add(move(s, side), 0.5 * g.noise);
    }
  }
}

std::size_t GridWorld::move(std::size_t s, Action a) const {
  Cell c = cell_of(s);
  switch (a) {
    case Action::left:
      --c.col;
      break;
    case Action::right:
      ++c.col;
      break;
    case Action::up:
      --c.row;
      break;
    case Action::down:
      ++c.row;
      break;
  }
  if (!in_bounds(layout_, c) || blocked_[state_of(c)]) return s;
  return state_of(c);
}

double GridWorld::reward_on_entry(std::size_t s) const {
  if (s == goal_) return 1.0;
  if (s == trap_) return -1.0;
  return 0.0;
}

std::span<const Transition> GridWorld::transitions(std::size_t s, Action a) const {
  return transitions_[s * kNumActions + static_cast<std::size_t>(a)];
}

double GridWorld::expected_reward(std::size_t s, Action a) const {
  double r = 0.0;
  for (const Transition& t : transitions(s, a)) r += t.prob * reward_on_entry(t.next);
  return r;
}

StepResult step(const GridWorld& env, std::size_t s, Action a, Rng& rng, std::size_t steps_taken) {
  if (env.is_terminal(s)) throw ProtocolError("step: state is terminal");
  if (steps_taken >= env.layout().step_cap) throw ProtocolError("step: episode already hit the step cap");
  const auto outcomes = env.transitions(s, a);
  std::array<double, 3> probs{};
  for (std::size_t i = 0; i < outcomes.size(); ++i) probs[i] = outcomes[i].prob;
  const std::size_t pick = rng.categorical(std::span<const double>(probs.data(), outcomes.size()));
  const std::size_t next = outcomes[pick].next;
  const bool done = env.is_terminal(next) || steps_taken + 1 >= env.layout().step_cap;
  return StepResult{next, env.reward_on_entry(next), done};
}

double soft_max(std::span<const double> values, double beta) {
  if (values.empty()) throw DomainError("soft_max: empty values");
  if (!(beta > 0.0)) throw DomainError("soft_max: beta must be > 0");
  const double top = *std::max_element(values.begin(), values.end());
  double acc = 0.0;
  for (double v : values) acc += std::exp((v - top) / beta);
  return top + beta * std::log(acc);
}

Distribution Policy::action_dist(std::size_t s) const {
  return Distribution(std::vector<double>(probs[s].begin(), probs[s].end()));
}

Policy soft_q_iteration(const GridWorld& env, double beta, double tol, std::size_t max_iterations,
                        std::vector<double>* residuals) {
  if (!(beta > 0.0)) throw DomainError("soft_q_iteration: beta must be > 0");
  if (!(tol > 0.0)) throw DomainError("soft_q_iteration: tol must be > 0");
  const std::size_t n = env.num_states();
  std::vector<std::array<double, kNumActions>> q(n, std::array<double, kNumActions>{});
  std::vector<std::array<double, kNumActions>> next_q(n, std::array<double, kNumActions>{});
  std::vector<double> value(n, 0.0);

  auto active = [&](std::size_t s) { return !env.is_terminal(s) && !env.is_obstacle(s); };

  bool converged = false;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    for (std::size_t s = 0; s < n; ++s) value[s] = active(s) ? soft_max(q[s], beta) : 0.0;
    double change = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      if (!active(s)) continue;
      for (std::size_t a = 0; a < kNumActions; ++a) {
        double backup = 0.0;
        for (const Transition& t : env.transitions(s, static_cast<Action>(a))) {
          backup += t.prob * (env.reward_on_entry(t.next) + env.gamma() * value[t.next]);
        }
        change = std::max(change, std::abs(backup - q[s][a]));
        next_q[s][a] = backup;
      }
    }
    q.swap(next_q);
    if (residuals) residuals->push_back(change);
    if (change <= tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw ConvergenceError("soft_q_iteration: no convergence within " + std::to_string(max_iterations) +
                           " iterations");
  }

  Policy policy;
  policy.beta = beta;
  policy.q = q;
  policy.probs.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    auto& p = policy.probs[s];
    if (!active(s)) {
      p.fill(1.0 / kNumActions);
      continue;
    }
    const double top = *std::max_element(q[s].begin(), q[s].end());
    double total = 0.0;
    for (std::size_t a = 0; a < kNumActions; ++a) {
      p[a] = std::exp((q[s][a] - top) / beta);
      total += p[a];
    }
    for (double& v : p) v /= total;
  }
  return policy;
}

Bits policy_entropy(const Policy& policy, std::size_t s) { return entropy_bits(policy.probs[s]); }

Bits mean_policy_entropy(const GridWorld& env, const Policy& policy) {
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t s = 0; s < env.num_states(); ++s) {
    if (env.is_terminal(s) || env.is_obstacle(s)) continue;
    total += policy_entropy(policy, s);
    ++count;
  }
  return count ? total / static_cast<double>(count) : 0.0;
}

}  // namespace infocouple::mdp

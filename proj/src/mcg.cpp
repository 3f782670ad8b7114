#include "infocouple/mcg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iostream>
#include <limits>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

#include "infocouple/ebim.hpp"
#include "infocouple/errors.hpp"

namespace infocouple::mcg {

Encoder parse_encoder(std::string_view name) {
  if (name == "alg1") return Encoder::alg1;
  if (name == "uniform") return Encoder::uniform;
  throw DomainError("unknown encoder '" + std::string(name) + "' (expected alg1|uniform)");
}

std::string_view to_string(Encoder e) { return e == Encoder::alg1 ? "alg1" : "uniform"; }

void MessageConfig::validate() const {
  if (alphabet_size == 0) throw ValidationError("message alphabet must be nonempty");
  if (prior.size() != alphabet_size) {
    throw ValidationError("prior has " + std::to_string(prior.size()) + " entries, alphabet has " +
                          std::to_string(alphabet_size));
  }
  if (!(priority >= 0.0)) throw ValidationError("priority must be >= 0");
  if (!(rate >= 0.0)) throw ValidationError("rate must be >= 0");
}

namespace {

// Uniform quantization of the belief read in descending order; the cells are
// mapped back onto the original message indices.
ebim::DeterministicMapping quantize_sorted(const Distribution& belief, Bits rate) {
  std::vector<std::size_t> order(belief.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return belief[a] > belief[b]; });
  std::vector<double> sorted(belief.size());
  for (std::size_t k = 0; k < order.size(); ++k) sorted[k] = belief[order[k]];
  const auto by_rank = ebim::uniform_quantizer_mapping(Distribution(std::move(sorted)), rate);
  std::vector<std::size_t> cell_of(belief.size());
  for (std::size_t k = 0; k < order.size(); ++k) cell_of[order[k]] = by_rank.cell_of(k);
  return ebim::DeterministicMapping(std::move(cell_of));
}

}  // namespace

CodingStep coding_step(const Distribution& belief, const Distribution& policy_at_state, Bits rate, Encoder encoder,
                       mec::Method coupler) {
  const ebim::DeterministicMapping mapping = encoder == Encoder::alg1
                                                 ? ebim::solve_deterministic_mapping(belief, rate)
                                                 : quantize_sorted(belief, rate);
  Coupling p_mt = mapping.to_coupling(belief);
  const Distribution p_t = p_mt.col_marginal();
  Coupling p_ta = mec::couple(p_t, policy_at_state, coupler);

  const std::size_t n = p_mt.rows();
  const std::size_t k = p_mt.cols();
  const std::size_t na = p_ta.cols();
  std::vector<double> action_given_code(k * na, 0.0);
  for (std::size_t t = 0; t < k; ++t) {
    if (!(p_t[t] > 0.0)) continue;
    for (std::size_t a = 0; a < na; ++a) action_given_code[t * na + a] = p_ta(t, a) / p_t[t];
  }
  std::vector<double> ma(n * na, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t t = 0; t < k; ++t) {
      const double w = p_mt(m, t);
      if (w == 0.0) continue;
      for (std::size_t a = 0; a < na; ++a) ma[m * na + a] += w * action_given_code[t * na + a];
    }
  }
  Coupling p_ma(n, na, std::move(ma));
  return CodingStep{std::move(p_mt), std::move(p_ta), std::move(p_ma)};
}

BeliefUpdate belief_update(const Coupling& p_ma, std::size_t observed_action) {
  if (observed_action >= p_ma.cols()) throw DomainError("belief_update: action out of range");
  std::vector<double> column(p_ma.rows());
  double total = 0.0;
  for (std::size_t m = 0; m < p_ma.rows(); ++m) {
    column[m] = p_ma(m, observed_action);
    total += column[m];
  }
  if (!(total > 0.0)) return BeliefUpdate{p_ma.row_marginal(), true};
  for (double& v : column) {
    v /= total;
    if (v < 1e-300) v = 0.0;
  }
  return BeliefUpdate{Distribution::normalized(std::move(column)), false};
}

namespace {

class Party {
 public:
  Party(const mdp::Policy& policy, const MessageConfig& cfg) : policy_(policy), cfg_(cfg), belief_(cfg.prior) {}

  CodingStep prepare(std::size_t state) const {
    return coding_step(belief_, policy_.action_dist(state), cfg_.rate, cfg_.encoder, cfg_.coupler);
  }

  // Returns true when the update fell back to the prior belief.
  bool observe(const CodingStep& step, std::size_t action) {
    BeliefUpdate u = belief_update(step.p_ma, action);
    belief_ = std::move(u.belief);
    return u.fell_back;
  }

  const Distribution& belief() const { return belief_; }

 private:
  const mdp::Policy& policy_;
  const MessageConfig& cfg_;
  Distribution belief_;
};

std::size_t argmax_lowest(const Distribution& d) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < d.size(); ++i)
    if (d[i] > d[best]) best = i;
  return best;
}

}  // namespace

Distribution replay_belief(const std::vector<TrajectoryStep>& trajectory, const mdp::Policy& policy,
                           const MessageConfig& cfg) {
  cfg.validate();
  Party receiver(policy, cfg);
  for (const TrajectoryStep& st : trajectory) {
    const CodingStep step = receiver.prepare(st.state);
    receiver.observe(step, static_cast<std::size_t>(st.action));
  }
  return receiver.belief();
}

std::size_t decode(const std::vector<TrajectoryStep>& trajectory, const mdp::Policy& policy,
                   const MessageConfig& cfg) {
  return argmax_lowest(replay_belief(trajectory, policy, cfg));
}

EpisodeResult run_episode(const mdp::GridWorld& env, const mdp::Policy& policy, const MessageConfig& cfg,
                          std::size_t true_message, Rng& rng) {
  cfg.validate();
  if (true_message >= cfg.alphabet_size) throw DomainError("run_episode: true message out of range");
  if (policy.num_states() != env.num_states()) throw ValidationError("run_episode: policy does not match grid");

  Party source(policy, cfg);
  Party agent(policy, cfg);
  EpisodeResult result;
  result.true_message = true_message;

  std::size_t s = env.start();
  double discount = 1.0;
  bool done = false;
  std::size_t steps = 0;
  while (!done) {
    // Source: compress its belief and send the code of the true message.
    const CodingStep source_step = source.prepare(s);
    auto row = source_step.p_mt.row(true_message);
    if (std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; })) {
      throw ProtocolError("source belief lost the true message");
    }
    const std::size_t signal = rng.categorical(row);

    // Agent: same coding step on its own belief, act on p(a | t).
    const CodingStep agent_step = agent.prepare(s);
    const std::size_t action = rng.categorical(agent_step.p_ta.row(signal));

    const mdp::StepResult out = mdp::step(env, s, static_cast<mdp::Action>(action), rng, steps);
    result.trajectory.push_back(TrajectoryStep{s, static_cast<mdp::Action>(action)});
    result.discounted_return += discount * out.reward;
    discount *= env.gamma();

    const bool source_fell_back = source.observe(source_step, action);
    agent.observe(agent_step, action);
    if (source_fell_back) {
      ++result.fallbacks;
    }
    for (std::size_t m = 0; m < cfg.alphabet_size; ++m) {
      if (std::abs(source.belief()[m] - agent.belief()[m]) > 1e-9) {
        throw ProtocolError("source and agent beliefs diverged at step " + std::to_string(steps));
      }
    }
    result.belief_trace.push_back(source.belief()[true_message]);

    s = out.next;
    done = out.done;
    ++steps;
  }
  if (result.fallbacks > 0) {
    std::cerr << "warning: " << result.fallbacks << " belief update(s) hit a zero-mass action\n";
  }

  result.source_final_belief = source.belief();
  result.receiver_final_belief = replay_belief(result.trajectory, policy, cfg);
  result.decoded = argmax_lowest(result.receiver_final_belief);
  result.correct = result.decoded == true_message;
  result.combined_score = result.discounted_return + cfg.priority * (result.correct ? 1.0 : 0.0);
  return result;
}

namespace {

template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<SweepRow> sweep(const mdp::GridWorld& env, const SweepConfig& cfg) {
  if (cfg.betas.empty() || cfg.rates.empty() || cfg.encoders.empty()) {
    throw DomainError("sweep: beta, rate and encoder grids must be nonempty");
  }
  if (cfg.episodes == 0) throw DomainError("sweep: episodes must be positive");
  const Distribution prior = Distribution::uniform(cfg.alphabet_size);
  const double h_prior = entropy(prior);

  std::vector<SweepRow> rows;
  for (double beta : cfg.betas) {
    const mdp::Policy policy = mdp::soft_q_iteration(env, beta, cfg.q_tolerance);
    for (Bits rate : cfg.rates) {
      for (Encoder encoder : cfg.encoders) {
        MessageConfig mc;
        mc.alphabet_size = cfg.alphabet_size;
        mc.prior = prior;
        mc.priority = cfg.priority;
        mc.rate = rate;
        mc.encoder = encoder;

        std::vector<EpisodeResult> results(cfg.episodes);
        parallel_for(cfg.episodes, cfg.jobs, [&](std::size_t k) {
          Rng rng(stream_seed(cfg.seed, k));
          const std::size_t message = rng.categorical(prior.probs());
          results[k] = run_episode(env, policy, mc, message, rng);
        });

        SweepRow row{beta, rate, encoder,
                     rate > 0.0 ? h_prior / rate : std::numeric_limits<double>::infinity(),
                     0.0, 0.0, 0.0, 0.0, 0.0, 0, cfg.episodes, {}};
        std::size_t longest = 0;
        for (const auto& r : results) longest = std::max(longest, r.belief_trace.size());
        row.belief_curve.assign(longest, 0.0);
        for (const auto& r : results) {
          row.mean_return += r.discounted_return;
          row.combined += r.combined_score;
          row.steps_mean += static_cast<double>(r.trajectory.size());
          row.correct_count += r.correct ? 1 : 0;
          for (std::size_t i = 0; i < longest; ++i) {
            row.belief_curve[i] += i < r.belief_trace.size() ? r.belief_trace[i] : r.belief_trace.back();
          }
        }
        const double n = static_cast<double>(cfg.episodes);
        row.mean_return /= n;
        row.combined /= n;
        row.steps_mean /= n;
        row.accuracy = static_cast<double>(row.correct_count) / n;
        for (double& v : row.belief_curve) v /= n;
        if (cfg.episodes > 1) {
          double ss = 0.0;
          for (const auto& r : results) ss += (r.discounted_return - row.mean_return) * (r.discounted_return - row.mean_return);
          row.return_sd = std::sqrt(ss / (n - 1.0));
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

}  // namespace infocouple::mcg

#pragma once

// Rate-limited Markov coding game. A source that knows the message sends a
// rate-limited signal to an agent each step; the agent folds the signal into
// its MDP action through a minimum-entropy coupling with its marginal policy;
// a receiver decodes the message from the trajectory alone. All three run
// the same deterministic coding step on identical beliefs.

#include <cstdint>
#include <string_view>
#include <vector>

#include "infocouple/mdp.hpp"
#include "infocouple/mec.hpp"
#include "infocouple/probdist.hpp"

namespace infocouple::mcg {

enum class Encoder { alg1, uniform };
Encoder parse_encoder(std::string_view name);
std::string_view to_string(Encoder e);

struct MessageConfig {
  std::size_t alphabet_size = 64;
  Distribution prior = Distribution::uniform(64);
  double priority = 1.0;  // zeta; only enters the combined score
  Bits rate = 2.0;
  Encoder encoder = Encoder::alg1;
  mec::Method coupler = mec::Method::max_seeking;

  // Throws ValidationError if the prior does not match alphabet_size.
  void validate() const;
};

struct CodingStep {
  Coupling p_mt;  // message x code
  Coupling p_ta;  // code x action
  Coupling p_ma;  // message x action
};

// compress(belief, R), then couple the code marginal with the policy at the
// current state, then p_MA(m, a) = sum_t p_MT(m, t) p(a | t). Pure: every
// party calling it with the same inputs gets bitwise-identical output.
CodingStep coding_step(const Distribution& belief, const Distribution& policy_at_state, Bits rate,
                       Encoder encoder = Encoder::alg1, mec::Method coupler = mec::Method::max_seeking);

struct BeliefUpdate {
  Distribution belief;
  bool fell_back;  // action had zero mass; belief left at the pre-update value
};

// p(m | a) from the joint; masses under 1e-300 are floored before
// renormalizing. If the action has no mass, returns the row marginal of p_MA
// (the pre-update belief) with fell_back set.
BeliefUpdate belief_update(const Coupling& p_ma, std::size_t observed_action);

struct TrajectoryStep {
  std::size_t state;
  mdp::Action action;  // the action the agent chose, before environment noise
};

struct EpisodeResult {
  std::vector<TrajectoryStep> trajectory;
  double discounted_return = 0.0;
  std::size_t true_message = 0;
  std::size_t decoded = 0;
  bool correct = false;
  std::vector<double> belief_trace;  // posterior of the true message after each step
  double combined_score = 0.0;       // return + zeta * correct
  std::size_t fallbacks = 0;
  Distribution source_final_belief = Distribution::uniform(1);
  Distribution receiver_final_belief = Distribution::uniform(1);
};

// Receiver side: replays the coding steps along the trajectory from the prior.
Distribution replay_belief(const std::vector<TrajectoryStep>& trajectory, const mdp::Policy& policy,
                           const MessageConfig& cfg);
// argmax of the replayed belief, lowest index on ties.
std::size_t decode(const std::vector<TrajectoryStep>& trajectory, const mdp::Policy& policy,
                   const MessageConfig& cfg);

// Plays one episode. Throws ProtocolError if the source and agent beliefs ever
// differ by more than 1e-9.
EpisodeResult run_episode(const mdp::GridWorld& env, const mdp::Policy& policy, const MessageConfig& cfg,
                          std::size_t true_message, Rng& rng);

struct SweepConfig {
  std::vector<double> betas;
  std::vector<Bits> rates;
  std::vector<Encoder> encoders{Encoder::alg1};
  std::size_t episodes = 200;
  std::size_t alphabet_size = 64;
  double priority = 1.0;
  std::uint64_t seed = 7;
  std::size_t jobs = 1;
  double q_tolerance = 1e-10;
};

struct SweepRow {
  double beta;
  Bits rate;
  Encoder encoder;
  double compression_rate;  // H(M) / R
  double mean_return;
  double return_sd;  // sample standard deviation of the per-episode return
  double accuracy;
  double combined;
  double steps_mean;
  std::size_t correct_count;
  std::size_t episodes;
  // Mean posterior of the true message after each step; finished episodes
  // hold their final value.
  std::vector<double> belief_curve;
};

// Trains one soft-Q policy per beta, then runs `episodes` games for every
// (beta, rate, encoder) cell. Episode k of every cell uses the same seed
// stream, so cells differ only through the quantity being varied.
std::vector<SweepRow> sweep(const mdp::GridWorld& env, const SweepConfig& cfg);

}  // namespace infocouple::mcg

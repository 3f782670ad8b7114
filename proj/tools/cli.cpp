#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include "infocouple/ebim.hpp"
#include "infocouple/errors.hpp"
#include "infocouple/json_io.hpp"
#include "infocouple/mcg.hpp"
#include "infocouple/mdp.hpp"
#include "infocouple/mec.hpp"
#include "infocouple/mecb.hpp"

#ifndef INFOCOUPLE_VERSION
#define INFOCOUPLE_VERSION "0.0.0"
#endif

namespace infocouple::cli {

namespace {

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("grid '" + spec + "': '" + item + "' is not a number");
    }
  }
  if (parts.size() != 3) throw ValidationError("grid '" + spec + "' must be start:stop:step");
  const double start = parts[0], stop = parts[1], step = parts[2];
  if (!(step > 0.0) || stop < start) throw ValidationError("grid '" + spec + "' needs step > 0 and stop >= start");
  std::vector<double> grid;
  for (std::size_t k = 0;; ++k) {
    const double v = start + static_cast<double>(k) * step;
    if (v > stop + 1e-9 * step) break;
    grid.push_back(v);
  }
  return grid;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open " + path + " for writing");
  return f;
}

// Seed from --seed, else MECB_SEED, else 7.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("MECB_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ValidationError(std::string("MECB_SEED='") + env + "' is not an unsigned integer");
    }
  }
  return 7;
}

std::string join_args(const std::vector<std::string>& args) {
  std::string s = "infocouple";
  for (const auto& a : args) s += " " + a;
  return s;
}

mdp::GridLayout load_layout(const std::string& path) {
  if (path.empty()) return mdp::default_layout();
  return layout_from_json(read_json_file(path));
}

struct Options {
  // ebim
  std::string dist, method = "alg1", out, grid, candidates = "auto";
  double rate = 0.0;
  // mec / mecb
  std::string p, q, px, py, encoder = "alg1", decoder = "max";
  // gridworld / mcg
  std::string layout, policy, curves;
  double beta = 0.05, tol = 1e-10;
  std::size_t messages = 64, sweep_messages = 512, episodes = 200, jobs = 0;
  std::optional<std::size_t> message;
  std::optional<std::uint64_t> seed;
  std::vector<double> betas, log_betas, rates;
  double priority = 1.0;
};

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entropy-bounded information coupling toolkit"};
  app.set_version_flag("--version", std::string(INFOCOUPLE_VERSION));
  app.require_subcommand(1);
  Options o;
  const std::string invocation = join_args(args);

  // ebim
  auto* ebim_cmd = app.add_subcommand("ebim", "Entropy-bounded information maximization");
  ebim_cmd->require_subcommand(1);
  auto* ebim_solve = ebim_cmd->add_subcommand("solve", "Encode p_X under a rate budget");
  ebim_solve->add_option("--dist", o.dist, "Distribution JSON {\"probs\":[...]}")->required();
  ebim_solve->add_option("--rate", o.rate, "Rate budget in bits")->required();
  ebim_solve->add_option("--method", o.method, "alg1|uniform|greedy-fill|brute")
      ->check(CLI::IsMember({"alg1", "uniform", "greedy-fill", "brute"}));
  ebim_solve->add_option("--out", o.out, "Write the coupling here instead of stdout");
  auto* ebim_frontier = ebim_cmd->add_subcommand("frontier", "Information-rate frontier over a rate grid");
  ebim_frontier->add_option("--dist", o.dist, "Distribution JSON")->required();
  ebim_frontier->add_option("--grid", o.grid, "start:stop:step")->required();
  ebim_frontier->add_option("--out", o.out, "CSV output")->required();
  ebim_frontier->add_option("--candidates", o.candidates, "auto|exact|traversal")
      ->check(CLI::IsMember({"auto", "exact", "traversal"}));

  // mec
  auto* mec_cmd = app.add_subcommand("mec", "Greedy minimum-entropy coupling");
  mec_cmd->require_subcommand(1);
  auto* mec_couple = mec_cmd->add_subcommand("couple", "Couple two marginals");
  mec_couple->add_option("--p", o.p, "Row marginal JSON")->required();
  mec_couple->add_option("--q", o.q, "Column marginal JSON")->required();
  mec_couple->add_option("--method", o.method, "max|zero")->check(CLI::IsMember({"max", "zero"}));
  mec_couple->add_option("--out", o.out, "Coupling JSON output");

  // mecb
  auto* mecb_cmd = app.add_subcommand("mecb", "Two-stage coupling through a rate-limited code");
  mecb_cmd->require_subcommand(1);
  auto* mecb_run = mecb_cmd->add_subcommand("run", "Run the encoder/decoder pipeline once");
  auto* mecb_sweep = mecb_cmd->add_subcommand("sweep", "Export end-to-end couplings over a rate grid");
  for (auto* cmd : {mecb_run, mecb_sweep}) {
    cmd->add_option("--px", o.px, "Input marginal JSON")->required();
    cmd->add_option("--py", o.py, "Output marginal JSON")->required();
    cmd->add_option("--encoder", o.encoder, "alg1|uniform|greedy-fill|brute")
        ->check(CLI::IsMember({"alg1", "uniform", "greedy-fill", "brute"}));
    cmd->add_option("--decoder", o.decoder, "max|zero")->check(CLI::IsMember({"max", "zero"}));
    cmd->add_option("--out", o.out, "Output file")->required();
  }
  mecb_run->add_option("--rate", o.rate, "Rate budget in bits")->required();
  mecb_sweep->add_option("--grid", o.grid, "start:stop:step")->required();

  // gridworld
  auto* grid_cmd = app.add_subcommand("gridworld", "Grid world utilities");
  grid_cmd->require_subcommand(1);
  auto* grid_train = grid_cmd->add_subcommand("train", "Soft Q iteration for a marginal policy");
  grid_train->add_option("--layout", o.layout, "Layout JSON (default layout if omitted)");
  grid_train->add_option("--beta", o.beta, "Temperature")->required();
  grid_train->add_option("--tol", o.tol, "Sup-norm stopping tolerance");
  grid_train->add_option("--out", o.out, "Policy JSON output")->required();

  // mcg
  auto* mcg_cmd = app.add_subcommand("mcg", "Rate-limited Markov coding game");
  mcg_cmd->require_subcommand(1);
  auto* mcg_run = mcg_cmd->add_subcommand("run", "Play one episode");
  mcg_run->add_option("--layout", o.layout, "Layout JSON (default layout if omitted)");
  mcg_run->add_option("--policy", o.policy, "Policy JSON from `gridworld train`");
  mcg_run->add_option("--beta", o.beta, "Train a policy with this beta when --policy is absent");
  mcg_run->add_option("--messages", o.messages, "Message alphabet size");
  mcg_run->add_option("--message", o.message, "True message (sampled from the prior if omitted)");
  mcg_run->add_option("--rate", o.rate, "Source-agent rate limit in bits")->required();
  mcg_run->add_option("--encoder", o.encoder, "alg1|uniform")->check(CLI::IsMember({"alg1", "uniform"}));
  mcg_run->add_option("--priority", o.priority, "Message priority zeta");
  mcg_run->add_option("--out", o.out, "Episode JSON output")->required();
  auto* mcg_sweep = mcg_cmd->add_subcommand("sweep", "Metrics over beta x rate x encoder");
  mcg_sweep->add_option("--layout", o.layout, "Layout JSON (default layout if omitted)");
  mcg_sweep->add_option("--betas", o.betas, "Temperatures")->delimiter(',');
  mcg_sweep->add_option("--log-betas", o.log_betas, "Natural logs of temperatures")->delimiter(',');
  mcg_sweep->add_option("--rates", o.rates, "Rate limits in bits")->delimiter(',')->required();
  mcg_sweep->add_option("--episodes", o.episodes, "Episodes per cell");
  mcg_sweep->add_option("--messages", o.sweep_messages, "Message alphabet size");
  mcg_sweep->add_option("--encoder", o.encoder, "alg1|uniform|both")
      ->check(CLI::IsMember({"alg1", "uniform", "both"}));
  mcg_sweep->add_option("--priority", o.priority, "Message priority zeta");
  mcg_sweep->add_option("--jobs", o.jobs, "Worker threads (default: logical cores)");
  mcg_sweep->add_option("--out", o.out, "Metrics CSV")->required();
  mcg_sweep->add_option("--curves", o.curves, "Belief curve CSV");
  for (auto* cmd : {mcg_run, mcg_sweep}) cmd->add_option("--seed", o.seed, "Seed (falls back to MECB_SEED)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << INFOCOUPLE_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    // Help requested on a subcommand surfaces here too.
    if (e.get_exit_code() == 0) {
      out << e.what() << '\n';
      return 0;
    }
    err << "usage error: " << e.what() << "\nRun with --help for usage.\n";
    return 2;
  }

  try {
    if (ebim_solve->parsed()) {
      const Distribution p_x = distribution_from_json(read_json_file(o.dist));
      const Coupling c = mecb::encode(p_x, o.rate, mecb::parse_encoder(o.method));
      json j = to_json(c);
      j["mutual_information"] = mutual_information(c);
      j["code_entropy"] = entropy(c.col_marginal());
      j["rate"] = o.rate;
      j["method"] = o.method;
      if (o.out.empty()) {
        out << j.dump(2) << '\n';
      } else {
        write_json_file(o.out, j);
        out << "I(X;T) = " << fmt12(j["mutual_information"].get<double>())
            << " bits, H(T) = " << fmt12(j["code_entropy"].get<double>()) << " bits\n";
      }
      return 0;
    }
    if (ebim_frontier->parsed()) {
      const Distribution p_x = distribution_from_json(read_json_file(o.dist));
      const auto grid = parse_grid(o.grid);
      const auto mode = o.candidates == "exact"       ? ebim::FrontierCandidates::all_partitions
                        : o.candidates == "traversal" ? ebim::FrontierCandidates::traversal
                                                      : ebim::FrontierCandidates::automatic;
      const auto points = ebim::frontier_sweep(p_x, grid, mode);
      auto f = open_out(o.out);
      f << "# " << invocation << '\n' << "rate,info,origin\n";
      for (const auto& pt : points) f << fmt12(pt.rate) << ',' << fmt12(pt.info) << ',' << ebim::to_string(pt.origin) << '\n';
      out << "wrote " << points.size() << " frontier points to " << o.out << '\n';
      return 0;
    }
    if (mec_couple->parsed()) {
      const Distribution p = distribution_from_json(read_json_file(o.p));
      const Distribution q = distribution_from_json(read_json_file(o.q));
      const std::string method = o.method == "alg1" ? "max" : o.method;
      const Coupling c = mec::couple(p, q, mec::parse_method(method));
      const Distribution rows = c.row_marginal(), cols = c.col_marginal();
      double row_err = 0.0, col_err = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) row_err = std::max(row_err, std::abs(rows[i] - p[i]));
      for (std::size_t i = 0; i < q.size(); ++i) col_err = std::max(col_err, std::abs(cols[i] - q[i]));
      json j = to_json(c);
      j["joint_entropy"] = mec::joint_entropy(c);
      j["method"] = method;
      if (!o.out.empty()) write_json_file(o.out, j);
      out << "joint_entropy " << fmt12(mec::joint_entropy(c)) << "\nrow_marginal_error " << fmt12(row_err)
          << "\ncol_marginal_error " << fmt12(col_err) << '\n';
      if (o.out.empty()) out << j.dump(2) << '\n';
      return 0;
    }
    if (mecb_run->parsed() || mecb_sweep->parsed()) {
      const Distribution p_x = distribution_from_json(read_json_file(o.px));
      const Distribution p_y = distribution_from_json(read_json_file(o.py));
      const auto enc = mecb::parse_encoder(o.encoder);
      const auto dec = mec::parse_method(o.decoder);
      if (mecb_run->parsed()) {
        const auto r = mecb::pipeline(p_x, p_y, o.rate, enc, dec);
        json j{{"encoder", to_json(r.encoder)},
               {"decoder", to_json(r.decoder)},
               {"end_to_end", to_json(r.end_to_end)},
               {"i_xt", r.i_xt},
               {"i_ty", r.i_ty},
               {"i_xy", r.i_xy},
               {"rate", r.rate},
               {"code_entropy", r.code_entropy},
               {"lower_bound", r.lower_bound},
               {"lower_bound_achieved", r.lower_bound_achieved}};
        write_json_file(o.out, j);
        out << "I(X;Y) = " << fmt12(r.i_xy) << " bits (lower bound " << fmt12(r.lower_bound_achieved) << ")\n";
      } else {
        std::vector<mecb::PipelineResult> results;
        for (double rate : parse_grid(o.grid)) results.push_back(mecb::pipeline(p_x, p_y, rate, enc, dec));
        mecb::export_coupling_grid(results, o.out, invocation);
        out << "wrote " << results.size() << " couplings to " << o.out << '\n';
      }
      return 0;
    }
    if (grid_train->parsed()) {
      const mdp::GridWorld env(load_layout(o.layout));
      const mdp::Policy policy = mdp::soft_q_iteration(env, o.beta, o.tol);
      write_json_file(o.out, to_json(policy, env.layout()));
      out << "mean action entropy " << fmt12(mdp::mean_policy_entropy(env, policy)) << " bits\n";
      return 0;
    }
    if (mcg_run->parsed()) {
      const mdp::GridWorld env(load_layout(o.layout));
      const mdp::Policy policy = o.policy.empty() ? mdp::soft_q_iteration(env, o.beta, o.tol)
                                                  : policy_from_json(read_json_file(o.policy));
      if (policy.num_states() != env.num_states()) throw ValidationError("policy does not match the layout");
      mcg::MessageConfig cfg;
      cfg.alphabet_size = o.messages;
      cfg.prior = Distribution::uniform(o.messages);
      cfg.rate = o.rate;
      cfg.priority = o.priority;
      cfg.encoder = mcg::parse_encoder(o.encoder);
      const std::uint64_t seed = resolve_seed(o.seed);
      Rng rng(seed);
      const std::size_t message = o.message ? *o.message : rng.categorical(cfg.prior.probs());
      const auto r = mcg::run_episode(env, policy, cfg, message, rng);
      json traj = json::array();
      for (const auto& st : r.trajectory) {
        const auto c = env.cell_of(st.state);
        traj.push_back(json{{"state", json::array({c.row, c.col})}, {"action", mdp::to_string(st.action)}});
      }
      json j{{"invocation", invocation},
             {"seed", seed},
             {"true_message", r.true_message},
             {"decoded", r.decoded},
             {"correct", r.correct},
             {"discounted_return", r.discounted_return},
             {"combined_score", r.combined_score},
             {"steps", r.trajectory.size()},
             {"belief_trace", r.belief_trace},
             {"trajectory", traj}};
      write_json_file(o.out, j);
      out << "decoded " << r.decoded << " (true " << r.true_message << "), return " << fmt12(r.discounted_return)
          << ", " << r.trajectory.size() << " steps\n";
      return 0;
    }
    if (mcg_sweep->parsed()) {
      const mdp::GridWorld env(load_layout(o.layout));
      mcg::SweepConfig cfg;
      cfg.betas = o.betas;
      for (double lb : o.log_betas) cfg.betas.push_back(std::exp(lb));
      if (cfg.betas.empty()) throw ValidationError("give --betas or --log-betas");
      cfg.rates = o.rates;
      cfg.episodes = o.episodes;
      cfg.alphabet_size = o.sweep_messages;
      cfg.priority = o.priority;
      cfg.seed = resolve_seed(o.seed);
      cfg.jobs = o.jobs ? o.jobs : std::max(1u, std::thread::hardware_concurrency());
      if (o.encoder == "both") {
        cfg.encoders = {mcg::Encoder::alg1, mcg::Encoder::uniform};
      } else {
        cfg.encoders = {mcg::parse_encoder(o.encoder)};
      }
      const auto rows = mcg::sweep(env, cfg);
      const std::string header = "# " + invocation + " (seed " + std::to_string(cfg.seed) + ")\n";
      auto f = open_out(o.out);
      f << header << "beta,rate,encoder,mean_return,accuracy,combined,steps_mean\n";
      for (const auto& r : rows) {
        f << fmt12(r.beta) << ',' << fmt12(r.rate) << ',' << mcg::to_string(r.encoder) << ',' << fmt12(r.mean_return)
          << ',' << fmt12(r.accuracy) << ',' << fmt12(r.combined) << ',' << fmt12(r.steps_mean) << '\n';
      }
      if (!o.curves.empty()) {
        auto c = open_out(o.curves);
        c << header << "beta,rate,encoder,step,mean_true_belief\n";
        for (const auto& r : rows)
          for (std::size_t i = 0; i < r.belief_curve.size(); ++i)
            c << fmt12(r.beta) << ',' << fmt12(r.rate) << ',' << mcg::to_string(r.encoder) << ',' << i + 1 << ','
              << fmt12(r.belief_curve[i]) << '\n';
      }
      out << "wrote " << rows.size() << " rows to " << o.out << '\n';
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  err << "usage error: no command\n";
  return 2;
}

int dispatch(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, out, err);
}

}  // namespace infocouple::cli

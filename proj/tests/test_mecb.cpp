#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "infocouple/ebim.hpp"
#include "infocouple/errors.hpp"
#include "infocouple/mecb.hpp"
#include "support.hpp"

using namespace infocouple;
using namespace infocouple::mecb;

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::vector<std::string> lines;
  for (std::string line; std::getline(f, line);) lines.push_back(line);
  return lines;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("infocouple_test_" + name);
}

// Random Markov chain: arbitrary p_XT, then p_TY with row marginal p_T.
std::pair<Coupling, Coupling> random_chain(Rng& rng, std::size_t nx, std::size_t nt, std::size_t ny) {
  Coupling p_xt = testsupport::random_joint(rng, nx, nt);
  const Distribution p_t = p_xt.col_marginal();
  std::vector<double> ty(nt * ny);
  for (std::size_t t = 0; t < nt; ++t) {
    const Distribution row = testsupport::dirichlet(rng, ny);
    for (std::size_t y = 0; y < ny; ++y) ty[t * ny + y] = p_t[t] * row[y];
  }
  return {std::move(p_xt), Coupling(nt, ny, std::move(ty))};
}

}  // namespace

TEST_CASE("encoder names") {
  for (auto m : {EncoderMethod::alg1, EncoderMethod::uniform, EncoderMethod::greedy_fill, EncoderMethod::brute}) {
    CHECK(parse_encoder(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_encoder("neural"), DomainError);
}

TEST_CASE("encode dispatch") {
  const Distribution p({0.4, 0.3, 0.2, 0.1});
  CHECK(encode(p, 1.2, EncoderMethod::alg1) == ebim::solve_deterministic(p, 1.2));
  CHECK(encode(p, 1.0, EncoderMethod::uniform) == ebim::uniform_quantizer(p, 1.0));
  CHECK(encode(p, 1.0, EncoderMethod::greedy_fill) == ebim::greedy_fill_encoder(p, 2));
  CHECK(encode(p, 1.2, EncoderMethod::brute) == ebim::brute_force_deterministic(p, 1.2).coupling);
  CHECK_THROWS_AS(encode(p, -1.0, EncoderMethod::greedy_fill), DomainError);
}

TEST_CASE("pipeline without a binding bottleneck") {
  const Distribution u = Distribution::uniform(4);
  const auto r = pipeline(u, u, 2.0);
  CHECK(r.i_xy == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.i_xt == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.end_to_end == Coupling::diagonal(u));
  CHECK(r.code_entropy == doctest::Approx(2.0));
  CHECK(r.lower_bound == doctest::Approx(2.0));
}

TEST_CASE("pipeline at zero rate is independent") {
  const Distribution px({0.5, 0.2, 0.3}), py({0.1, 0.9});
  const auto r = pipeline(px, py, 0.0);
  CHECK(r.i_xy == 0.0);
  CHECK(r.code_entropy == 0.0);
  for (std::size_t x = 0; x < 3; ++x)
    for (std::size_t y = 0; y < 2; ++y) CHECK(r.end_to_end(x, y) == doctest::Approx(px[x] * py[y]));
}

TEST_CASE("compose chain") {
  const Distribution d({0.3, 0.7});
  const Coupling id = Coupling::diagonal(d);
  CHECK(compose_chain(id, id) == id);
  const Coupling single = Coupling::from_rows({{0.2, 0.8}});
  const Coupling enc = Coupling::from_rows({{0.6}, {0.4}});
  const Coupling prod = compose_chain(enc, single);
  CHECK(prod(0, 1) == doctest::Approx(0.48));
  CHECK(prod(1, 0) == doctest::Approx(0.08));
  CHECK_THROWS_AS(compose_chain(id, single), CompositionError);
  CHECK_THROWS_AS(compose_chain(id, Coupling::diagonal(Distribution({0.5, 0.5}))), CompositionError);

  // Zero-mass codes contribute nothing rather than failing.
  const Coupling sparse_enc = Coupling::from_rows({{0.5, 0.0}, {0.5, 0.0}});
  const Coupling sparse_dec = Coupling::from_rows({{0.25, 0.75}, {0.0, 0.0}});
  const Coupling out = compose_chain(sparse_enc, sparse_dec);
  CHECK(out(0, 1) == doctest::Approx(0.375));
}

TEST_CASE("worked 3x2x3 chain") {
  const Coupling p_xt = Coupling::from_rows({{0.3, 0.1}, {0.0, 0.2}, {0.1, 0.3}});
  const Coupling p_ty = Coupling::from_rows({{0.2, 0.2, 0.0}, {0.0, 0.3, 0.3}});
  const Coupling p_xy = compose_chain(p_xt, p_ty);
  // p(y|t=0) = [.5,.5,0], p(y|t=1) = [0,.5,.5]
  CHECK(p_xy(0, 0) == doctest::Approx(0.15));
  CHECK(p_xy(0, 1) == doctest::Approx(0.2));
  CHECK(p_xy(0, 2) == doctest::Approx(0.05));
  CHECK(p_xy(1, 1) == doctest::Approx(0.1));
  CHECK(p_xy(2, 2) == doctest::Approx(0.15));
  CHECK(p_xy.row_marginal()[2] == doctest::Approx(0.4));
  CHECK(p_xy.col_marginal()[1] == doctest::Approx(0.5));
  const auto audit = lemma1_audit(p_xt, p_ty);
  CHECK(std::abs(audit.residual()) < 1e-12);
  CHECK(std::abs(audit.i_xy - mutual_information(p_xy)) < 1e-12);
  CHECK(std::abs(audit.i_xt - mutual_information(p_xt)) < 1e-12);
  CHECK(std::abs(audit.i_ty - mutual_information(p_ty)) < 1e-12);
}

TEST_CASE("chain bookkeeping for special chains") {
  const Distribution p({0.4, 0.3, 0.2, 0.1});
  const Coupling enc = ebim::solve_deterministic(p, 1.2);
  const Coupling dec = Coupling::diagonal(enc.col_marginal());
  const auto audit = lemma1_audit(enc, dec);
  CHECK(std::abs(audit.i_xy - audit.i_xt) < 1e-12);
  CHECK(std::abs(audit.i_t_xy - audit.i_ty) < 1e-12);

  const Distribution a({0.5, 0.5}), b({0.3, 0.7}), c({0.2, 0.8});
  const auto indep = lemma1_audit(Coupling::product(a, b), Coupling::product(b, c));
  CHECK(std::abs(indep.i_xy) < 1e-12);
  CHECK(std::abs(indep.i_xt) < 1e-12);
  CHECK(std::abs(indep.i_ty) < 1e-12);
  CHECK(std::abs(indep.i_t_xy) < 1e-12);
}

TEST_CASE("coupling grid export") {
  const auto path = temp_file("grid.csv");
  const Distribution u = Distribution::uniform(3);
  const std::vector<PipelineResult> one{pipeline(u, u, 2.0)};
  export_coupling_grid(one, path, "unit test");
  const auto lines = read_lines(path);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "# unit test");
  CHECK(lines[1] == "compression_rate,x,y,mass");
  CHECK(lines[2].rfind("0.792481250361,0,0,0.333333333333", 0) == 0);
  CHECK(lines[4].find(",2,2,") != std::string::npos);
  CHECK_THROWS_AS(export_coupling_grid(std::vector<PipelineResult>{}, path), DomainError);
  std::filesystem::remove(path);
}

TEST_CASE("support grows with compression on uniform marginals") {
  const Distribution u = Distribution::uniform(30);
  std::size_t previous = 0;
  bool first = true;
  std::size_t at_full = 0, at_tight = 0;
  for (double rate : {std::log2(30.0), 4.0, 3.0, 2.0, 1.0}) {
    const auto r = pipeline(u, u, rate);
    const auto nonzero = static_cast<std::size_t>(
        std::count_if(r.end_to_end.cells().begin(), r.end_to_end.cells().end(), [](double v) { return v > 0.0; }));
    if (!first) CHECK(nonzero >= previous);
    if (first) at_full = nonzero;
    at_tight = nonzero;
    previous = nonzero;
    first = false;
  }
  CHECK(at_full == 30);
  CHECK(at_tight > at_full);
}

TEST_CASE("property: chain identity, lower bounds and data processing") {
  Rng rng(31);
  for (int k = 0; k < 300; ++k) {
    const auto [p_xt, p_ty] = random_chain(rng, testsupport::uniform_int(rng, 1, 12),
                                           testsupport::uniform_int(rng, 1, 12), testsupport::uniform_int(rng, 1, 12));
    const auto audit = lemma1_audit(p_xt, p_ty);
    CHECK(std::abs(audit.residual()) < 1e-9);
    CHECK(audit.i_xy <= std::min(audit.i_xt, audit.i_ty) + 1e-9);
    CHECK(std::abs(audit.i_xy - mutual_information(compose_chain(p_xt, p_ty))) < 1e-9);
  }
  for (int k = 0; k < 200; ++k) {
    const Distribution px = testsupport::dirichlet(rng, testsupport::uniform_int(rng, 1, 16));
    const Distribution py = testsupport::dirichlet(rng, testsupport::uniform_int(rng, 1, 16));
    const double rate = rng.uniform() * (entropy(px) + 0.3);
    for (auto dec : {mec::Method::max_seeking, mec::Method::zero_seeking}) {
      const auto r = pipeline(px, py, rate, EncoderMethod::alg1, dec);
      CHECK(r.i_xy >= r.lower_bound - 1e-9);
      CHECK(r.i_xy >= r.lower_bound_achieved - 1e-9);
      CHECK(r.lower_bound_achieved >= r.lower_bound - 1e-9);
      CHECK(r.i_xy <= std::min(r.i_xt, r.i_ty) + 1e-9);
      const Distribution rows = r.end_to_end.row_marginal(), cols = r.end_to_end.col_marginal();
      for (std::size_t i = 0; i < px.size(); ++i) CHECK(std::abs(rows[i] - px[i]) <= 1e-9);
      for (std::size_t j = 0; j < py.size(); ++j) CHECK(std::abs(cols[j] - py[j]) <= 1e-9);
      const Distribution enc_t = r.encoder.col_marginal(), dec_t = r.decoder.row_marginal();
      for (std::size_t t = 0; t < enc_t.size(); ++t) CHECK(std::abs(enc_t[t] - dec_t[t]) <= 1e-9);
    }
  }
}

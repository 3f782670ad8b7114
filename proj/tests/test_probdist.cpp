#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "infocouple/errors.hpp"
#include "infocouple/probdist.hpp"
#include "support.hpp"

using namespace infocouple;
using doctest::Approx;

namespace {

// Reference values computed at 50 digits and frozen.
constexpr double kH4321 = 1.84643934467101550;
constexpr double kH03 = 0.88129089923069262;
constexpr double kDrop43 = 0.68965969522397597;
constexpr double kH721 = 1.15677964944703953;
constexpr double kH73 = 0.88129089923069266;
constexpr double kH64 = 0.97095059445466865;
constexpr double kJoint = 1.29546184423832181;
constexpr double kMi = 0.55677964944703950;

}  // namespace

TEST_CASE("distribution validation") {
  CHECK_NOTHROW(Distribution({0.5, 0.5}));
  CHECK_THROWS_AS(Distribution({}), ValidationError);
  CHECK_THROWS_AS(Distribution({0.6, 0.6}), ValidationError);
  CHECK_THROWS_AS(Distribution({1.1, -0.1}), ValidationError);
  CHECK_THROWS_AS(Distribution({std::nan(""), 1.0}), ValidationError);
  // Tiny negatives are clamped, not rejected.
  const Distribution d({1.0 + 5e-13, -5e-13});
  CHECK(d[1] == 0.0);
  CHECK(Distribution::uniform(4)[3] == 0.25);
  CHECK(Distribution::point_mass(3, 2)[2] == 1.0);
  CHECK_THROWS_AS(Distribution::point_mass(3, 3), DomainError);
  CHECK(Distribution::normalized({2.0, 6.0})[1] == Approx(0.75));
  CHECK_THROWS_AS(Distribution::normalized({0.0, 0.0}), ValidationError);
}

TEST_CASE("coupling validation and marginals") {
  const Coupling c = Coupling::from_rows({{0.6, 0.0}, {0.1, 0.3}});
  CHECK(c.rows() == 2);
  CHECK(c.cols() == 2);
  const auto [rows, cols] = marginals(c);
  CHECK(rows[0] == Approx(0.6));
  CHECK(rows[1] == Approx(0.4));
  CHECK(cols[0] == Approx(0.7));
  CHECK(cols[1] == Approx(0.3));
  CHECK_THROWS_AS(Coupling::from_rows({{0.5, 0.5}, {0.5}}), ValidationError);
  CHECK_THROWS_AS(Coupling(2, 2, {0.5, 0.5, 0.5}), ValidationError);
  CHECK_THROWS_AS(Coupling::from_rows({{0.5, 0.4}}), ValidationError);

  const Distribution d({0.7, 0.2, 0.1});
  const auto [dr, dc] = marginals(Coupling::diagonal(d));
  CHECK(dr == d);
  CHECK(dc == d);
  const Distribution q({0.25, 0.75});
  const auto [pr, pc] = marginals(Coupling::product(d, q));
  for (std::size_t i = 0; i < 3; ++i) CHECK(pr[i] == Approx(d[i]).epsilon(1e-14));
  for (std::size_t i = 0; i < 2; ++i) CHECK(pc[i] == Approx(q[i]).epsilon(1e-14));
}

TEST_CASE("entropy") {
  CHECK(entropy(Distribution({0.5, 0.5})) == Approx(1.0).epsilon(1e-15));
  CHECK(entropy(Distribution({1.0})) == 0.0);
  CHECK(std::abs(entropy(Distribution({0.4, 0.3, 0.2, 0.1})) - kH4321) < 1e-12);
  CHECK(entropy(Distribution({0.0, 1.0, 0.0})) == 0.0);
}

TEST_CASE("binary entropy") {
  CHECK(binary_entropy(0.5) == Approx(1.0).epsilon(1e-15));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(std::abs(binary_entropy(0.3) - kH03) < 1e-12);
  CHECK_THROWS_AS(binary_entropy(-0.01), DomainError);
  CHECK_THROWS_AS(binary_entropy(1.01), DomainError);
}

TEST_CASE("merge entropy drop") {
  CHECK(merge_entropy_drop(0.5, 0.5) == Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(merge_entropy_drop(0.4, 0.3) - kDrop43) < 1e-12);
  CHECK_THROWS_AS(merge_entropy_drop(0.0, 0.3), DomainError);
  CHECK_THROWS_AS(merge_entropy_drop(0.3, -0.1), DomainError);
  Rng rng(1);
  for (int k = 0; k < 200; ++k) {
    const double p = 1e-6 + rng.uniform() * (1.0 - 2e-6);
    CHECK(std::abs(merge_entropy_drop(p, 1.0 - p) - binary_entropy(p)) < 1e-12);
  }
}

TEST_CASE("mutual information") {
  const Distribution half({0.5, 0.5});
  CHECK(mutual_information(Coupling::product(half, half)) == 0.0);
  CHECK(std::abs(mutual_information(Coupling::diagonal(Distribution({0.7, 0.2, 0.1}))) - kH721) < 1e-12);
  const Coupling c = Coupling::from_rows({{0.6, 0.0}, {0.1, 0.3}});
  CHECK(std::abs(mutual_information(c) - kMi) < 1e-12);
  CHECK(std::abs(kH73 + kH64 - kJoint - kMi) < 1e-15);
}

TEST_CASE("conditionals") {
  const Coupling c = Coupling::from_rows({{0.6, 0.0}, {0.1, 0.3}});
  const Distribution given0 = conditional(c, 0);
  CHECK(given0[0] == Approx(6.0 / 7.0));
  CHECK(given0[1] == Approx(1.0 / 7.0));
  const Distribution row1 = row_conditional(c, 1);
  CHECK(row1[0] == Approx(0.25));
  CHECK(row1[1] == Approx(0.75));
  const Coupling diag = Coupling::diagonal(Distribution({0.2, 0.3, 0.5}));
  for (std::size_t i = 0; i < 3; ++i) CHECK(conditional(diag, i) == Distribution::point_mass(3, i));
  const Coupling indep = Coupling::from_rows({{0.25, 0.25}, {0.25, 0.25}});
  CHECK(conditional(indep, 1)[0] == Approx(0.5));
  const Coupling zero_col = Coupling::from_rows({{0.5, 0.0}, {0.5, 0.0}});
  CHECK_THROWS_AS(conditional(zero_col, 1), ConditioningError);
  const Coupling zero_row = Coupling::from_rows({{0.5, 0.5}, {0.0, 0.0}});
  CHECK_THROWS_AS(row_conditional(zero_row, 1), ConditioningError);
}

TEST_CASE("property: entropy bounds and permutation invariance") {
  Rng rng(2);
  for (int k = 0; k < 300; ++k) {
    const std::size_t n = testsupport::uniform_int(rng, 1, 40);
    const Distribution d = testsupport::dirichlet(rng, n);
    const double h = entropy(d);
    CHECK(h >= 0.0);
    CHECK(h <= std::log2(static_cast<double>(n)) + 1e-12);
    CHECK(std::abs(h - testsupport::naive_entropy(d.vector())) < 1e-12);
    std::vector<double> shuffled = d.vector();
    std::reverse(shuffled.begin(), shuffled.end());
    std::rotate(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n / 2), shuffled.end());
    CHECK(std::abs(entropy(Distribution(shuffled)) - h) < 1e-12);
  }
  for (std::size_t n : {1u, 2u, 7u, 64u}) {
    CHECK(std::abs(entropy(Distribution::uniform(n)) - std::log2(static_cast<double>(n))) < 1e-9);
  }
}

TEST_CASE("property: merge drop is consistent, monotone and midpoint concave") {
  Rng rng(3);
  for (int k = 0; k < 300; ++k) {
    const std::size_t n = testsupport::uniform_int(rng, 2, 20);
    const Distribution d = testsupport::dirichlet(rng, n);
    std::vector<double> merged(d.vector().begin() + 1, d.vector().end());
    merged[0] += d[0];
    CHECK(std::abs(entropy(d) - entropy_bits(merged) - merge_entropy_drop(d[0], d[1])) < 1e-12);

    const double p = 0.01 + 0.4 * rng.uniform();
    const double q = 0.01 + 0.4 * rng.uniform();
    const double q2 = q + 0.1 * rng.uniform();
    CHECK(merge_entropy_drop(p, q2) >= merge_entropy_drop(p, q) - 1e-15);

    const double a = 0.01 + 0.45 * rng.uniform(), b = 0.01 + 0.45 * rng.uniform();
    const double c = 0.01 + 0.45 * rng.uniform(), e = 0.01 + 0.45 * rng.uniform();
    CHECK(merge_entropy_drop((a + c) / 2, (b + e) / 2) >=
          (merge_entropy_drop(a, b) + merge_entropy_drop(c, e)) / 2 - 1e-9);
  }
}

TEST_CASE("property: mutual information bounds") {
  Rng rng(4);
  for (int k = 0; k < 300; ++k) {
    const Coupling c = testsupport::random_joint(rng, testsupport::uniform_int(rng, 1, 10),
                                                 testsupport::uniform_int(rng, 1, 10));
    const double mi = mutual_information(c);
    CHECK(mi >= 0.0);
    CHECK(mi <= std::min(entropy(c.row_marginal()), entropy(c.col_marginal())) + 1e-9);
    CHECK(std::abs(std::max(0.0, testsupport::naive_mi(c)) - mi) < 1e-12);
  }
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <sstream>

#include "slide/coupling_matrix.hpp"
#include "slide/dataset.hpp"
#include "slide/exact.hpp"
#include "slide/generators.hpp"
#include "slide/gibbs.hpp"
#include "slide/numeric.hpp"
#include "slide/rng.hpp"
#include "slide/vote_ingest.hpp"

using namespace slide;

namespace {

CouplingMatrix random_coupling(int p, double scale, std::uint64_t seed) {
  Rng rng(seed);
  CouplingMatrix coupling(p);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      coupling.set(i, j, scale * (2.0 * rng.uniform01() - 1.0));
  return coupling;
}

}  // namespace

TEST_CASE("coupling matrix stores symmetric zero-diagonal entries") {
  CouplingMatrix coupling(4);
  coupling.set(2, 0, 0.7);
  CHECK(coupling(0, 2) == 0.7);
  CHECK(coupling(2, 0) == 0.7);
  CHECK(coupling(1, 1) == 0.0);
  CHECK_THROWS_AS(coupling.set(1, 1, 0.5), ValidationError);
  coupling.set(0, 1, -0.25);
  CHECK(coupling.num_edges() == 2);
  CHECK(coupling.degree(0) == 2);
  CHECK(coupling.degree(3) == 0);
  CHECK(coupling.row_abs_sum(0) == Catch::Approx(0.95));
  const auto edges = coupling.edges();
  REQUIRE(edges.size() == 2);
  CHECK(edges[0].i == 0);
  CHECK(edges[0].j == 1);
  CHECK(edges[1].j == 2);
}

TEST_CASE("model file round trip preserves values to full precision") {
  CouplingMatrix coupling(5);
  coupling.set(0, 3, 1.0 / 3.0);
  coupling.set(1, 2, -0.123456789012345);
  coupling.set(2, 4, 1e-7);
  const std::string text = model_to_string(coupling);
  std::istringstream in(text);
  const CouplingMatrix back = read_model(in);
  REQUIRE(back.p() == 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) CHECK(back(i, j) == coupling(i, j));
}

TEST_CASE("model file parse errors name the offending line") {
  std::istringstream bad_header("q 5\n");
  CHECK_THROWS_WITH(read_model(bad_header), Catch::Matchers::ContainsSubstring("line 1"));
  std::istringstream bad_order("p 4\n2 1 0.5\n");
  CHECK_THROWS_WITH(read_model(bad_order), Catch::Matchers::ContainsSubstring("line 2"));
  std::istringstream bad_token("p 4\n0 1 0.5\n1 x 0.2\n");
  CHECK_THROWS_WITH(read_model(bad_token), Catch::Matchers::ContainsSubstring("line 3"));
}

TEST_CASE("family scan reads off min signal, neighborhood weight, and degree") {
  CouplingMatrix coupling(4);
  coupling.set(0, 1, 0.5);
  coupling.set(0, 2, -0.2);
  coupling.set(0, 3, 0.4);
  const FamilyParams fam = scan_family(coupling);
  CHECK(fam.lambda == Catch::Approx(0.2));
  CHECK(fam.gamma == Catch::Approx(1.1));
  CHECK(fam.d == 3);
}

TEST_CASE("exact distribution on one free spin is uniform") {
  const ExactDistribution dist(CouplingMatrix(1));
  CHECK(dist.probability(0) == Catch::Approx(0.5));
  CHECK(dist.probability(1) == Catch::Approx(0.5));
}

TEST_CASE("exact distribution matches the enumerated two-spin table") {
  CouplingMatrix coupling(2);
  coupling.set(0, 1, std::log(2.0));
  const ExactDistribution dist(coupling);
  // States (z1,z2): energies ln2 for aligned, -ln2 otherwise; partition = 5.
  CHECK(dist.log_partition() == Catch::Approx(std::log(5.0)).margin(1e-14));
  CHECK(dist.probability_of({-1, -1}) == Catch::Approx(0.4).margin(1e-14));
  CHECK(dist.probability_of({1, 1}) == Catch::Approx(0.4).margin(1e-14));
  CHECK(dist.probability_of({1, -1}) == Catch::Approx(0.1).margin(1e-14));
  CHECK(dist.probability_of({-1, 1}) == Catch::Approx(0.1).margin(1e-14));
  CHECK(dist.pair_moment(0, 1) == Catch::Approx(0.6).margin(1e-14));
}

TEST_CASE("exact distribution with no couplings is uniform over all states") {
  const ExactDistribution dist(CouplingMatrix(3));
  for (std::size_t m = 0; m < 8; ++m) CHECK(dist.probability(m) == Catch::Approx(0.125));
}

TEST_CASE("exact distribution probabilities sum to one") {
  for (int p : {2, 5, 9, 12}) {
    const ExactDistribution dist(random_coupling(p, 1.0, 77 + p));
    double total = 0.0;
    for (std::size_t m = 0; m < dist.num_states(); ++m) total += dist.probability(m);
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
}

TEST_CASE("exact distribution refuses more than 20 nodes") {
  CHECK_THROWS_AS(ExactDistribution(CouplingMatrix(21)), ValidationError);
}

TEST_CASE("conditional probability closed form") {
  std::vector<double> coef(2, 0.0);
  std::vector<std::int8_t> z = {1, 1};
  CHECK(conditional_prob(coef, z.data(), 0) == Catch::Approx(0.5));
  coef[1] = 0.5;
  CHECK(conditional_prob(coef, z.data(), 0) ==
        Catch::Approx(0.7310585786300049).margin(1e-15));
  std::vector<std::int8_t> flipped = {-1, 1};
  CHECK(conditional_prob(coef, flipped.data(), 0) ==
        Catch::Approx(1.0 - 0.7310585786300049).margin(1e-15));
}

TEST_CASE("conditional probability agrees with the exact distribution") {
  const int p = 6;
  const CouplingMatrix coupling = random_coupling(p, 0.8, 123);
  const ExactDistribution dist(coupling);
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::int8_t> z(p);
    for (auto& s : z) s = rng.spin();
    const int i = static_cast<int>(rng.uniform_below(p));
    std::vector<double> coef = coupling.column(i);
    std::vector<int> zi(z.begin(), z.end());
    std::vector<int> zflip = zi;
    zflip[i] = -zflip[i];
    const double p_keep = dist.probability_of(zi);
    const double p_flip = dist.probability_of(zflip);
    const double expected = p_keep / (p_keep + p_flip);
    CHECK(conditional_prob(coef, z.data(), i) == Catch::Approx(expected).margin(1e-10));
  }
}

TEST_CASE("exact sampler is deterministic and matches enumerated moments") {
  CouplingMatrix coupling(2);
  coupling.set(0, 1, std::log(2.0));
  const ExactDistribution dist(coupling);
  const Dataset a = sample_exact(dist, 2000, 42);
  const Dataset b = sample_exact(dist, 2000, 42);
  for (int r = 0; r < a.n(); ++r)
    for (int j = 0; j < 2; ++j) REQUIRE(a(r, j) == b(r, j));
  const Dataset big = sample_exact(dist, 100000, 7);
  CHECK(std::abs(big.pair_moment(0, 1) - 0.6) < 0.01);

  const ExactDistribution uniform(CouplingMatrix(2));
  const Dataset free_spins = sample_exact(uniform, 4000, 3);
  CHECK(std::abs(free_spins.pair_moment(0, 1)) < 0.08);
}

TEST_CASE("gibbs sampler with no couplings gives centered spins") {
  const CouplingMatrix coupling(5);
  const int n = 4000;
  const Dataset data = gibbs_sample(coupling, n, 50, 2, 11);
  for (int j = 0; j < 5; ++j) CHECK(std::abs(data.mean(j)) < 4.0 / std::sqrt(n));
}

TEST_CASE("gibbs sampler is deterministic given the seed") {
  const CouplingMatrix coupling = random_coupling(6, 0.5, 9);
  const Dataset a = gibbs_sample(coupling, 100, 30, 3, 21);
  const Dataset b = gibbs_sample(coupling, 100, 30, 3, 21);
  for (int r = 0; r < 100; ++r)
    for (int j = 0; j < 6; ++j) REQUIRE(a(r, j) == b(r, j));
}

TEST_CASE("gibbs boundary case records exactly one sweep from the seeded start") {
  const CouplingMatrix coupling = random_coupling(4, 0.7, 31);
  const Dataset data = gibbs_sample(coupling, 1, 0, 1, 99);
  // Replay the chain by hand: p initial spins, then one pass of site updates.
  Rng rng(99);
  std::vector<std::int8_t> z(4);
  for (auto& s : z) s = rng.spin();
  for (int i = 0; i < 4; ++i) {
    double field = 0.0;
    for (int j = 0; j < 4; ++j) field += coupling(i, j) * z[j];
    z[i] = rng.uniform01() < sigmoid(2.0 * field) ? 1 : -1;
  }
  for (int j = 0; j < 4; ++j) CHECK(data(0, j) == z[j]);
}

TEST_CASE("gibbs moments approach exact moments") {
  const CouplingMatrix coupling = random_coupling(4, 1.0, 2024);
  const ExactDistribution dist(coupling);
  const Dataset data = gibbs_sample(coupling, 50000, 1000, 10, 5);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      CHECK(std::abs(data.pair_moment(i, j) - dist.pair_moment(i, j)) < 0.02);
}

TEST_CASE("regular graph generator produces the requested topology") {
  const CouplingMatrix coupling = generate_rrg(6, 3, 0.5, 0.5, Pattern::FerroOneWeak, 1);
  CHECK(coupling.num_edges() == 9);
  for (int i = 0; i < 6; ++i) CHECK(coupling.degree(i) == 3);
  CHECK_THROWS_AS(generate_rrg(5, 3, 0.5, 0.3, Pattern::FerroOneWeak, 1), ValidationError);
  CHECK_THROWS_AS(generate_rrg(6, 6, 0.5, 0.3, Pattern::FerroOneWeak, 1), ValidationError);
}

TEST_CASE("matching pattern gives every node exactly one weak neighbor") {
  const CouplingMatrix coupling =
      generate_rrg(6, 3, 0.4, 0.2, Pattern::DegreeDisentangled, 5);
  int weak_edges = 0;
  double max_row = 0.0;
  for (int i = 0; i < 6; ++i) {
    int weak_here = 0;
    for (int j = 0; j < 6; ++j)
      if (coupling(i, j) == 0.2) ++weak_here;
    CHECK(weak_here == 1);
    CHECK(coupling.degree(i) == 3);
    max_row = std::max(max_row, coupling.row_abs_sum(i));
  }
  for (const auto& e : coupling.edges())
    if (e.value == 0.2) ++weak_edges;
  CHECK(weak_edges == 3);
  CHECK(max_row == Catch::Approx(1.0));
  CHECK_THROWS_AS(generate_rrg(7, 2, 0.4, 0.2, Pattern::DegreeDisentangled, 1),
                  ValidationError);
}

TEST_CASE("one weak edge pattern counts") {
  const CouplingMatrix coupling = generate_rrg(6, 3, 0.5, 0.3, Pattern::FerroOneWeak, 3);
  int weak = 0, strong = 0;
  for (const auto& e : coupling.edges()) {
    if (e.value == 0.3) ++weak;
    if (e.value == 0.5) ++strong;
  }
  CHECK(weak == 1);
  CHECK(strong == 8);
}

TEST_CASE("mixed sign pattern forces one weak pair") {
  const CouplingMatrix coupling = generate_rrg(8, 3, 0.5, 0.3, Pattern::MixedTwoWeak, 17);
  int plus_weak = 0, minus_weak = 0, strong = 0;
  for (const auto& e : coupling.edges()) {
    if (e.value == 0.3) ++plus_weak;
    else if (e.value == -0.3) ++minus_weak;
    else {
      CHECK(std::abs(e.value) == Catch::Approx(0.5));
      ++strong;
    }
  }
  CHECK(plus_weak == 1);
  CHECK(minus_weak == 1);
  CHECK(strong == 10);
}

TEST_CASE("torus generator produces degree-4 lattices") {
  const CouplingMatrix coupling = generate_pbsl(4, 0.5, 0.3, Pattern::FerroOneWeak, 1);
  CHECK(coupling.p() == 16);
  CHECK(coupling.num_edges() == 32);
  for (int i = 0; i < 16; ++i) CHECK(coupling.degree(i) == 4);
  int weak = 0, strong = 0;
  for (const auto& e : coupling.edges()) {
    if (e.value == 0.3) ++weak;
    if (e.value == 0.5) ++strong;
  }
  CHECK(weak == 1);
  CHECK(strong == 31);
  CHECK_THROWS_AS(generate_pbsl(2, 0.5, 0.3, Pattern::FerroOneWeak, 1), ValidationError);
}

TEST_CASE("torus negative pattern plants exactly one negative edge") {
  const CouplingMatrix coupling =
      generate_pbsl(4, 0.5, 0.3, Pattern::FerroOneWeakNegative, 12);
  int negative = 0;
  double min_mag = 1e9;
  for (const auto& e : coupling.edges()) {
    if (e.value < 0) {
      ++negative;
      CHECK(e.value == Catch::Approx(-0.3));
    }
    min_mag = std::min(min_mag, std::abs(e.value));
  }
  CHECK(negative == 1);
  CHECK(min_mag == Catch::Approx(0.3));
}

TEST_CASE("generated models satisfy their declared family bounds") {
  const std::vector<Pattern> patterns = {Pattern::DegreeDisentangled, Pattern::FerroOneWeak,
                                         Pattern::MixedTwoWeak};
  for (Pattern pat : patterns)
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
      const auto model = BenchmarkModel::rrg(10, 3, 0.5, 0.3, pat, seed);
      const FamilyParams declared = model.family();
      const FamilyParams actual = scan_family(model.build());
      CHECK(actual.lambda >= declared.lambda - 1e-12);
      CHECK(actual.gamma <= declared.gamma + 1e-12);
      CHECK(actual.d <= declared.d);
    }
  for (Pattern pat : {Pattern::FerroOneWeak, Pattern::FerroOneWeakNegative,
                      Pattern::MixedTwoWeak, Pattern::DegreeDisentangled}) {
    const auto model = BenchmarkModel::pbsl(4, 0.5, 0.3, pat, 4);
    const FamilyParams declared = model.family();
    const FamilyParams actual = scan_family(model.build());
    CHECK(actual.lambda >= declared.lambda - 1e-12);
    CHECK(actual.gamma <= declared.gamma + 1e-12);
    CHECK(actual.d <= declared.d);
  }
}

TEST_CASE("generator output is reproducible from the seed") {
  const CouplingMatrix a = generate_rrg(10, 3, 0.5, 0.3, Pattern::MixedTwoWeak, 31);
  const CouplingMatrix b = generate_rrg(10, 3, 0.5, 0.3, Pattern::MixedTwoWeak, 31);
  CHECK(model_to_string(a) == model_to_string(b));
}

TEST_CASE("samples file round trip") {
  Dataset data(3, 2);
  data.set(0, 1, -1);
  data.set(2, 0, -1);
  std::ostringstream os;
  write_samples(os, data);
  CHECK(os.str().rfind("# n=3 p=2\n", 0) == 0);
  std::istringstream in(os.str());
  const Dataset back = read_samples(in);
  REQUIRE(back.n() == 3);
  REQUIRE(back.p() == 2);
  for (int r = 0; r < 3; ++r)
    for (int j = 0; j < 2; ++j) CHECK(back(r, j) == data(r, j));
}

TEST_CASE("samples file rejects bad tokens and ragged rows") {
  std::istringstream bad_tok("+1 -1\n+1 0\n");
  CHECK_THROWS_WITH(read_samples(bad_tok), Catch::Matchers::ContainsSubstring("line 2"));
  std::istringstream ragged("+1 -1\n+1\n");
  CHECK_THROWS_WITH(read_samples(ragged), Catch::Matchers::ContainsSubstring("line 2"));
}

TEST_CASE("vote ingestion maps tokens and imputes missing entries") {
  std::istringstream config(
      "delimiter=,\n"
      "token.Yea=+1\n"
      "token.Nay=-1\n"
      "token.?=missing\n");
  const VoteSpec spec = read_vote_spec(config);
  std::istringstream votes("Yea,Nay\nYea,Yea\n?,Nay\n");
  const Dataset data = ingest_vote_matrix(votes, spec);
  REQUIRE(data.n() == 3);
  REQUIRE(data.p() == 2);
  CHECK(data(0, 0) == 1);
  CHECK(data(0, 1) == -1);
  CHECK(data(1, 0) == 1);
  CHECK(data(1, 1) == 1);
  CHECK(data(2, 0) == -1);  // missing imputed to -1 by default
  CHECK(data(2, 1) == -1);
}

TEST_CASE("vote ingestion honors a positive missing override") {
  std::istringstream config("missing=+1\ntoken.Y=+1\ntoken.M=missing\n");
  const VoteSpec spec = read_vote_spec(config);
  std::istringstream votes("Y,M\n");
  const Dataset data = ingest_vote_matrix(votes, spec);
  CHECK(data(0, 1) == 1);
}

TEST_CASE("vote ingestion errors name the row and column") {
  std::istringstream config("token.Yea=+1\ntoken.Nay=-1\n");
  const VoteSpec spec = read_vote_spec(config);
  std::istringstream votes("Yea,Present\n");
  CHECK_THROWS_WITH(ingest_vote_matrix(votes, spec),
                    Catch::Matchers::ContainsSubstring("row 1 column 2") &&
                        Catch::Matchers::ContainsSubstring("Present"));
  std::istringstream ragged("Yea,Nay\nYea\n");
  CHECK_THROWS_WITH(ingest_vote_matrix(ragged, spec),
                    Catch::Matchers::ContainsSubstring("row 2"));
}

TEST_CASE("all-positive vote file maps to all-ones dataset") {
  std::istringstream config("token.Yea=+1\n");
  const VoteSpec spec = read_vote_spec(config);
  std::istringstream votes("Yea,Yea,Yea\nYea,Yea,Yea\n");
  const Dataset data = ingest_vote_matrix(votes, spec);
  for (int r = 0; r < data.n(); ++r)
    for (int j = 0; j < data.p(); ++j) CHECK(data(r, j) == 1);
}

TEST_CASE("deterministic rng helpers behave as documented") {
  Rng a(77), b(77);
  for (int k = 0; k < 100; ++k) REQUIRE(a.next_u64() == b.next_u64());
  Rng rng(5);
  for (int k = 0; k < 1000; ++k) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const auto below = rng.uniform_below(7);
    CHECK(below < 7);
    const int s = rng.spin();
    CHECK((s == 1 || s == -1));
  }
  std::vector<int> perm = {0, 1, 2, 3, 4, 5, 6};
  rng.shuffle(perm);
  std::set<int> seen(perm.begin(), perm.end());
  CHECK(seen.size() == 7);
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
}

TEST_CASE("numeric helpers") {
  CHECK(softplus(0.0) == Catch::Approx(0.6931471805599453).margin(1e-16));
  CHECK(softplus(50.0) == Catch::Approx(50.0).margin(1e-12));
  CHECK(softplus(-800.0) == 0.0);
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(1.0) == Catch::Approx(0.7310585786300049).margin(1e-15));
  CHECK(log_sum_exp({0.0, 0.0}) == Catch::Approx(0.6931471805599453).margin(1e-15));
  CHECK(log_sum_exp({-1000.0, -1000.0}) ==
        Catch::Approx(-1000.0 + 0.6931471805599453).margin(1e-12));
  const LinearFit fit = least_squares({1.0, 2.0, 3.0}, {2.0, 4.0, 6.0});
  CHECK(fit.slope == Catch::Approx(2.0));
  CHECK(fit.intercept == Catch::Approx(0.0).margin(1e-12));
  CHECK(fit.r2 == Catch::Approx(1.0));
}

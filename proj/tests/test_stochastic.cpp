#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "oracles.hpp"
#include "schedrate/errors.hpp"
#include "schedrate/stochastic.hpp"

using namespace schedrate;

namespace {

const JobAlphabet kAB{{"a", 1}, {"b", 3}};
const std::vector<std::string> kSyms{"a", "b"};

IIDModel uniform() { return IIDModel(kSyms, {0.5, 0.5}); }
MarkovModel sticky() { return MarkovModel(kSyms, {{0.9, 0.1}, {0.5, 0.5}}, {5.0 / 6.0, 1.0 / 6.0}); }

void check_matches(const SumDistribution& dist, const std::map<std::int64_t, double>& law, double tol) {
  double total = 0.0;
  for (std::int64_t s = dist.min_sum(); s <= dist.max_sum(); ++s) {
    const auto it = law.find(s);
    const double want = it == law.end() ? 0.0 : it->second;
    CHECK(std::abs(dist.probability(s) - want) <= tol);
    total += dist.probability(s);
  }
  for (const auto& [s, p] : law) {
    CHECK(s >= dist.min_sum());
    CHECK(s <= dist.max_sum());
  }
  CHECK(std::abs(total - 1.0) <= 1e-10);
}

}  // namespace

TEST_CASE("model validation errors") {
  CHECK_THROWS_AS(IIDModel(kSyms, {0.5, 0.4}), DomainError);
  CHECK_THROWS_AS(IIDModel(kSyms, {1.5, -0.5}), DomainError);
  CHECK_THROWS_AS(IIDModel({"a", "a"}, {0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(MarkovModel(kSyms, {{0.8, 0.1}, {0.5, 0.5}}, {1.0, 0.0}), DomainError);
  // Reducible: b is absorbing.
  CHECK_THROWS_AS(MarkovModel(kSyms, {{0.5, 0.5}, {0.0, 1.0}}, {1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(MixtureModel({1.0}, {JobProcess(uniform())}), DomainError);
  CHECK_THROWS_AS(MixtureModel({0.5, 0.4}, {JobProcess(uniform()), JobProcess(uniform())}), DomainError);
  try {
    MarkovModel(kSyms, {{0.8, 0.1}, {0.5, 0.5}}, {1.0, 0.0});
  } catch (const DomainError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("'a'") != std::string::npos);
    CHECK(msg.find("0.9") != std::string::npos);
  }
}

TEST_CASE("sum_distribution examples") {
  const auto d2 = sum_distribution(uniform(), kAB, 2);
  CHECK(d2.min_sum() == 2);
  CHECK(d2.probability(2) == doctest::Approx(0.25));
  CHECK(d2.probability(4) == doctest::Approx(0.5));
  CHECK(d2.probability(6) == doctest::Approx(0.25));
  CHECK(d2.probability(3) == 0.0);
  CHECK_FALSE(d2.reachable(3));
  CHECK(d2.tail_greater(4) == doctest::Approx(0.25));
  CHECK(d2.tail_less(4) == doctest::Approx(0.25));
  CHECK(d2.support() == std::vector<std::int64_t>{2, 4, 6});

  // n = 1 is the marginal law.
  const auto d1 = sum_distribution(IIDModel(kSyms, {0.75, 0.25}), kAB, 1);
  CHECK(d1.probability(1) == doctest::Approx(0.75));
  CHECK(d1.probability(3) == doctest::Approx(0.25));
  const auto m1 = sum_distribution(sticky(), kAB, 1);
  CHECK(m1.probability(1) == doctest::Approx(5.0 / 6.0));

  CHECK_THROWS_AS(sum_distribution(uniform(), kAB, 0), DomainError);
  CHECK_THROWS_AS(sum_distribution(uniform(), JobAlphabet{{"a", 1}, {"b", 1'000'000'000}}, 1000), ResourceError);
}

TEST_CASE("sum_distribution equals raw enumeration") {
  const std::vector<std::int64_t> times{1, 3};
  for (std::size_t n = 1; n <= 10; ++n) {
    CAPTURE(n);
    check_matches(sum_distribution(IIDModel(kSyms, {0.3, 0.7}), kAB, static_cast<std::int64_t>(n)),
                  oracle::sum_law(n, times, [](const auto& s) { return oracle::iid_probability(s, {0.3, 0.7}); }),
                  1e-13);
    check_matches(sum_distribution(sticky(), kAB, static_cast<std::int64_t>(n)),
                  oracle::sum_law(n, times,
                                  [](const auto& s) {
                                    return oracle::markov_probability(s, {5.0 / 6.0, 1.0 / 6.0},
                                                                      {{0.9, 0.1}, {0.5, 0.5}});
                                  }),
                  1e-13);
  }
  // Three symbols, non-uniform chain started off-stationary.
  const JobAlphabet abc{{"a", 1}, {"b", 2}, {"c", 4}};
  const std::vector<std::vector<double>> t{{0.2, 0.5, 0.3}, {0.6, 0.1, 0.3}, {0.25, 0.25, 0.5}};
  const MarkovModel chain({"a", "b", "c"}, t, {1.0, 0.0, 0.0});
  for (std::size_t n = 1; n <= 7; ++n) {
    check_matches(sum_distribution(chain, abc, static_cast<std::int64_t>(n)),
                  oracle::sum_law(n, {1, 2, 4},
                                  [&](const auto& s) { return oracle::markov_probability(s, {1.0, 0.0, 0.0}, t); }),
                  1e-13);
  }
}

TEST_CASE("mixture law is the weighted sum of component laws") {
  const JobProcess high = uniform();
  const JobProcess low = IIDModel(kSyms, {0.75, 0.25});
  const JobProcess mix = MixtureModel({0.3, 0.7}, {high, JobProcess(sticky())});
  for (std::int64_t n : {1, 5, 40, 300}) {
    const auto d = sum_distribution(mix, kAB, n);
    const auto dh = sum_distribution(high, kAB, n);
    const auto dm = sum_distribution(sticky(), kAB, n);
    for (std::int64_t s = d.min_sum(); s <= d.max_sum(); ++s) {
      CHECK(std::abs(d.probability(s) - (0.3 * dh.probability(s) + 0.7 * dm.probability(s))) <= 1e-12);
    }
  }
  // Nested mixtures flatten with multiplied weights.
  const JobProcess nested = MixtureModel({0.5, 0.5}, {mix, low});
  const auto flat = nested.flattened();
  REQUIRE(flat.size() == 3);
  CHECK(flat[0].first == doctest::Approx(0.15));
  CHECK(flat[1].first == doctest::Approx(0.35));
  CHECK(flat[2].first == doctest::Approx(0.5));
}

TEST_CASE("Markov chain with identical rows reproduces the i.i.d. law") {
  const std::vector<double> q{0.35, 0.65};
  const MarkovModel same(kSyms, {q, q}, q);
  for (std::int64_t n : {1, 2, 9, 100, 1000}) {
    const auto dm = sum_distribution(same, kAB, n);
    const auto di = sum_distribution(IIDModel(kSyms, q), kAB, n);
    REQUIRE(dm.min_sum() == di.min_sum());
    REQUIRE(dm.max_sum() == di.max_sum());
    for (std::int64_t s = dm.min_sum(); s <= dm.max_sum(); ++s) {
      CHECK(std::abs(dm.probability(s) - di.probability(s)) <= 1e-12);
    }
  }
}

TEST_CASE("mass and mean properties up to n = 10^4") {
  const JobProcess models[] = {uniform(), sticky(),
                               MixtureModel({0.5, 0.5}, {JobProcess(uniform()), JobProcess(IIDModel(kSyms, {0.75, 0.25}))})};
  for (const auto& model : models) {
    for (std::int64_t n : {1, 17, 1000, 10000}) {
      const auto d = sum_distribution(model, kAB, n);
      CHECK(std::abs(d.total_mass() - 1.0) <= 1e-10);
    }
  }
  // Mean is n E[T] for i.i.d. and stationary-started Markov.
  for (std::int64_t n : {1, 50, 10000}) {
    const double nn = static_cast<double>(n);
    CHECK(std::abs(sum_distribution(uniform(), kAB, n).mean() - 2.0 * nn) <= 1e-8 * 2.0 * nn);
    CHECK(std::abs(sum_distribution(sticky(), kAB, n).mean() - 4.0 / 3.0 * nn) <= 1e-8 * 4.0 / 3.0 * nn);
  }
}

TEST_CASE("stationary distribution") {
  const auto alt = MarkovModel(kSyms, {{0.0, 1.0}, {1.0, 0.0}}, {1.0, 0.0});
  const auto pa = stationary_distribution(alt);
  CHECK(pa[0] == doctest::Approx(0.5));
  CHECK(pa[1] == doctest::Approx(0.5));

  const auto ps = stationary_distribution(sticky());
  // 0.1 pi_a = 0.5 pi_b, pi_a + pi_b = 1
  CHECK(ps[0] == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(ps[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));

  const std::vector<double> q{0.2, 0.3, 0.5};
  const auto pq = stationary_distribution(MarkovModel({"a", "b", "c"}, {q, q, q}, q));
  for (std::size_t i = 0; i < 3; ++i) CHECK(pq[i] == doctest::Approx(q[i]).epsilon(1e-12));

  // Random irreducible chains: pi P = pi.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> t(4, std::vector<double>(4));
    for (auto& row : t) {
      double s = 0;
      for (auto& x : row) s += (x = u(rng));
      for (auto& x : row) x /= s;
      double fix = 1.0;
      for (std::size_t j = 0; j + 1 < row.size(); ++j) fix -= row[j];
      row.back() = fix;
    }
    const auto pi = stationary_distribution(MarkovModel({"a", "b", "c", "d"}, t, {0.25, 0.25, 0.25, 0.25}));
    for (std::size_t j = 0; j < 4; ++j) {
      double acc = 0;
      for (std::size_t i = 0; i < 4; ++i) acc += pi[i] * t[i][j];
      CHECK(std::abs(acc - pi[j]) <= 1e-12);
    }
  }
}

TEST_CASE("moments") {
  CHECK(expected_processing_time(uniform(), kAB).front() == doctest::Approx(2.0));
  CHECK(expected_processing_time(sticky(), kAB).front() == doctest::Approx(4.0 / 3.0));
  CHECK(expected_processing_time(IIDModel(kSyms, {0.0, 1.0}), kAB).front() == doctest::Approx(3.0));
  CHECK(variance_processing_time(uniform(), kAB) == doctest::Approx(1.0));
  CHECK(variance_processing_time(IIDModel(kSyms, {0.0, 1.0}), kAB) == 0.0);
  const IIDModel skew(kSyms, {0.75, 0.25});
  CHECK(expected_processing_time(skew, kAB).front() == doctest::Approx(1.5));
  CHECK(variance_processing_time(skew, kAB) == doctest::Approx(0.75));
  CHECK(third_abs_central_moment(skew, kAB) == doctest::Approx(0.75 * 0.125 + 0.25 * 3.375));
  CHECK_THROWS_AS(variance_processing_time(sticky(), kAB), DomainError);

  const JobProcess mix = MixtureModel({0.5, 0.5}, {JobProcess(uniform()), JobProcess(skew)});
  const auto means = expected_processing_time(mix, kAB);
  REQUIRE(means.size() == 2);
  CHECK(means[0] == doctest::Approx(2.0));
  CHECK(means[1] == doctest::Approx(1.5));
}

TEST_CASE("sampling") {
  const auto alpha = kAB;
  for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) {
    const auto seq = sample_sequence(IIDModel(kSyms, {1.0, 0.0}), alpha, 25, seed);
    for (auto s : seq.items()) CHECK(s == 0);
  }
  const auto alt = MarkovModel(kSyms, {{0.0, 1.0}, {1.0, 0.0}}, {1.0, 0.0});
  CHECK(sample_sequence(alt, alpha, 4, 5).items() == std::vector<SymbolIndex>{0, 1, 0, 1});

  const auto big = sample_sequence(uniform(), alpha, 100000, 42);
  std::size_t as = 0;
  for (auto s : big.items()) as += s == 0;
  CHECK(std::abs(static_cast<double>(as) / 100000.0 - 0.5) <= 0.01);

  // Same seed, same sequence; distinct stream seeds differ.
  CHECK(sample_sequence(sticky(), alpha, 50, 7) == sample_sequence(sticky(), alpha, 50, 7));
  CHECK(stream_seed(1, 0, 0) != stream_seed(1, 0, 1));
  CHECK(stream_seed(1, 0, 0) != stream_seed(2, 0, 0));
}

TEST_CASE("empirical histogram of T_n matches the exact law in total variation") {
  const JobProcess models[] = {uniform(), sticky(),
                               MixtureModel({0.5, 0.5}, {JobProcess(uniform()), JobProcess(IIDModel(kSyms, {0.75, 0.25}))})};
  for (const auto& model : models) {
    for (std::int64_t n : {1, 10, 50}) {
      const auto exact = sum_distribution(model, kAB, n);
      std::map<std::int64_t, double> hist;
      const int samples = 100000;
      for (int t = 0; t < samples; ++t) {
        const auto seq = sample_sequence(model, kAB, n, stream_seed(123, 0, static_cast<std::uint64_t>(t)));
        hist[total_processing_time(seq, kAB)] += 1.0 / samples;
      }
      double tv = 0.0;
      for (std::int64_t s = exact.min_sum(); s <= exact.max_sum(); ++s) {
        tv += std::abs(exact.probability(s) - (hist.contains(s) ? hist[s] : 0.0));
      }
      CAPTURE(n);
      CHECK(0.5 * tv <= 0.02);
    }
  }
}

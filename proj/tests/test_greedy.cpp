#include <doctest.h>

#include <cmath>
#include <map>

#include "latdisc/error.hpp"
#include "latdisc/greedy.hpp"
#include "latdisc/rng.hpp"

using namespace latdisc;

namespace {

GreedyConfig config(int n) {
  GreedyConfig cfg;
  cfg.n = n;
  return cfg;
}

IndexSet random_subset(int n, int size, Rng& rng) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  rng.shuffle(idx.begin(), idx.end());
  idx.resize(static_cast<std::size_t>(size));
  return IndexSet(n, idx);
}

// Checks the state against its own chosen list, without the pair structure.
void check_state(const GreedyState& s) {
  const int n = s.n;
  std::vector<int> seen(static_cast<std::size_t>(n * n), 0);
  for (const auto& t : s.chosen) {
    ++seen[static_cast<std::size_t>(t[0] * n + t[1])];
    ++seen[static_cast<std::size_t>(t[0] * n + t[2])];
    ++seen[static_cast<std::size_t>(t[1] * n + t[2])];
  }
  std::size_t pairs = 0;
  for (int v : seen) {
    CHECK(v <= 1);
    pairs += static_cast<std::size_t>(v);
  }
  CHECK(pairs == 3 * s.chosen.size());
  CHECK(s.covered.count() == 3 * s.step);
  CHECK(s.step == s.chosen.size());
}

}  // namespace

TEST_CASE("first-stage step counts") {
  CHECK(first_stage_steps(config(15)) == 0);
  CHECK(first_stage_steps(config(300)) == 60);
  CHECK(first_stage_steps(config(1500)) == 1500);
  GreedyConfig over = config(10);
  over.step_override = 4;
  CHECK(first_stage_steps(over) == 4);
  const auto r = run_first_stage(config(15), {});
  CHECK(r.state.step == 0);
  CHECK(r.state.chosen.empty());
  CHECK_FALSE(r.state.stuck);
  CHECK_THROWS_AS(run_first_stage(config(2), {}), DomainError);
}

TEST_CASE("n = 300 first stage with the full tracker") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    GreedyConfig cfg = config(300);
    cfg.seed = seed;
    const IndexSet all = IndexSet::full(300);
    const auto r = run_first_stage(cfg, {BoxTracker::make(all, all, all)});
    CHECK(r.state.step == 60);
    CHECK(r.state.covered.count() == 180);
    check_state(r.state);
    const auto& tr = r.trackers[0];
    CHECK(tr.f_initial == 300ULL * 299 * 298 / 6);
    const double frac = static_cast<double>(tr.f_legal) / static_cast<double>(tr.f_initial);
    CHECK(frac >= 0.98);
    CHECK(frac == legal_fraction(r.state, all, all, all));
    CHECK(tr.type_counts[0] == 60);
  }
}

TEST_CASE("incremental trackers equal exhaustive recounts") {
  Rng rng(9);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 9 + static_cast<int>(rng.below(52));
    GreedyConfig cfg = config(n);
    cfg.seed = rng();
    cfg.step_override = rng.below(static_cast<std::uint64_t>(n * n / 8 + 1));
    std::vector<BoxTracker> trackers;
    for (int k = 0; k < 4; ++k) {
      const int a = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      const int b = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      const int c = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      trackers.push_back(BoxTracker::make(random_subset(n, a, rng), random_subset(n, b, rng), random_subset(n, c, rng)));
    }
    const auto r = run_first_stage(cfg, trackers);
    check_state(r.state);
    for (const auto& tr : r.trackers) {
      const auto cnt = recount_legal(r.state, tr.a, tr.b, tr.c);
      CHECK(cnt.f_initial == tr.f_initial);
      CHECK(cnt.f_legal == tr.f_legal);
      CHECK(tr.f_legal <= tr.f_initial);
      std::uint64_t sum = 0;
      for (auto v : tr.type_counts) sum += v;
      CHECK(sum == r.state.step);
    }
  }
}

TEST_CASE("f_legal never increases along a run") {
  // Runs with the same seed share their prefix of draws.
  const int n = 40;
  const IndexSet a(n, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}), b(n, {5, 6, 7, 8, 9, 10, 11, 12}), c = IndexSet::full(n);
  std::uint64_t prev = BoxTracker::make(a, b, c).f_initial;
  std::vector<Triple> prefix;
  for (std::uint64_t steps = 0; steps <= 60; ++steps) {
    GreedyConfig cfg = config(n);
    cfg.seed = 5;
    cfg.step_override = steps;
    const auto r = run_first_stage(cfg, {BoxTracker::make(a, b, c)});
    CHECK(std::equal(prefix.begin(), prefix.end(), r.state.chosen.begin()));
    CHECK(r.trackers[0].f_legal <= prev);
    prev = r.trackers[0].f_legal;
    prefix = r.state.chosen;
  }
}

TEST_CASE("f_initial sandwich") {
  Rng rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(30));
    const IndexSet a = random_subset(n, 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n))), rng);
    const IndexSet b = random_subset(n, 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n))), rng);
    const IndexSet c = random_subset(n, 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n))), rng);
    const auto f = count_meeting_triples(a, b, c);
    CHECK(f == recount_legal(GreedyState(n), a, b, c).f_initial);
    const double abc = static_cast<double>(a.size()) * b.size() * c.size();
    CHECK(static_cast<double>(f) >= (abc - 3.0 * n * n) / 6.0);
  }
  // Disjoint sets: every meeting triple has one point in each.
  const IndexSet a(12, {0, 1, 2}), b(12, {3, 4}), c(12, {5, 6, 7, 8});
  CHECK(count_meeting_triples(a, b, c) == 24);
}

TEST_CASE("classify uses the meets notion") {
  const IndexSet a(6, {0}), b(6, {1}), c(6, {2});
  CHECK(classify({0, 1, 2}, a, b, c) == TripleType::abc);
  CHECK(classify({0, 1, 3}, a, b, c) == TripleType::ab_not_c);
  CHECK(classify({0, 2, 3}, a, b, c) == TripleType::a_not_b_c);
  CHECK(classify({1, 2, 3}, a, b, c) == TripleType::not_a_bc);
  CHECK(classify({0, 3, 4}, a, b, c) == TripleType::other);
  // One vertex can meet all three sets.
  const IndexSet s(6, {0});
  CHECK(classify({0, 4, 5}, s, s, s) == TripleType::abc);
}

TEST_CASE("legal_fraction examples") {
  const IndexSet all = IndexSet::full(3);
  CHECK(legal_fraction(GreedyState(3), all, all, all) == 1.0);
  GreedyState s(3);
  s.add({0, 1, 2});
  CHECK(legal_fraction(s, all, all, all) == 0.0);
  CHECK_THROWS_AS(s.add({0, 1, 2}), InvalidObject);
  CHECK_THROWS_AS(legal_fraction(s, IndexSet(3), all, all), DomainError);
}

TEST_CASE("dead ends are flagged") {
  GreedyConfig cfg = config(7);
  cfg.seed = 3;
  cfg.step_override = 100;
  const auto r = run_first_stage(cfg, {});
  CHECK(r.state.stuck);
  CHECK(r.state.step <= 7);
  check_state(r.state);
  CHECK(recount_legal(r.state, IndexSet::full(7), IndexSet::full(7), IndexSet::full(7)).f_legal == 0);
}

TEST_CASE("trace rows") {
  GreedyConfig cfg = config(60);
  cfg.seed = 8;
  cfg.record_trace = true;
  cfg.step_override = 30;
  const auto r = run_first_stage(cfg, {});
  REQUIRE(r.trace.size() == 30);
  double prev = 1.0;
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].step == i + 1);
    CHECK(r.trace[i].triple == r.state.chosen[i]);
    CHECK(r.trace[i].legal_estimate < prev);
    prev = r.trace[i].legal_estimate;
  }
  CHECK(prev == doctest::Approx(legal_fraction(r.state, IndexSet::full(60), IndexSet::full(60), IndexSet::full(60))));
}

TEST_CASE("first draw is uniform over all triples at n = 9") {
  // 10^5 fixed seeds; every triple within 3 sigma of 1/C(9,3).
  const int draws = 100000;
  std::map<Triple, int> freq;
  for (int s = 0; s < draws; ++s) {
    GreedyConfig cfg = config(9);
    cfg.seed = static_cast<std::uint64_t>(s);
    cfg.step_override = 1;
    ++freq[run_first_stage(cfg, {}).state.chosen.at(0)];
  }
  CHECK(freq.size() == 84);
  const double p = 1.0 / 84.0;
  const double sigma = std::sqrt(p * (1 - p) / draws);
  for (const auto& [t, c] : freq) CHECK(std::abs(static_cast<double>(c) / draws - p) <= 3 * sigma);
}

TEST_CASE("tail_bound") {
  CHECK(tail_bound(1.0, 100, 0.1) == doctest::Approx(std::exp(-10.0 / 3.0)).epsilon(1e-12));
  CHECK(tail_bound(0.0, 100, 0.1) == 1.0);
  CHECK(tail_bound(2.0, 100, 0.1) == doctest::Approx(std::exp(-10.0)).epsilon(1e-12));
  CHECK_THROWS_AS(tail_bound(-1.0, 100, 0.1), DomainError);
  CHECK_THROWS_AS(tail_bound(1.0, 0, 0.1), DomainError);
  CHECK_THROWS_AS(tail_bound(1.0, 10, 1.0), DomainError);
}

TEST_CASE("proof_budget") {
  const auto pb = proof_budget(1.0 / 1500.0, 300, 150, 150, 1000);
  CHECK(pb.k == doctest::Approx(0.988 / 0.432).epsilon(1e-12));
  CHECK(pb.k == doctest::Approx(2.2870370370).epsilon(1e-9));
  CHECK(pb.mean_bound == doctest::Approx(90.0 / 0.988).epsilon(1e-12));
  const double q = 150.0 * 150.0 * 300.0 / (300.0 * 299.0 * 298.0 / 6.0 - 3.0 / 1500.0 * 300.0 * 300.0 * 300.0);
  CHECK(pb.q == doctest::Approx(q).epsilon(1e-12));
  const double k = pb.k;
  CHECK(pb.tail_bound_value ==
        doctest::Approx(std::exp(-(k - 1) * (k - 1) / (k + 1) * 6.0 / 1500.0 * 1000.0 / (300.0 * 0.988))).epsilon(1e-12));
  CHECK_THROWS_AS(proof_budget(0.1, 300, 1, 1, 1), DomainError);
  CHECK(proof_budget(1.0 / 1500.0, 300, 1, 1, 1, 0.01).k < pb.k);
}

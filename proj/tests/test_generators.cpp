#include <doctest.h>

#include <array>
#include <map>
#include <set>

#include "brute.hpp"
#include "latdisc/core.hpp"
#include "latdisc/error.hpp"
#include "latdisc/generators.hpp"
#include "latdisc/rng.hpp"

using namespace latdisc;

namespace {

// Every pair covered exactly once, by direct scan of the triples.
bool covers_each_pair_once(const TripleSystem& x) {
  const int n = x.order();
  std::vector<int> seen(static_cast<std::size_t>(n * n), 0);
  for (const auto& t : x.triples()) {
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b) ++seen[static_cast<std::size_t>(t[a] * n + t[b])];
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (seen[static_cast<std::size_t>(i * n + j)] != 1) return false;
  return true;
}

void check_sts_square(const TripleSystem& x) {
  const LatinSquare l = sts_to_ls(x);
  CHECK(validate_tensor(tensor_of(l)).valid);
  CHECK(l.is_symmetric());
  CHECK(l.is_idempotent());
  CHECK(l.transposed() == l);
  for (int i = 0; i < x.order(); ++i) CHECK(l.at(i, i) == i);
  for (const auto& t : x.triples()) {
    CHECK(l.at(t[0], t[1]) == t[2]);
    CHECK(l.at(t[1], t[2]) == t[0]);
    CHECK(l.at(t[2], t[0]) == t[1]);
  }
}

}  // namespace

TEST_CASE("group tables") {
  SUBCASE("Z_3") {
    const LatinSquare l = group_table(GroupTable{{3}});
    CHECK(l == LatinSquare(3, {0, 1, 2, 1, 2, 0, 2, 0, 1}));
  }
  SUBCASE("Klein group") {
    const LatinSquare l = group_table(GroupTable{{2, 2}});
    CHECK(l.order() == 4);
    CHECK(l.is_symmetric());
    CHECK(validate_tensor(tensor_of(l)).valid);
  }
  SUBCASE("dense subgroup box in Z_4") {
    const LatinSquare l = group_table(GroupTable{{4}});
    const IndexSet h(4, {0, 2});
    const Box b({h, h, h});
    CHECK(count_in_box(l, b) == 4);
    CHECK(b.volume() == 8);
  }
  SUBCASE("cyclic tables are circulant") {
    for (int n = 1; n <= 12; ++n) {
      const LatinSquare l = group_table(GroupTable{{n}});
      CHECK(l == LatinSquare::cyclic(n));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) CHECK(l.at(i, j) == (i + j) % n);
    }
  }
  SUBCASE("products of cyclic groups") {
    for (const auto& m : std::vector<std::vector<int>>{{2, 3}, {3, 3}, {2, 2, 2}, {4, 2}, {1, 5}}) {
      const GroupTable g{m};
      const LatinSquare l = group_table(g);
      CHECK(l.order() == g.order());
      CHECK(l.is_symmetric());
      for (int i = 0; i < g.order(); ++i) CHECK(g.index_of(g.element(i)) == i);
    }
  }
}

TEST_CASE("Bose and Skolem systems") {
  const auto b9 = bose_sts(9);
  CHECK(b9.size() == 12);
  CHECK(b9.complete());
  const auto s7 = skolem_sts(7);
  CHECK(s7.size() == 7);
  CHECK(s7.complete());
  CHECK_THROWS_AS(bose_sts(8), ResidueError);
  CHECK_THROWS_AS(skolem_sts(9), ResidueError);
  CHECK_THROWS_WITH(bose_sts(8), doctest::Contains("3 (mod 6)"));
  for (int n = 3; n <= 45; n += 6) {
    const auto x = bose_sts(n);
    CHECK(x.complete());
    CHECK(covers_each_pair_once(x));
    check_sts_square(x);
  }
  for (int n = 7; n <= 43; n += 6) {
    const auto x = skolem_sts(n);
    CHECK(x.complete());
    CHECK(covers_each_pair_once(x));
    check_sts_square(x);
  }
}

TEST_CASE("sts_to_ls") {
  SUBCASE("single triple on three points") {
    const TripleSystem x(3, {{0, 1, 2}});
    CHECK(sts_to_ls(x) == LatinSquare(3, {0, 2, 1, 2, 1, 0, 1, 0, 2}));
  }
  SUBCASE("incomplete system names an uncovered pair") {
    const TripleSystem x(5, {{0, 1, 2}});
    try {
      sts_to_ls(x);
      FAIL("expected IncompleteSystem");
    } catch (const IncompleteSystem& e) {
      CHECK(e.pair() == std::pair<int, int>{0, 3});
    }
  }
  SUBCASE("doubled pair rejected") {
    CHECK_THROWS_AS(TripleSystem(5, {{0, 1, 2}, {0, 1, 3}}), InvalidObject);
    const std::vector<Triple> raw{{0, 1, 2}, {0, 1, 3}};
    const auto v = check_triple_system(5, raw);
    CHECK_FALSE(v.valid);
    CHECK(v.message.find("{1, 2}") != std::string::npos);
  }
}

TEST_CASE("random greedy completion") {
  const auto x7 = complete_random_greedy(7, 10000, 1);
  CHECK(x7.size() == 7);
  CHECK(covers_each_pair_once(x7));
  const auto x9 = complete_random_greedy(9, 10000, 2);
  CHECK(x9.size() == 12);
  CHECK(covers_each_pair_once(x9));
  check_sts_square(x9);
  const auto again = complete_random_greedy(9, 10000, 2);
  CHECK(std::vector<Triple>(again.triples().begin(), again.triples().end()) ==
        std::vector<Triple>(x9.triples().begin(), x9.triples().end()));
  CHECK_THROWS_AS(complete_random_greedy(8, 10, 1), ResidueError);
  const auto x13 = complete_random_greedy(13, 100000, 3);
  CHECK(covers_each_pair_once(x13));
}

TEST_CASE("Jacobson-Matthews sampler") {
  CHECK(jm_sample(1, 0, 5) == LatinSquare(1, {0}));
  CHECK(jm_sample(8, default_burn_in(8), 42) == jm_sample(8, default_burn_in(8), 42));
  CHECK(default_burn_in(4) == 128);
  for (int n = 2; n <= 20; ++n) {
    const auto l = jm_sample(n, default_burn_in(n), static_cast<std::uint64_t>(n));
    CHECK(validate_tensor(tensor_of(l)).valid);
  }
}

TEST_CASE("Jacobson-Matthews marginals at n = 4") {
  // Uniform over all 576 squares forces L(1,1) uniform on 4 symbols.
  const auto all = brute::all_squares(4);
  REQUIRE(all.size() == 576);
  std::array<int, 4> exact{};
  for (const auto& g : all) ++exact[static_cast<std::size_t>(g[0])];
  for (int c : exact) CHECK(c == 144);

  const int draws = 10000;
  std::array<int, 4> freq{};
  std::set<std::vector<int>> distinct;
  for (int s = 0; s < draws; ++s) {
    const auto l = jm_sample(4, default_burn_in(4), static_cast<std::uint64_t>(s));
    ++freq[static_cast<std::size_t>(l.at(0, 0))];
    distinct.insert(std::vector<int>(l.cells().begin(), l.cells().end()));
  }
  for (int c : freq) CHECK(static_cast<double>(c) / draws == doctest::Approx(0.25).epsilon(0.08));
  CHECK(distinct.size() == 576);
}

TEST_CASE("Jacobson-Matthews output is uniform over all squares at n = 4") {
  // Pearson statistic over the 576 squares; 575 degrees of freedom, sd ~ 34.
  const auto all = brute::all_squares(4);
  std::map<std::vector<int>, int> freq;
  for (const auto& g : all) freq[g] = 0;
  const int draws = 40000;
  for (int s = 0; s < draws; ++s) {
    const auto l = jm_sample(4, default_burn_in(4), derive_seed(77, static_cast<std::uint64_t>(s)));
    auto it = freq.find(std::vector<int>(l.cells().begin(), l.cells().end()));
    REQUIRE(it != freq.end());
    ++it->second;
  }
  const double expect = static_cast<double>(draws) / 576.0;
  double chi2 = 0.0;
  for (const auto& [g, c] : freq) chi2 += (c - expect) * (c - expect) / expect;
  CHECK(chi2 < 575.0 + 6.0 * 34.0);
}

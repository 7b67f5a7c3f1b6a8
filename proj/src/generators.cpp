#include "latdisc/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "latdisc/rng.hpp"

namespace latdisc {

// -------------------------------------------------------------- groups

int GroupTable::order() const {
  long long n = 1;
  for (int m : moduli) {
    if (m < 1) throw DomainError("group moduli must be positive");
    n *= m;
    if (n > 4096) throw DomainError("group order above 4096 is not supported");
  }
  return static_cast<int>(n);
}

std::vector<int> GroupTable::element(int index) const {
  std::vector<int> e(moduli.size());
  for (std::size_t k = moduli.size(); k-- > 0;) {
    e[k] = index % moduli[k];
    index /= moduli[k];
  }
  return e;
}

int GroupTable::index_of(std::span<const int> element) const {
  int index = 0;
  for (std::size_t k = 0; k < moduli.size(); ++k) index = index * moduli[k] + element[k];
  return index;
}

int GroupTable::add(int i, int j) const {
  int index = 0;
  int weight = 1;
  for (std::size_t k = moduli.size(); k-- > 0;) {
    const int m = moduli[k];
    index += ((i % m + j % m) % m) * weight;
    i /= m;
    j /= m;
    weight *= m;
  }
  return index;
}

LatinSquare group_table(const GroupTable& g) {
  const int n = g.order();
  std::vector<int> cells(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) cells[static_cast<std::size_t>(i * n + j)] = g.add(i, j);
  }
  return LatinSquare(n, std::move(cells));
}

// ------------------------------------------------------- triple systems

StsVerdict check_triple_system(int n, std::span<const Triple> triples) {
  if (n < 1) return {false, false, "order must be at least 1"};
  const auto un = static_cast<std::size_t>(n);
  std::vector<char> covered(un * un, 0);
  for (std::size_t t = 0; t < triples.size(); ++t) {
    const auto& tr = triples[t];
    const std::string label = "triple " + std::to_string(t + 1) + " {" + std::to_string(tr[0] + 1) + " " +
                              std::to_string(tr[1] + 1) + " " + std::to_string(tr[2] + 1) + "}";
    for (int p : tr) {
      if (p < 0 || p >= n) return {false, false, label + " has a point outside 1.." + std::to_string(n)};
    }
    if (tr[0] == tr[1] || tr[0] == tr[2] || tr[1] == tr[2]) return {false, false, label + " repeats a point"};
    const std::pair<int, int> pairs[3] = {{tr[0], tr[1]}, {tr[0], tr[2]}, {tr[1], tr[2]}};
    for (auto [a, b] : pairs) {
      if (a > b) std::swap(a, b);
      auto& cell = covered[static_cast<std::size_t>(a) * un + static_cast<std::size_t>(b)];
      if (cell) {
        return {false, false,
                label + " covers pair {" + std::to_string(a + 1) + ", " + std::to_string(b + 1) + "} a second time"};
      }
      cell = 1;
    }
  }
  const bool complete = triples.size() * 6 == un * (un - 1);
  return {true, complete,
          std::string(complete ? "complete" : "partial") + " Steiner triple system of order " + std::to_string(n) +
              " with " + std::to_string(triples.size()) + " triples"};
}

TripleSystem::TripleSystem(int n, std::vector<Triple> triples) : n_(n), triples_(std::move(triples)) {
  for (auto& t : triples_) std::sort(t.begin(), t.end());
  const auto verdict = check_triple_system(n_, triples_);
  if (!verdict.valid) throw InvalidObject(verdict.message);
  const auto un = static_cast<std::size_t>(n_);
  third_.assign(un * un, -1);
  for (const auto& t : triples_) {
    auto set = [&](int a, int b, int c) {
      third_[static_cast<std::size_t>(a) * un + static_cast<std::size_t>(b)] = c;
      third_[static_cast<std::size_t>(b) * un + static_cast<std::size_t>(a)] = c;
    };
    set(t[0], t[1], t[2]);
    set(t[0], t[2], t[1]);
    set(t[1], t[2], t[0]);
  }
}

bool TripleSystem::complete() const noexcept {
  const auto un = static_cast<std::size_t>(n_);
  return triples_.size() * 6 == un * (un - 1);
}

std::optional<std::pair<int, int>> TripleSystem::first_uncovered_pair() const {
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      if (third_point(i, j) < 0) return std::pair{i, j};
    }
  }
  return std::nullopt;
}

TripleSystem TripleSystem::relabeled(std::span<const int> perm) const {
  if (perm.size() != static_cast<std::size_t>(n_)) throw DomainError("relabeling must have length n");
  std::vector<Triple> out;
  out.reserve(triples_.size());
  for (const auto& t : triples_) {
    out.push_back({perm[static_cast<std::size_t>(t[0])], perm[static_cast<std::size_t>(t[1])],
                   perm[static_cast<std::size_t>(t[2])]});
  }
  return TripleSystem(n_, std::move(out));
}

IncompleteSystem::IncompleteSystem(std::pair<int, int> pair)
    : Error("triple system is incomplete: pair {" + std::to_string(pair.first + 1) + ", " +
            std::to_string(pair.second + 1) + "} is uncovered"),
      pair_(pair) {}

namespace {

Triple sorted_triple(int a, int b, int c) {
  Triple t{a, b, c};
  std::sort(t.begin(), t.end());
  return t;
}

}  // namespace

// Points are (x, i) for x in Z_v, i in Z_3, labelled i*v + x, with the
// idempotent commutative quasigroup x o y = (x + y)(v + 1)/2 mod v.
TripleSystem bose_sts(int n) {
  if (n < 3 || n % 6 != 3) {
    throw ResidueError("Bose construction needs n = 3 (mod 6); got n = " + std::to_string(n));
  }
  const int v = n / 3;
  const int half = (v + 1) / 2;
  auto point = [v](int x, int i) { return (i % 3) * v + x; };
  std::vector<Triple> triples;
  triples.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 6);
  for (int x = 0; x < v; ++x) triples.push_back(sorted_triple(point(x, 0), point(x, 1), point(x, 2)));
  for (int i = 0; i < 3; ++i) {
    for (int x = 0; x < v; ++x) {
      for (int y = x + 1; y < v; ++y) {
        const int z = static_cast<int>((static_cast<long long>(x + y) * half) % v);
        triples.push_back(sorted_triple(point(x, i), point(y, i), point(z, i + 1)));
      }
    }
  }
  return TripleSystem(n, std::move(triples));
}

// Points are (x, i) for x in Z_{2k}, i in Z_3, labelled i*2k + x, plus the
// point at infinity labelled 6k. The half-idempotent commutative quasigroup is
// the cyclic table of Z_{2k} with symbol 2t renamed t and 2t+1 renamed k+t.
TripleSystem skolem_sts(int n) {
  if (n < 1 || n % 6 != 1) {
    throw ResidueError("Skolem construction needs n = 1 (mod 6); got n = " + std::to_string(n));
  }
  const int k = (n - 1) / 6;
  const int m = 2 * k;
  const int infinity = n - 1;
  auto point = [m](int x, int i) { return (i % 3) * m + x; };
  auto op = [k, m](int x, int y) {
    const int s = (x + y) % m;
    return s % 2 == 0 ? s / 2 : k + s / 2;
  };
  std::vector<Triple> triples;
  for (int x = 0; x < k; ++x) triples.push_back(sorted_triple(point(x, 0), point(x, 1), point(x, 2)));
  for (int i = 0; i < 3; ++i) {
    for (int x = 0; x < k; ++x) triples.push_back(sorted_triple(infinity, point(x + k, i), point(x, i + 1)));
  }
  for (int i = 0; i < 3; ++i) {
    for (int x = 0; x < m; ++x) {
      for (int y = x + 1; y < m; ++y) triples.push_back(sorted_triple(point(x, i), point(y, i), point(op(x, y), i + 1)));
    }
  }
  return TripleSystem(n, std::move(triples));
}

LatinSquare sts_to_ls(const TripleSystem& x) {
  if (auto missing = x.first_uncovered_pair()) throw IncompleteSystem(*missing);
  const int n = x.order();
  std::vector<int> cells(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) cells[static_cast<std::size_t>(i * n + j)] = i == j ? i : x.third_point(i, j);
  }
  return LatinSquare(n, std::move(cells));
}

// ------------------------------------------------- Jacobson-Matthews walk

std::uint64_t default_burn_in(int n) {
  const auto un = static_cast<std::uint64_t>(n);
  return 2 * un * un * un;
}

namespace {

// Incidence cube with entries in {-1, 0, 1}. A proper state is a Latin
// square; an improper state has exactly one -1 entry.
// The walk state is held only through line sums: for every axis-parallel
// line, the sums of v*i and v*i^2 over its entries (v the -1/0/+1 value at
// index i). A line off the improper cell holds a single +1, read from the
// first sum; a line through it holds +1 at a < b and -1 at a known index x,
// so a + b and a^2 + b^2 follow and a, b solve a quadratic.
class JmWalk {
 public:
  explicit JmWalk(int n)
      : n_(n),
        rc_(static_cast<std::size_t>(n) * n),
        rs_(static_cast<std::size_t>(n) * n),
        cs_(static_cast<std::size_t>(n) * n) {
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) add(r, c, (r + c) % n, 1);
    }
  }

  bool proper() const { return proper_; }

  void step(Rng& rng) {
    int r, c, s;
    int r1, c1, s1;
    if (proper_) {
      do {
        r = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_)));
        c = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_)));
        s = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_)));
      } while (line(rc_, r, c).s1 == s);
      s1 = line(rc_, r, c).s1;
      c1 = line(rs_, r, s).s1;
      r1 = line(cs_, c, s).s1;
    } else {
      r = bad_r_;
      c = bad_c_;
      s = bad_s_;
      const auto bits = rng();
      s1 = pick(line(rc_, r, c), s, bits & 1U);
      c1 = pick(line(rs_, r, s), c, (bits >> 1) & 1U);
      r1 = pick(line(cs_, c, s), r, (bits >> 2) & 1U);
    }
    // r1 != r, so the line (r1, c1) avoids the improper cell and its +1 is
    // the first sum. The cell goes negative iff it held 0.
    const bool goes_negative = line(rc_, r1, c1).s1 != s1;
    add(r, c, s, 1);
    add(r, c1, s1, 1);
    add(r1, c, s1, 1);
    add(r1, c1, s, 1);
    add(r, c, s1, -1);
    add(r, c1, s, -1);
    add(r1, c, s, -1);
    add(r1, c1, s1, -1);
    proper_ = !goes_negative;
    if (goes_negative) {
      bad_r_ = r1;
      bad_c_ = c1;
      bad_s_ = s1;
    }
  }

  LatinSquare square() const {
    std::vector<int> cells(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_));
    for (int r = 0; r < n_; ++r) {
      for (int c = 0; c < n_; ++c) cells[static_cast<std::size_t>(r * n_ + c)] = line(rc_, r, c).s1;
    }
    return LatinSquare(n_, std::move(cells));
  }

 private:
  struct LineSums {
    std::int32_t s1 = 0;
    std::int32_t s2 = 0;
  };

  LineSums& line(std::vector<LineSums>& v, int a, int b) {
    return v[static_cast<std::size_t>(a) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(b)];
  }
  const LineSums& line(const std::vector<LineSums>& v, int a, int b) const {
    return v[static_cast<std::size_t>(a) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(b)];
  }

  void add(int r, int c, int s, int v) {
    auto bump = [v](LineSums& l, std::int32_t i) {
      l.s1 += v * i;
      l.s2 += v * i * i;
    };
    bump(line(rc_, r, c), s);
    bump(line(rs_, r, s), c);
    bump(line(cs_, c, s), r);
  }

  // One of the two +1 positions on a line whose -1 sits at index x.
  static int pick(const LineSums& l, int x, std::uint64_t upper) {
    const std::int64_t sum = l.s1 + x;
    const std::int64_t sq = l.s2 + static_cast<std::int64_t>(x) * x;
    const std::int64_t d2 = 2 * sq - sum * sum;  // (b - a)^2
    const auto d = static_cast<std::int64_t>(std::sqrt(static_cast<double>(d2)) + 0.5);
    const std::int64_t lo = (sum - d) / 2;
    return static_cast<int>(upper != 0 ? lo + d : lo);
  }

  int n_;
  std::vector<LineSums> rc_, rs_, cs_;
  bool proper_ = true;
  int bad_r_ = -1, bad_c_ = -1, bad_s_ = -1;
};

}  // namespace

LatinSquare jm_sample(int n, std::uint64_t burn_in, std::uint64_t seed) {
  if (n < 1) throw DomainError("order must be at least 1");
  // 32-bit line sums hold up to 3 n^2.
  if (n > 20000) throw LimitExceeded("jm_sample supports n <= 20000");
  if (n == 1) return LatinSquare::cyclic(1);
  Rng rng(seed);
  JmWalk walk(n);
  // burn_in counts visits to proper squares. Stopping at the first proper
  // state after a fixed number of raw moves would weight each square by its
  // expected return time to the proper set, which is not constant.
  for (std::uint64_t visits = 0; visits < burn_in;) {
    walk.step(rng);
    if (walk.proper()) ++visits;
  }
  return walk.square();
}

// ---------------------------------------------- greedy completion (small n)

TripleSystem complete_random_greedy(int n, int max_restarts, std::uint64_t seed) {
  if (n < 1 || (n % 6 != 1 && n % 6 != 3)) {
    throw ResidueError("a complete Steiner triple system needs n = 1 or 3 (mod 6); got n = " + std::to_string(n));
  }
  if (max_restarts < 1) throw DomainError("max_restarts must be at least 1");
  std::vector<Triple> all;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      for (int c = b + 1; c < n; ++c) all.push_back({a, b, c});
    }
  }
  const std::size_t target = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 6;
  const auto un = static_cast<std::size_t>(n);
  std::vector<Triple> best;
  std::vector<char> covered(un * un);
  std::vector<std::uint32_t> legal(all.size());
  for (int attempt = 0; attempt < max_restarts; ++attempt) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    std::fill(covered.begin(), covered.end(), 0);
    std::iota(legal.begin(), legal.end(), 0U);
    std::size_t live = legal.size();
    std::vector<Triple> chosen;
    auto is_covered = [&](int a, int b) { return covered[static_cast<std::size_t>(a) * un + static_cast<std::size_t>(b)] != 0; };
    while (live > 0) {
      const Triple t = all[legal[rng.below(live)]];
      chosen.push_back(t);
      covered[static_cast<std::size_t>(t[0]) * un + static_cast<std::size_t>(t[1])] = 1;
      covered[static_cast<std::size_t>(t[0]) * un + static_cast<std::size_t>(t[2])] = 1;
      covered[static_cast<std::size_t>(t[1]) * un + static_cast<std::size_t>(t[2])] = 1;
      // Compact the legal list in order so the draw sequence is deterministic.
      std::size_t kept = 0;
      for (std::size_t i = 0; i < live; ++i) {
        const auto& u = all[legal[i]];
        if (!is_covered(u[0], u[1]) && !is_covered(u[0], u[2]) && !is_covered(u[1], u[2])) legal[kept++] = legal[i];
      }
      live = kept;
    }
    if (chosen.size() == target) return TripleSystem(n, std::move(chosen));
    if (chosen.size() > best.size()) best = std::move(chosen);
  }
  std::string msg = "random greedy completion failed after " + std::to_string(max_restarts) +
                    " restarts; best partial system has " + std::to_string(best.size()) + " of " +
                    std::to_string(target) + " triples";
  throw RestartBudgetExhausted(std::move(msg), TripleSystem(n, std::move(best)));
}

}  // namespace latdisc

#include <algorithm>
#include <bit>
#include <numeric>

#include "latdisc/error.hpp"
#include "latdisc/rng.hpp"
#include "latdisc/search.hpp"

namespace latdisc {

bool is_product_free(const LatinSquare& table, const IndexSet& s) {
  if (s.universe() != table.order()) throw DomainError("set universe does not match the table order");
  bool ok = true;
  s.for_each([&](int x) {
    s.for_each([&](int y) {
      if (s.contains(table.at(x, y))) ok = false;
    });
  });
  return ok;
}

namespace {

// Include-first depth-first search over elements in increasing order,
// pruned by |S| + (candidates still addable) <= best.
class ProductFreeDfs {
 public:
  explicit ProductFreeDfs(const LatinSquare& t) : t_(t), n_(t.order()) {}

  std::uint32_t run(int lower_bound) {
    best_size_ = lower_bound;
    best_ = 0;
    found_ = false;
    search(0, 0, 0);
    return best_;
  }
  bool improved() const { return found_; }

 private:
  // products of (s ∪ {e}) given the products of s
  std::uint32_t extend(std::uint32_t s, std::uint32_t prod, int e) const {
    prod |= 1U << t_.at(e, e);
    for (std::uint32_t bits = s; bits != 0; bits &= bits - 1) {
      const int x = std::countr_zero(bits);
      prod |= (1U << t_.at(e, x)) | (1U << t_.at(x, e));
    }
    return prod;
  }

  bool addable(std::uint32_t s, std::uint32_t prod, int e) const {
    if (prod & (1U << e)) return false;
    return (extend(s, prod, e) & (s | (1U << e))) == 0;
  }

  void search(int next, std::uint32_t s, std::uint32_t prod) {
    const int size = std::popcount(s);
    if (size > best_size_) {
      best_size_ = size;
      best_ = s;
      found_ = true;
    }
    int room = 0;
    for (int e = next; e < n_; ++e) room += addable(s, prod, e) ? 1 : 0;
    if (size + room <= best_size_) return;
    for (int e = next; e < n_; ++e) {
      if (!addable(s, prod, e)) continue;
      search(e + 1, s | (1U << e), extend(s, prod, e));
      // Remaining candidates after e cannot beat the record.
      int rest = 0;
      for (int f = e + 1; f < n_; ++f) rest += addable(s, prod, f) ? 1 : 0;
      if (size + rest <= best_size_) return;
    }
  }

  const LatinSquare& t_;
  int n_;
  int best_size_ = 0;
  std::uint32_t best_ = 0;
  bool found_ = false;
};

IndexSet greedy_maximal(const LatinSquare& t, const std::vector<int>& order) {
  const int n = t.order();
  IndexSet s(n);
  std::vector<char> prod(static_cast<std::size_t>(n), 0);
  for (int e : order) {
    if (prod[static_cast<std::size_t>(e)]) continue;
    if (s.contains(t.at(e, e)) || t.at(e, e) == e) continue;
    bool ok = true;
    s.for_each([&](int x) {
      const int p = t.at(e, x), q = t.at(x, e);
      if (s.contains(p) || s.contains(q) || p == e || q == e) ok = false;
    });
    if (!ok) continue;
    prod[static_cast<std::size_t>(t.at(e, e))] = 1;
    s.for_each([&](int x) {
      prod[static_cast<std::size_t>(t.at(e, x))] = 1;
      prod[static_cast<std::size_t>(t.at(x, e))] = 1;
    });
    s.insert(e);
  }
  return s;
}

bool better_set(const IndexSet& a, const IndexSet& b) {
  if (a.size() != b.size()) return a.size() > b.size();
  return compare_lex(a, b) < 0;
}

}  // namespace

ProductFreeReport product_free(const LatinSquare& table, int restarts, std::uint64_t seed, int limit_exact) {
  if (restarts < 1) throw DomainError("restarts must be at least 1");
  const int n = table.order();
  ProductFreeReport report;
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  report.set = greedy_maximal(table, order);
  for (int r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    rng.shuffle(order.begin(), order.end());
    IndexSet s = greedy_maximal(table, order);
    if (better_set(s, report.set)) report.set = std::move(s);
  }
  if (n <= limit_exact && n <= 32) {
    report.exact = true;
    // Seed the bound one below the heuristic so that the search returns the
    // first maximum in its own order.
    ProductFreeDfs dfs(table);
    const std::uint32_t mask = dfs.run(std::max(0, report.set.size() - 1));
    if (dfs.improved()) report.set = IndexSet::from_mask(n, mask);
  } else {
    report.restarts_used = restarts;
  }
  return report;
}

ProductFreeReport product_free(const GroupTable& g, int restarts, std::uint64_t seed, int limit_exact) {
  return product_free(group_table(g), restarts, seed, limit_exact);
}

}  // namespace latdisc

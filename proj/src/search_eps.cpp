#include <algorithm>
#include <optional>

#include "latdisc/error.hpp"
#include "latdisc/search.hpp"
#include "search_internal.hpp"

namespace latdisc {

using detail::SymbolMatrix;

namespace {

// X = first half rows avoiding symbol 0 on Y = first half columns, Z = {0}.
Box guaranteed_box(const SymbolMatrix& m) {
  const int n = m.n;
  if (n < 2) throw DomainError("the guaranteed empty box needs n >= 2");
  const int h = n / 2;
  std::vector<char> ruled_out(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < h; ++j) {
      if (m.at(i, j) == 0) ruled_out[static_cast<std::size_t>(i)] = 1;
    }
  }
  IndexSet x(n);
  for (int i = 0; i < n && x.size() < h; ++i) {
    if (!ruled_out[static_cast<std::size_t>(i)]) x.insert(i);
  }
  return Box({x, IndexSet::prefix(n, h), IndexSet(n, {0})});
}

}  // namespace

Box guaranteed_empty_box(const PermTensor& t) {
  const int n = t.order();
  const int d = t.dimension();
  if (n < 2) throw DomainError("the guaranteed empty box needs n >= 2");
  const int h = n / 2;
  std::vector<char> ruled_out(static_cast<std::size_t>(n), 0);
  for (std::size_t k = 0; k < t.size(); ++k) {
    const auto p = t.point(k);
    if (p[1] >= h) continue;
    bool on_line = true;
    for (int c = 2; c <= d; ++c) on_line = on_line && p[static_cast<std::size_t>(c)] == 0;
    if (on_line) ruled_out[static_cast<std::size_t>(p[0])] = 1;
  }
  std::vector<IndexSet> parts;
  IndexSet first(n);
  for (int i = 0; i < n && first.size() < h; ++i) {
    if (!ruled_out[static_cast<std::size_t>(i)]) first.insert(i);
  }
  if (first.size() < h) throw InvalidObject("tensor has more than one point on some line");
  parts.push_back(std::move(first));
  parts.push_back(IndexSet::prefix(n, h));
  for (int c = 2; c <= d; ++c) parts.push_back(IndexSet(n, {0}));
  return Box(std::move(parts));
}

Box guaranteed_empty_box(const LatinSquare& ls) { return guaranteed_box(SymbolMatrix::from_latin(ls)); }

int trivial_cube_side(int n) {
  int s = 0;
  while (static_cast<long long>(s + 1) * (s + 2) <= n) ++s;
  return s;
}

Box greedy_empty_cube(const LatinSquare& ls) {
  const int n = ls.order();
  const int s = trivial_cube_side(n);
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) seen[static_cast<std::size_t>(ls.at(i, j))] = 1;
  }
  IndexSet c(n);
  for (int k = 0; k < n && c.size() < s; ++k) {
    if (!seen[static_cast<std::size_t>(k)]) c.insert(k);
  }
  return Box({IndexSet::prefix(n, s), IndexSet::prefix(n, s), c});
}

EmptyBoxReport eps_exact(const LatinSquare& ls, int limit) {
  if (ls.order() > limit) {
    throw LimitExceeded("exact empty-box search is limited to n <= " + std::to_string(limit));
  }
  return detail::exact_max_empty_box(SymbolMatrix::from_latin(ls));
}

EmptyBoxReport eps_heuristic(const LatinSquare& ls, int restarts, std::uint64_t seed) {
  const auto m = SymbolMatrix::from_latin(ls);
  std::optional<Box> start;
  if (ls.order() >= 2) start = guaranteed_box(m);
  return detail::alternating_empty_box(m, restarts, seed, start);
}

bool is_empty_sts_box(const TripleSystem& x, const Box& b) {
  return detail::is_empty_box(SymbolMatrix::from_sts(x), b);
}

PhiReport phi(const TripleSystem& x, int restarts, std::uint64_t seed, int limit_exact) {
  const int n = x.order();
  const auto m = SymbolMatrix::from_sts(x);
  EmptyBoxReport found;
  if (n <= limit_exact && n <= kMaskKernelMax) {
    found = detail::exact_max_empty_box(m);
  } else {
    std::optional<Box> start;
    if (n >= 2) start = guaranteed_box(m);
    found = detail::alternating_empty_box(m, restarts, seed, start);
  }
  PhiReport report;
  report.box = std::move(found.box);
  report.volume = found.volume;
  report.exact = found.exact;
  report.restarts_used = found.restarts_used;
  if (report.exact && x.complete() && n <= kEpsExactLimit) {
    report.latin_eps = eps_exact(sts_to_ls(x)).volume;
    report.containment_holds = *report.latin_eps <= report.volume;
  }
  return report;
}

}  // namespace latdisc

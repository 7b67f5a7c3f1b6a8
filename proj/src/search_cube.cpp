#include <algorithm>
#include <bit>
#include <cmath>

#include "latdisc/error.hpp"
#include "latdisc/rng.hpp"
#include "latdisc/search.hpp"
#include "search_internal.hpp"

namespace latdisc {

namespace {

std::uint32_t next_combination(std::uint32_t v) {
  const std::uint32_t t = v | (v - 1);
  return (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
}

std::uint32_t first_bits(std::uint32_t mask, int count) {
  std::uint32_t out = 0;
  for (int taken = 0; taken < count; ++taken) {
    const std::uint32_t low = mask & -mask;
    out |= low;
    mask ^= low;
  }
  return out;
}

struct MaskCube {
  std::uint32_t a = 0, b = 0, c = 0;
};

Box to_box(int n, const MaskCube& m) {
  return Box({IndexSet::from_mask(n, m.a), IndexSet::from_mask(n, m.b), IndexSet::from_mask(n, m.c)});
}

// Smallest empty s-cube under box_precedes, if one exists.
std::optional<Box> exact_cube(const LatinSquare& ls, int s) {
  const int n = ls.order();
  const auto un = static_cast<std::size_t>(n);
  std::vector<std::uint16_t> colset(un * un, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) colset[static_cast<std::size_t>(i) * un + static_cast<std::size_t>(ls.at(i, j))] |= static_cast<std::uint16_t>(1U << j);
  }
  const std::uint32_t limit = 1U << n;
  const std::uint32_t all = limit - 1;
  std::optional<Box> best;
  std::vector<std::uint16_t> rowmask(un);
  for (std::uint32_t c = (1U << s) - 1; c < limit; c = next_combination(c)) {
    for (std::size_t i = 0; i < un; ++i) {
      std::uint16_t mask = 0;
      for (std::uint32_t bits = c; bits != 0; bits &= bits - 1) mask |= colset[i * un + static_cast<std::size_t>(std::countr_zero(bits))];
      rowmask[i] = mask;
    }
    for (std::uint32_t a = (1U << s) - 1; a < limit; a = next_combination(a)) {
      std::uint32_t used = 0;
      for (std::uint32_t bits = a; bits != 0; bits &= bits - 1) used |= rowmask[static_cast<std::size_t>(std::countr_zero(bits))];
      const std::uint32_t free_cols = all & ~used;
      if (std::popcount(free_cols) < s) continue;
      Box candidate = to_box(n, {a, first_bits(free_cols, s), c});
      if (!best || box_precedes(candidate, *best)) best = std::move(candidate);
    }
  }
  return best;
}

// Single-element swap local search for an empty s-cube.
class CubeSearch {
 public:
  CubeSearch(const LatinSquare& ls, int s, Rng& rng) : ls_(ls), n_(ls.order()), s_(s), rng_(rng) {
    const auto un = static_cast<std::size_t>(n_);
    col_of_.assign(un * un, 0);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        col_of_[idx(i, ls.at(i, j))] = j;
      }
    }
  }

  bool run(int iterations) {
    for (auto& part : in_) part.assign(static_cast<std::size_t>(n_), 0);
    for (int axis = 0; axis < 3; ++axis) {
      const auto pick = detail::random_subset(n_, s_, rng_);
      pick.for_each([&](int v) { in_[axis][static_cast<std::size_t>(v)] = 1; });
    }
    recount();
    for (int it = 0; it < iterations; ++it) {
      if (cost_ == 0) return true;
      Move best{};
      bool have = false;
      for (int axis = 0; axis < 3; ++axis) {
        const Move mv = best_move(axis);
        if (!have || mv.delta < best.delta || (mv.delta == best.delta && rng_.coin())) {
          best = mv;
          have = true;
        }
      }
      if (best.delta >= 0 && rng_.below(4) == 0) best = random_move();
      apply(best);
    }
    return cost_ == 0;
  }

  Box box() const {
    std::vector<IndexSet> parts;
    for (int axis = 0; axis < 3; ++axis) {
      IndexSet p(n_);
      for (int v = 0; v < n_; ++v) {
        if (in_[axis][static_cast<std::size_t>(v)]) p.insert(v);
      }
      parts.push_back(std::move(p));
    }
    return Box(std::move(parts));
  }

 private:
  struct Move {
    int axis = 0, out = 0, in = 0;
    long long delta = 0;
  };

  std::size_t idx(int a, int b) const { return static_cast<std::size_t>(a) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(b); }
  // Contribution of element v on `axis` to the box count, whether or not v is in.
  long long& score(int axis, int v) { return cnt_[axis][static_cast<std::size_t>(v)]; }
  bool in(int axis, int v) const { return in_[axis][static_cast<std::size_t>(v)] != 0; }

  void recount() {
    for (auto& c : cnt_) c.assign(static_cast<std::size_t>(n_), 0);
    cost_ = 0;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        const int k = ls_.at(i, j);
        if (in(1, j) && in(2, k)) ++score(0, i);
        if (in(0, i) && in(2, k)) ++score(1, j);
        if (in(0, i) && in(1, j)) ++score(2, k);
        if (in(0, i) && in(1, j) && in(2, k)) ++cost_;
      }
    }
  }

  Move best_move(int axis) {
    Move mv{axis, -1, -1, 0};
    long long hi = -1, lo = -1;
    int hi_ties = 0, lo_ties = 0;
    for (int v = 0; v < n_; ++v) {
      const long long c = score(axis, v);
      if (in(axis, v)) {
        if (c > hi) {
          hi = c, mv.out = v, hi_ties = 1;
        } else if (c == hi && rng_.below(static_cast<std::uint64_t>(++hi_ties)) == 0) {
          mv.out = v;
        }
      } else {
        if (lo < 0 || c < lo) {
          lo = c, mv.in = v, lo_ties = 1;
        } else if (c == lo && rng_.below(static_cast<std::uint64_t>(++lo_ties)) == 0) {
          mv.in = v;
        }
      }
    }
    mv.delta = lo - hi;
    return mv;
  }

  Move random_move() {
    Move mv;
    mv.axis = static_cast<int>(rng_.below(3));
    std::vector<int> ins, outs;
    for (int v = 0; v < n_; ++v) (in(mv.axis, v) ? ins : outs).push_back(v);
    mv.out = ins[rng_.below(ins.size())];
    mv.in = outs[rng_.below(outs.size())];
    mv.delta = score(mv.axis, mv.in) - score(mv.axis, mv.out);
    return mv;
  }

  void toggle(int axis, int v, int sign) {
    // Update the counts of the other two axes for adding (+1) or removing (-1) v.
    for (int w = 0; w < n_; ++w) {
      int i = 0, j = 0, k = 0;
      if (axis == 0) {
        i = v, j = w, k = ls_.at(i, j);
      } else if (axis == 1) {
        i = w, j = v, k = ls_.at(i, j);
      } else {
        i = w, k = v, j = col_of_[idx(i, k)];
      }
      const bool ii = in(0, i), jj = in(1, j), kk = in(2, k);
      if (axis == 0) {
        if (kk) score(1, j) += sign;
        if (jj) score(2, k) += sign;
      } else if (axis == 1) {
        if (kk) score(0, i) += sign;
        if (ii) score(2, k) += sign;
      } else {
        if (jj) score(0, i) += sign;
        if (ii) score(1, j) += sign;
      }
    }
  }

  void apply(const Move& mv) {
    cost_ += mv.delta;
    in_[mv.axis][static_cast<std::size_t>(mv.out)] = 0;
    toggle(mv.axis, mv.out, -1);
    in_[mv.axis][static_cast<std::size_t>(mv.in)] = 1;
    toggle(mv.axis, mv.in, +1);
  }

  const LatinSquare& ls_;
  int n_;
  int s_;
  Rng& rng_;
  std::vector<int> col_of_;
  std::array<std::vector<char>, 3> in_;
  std::array<std::vector<long long>, 3> cnt_;
  long long cost_ = 0;
};

}  // namespace

CubeReport max_empty_cube(const LatinSquare& ls, int restarts, std::uint64_t seed, int limit_exact) {
  if (restarts < 1) throw DomainError("restarts must be at least 1");
  const int n = ls.order();
  CubeReport report;
  report.box = greedy_empty_cube(ls);
  report.side = trivial_cube_side(n);

  if (n <= limit_exact && n <= kMaskKernelMax) {
    report.exact = true;
    for (int s = std::max(report.side, 1); s <= n / 2; ++s) {
      auto found = exact_cube(ls, s);
      if (!found) break;
      report.box = std::move(*found);
      report.side = s;
    }
    return report;
  }

  report.restarts_used = restarts;
  const int iterations = 20 * n;
  int lo = report.side, hi = n / 2;
  std::uint64_t stream = 0;
  while (lo < hi) {
    const int mid = (lo + hi + 1) / 2;
    bool found = false;
    for (int r = 0; r < restarts && !found; ++r) {
      Rng rng(derive_seed(seed, stream++));
      CubeSearch search(ls, mid, rng);
      if (search.run(iterations)) {
        report.box = search.box();
        report.side = mid;
        found = true;
      }
    }
    if (found) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return report;
}

}  // namespace latdisc

#include <algorithm>
#include <bit>

#include "latdisc/error.hpp"
#include "latdisc/kernels.hpp"
#include "latdisc/rng.hpp"
#include "latdisc/search.hpp"
#include "search_internal.hpp"

namespace latdisc {

namespace {

using i128 = __int128;

// dev^2 / den with den = |X||Y||Z|; compares scores without rounding.
struct Ratio {
  i128 num = 0;
  i128 den = 1;
};

int compare(const Ratio& a, const Ratio& b) {
  const i128 l = a.num * b.den;
  const i128 r = b.num * a.den;
  return l < r ? -1 : (l > r ? 1 : 0);
}

// Exact Z step: the best |Z| = m choices are the m largest or the m smallest
// counts. Ties among symbols go to the smaller index.
struct ZChoice {
  Ratio value;
  int m = 0;
  bool top = true;
};

class ZStep {
 public:
  explicit ZStep(int n) : n_(n), desc_(static_cast<std::size_t>(n)), asc_(static_cast<std::size_t>(n)) {}

  // counts[k] in [0, cap]; ab = |X||Y|.
  ZChoice run(std::span<const long long> counts, long long ab, long long cap) {
    order(counts, cap);
    ZChoice best;
    best.value = {-1, 1};
    long long top = 0, bottom = 0;
    for (int m = 1; m <= n_; ++m) {
      top += counts[static_cast<std::size_t>(desc_[static_cast<std::size_t>(m - 1)])];
      bottom += counts[static_cast<std::size_t>(asc_[static_cast<std::size_t>(m - 1)])];
      const i128 expect = static_cast<i128>(ab) * m;
      const i128 dt = static_cast<i128>(n_) * top - expect;
      const i128 db = expect - static_cast<i128>(n_) * bottom;
      const Ratio rt{dt * dt, expect};
      const Ratio rb{db * db, expect};
      if (compare(rt, best.value) > 0) best = {rt, m, true};
      if (compare(rb, best.value) > 0) best = {rb, m, false};
    }
    return best;
  }

  const std::vector<int>& desc() const { return desc_; }
  const std::vector<int>& asc() const { return asc_; }

 private:
  void order(std::span<const long long> counts, long long cap) {
    const auto buckets = static_cast<std::size_t>(cap + 1);
    if (start_.size() < buckets + 1) start_.resize(buckets + 1);
    std::fill(start_.begin(), start_.begin() + static_cast<std::ptrdiff_t>(buckets + 1), 0);
    for (int k = 0; k < n_; ++k) ++start_[static_cast<std::size_t>(counts[static_cast<std::size_t>(k)]) + 1];
    for (std::size_t v = 1; v <= buckets; ++v) start_[v] += start_[v - 1];
    // Ascending by count, then by index.
    fill_.assign(start_.begin(), start_.begin() + static_cast<std::ptrdiff_t>(buckets));
    for (int k = 0; k < n_; ++k) {
      asc_[static_cast<std::size_t>(fill_[static_cast<std::size_t>(counts[static_cast<std::size_t>(k)])]++)] = k;
    }
    // Descending by count, ascending index within a count.
    std::size_t pos = 0;
    for (std::size_t v = buckets; v-- > 0;) {
      for (int p = start_[v]; p < start_[v + 1]; ++p) desc_[pos++] = asc_[static_cast<std::size_t>(p)];
    }
  }

  int n_;
  std::vector<int> desc_, asc_;
  std::vector<int> start_, fill_;
};

struct MaskBox {
  std::uint32_t x = 0, y = 0, z = 0;
};

bool mask_box_precedes(const MaskBox& a, const MaskBox& b) {
  const std::uint32_t pa[3] = {a.x, a.y, a.z};
  const std::uint32_t pb[3] = {b.x, b.y, b.z};
  for (int i = 0; i < 3; ++i) {
    const int sa = std::popcount(pa[i]);
    const int sb = std::popcount(pb[i]);
    if (sa != sb) return sa < sb;
  }
  for (int i = 0; i < 3; ++i) {
    if (pa[i] != pb[i]) return detail::mask_lex_less(pa[i], pb[i]);
  }
  return false;
}

std::uint32_t prefix_mask(const std::vector<int>& order, int m) {
  std::uint32_t z = 0;
  for (int t = 0; t < m; ++t) z |= 1U << order[static_cast<std::size_t>(t)];
  return z;
}

IndexSet flags_to_set(const std::vector<char>& f) {
  IndexSet s(static_cast<int>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i]) s.insert(static_cast<int>(i));
  }
  return s;
}

IndexSet order_prefix(int n, const std::vector<int>& order, int m) {
  IndexSet s(n);
  for (int t = 0; t < m; ++t) s.insert(order[static_cast<std::size_t>(t)]);
  return s;
}

}  // namespace

DiscReport disc_exact(const LatinSquare& ls, int limit) {
  const int n = ls.order();
  if (n > limit || n > kMaskKernelMax) {
    throw LimitExceeded("exact discrepancy search is limited to n <= " + std::to_string(std::min(limit, kMaskKernelMax)));
  }
  const auto un = static_cast<std::size_t>(n);
  // cell_bit[i][k]: the column bit of symbol k in row i.
  std::vector<std::uint16_t> cell_bit(un * un);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) cell_bit[static_cast<std::size_t>(i) * un + static_cast<std::size_t>(ls.at(i, j))] = static_cast<std::uint16_t>(1U << j);
  }
  ZStep zstep(n);
  std::vector<std::uint16_t> w(un), c16(un);
  std::vector<long long> counts(un);
  Ratio best_value{-1, 1};
  MaskBox best_box;
  const std::uint32_t limit_mask = 1U << n;
  for (std::uint32_t x = 1; x < limit_mask; ++x) {
    std::fill(w.begin(), w.end(), 0);
    for (std::uint32_t bits = x; bits != 0; bits &= bits - 1) {
      const auto i = static_cast<std::size_t>(std::countr_zero(bits));
      for (std::size_t k = 0; k < un; ++k) w[k] |= cell_bit[i * un + k];
    }
    const int a = std::popcount(x);
    for (std::uint32_t y = 1; y < limit_mask; ++y) {
      kernels::and_popcount(w, static_cast<std::uint16_t>(y), c16);
      for (std::size_t k = 0; k < un; ++k) counts[k] = c16[k];
      const long long ab = static_cast<long long>(a) * std::popcount(y);
      const ZChoice choice = zstep.run(counts, ab, std::min(a, std::popcount(y)));
      const int cmp = compare(choice.value, best_value);
      if (cmp < 0) continue;
      const MaskBox cand{x, y, prefix_mask(choice.top ? zstep.desc() : zstep.asc(), choice.m)};
      if (cmp > 0 || mask_box_precedes(cand, best_box)) {
        best_value = choice.value;
        best_box = cand;
      }
    }
  }
  DiscReport report;
  report.exact = true;
  report.best = make_box_report(ls, Box({IndexSet::from_mask(n, best_box.x), IndexSet::from_mask(n, best_box.y),
                                         IndexSet::from_mask(n, best_box.z)}));
  return report;
}

namespace {

class DiscAscent {
 public:
  explicit DiscAscent(const LatinSquare& ls) : ls_(ls), n_(ls.order()), zstep_(n_) {}

  void reset(IndexSet x, IndexSet y) {
    const auto un = static_cast<std::size_t>(n_);
    xf_.assign(un, 0);
    yf_.assign(un, 0);
    x.for_each([&](int i) { xf_[static_cast<std::size_t>(i)] = 1; });
    y.for_each([&](int j) { yf_[static_cast<std::size_t>(j)] = 1; });
    a_ = x.size();
    b_ = y.size();
    counts_.assign(un, 0);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        if (xf_[static_cast<std::size_t>(i)] && yf_[static_cast<std::size_t>(j)]) ++counts_[static_cast<std::size_t>(ls_.at(i, j))];
      }
    }
    value_ = zstep_.run(counts_, static_cast<long long>(a_) * b_, std::min(a_, b_)).value;
  }

  // Best-improvement flips until no single flip raises the score.
  void climb() {
    const int cap = 10 * n_ * n_ + 10;
    for (int it = 0; it < cap; ++it) {
      int best_axis = -1, best_v = -1;
      Ratio best = value_;
      for (int axis = 0; axis < 2; ++axis) {
        for (int v = 0; v < n_; ++v) {
          if (!flip(axis, v)) continue;
          const Ratio r = zstep_.run(counts_, static_cast<long long>(a_) * b_, std::min(a_, b_)).value;
          flip(axis, v);
          if (compare(r, best) > 0) {
            best = r;
            best_axis = axis;
            best_v = v;
          }
        }
      }
      if (best_axis < 0) break;
      flip(best_axis, best_v);
      value_ = best;
    }
  }

  Box box() {
    const ZChoice choice = zstep_.run(counts_, static_cast<long long>(a_) * b_, std::min(a_, b_));
    return Box({flags_to_set(xf_), flags_to_set(yf_),
                order_prefix(n_, choice.top ? zstep_.desc() : zstep_.asc(), choice.m)});
  }

  const Ratio& value() const { return value_; }

 private:
  // Toggles row (axis 0) or column (axis 1) v; refuses to empty a part.
  bool flip(int axis, int v) {
    auto& f = axis == 0 ? xf_ : yf_;
    int& size = axis == 0 ? a_ : b_;
    const bool was_in = f[static_cast<std::size_t>(v)] != 0;
    if (was_in && size == 1) return false;
    const long long delta = was_in ? -1 : 1;
    const auto& other = axis == 0 ? yf_ : xf_;
    for (int w = 0; w < n_; ++w) {
      if (!other[static_cast<std::size_t>(w)]) continue;
      const int k = axis == 0 ? ls_.at(v, w) : ls_.at(w, v);
      counts_[static_cast<std::size_t>(k)] += delta;
    }
    f[static_cast<std::size_t>(v)] = was_in ? 0 : 1;
    size += was_in ? -1 : 1;
    return true;
  }

  const LatinSquare& ls_;
  int n_;
  ZStep zstep_;
  std::vector<char> xf_, yf_;
  int a_ = 0, b_ = 0;
  std::vector<long long> counts_;
  Ratio value_;
};

}  // namespace

DiscReport disc_heuristic(const LatinSquare& ls, int restarts, std::uint64_t seed) {
  if (restarts < 1) throw DomainError("restarts must be at least 1");
  const int n = ls.order();
  DiscAscent ascent(ls);
  std::optional<Box> best_box;
  Ratio best_value{-1, 1};
  for (int r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    auto x = detail::random_nonempty_subset(n, rng);
    auto y = detail::random_nonempty_subset(n, rng);
    ascent.reset(std::move(x), std::move(y));
    ascent.climb();
    const int cmp = compare(ascent.value(), best_value);
    if (cmp < 0) continue;
    Box box = ascent.box();
    if (cmp > 0 || box_precedes(box, *best_box)) {
      best_value = ascent.value();
      best_box = std::move(box);
    }
  }
  DiscReport report;
  report.best = make_box_report(ls, *best_box);
  report.restarts_used = restarts;
  return report;
}

namespace {

struct SectionBest {
  std::uint64_t scaled = 0;
  IndexSet a, b;
  bool set = false;
};

// Given the fixed side's neighbour counts d_v = n |N(v) ∩ fixed| - k |fixed|,
// the best other side for the sign keeps exactly the vertices of that sign.
std::uint64_t pick_side(const std::vector<long long>& d, int sign, std::vector<char>& out) {
  long long total = 0;
  for (std::size_t v = 0; v < d.size(); ++v) {
    const bool take = sign > 0 ? d[v] > 0 : d[v] < 0;
    out[v] = take ? 1 : 0;
    if (take) total += d[v];
  }
  return static_cast<std::uint64_t>(total < 0 ? -total : total);
}

}  // namespace

SectionReport section_discrepancy(const LatinSquare& ls, const IndexSet& s, int axis, int restarts,
                                  std::uint64_t seed, int limit_exact) {
  if (s.empty()) throw DomainError("section needs a nonempty set S");
  if (restarts < 1) throw DomainError("restarts must be at least 1");
  const BipartiteGraph g = extract_section(ls, s, axis);
  const int n = g.n;
  const auto un = static_cast<std::size_t>(n);
  const long long k = s.size();
  std::vector<std::vector<int>> left(un), right(un);
  for (const auto& [u, v] : g.edges()) {
    left[static_cast<std::size_t>(u)].push_back(v);
    right[static_cast<std::size_t>(v)].push_back(u);
  }

  SectionReport report;
  SectionBest best;
  std::vector<long long> d(un);
  std::vector<char> side(un);

  if (n <= limit_exact && n <= kMaskKernelMax) {
    report.exact = true;
    std::vector<std::uint32_t> radj(un, 0);
    for (std::size_t v = 0; v < un; ++v) {
      for (int u : right[v]) radj[v] |= 1U << u;
    }
    std::uint32_t best_a = 0, best_b = 0;
    for (std::uint32_t a = 0; a < (1U << n); ++a) {
      const long long asize = std::popcount(a);
      for (std::size_t v = 0; v < un; ++v) d[v] = n * static_cast<long long>(std::popcount(radj[v] & a)) - k * asize;
      for (int sign : {1, -1}) {
        const auto scaled = pick_side(d, sign, side);
        if (scaled > best.scaled) {
          best.scaled = scaled;
          best_a = a;
          best_b = 0;
          for (std::size_t v = 0; v < un; ++v) {
            if (side[v]) best_b |= 1U << v;
          }
        }
      }
    }
    best.a = IndexSet::from_mask(n, best_a);
    best.b = IndexSet::from_mask(n, best_b);
  } else {
    report.restarts_used = restarts;
    best.a = IndexSet(n);
    best.b = IndexSet(n);
    std::vector<char> af(un), bf(un);
    for (int r = 0; r < restarts; ++r) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
      const IndexSet start = detail::random_nonempty_subset(n, rng);
      for (int sign : {1, -1}) {
        std::fill(af.begin(), af.end(), 0);
        start.for_each([&](int u) { af[static_cast<std::size_t>(u)] = 1; });
        std::uint64_t scaled = 0;
        for (int it = 0; it < 10 * n; ++it) {
          const long long asize = std::count(af.begin(), af.end(), 1);
          for (std::size_t v = 0; v < un; ++v) {
            long long hits = 0;
            for (int u : right[v]) hits += af[static_cast<std::size_t>(u)];
            d[v] = n * hits - k * asize;
          }
          pick_side(d, sign, bf);
          const long long bsize = std::count(bf.begin(), bf.end(), 1);
          for (std::size_t u = 0; u < un; ++u) {
            long long hits = 0;
            for (int v : left[u]) hits += bf[static_cast<std::size_t>(v)];
            d[u] = n * hits - k * bsize;
          }
          const std::vector<char> prev = af;
          scaled = pick_side(d, sign, af);
          if (af == prev) break;
        }
        if (scaled > best.scaled) {
          best.scaled = scaled;
          best.a = flags_to_set(af);
          best.b = flags_to_set(bf);
        }
      }
    }
  }
  report.a = std::move(best.a);
  report.b = std::move(best.b);
  report.scaled_deviation = best.scaled;
  report.deviation = static_cast<double>(best.scaled) / static_cast<double>(n);
  return report;
}

}  // namespace latdisc

#include <algorithm>
#include <bit>

#include "latdisc/error.hpp"
#include "latdisc/kernels.hpp"
#include "search_internal.hpp"

namespace latdisc::detail {

SymbolMatrix SymbolMatrix::from_latin(const LatinSquare& ls) {
  return {ls.order(), std::vector<int>(ls.cells().begin(), ls.cells().end())};
}

SymbolMatrix SymbolMatrix::from_sts(const TripleSystem& x) {
  const int n = x.order();
  SymbolMatrix m{n, std::vector<int>(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), -1)};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) m.cells[static_cast<std::size_t>(i * n + j)] = x.third_point(i, j);
    }
  }
  return m;
}

bool is_empty_box(const SymbolMatrix& m, const Box& b) {
  if (b.arity() != 3 || b.order() != m.n) throw DomainError("box does not match the matrix");
  bool empty = true;
  const IndexSet& z = b.part(2);
  b.part(0).for_each([&](int i) {
    b.part(1).for_each([&](int j) {
      const int s = m.at(i, j);
      if (s >= 0 && z.contains(s)) empty = false;
    });
  });
  return empty;
}

bool mask_lex_less(std::uint32_t a, std::uint32_t b) {
  while (a != 0 && b != 0) {
    const int la = std::countr_zero(a);
    const int lb = std::countr_zero(b);
    if (la != lb) return la < lb;
    a &= a - 1;
    b &= b - 1;
  }
  return a == 0 && b != 0;
}

IndexSet random_subset(int n, int size, Rng& rng) {
  std::vector<int> items(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) items[static_cast<std::size_t>(i)] = i;
  // Partial Fisher-Yates.
  for (int i = 0; i < size; ++i) {
    const auto j = static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(n - i));
    std::swap(items[static_cast<std::size_t>(i)], items[j]);
  }
  return IndexSet(n, std::span<const int>(items.data(), static_cast<std::size_t>(size)));
}

IndexSet random_nonempty_subset(int n, Rng& rng) {
  IndexSet s(n);
  while (s.empty()) {
    for (int i = 0; i < n; ++i) {
      if (rng.coin()) s.insert(i);
    }
  }
  return s;
}

EmptyBoxReport exact_max_empty_box(const SymbolMatrix& m) {
  const int n = m.n;
  if (n > kMaskKernelMax) throw LimitExceeded("exact empty-box search supports n <= 16");
  const auto un = static_cast<std::size_t>(n);

  // colset[i][k]: columns of row i carrying symbol k.
  std::vector<std::uint16_t> colset(un * un, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int s = m.at(i, j);
      if (s >= 0) colset[static_cast<std::size_t>(i) * un + static_cast<std::size_t>(s)] |= static_cast<std::uint16_t>(1U << j);
    }
  }

  const int low_rows = std::min(n, 10);
  const int high_rows = n - low_rows;
  const std::size_t low_size = std::size_t{1} << low_rows;
  const std::size_t high_size = std::size_t{1} << high_rows;
  std::vector<std::uint8_t> low_pop(low_size);
  for (std::size_t l = 0; l < low_size; ++l) low_pop[l] = static_cast<std::uint8_t>(std::popcount(l));
  std::vector<std::uint16_t> low_union(low_size), high_union(high_size);
  std::vector<std::uint16_t> rowmask(un);

  std::uint64_t best_volume = 0;
  std::uint32_t best_x = 0, best_z = 0;
  for (std::uint32_t z = 1; z < (1U << n); ++z) {
    const int zsize = std::popcount(z);
    for (std::size_t i = 0; i < un; ++i) {
      std::uint16_t mask = 0;
      for (std::uint32_t bits = z; bits != 0; bits &= bits - 1) mask |= colset[i * un + static_cast<std::size_t>(std::countr_zero(bits))];
      rowmask[i] = mask;
    }
    low_union[0] = 0;
    for (std::size_t l = 1; l < low_size; ++l) {
      low_union[l] = low_union[l & (l - 1)] | rowmask[static_cast<std::size_t>(std::countr_zero(l))];
    }
    high_union[0] = 0;
    for (std::size_t h = 1; h < high_size; ++h) {
      high_union[h] = high_union[h & (h - 1)] | rowmask[static_cast<std::size_t>(low_rows + std::countr_zero(h))];
    }
    std::uint32_t z_best = 0, z_best_x = 0;
    for (std::size_t h = 0; h < high_size; ++h) {
      const auto block = kernels::max_rect_block(low_union, low_pop, high_union[h],
                                                 static_cast<unsigned>(std::popcount(h)), static_cast<unsigned>(n));
      if (block.value > z_best) {
        z_best = block.value;
        z_best_x = static_cast<std::uint32_t>(h << low_rows) | block.index;
      }
    }
    const std::uint64_t volume = static_cast<std::uint64_t>(z_best) * static_cast<std::uint64_t>(zsize);
    if (volume == 0) continue;
    bool better = volume > best_volume;
    if (!better && volume == best_volume) {
      const int best_zsize = std::popcount(best_z);
      if (zsize != best_zsize) {
        better = zsize < best_zsize;
      } else if (z != best_z) {
        better = mask_lex_less(z, best_z);
      } else {
        better = mask_lex_less(z_best_x, best_x);
      }
    }
    if (better) {
      best_volume = volume;
      best_z = z;
      best_x = z_best_x;
    }
  }

  EmptyBoxReport report;
  report.exact = true;
  if (best_volume == 0) {
    report.box = Box({IndexSet(n), IndexSet(n), IndexSet(n)});
    return report;
  }
  std::uint16_t used = 0;
  for (std::uint32_t bits = best_x; bits != 0; bits &= bits - 1) {
    const auto i = static_cast<std::size_t>(std::countr_zero(bits));
    for (std::uint32_t zb = best_z; zb != 0; zb &= zb - 1) used |= colset[i * un + static_cast<std::size_t>(std::countr_zero(zb))];
  }
  const std::uint32_t all = (1U << n) - 1;
  report.box = Box({IndexSet::from_mask(n, best_x), IndexSet::from_mask(n, all & ~static_cast<std::uint32_t>(used)),
                    IndexSet::from_mask(n, best_z)});
  report.volume = best_volume;
  return report;
}

namespace {

using Flags = std::vector<char>;

int count_flags(const Flags& f) { return static_cast<int>(std::count(f.begin(), f.end(), 1)); }

IndexSet to_set(const Flags& f) {
  IndexSet s(static_cast<int>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i]) s.insert(static_cast<int>(i));
  }
  return s;
}

Flags to_flags(const IndexSet& s) {
  Flags f(static_cast<std::size_t>(s.universe()), 0);
  s.for_each([&](int i) { f[static_cast<std::size_t>(i)] = 1; });
  return f;
}

// Largest third part for the other two; parts[axis] is overwritten.
void maximise_axis(const SymbolMatrix& m, std::array<Flags, 3>& parts, int axis) {
  const int n = m.n;
  const auto un = static_cast<std::size_t>(n);
  Flags& out = parts[static_cast<std::size_t>(axis)];
  if (axis == 2) {
    Flags present(un, 0);
    for (int i = 0; i < n; ++i) {
      if (!parts[0][static_cast<std::size_t>(i)]) continue;
      for (int j = 0; j < n; ++j) {
        const int s = m.at(i, j);
        if (parts[1][static_cast<std::size_t>(j)] && s >= 0) present[static_cast<std::size_t>(s)] = 1;
      }
    }
    for (std::size_t k = 0; k < un; ++k) out[k] = present[k] ? 0 : 1;
    return;
  }
  const Flags& other = parts[axis == 0 ? 1 : 0];
  const Flags& z = parts[2];
  for (int a = 0; a < n; ++a) {
    bool ok = true;
    for (int b = 0; b < n && ok; ++b) {
      if (!other[static_cast<std::size_t>(b)]) continue;
      const int s = axis == 0 ? m.at(a, b) : m.at(b, a);
      if (s >= 0 && z[static_cast<std::size_t>(s)]) ok = false;
    }
    out[static_cast<std::size_t>(a)] = ok ? 1 : 0;
  }
}

void alternate_to_fixpoint(const SymbolMatrix& m, std::array<Flags, 3>& parts, int first_axis) {
  const int cap = 10 * m.n;
  int unchanged = 0;
  int axis = first_axis;
  for (int it = 0; it < cap && unchanged < 3; ++it) {
    const Flags before = parts[static_cast<std::size_t>(axis)];
    maximise_axis(m, parts, axis);
    unchanged = before == parts[static_cast<std::size_t>(axis)] ? unchanged + 1 : 0;
    axis = (axis + 1) % 3;
  }
}

}  // namespace

EmptyBoxReport alternating_empty_box(const SymbolMatrix& m, int restarts, std::uint64_t seed,
                                     const std::optional<Box>& first_start) {
  if (restarts < 1) throw DomainError("restarts must be at least 1");
  const int n = m.n;
  EmptyBoxReport best;
  best.box = Box({IndexSet(n), IndexSet(n), IndexSet(n)});
  best.restarts_used = restarts;
  if (n < 2) return best;

  for (int r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    std::array<Flags, 3> parts;
    int first_axis = 0;
    if (r == 0 && first_start) {
      for (int a = 0; a < 3; ++a) parts[static_cast<std::size_t>(a)] = to_flags(first_start->part(a));
    } else {
      const int free_axis = static_cast<int>(rng.below(3));
      for (int a = 0; a < 3; ++a) {
        const int size = a == free_axis ? 0 : 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
        parts[static_cast<std::size_t>(a)] = to_flags(random_subset(n, size, rng));
      }
      maximise_axis(m, parts, free_axis);
      // Shrink the seeded parts until the free part is nonempty.
      while (count_flags(parts[static_cast<std::size_t>(free_axis)]) == 0) {
        const int a = (free_axis + 1) % 3;
        const int b = (free_axis + 2) % 3;
        Flags& victim = count_flags(parts[static_cast<std::size_t>(a)]) >= count_flags(parts[static_cast<std::size_t>(b)])
                            ? parts[static_cast<std::size_t>(a)]
                            : parts[static_cast<std::size_t>(b)];
        if (count_flags(victim) <= 1) break;
        std::vector<int> members;
        for (int i = 0; i < n; ++i) {
          if (victim[static_cast<std::size_t>(i)]) members.push_back(i);
        }
        victim[static_cast<std::size_t>(members[rng.below(members.size())])] = 0;
        maximise_axis(m, parts, free_axis);
      }
      first_axis = (free_axis + 1) % 3;
    }
    alternate_to_fixpoint(m, parts, first_axis);
    Box box({to_set(parts[0]), to_set(parts[1]), to_set(parts[2])});
    if (box.has_empty_part() || !is_empty_box(m, box)) continue;
    const auto volume = box.volume();
    if (volume > best.volume || (volume == best.volume && volume > 0 && box_precedes(box, best.box))) {
      best.volume = volume;
      best.box = std::move(box);
    }
  }
  return best;
}

}  // namespace latdisc::detail

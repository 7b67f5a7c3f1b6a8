#pragma once

// Shared machinery for the empty-box searches. A SymbolMatrix is an n x n
// array of symbols in {0, .., n-1} or -1 (no symbol). A Latin square has no
// holes; a triple system gives M(i, j) = third point of the triple through
// {i, j}, with holes on the diagonal and at uncovered pairs. In both cases a
// box X x Y x Z is empty iff no cell of X x Y carries a symbol of Z.

#include <cstdint>
#include <optional>
#include <vector>

#include "latdisc/core.hpp"
#include "latdisc/generators.hpp"
#include "latdisc/rng.hpp"
#include "latdisc/search.hpp"

namespace latdisc::detail {

struct SymbolMatrix {
  int n = 0;
  std::vector<int> cells;

  int at(int i, int j) const {
    return cells[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
  }

  static SymbolMatrix from_latin(const LatinSquare& ls);
  static SymbolMatrix from_sts(const TripleSystem& x);
};

bool is_empty_box(const SymbolMatrix& m, const Box& b);

/// Exhaustive maximum-volume empty box (n <= kMaskKernelMax). Ties go to the
/// smallest (|Z|, Z, X) with Y maximal.
EmptyBoxReport exact_max_empty_box(const SymbolMatrix& m);

/// Multi-start alternating maximisation. When `first_start` is given it seeds
/// restart 0.
EmptyBoxReport alternating_empty_box(const SymbolMatrix& m, int restarts, std::uint64_t seed,
                                     const std::optional<Box>& first_start);

IndexSet random_subset(int n, int size, Rng& rng);
/// Nonempty set with each element kept with probability 1/2.
IndexSet random_nonempty_subset(int n, Rng& rng);

/// Sorted index lists, compared lexicographically, on 16-bit masks.
bool mask_lex_less(std::uint32_t a, std::uint32_t b);

}  // namespace latdisc::detail

#pragma once

// Extremal-box searches on Latin squares, triple systems and group tables.
//
// Three emptiness notions coexist:
//  * Latin-square boxes are cell based: no (i, j) in X x Y with L(i, j) in Z.
//  * Triple-system boxes use ordered distinct representatives: no triple
//    {i, j, k} of the system with i in A, j in B, k in C.
//  * The greedy trackers (greedy.hpp) use the coarser "meets" notion.
//
// Boxes with an empty part are never returned by a maximisation unless no
// nonempty candidate exists (then the report carries volume 0). Ties are
// broken by box_precedes. Randomised searches derive one seed per restart
// from the master seed.

#include <cstdint>
#include <optional>

#include "latdisc/core.hpp"
#include "latdisc/generators.hpp"

namespace latdisc {

inline constexpr int kEpsExactLimit = 12;
inline constexpr int kDiscExactLimit = 10;
inline constexpr int kPhiExactLimit = 10;
inline constexpr int kCubeExactLimit = 10;
inline constexpr int kProductFreeExactLimit = 24;
/// Widest universe the bitmask kernels handle.
inline constexpr int kMaskKernelMax = 16;

struct EmptyBoxReport {
  Box box;
  std::uint64_t volume = 0;
  bool exact = false;
  int restarts_used = 0;
};

struct CubeReport {
  Box box;
  int side = 0;
  bool exact = false;
  int restarts_used = 0;
};

struct DiscReport {
  BoxReport best;
  bool exact = false;
  int restarts_used = 0;
};

struct PhiReport {
  Box box;
  std::uint64_t volume = 0;
  bool exact = false;
  int restarts_used = 0;
  /// Exact empty-box volume of the associated Latin square, when the system
  /// is complete and small enough for eps_exact.
  std::optional<std::uint64_t> latin_eps;
  bool containment_holds = true;
};

struct ProductFreeReport {
  IndexSet set;
  bool exact = false;
  int restarts_used = 0;
  int size() const { return set.size(); }
};

struct SectionReport {
  IndexSet a, b;
  /// |n E(A, B) - k |A||B||; the deviation is this over n.
  std::uint64_t scaled_deviation = 0;
  double deviation = 0.0;
  bool exact = false;
  int restarts_used = 0;
};

/// T_2 = first floor(n/2) indices, T_3 .. T_{d+1} = {first index}, and T_1 the
/// first floor(n/2) indices not completed by a line through T_2. Always empty,
/// volume floor(n/2)^2. Requires n >= 2.
Box guaranteed_empty_box(const PermTensor& t);
Box guaranteed_empty_box(const LatinSquare& ls);

/// Largest s with s^2 + s <= n, i.e. floor(sqrt(n + 1/4) - 1/2).
int trivial_cube_side(int n);
/// Rows 0..s-1, columns 0..s-1 and the first s symbols missing from that block.
Box greedy_empty_cube(const LatinSquare& ls);

EmptyBoxReport eps_exact(const LatinSquare& ls, int limit = kEpsExactLimit);
EmptyBoxReport eps_heuristic(const LatinSquare& ls, int restarts, std::uint64_t seed);

/// Largest empty cube: exact for n <= limit_exact, local search above.
CubeReport max_empty_cube(const LatinSquare& ls, int restarts, std::uint64_t seed,
                          int limit_exact = kCubeExactLimit);

/// Maximum of |count - vol/n| / sqrt(vol) over boxes with nonempty parts.
DiscReport disc_exact(const LatinSquare& ls, int limit = kDiscExactLimit);
DiscReport disc_heuristic(const LatinSquare& ls, int restarts, std::uint64_t seed);

bool is_empty_sts_box(const TripleSystem& x, const Box& b);
PhiReport phi(const TripleSystem& x, int restarts, std::uint64_t seed, int limit_exact = kPhiExactLimit);

/// S with table(x, y) not in S for all x, y in S (a Latin square read as a
/// multiplication table). Maximum for n <= limit_exact, maximal above.
ProductFreeReport product_free(const LatinSquare& table, int restarts, std::uint64_t seed,
                               int limit_exact = kProductFreeExactLimit);
ProductFreeReport product_free(const GroupTable& g, int restarts, std::uint64_t seed,
                               int limit_exact = kProductFreeExactLimit);
bool is_product_free(const LatinSquare& table, const IndexSet& s);

/// max over A, B of |E(A, B) - (k/n)|A||B|| on the section graph.
SectionReport section_discrepancy(const LatinSquare& ls, const IndexSet& s, int axis, int restarts,
                                  std::uint64_t seed, int limit_exact = kDiscExactLimit);

}  // namespace latdisc

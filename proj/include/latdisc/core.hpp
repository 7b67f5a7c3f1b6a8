#pragma once

// Permutation tensors, Latin squares, boxes and the counting primitives used by
// every other part of the library. Indices and symbols are 0-based here; the
// text formats in io.hpp are 1-based.

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace latdisc {

/// Subset of {0, .., universe-1}. Backed by a bitset; constructible from a
/// 64-bit mask (universe <= 64) or from an index list of any size.
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(int universe);
  IndexSet(int universe, std::span<const int> indices);
  IndexSet(int universe, std::initializer_list<int> indices);

  static IndexSet from_mask(int universe, std::uint64_t mask);
  static IndexSet full(int universe);
  /// {0, .., count-1}
  static IndexSet prefix(int universe, int count);

  int universe() const noexcept { return universe_; }
  int size() const noexcept;
  bool empty() const noexcept { return size() == 0; }
  bool contains(int i) const noexcept {
    return i >= 0 && i < universe_ && ((words_[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1U);
  }
  void insert(int i);
  void erase(int i);
  void toggle(int i);

  /// Requires universe <= 64.
  std::uint64_t mask() const;
  std::vector<int> indices() const;
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  IndexSet complement() const;
  bool is_subset_of(const IndexSet& other) const;

  IndexSet& operator&=(const IndexSet& other);
  IndexSet& operator|=(const IndexSet& other);
  friend IndexSet operator&(IndexSet a, const IndexSet& b) { return a &= b; }
  friend IndexSet operator|(IndexSet a, const IndexSet& b) { return a |= b; }
  friend bool operator==(const IndexSet& a, const IndexSet& b) = default;

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        f(static_cast<int>(w * 64 + static_cast<std::size_t>(__builtin_ctzll(bits))));
        bits &= bits - 1;
      }
    }
  }

 private:
  void check_index(int i) const;

  int universe_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Lexicographic order on the sorted index lists.
std::strong_ordering compare_lex(const IndexSet& a, const IndexSet& b);

/// Product T_1 x .. x T_k of subsets of one universe {0, .., n-1}.
class Box {
 public:
  Box() = default;
  explicit Box(std::vector<IndexSet> parts);

  int arity() const noexcept { return static_cast<int>(parts_.size()); }
  /// The common universe size n (0 for the default box).
  int order() const noexcept { return parts_.empty() ? 0 : parts_.front().universe(); }
  const IndexSet& part(int axis) const { return parts_.at(static_cast<std::size_t>(axis)); }
  const std::vector<IndexSet>& parts() const noexcept { return parts_; }

  /// Product of part sizes. Throws DomainError on 64-bit overflow.
  std::uint64_t volume() const;
  bool has_empty_part() const noexcept;
  bool is_cube() const noexcept;

  friend bool operator==(const Box& a, const Box& b) = default;

 private:
  std::vector<IndexSet> parts_;
};

/// Tie-break order used by all searches: part sizes first, then the sorted
/// index lists, axis by axis. Returns true when `a` precedes `b`.
bool box_precedes(const Box& a, const Box& b);

/// A d-dimensional permutation of order n held as its support: a set of
/// (d+1)-tuples. The container does not enforce the permutation property;
/// use validate_tensor for that.
class PermTensor {
 public:
  /// `points` holds (d+1)-tuples of 0-based coordinates; duplicates collapse.
  PermTensor(int d, int n, std::vector<std::vector<int>> points);

  int dimension() const noexcept { return d_; }
  int order() const noexcept { return n_; }
  std::size_t size() const noexcept { return coords_.size() / static_cast<std::size_t>(d_ + 1); }
  std::span<const int> point(std::size_t k) const {
    return {coords_.data() + k * static_cast<std::size_t>(d_ + 1), static_cast<std::size_t>(d_ + 1)};
  }

  /// Points whose first d coordinates equal the line with linear index
  /// `prefix` (mixed radix n, first coordinate most significant).
  std::span<const int> completions(std::size_t prefix) const;

  friend bool operator==(const PermTensor& a, const PermTensor& b) {
    return a.d_ == b.d_ && a.n_ == b.n_ && a.coords_ == b.coords_;
  }

 private:
  int d_;
  int n_;
  std::vector<int> coords_;             // sorted, row-major tuples
  std::vector<std::size_t> line_start_;  // CSR over the first d coordinates
  std::vector<int> line_last_;
};

struct LineViolation {
  int axis;               // 0-based axis that the line runs along
  std::vector<int> line;  // the fixed coordinates, 0-based, in axis order
  int count;              // support points on the line (expected 1)
};

struct TensorVerdict {
  bool valid = true;
  std::optional<LineViolation> violation;
  std::string message;
};

/// Accepts iff every axis-parallel line holds exactly one support point.
TensorVerdict validate_tensor(const PermTensor& t);

class LatinSquare {
 public:
  /// `cells` is row-major with 0-based symbols. Throws InvalidObject unless
  /// every row and column is a permutation of {0, .., n-1}.
  LatinSquare(int n, std::vector<int> cells);

  static LatinSquare cyclic(int n);

  int order() const noexcept { return n_; }
  int at(int row, int col) const noexcept {
    return cells_[static_cast<std::size_t>(row) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(col)];
  }
  std::span<const int> cells() const noexcept { return cells_; }

  LatinSquare transposed() const;
  bool is_symmetric() const;
  bool is_idempotent() const;
  /// New square with L'(rows[i], cols[j]) = symbols[L(i, j)].
  LatinSquare relabeled(std::span<const int> rows, std::span<const int> cols,
                        std::span<const int> symbols) const;

  friend bool operator==(const LatinSquare& a, const LatinSquare& b) = default;

 private:
  int n_;
  std::vector<int> cells_;
};

struct LatinVerdict {
  bool valid = true;
  std::string message;
};

/// Structural check on raw cells (0-based symbols, any values).
LatinVerdict check_latin(int n, std::span<const int> cells);

PermTensor tensor_of(const LatinSquare& ls);
/// Throws InvalidObject unless t is a valid 2-dimensional permutation.
LatinSquare latin_of(const PermTensor& t);

/// Support points of t inside b. Throws DomainError on arity mismatch.
std::uint64_t count_in_box(const PermTensor& t, const Box& b);
std::uint64_t count_in_box(const LatinSquare& ls, const Box& b);

/// |count - volume/n| / sqrt(volume). Throws DomainError when volume == 0.
double discrepancy_score(std::uint64_t count, std::uint64_t volume, int n);

struct BoxReport {
  Box box;
  std::uint64_t count = 0;
  double score = 0.0;
};

BoxReport make_box_report(const LatinSquare& ls, const Box& b);

struct BipartiteGraph {
  int n = 0;
  std::vector<IndexSet> adjacency;  // left vertex -> right neighbours

  std::vector<std::pair<int, int>> edges() const;
  int left_degree(int u) const { return adjacency.at(static_cast<std::size_t>(u)).size(); }
  int right_degree(int v) const;
  /// |E(A, B)|
  std::uint64_t edges_between(const IndexSet& a, const IndexSet& b) const;
};

/// The section of ls by the symbol-set S along axis `axis` (1, 2 or 3): the
/// bipartite graph on the two remaining axes with uv an edge iff some x in S
/// completes (u, v) to a support point with x on `axis`.
BipartiteGraph extract_section(const LatinSquare& ls, const IndexSet& s, int axis);

}  // namespace latdisc

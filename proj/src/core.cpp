#include "latdisc/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "latdisc/error.hpp"

namespace latdisc {

namespace {

std::size_t word_count(int universe) { return (static_cast<std::size_t>(universe) + 63) / 64; }

// n^k, throwing when it does not fit comfortably in memory-sized indices.
std::size_t checked_power(int n, int k) {
  std::size_t result = 1;
  for (int i = 0; i < k; ++i) {
    if (result > (std::numeric_limits<std::uint32_t>::max() / static_cast<std::size_t>(n))) {
      throw DomainError("tensor has too many lines: n^d exceeds 2^32");
    }
    result *= static_cast<std::size_t>(n);
  }
  return result;
}

std::string format_tuple(std::span<const int> coords) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (i != 0) out << ", ";
    out << coords[i] + 1;
  }
  out << ')';
  return out.str();
}

}  // namespace

// ---------------------------------------------------------------- IndexSet

IndexSet::IndexSet(int universe) : universe_(universe) {
  if (universe < 0) throw DomainError("negative universe size");
  words_.assign(word_count(universe), 0);
}

IndexSet::IndexSet(int universe, std::span<const int> indices) : IndexSet(universe) {
  for (int i : indices) insert(i);
}

IndexSet::IndexSet(int universe, std::initializer_list<int> indices)
    : IndexSet(universe, std::span<const int>(indices.begin(), indices.size())) {}

IndexSet IndexSet::from_mask(int universe, std::uint64_t mask) {
  if (universe > 64) throw DomainError("mask construction requires a universe of at most 64");
  IndexSet s(universe);
  if (universe < 64 && (mask >> universe) != 0) throw DomainError("mask has bits outside the universe");
  if (universe > 0) s.words_[0] = mask;
  return s;
}

IndexSet IndexSet::full(int universe) { return prefix(universe, universe); }

IndexSet IndexSet::prefix(int universe, int count) {
  if (count < 0 || count > universe) throw DomainError("prefix longer than universe");
  IndexSet s(universe);
  for (std::size_t w = 0; w < s.words_.size(); ++w) {
    const int lo = static_cast<int>(w * 64);
    const int take = std::clamp(count - lo, 0, 64);
    s.words_[w] = take == 64 ? ~0ULL : ((1ULL << take) - 1);
  }
  return s;
}

int IndexSet::size() const noexcept {
  int total = 0;
  for (auto w : words_) total += std::popcount(w);
  return total;
}

void IndexSet::check_index(int i) const {
  if (i < 0 || i >= universe_) {
    throw DomainError("index " + std::to_string(i) + " outside universe of size " + std::to_string(universe_));
  }
}

void IndexSet::insert(int i) {
  check_index(i);
  words_[static_cast<std::size_t>(i) >> 6] |= 1ULL << (i & 63);
}

void IndexSet::erase(int i) {
  check_index(i);
  words_[static_cast<std::size_t>(i) >> 6] &= ~(1ULL << (i & 63));
}

void IndexSet::toggle(int i) {
  check_index(i);
  words_[static_cast<std::size_t>(i) >> 6] ^= 1ULL << (i & 63);
}

std::uint64_t IndexSet::mask() const {
  if (universe_ > 64) throw DomainError("mask() requires a universe of at most 64");
  return words_.empty() ? 0 : words_[0];
}

std::vector<int> IndexSet::indices() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(size()));
  for_each([&](int i) { out.push_back(i); });
  return out;
}

IndexSet IndexSet::complement() const {
  IndexSet c = IndexSet::full(universe_);
  for (std::size_t w = 0; w < words_.size(); ++w) c.words_[w] &= ~words_[w];
  return c;
}

bool IndexSet::is_subset_of(const IndexSet& other) const {
  if (other.universe_ != universe_) return false;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if ((words_[w] & ~other.words_[w]) != 0) return false;
  }
  return true;
}

IndexSet& IndexSet::operator&=(const IndexSet& other) {
  if (other.universe_ != universe_) throw DomainError("set operation across different universes");
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= other.words_[w];
  return *this;
}

IndexSet& IndexSet::operator|=(const IndexSet& other) {
  if (other.universe_ != universe_) throw DomainError("set operation across different universes");
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= other.words_[w];
  return *this;
}

std::strong_ordering compare_lex(const IndexSet& a, const IndexSet& b) {
  const auto ia = a.indices();
  const auto ib = b.indices();
  return std::lexicographical_compare_three_way(ia.begin(), ia.end(), ib.begin(), ib.end());
}

// --------------------------------------------------------------------- Box

Box::Box(std::vector<IndexSet> parts) : parts_(std::move(parts)) {
  for (const auto& p : parts_) {
    if (p.universe() != parts_.front().universe()) throw DomainError("box parts have different universes");
  }
}

std::uint64_t Box::volume() const {
  if (parts_.empty()) return 0;
  std::uint64_t v = 1;
  for (const auto& p : parts_) {
    if (__builtin_mul_overflow(v, static_cast<std::uint64_t>(p.size()), &v)) {
      throw DomainError("box volume overflows 64 bits");
    }
  }
  return v;
}

bool Box::has_empty_part() const noexcept {
  return parts_.empty() || std::any_of(parts_.begin(), parts_.end(), [](const IndexSet& p) { return p.empty(); });
}

bool Box::is_cube() const noexcept {
  return std::all_of(parts_.begin(), parts_.end(),
                     [&](const IndexSet& p) { return p.size() == parts_.front().size(); });
}

bool box_precedes(const Box& a, const Box& b) {
  const std::size_t k = std::min(a.parts().size(), b.parts().size());
  for (std::size_t i = 0; i < k; ++i) {
    const int sa = a.parts()[i].size();
    const int sb = b.parts()[i].size();
    if (sa != sb) return sa < sb;
  }
  for (std::size_t i = 0; i < k; ++i) {
    const auto c = compare_lex(a.parts()[i], b.parts()[i]);
    if (c != 0) return c < 0;
  }
  return a.parts().size() < b.parts().size();
}

// -------------------------------------------------------------- PermTensor

PermTensor::PermTensor(int d, int n, std::vector<std::vector<int>> points) : d_(d), n_(n) {
  if (d < 1) throw DomainError("tensor dimension must be at least 1");
  if (n < 1) throw DomainError("tensor order must be at least 1");
  const auto width = static_cast<std::size_t>(d + 1);
  for (const auto& p : points) {
    if (p.size() != width) {
      throw InvalidObject("support point " + format_tuple(p) + " does not have " + std::to_string(width) +
                          " coordinates");
    }
    for (int c : p) {
      if (c < 0 || c >= n) throw InvalidObject("support point " + format_tuple(p) + " has a coordinate outside 1.." + std::to_string(n));
    }
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  coords_.reserve(points.size() * width);
  for (const auto& p : points) coords_.insert(coords_.end(), p.begin(), p.end());

  const std::size_t lines = checked_power(n, d);
  line_start_.assign(lines + 1, 0);
  std::vector<std::size_t> keys(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    std::size_t key = 0;
    for (int a = 0; a < d; ++a) key = key * static_cast<std::size_t>(n) + static_cast<std::size_t>(points[k][static_cast<std::size_t>(a)]);
    keys[k] = key;
    ++line_start_[key + 1];
  }
  std::partial_sum(line_start_.begin(), line_start_.end(), line_start_.begin());
  // Points are sorted, so the keys are nondecreasing and last coordinates come out ordered.
  line_last_.resize(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) line_last_[k] = points[k][static_cast<std::size_t>(d)];
}

std::span<const int> PermTensor::completions(std::size_t prefix) const {
  const std::size_t lo = line_start_.at(prefix);
  const std::size_t hi = line_start_.at(prefix + 1);
  return {line_last_.data() + lo, hi - lo};
}

TensorVerdict validate_tensor(const PermTensor& t) {
  const int d = t.dimension();
  const int n = t.order();
  const std::size_t lines = checked_power(n, d);
  std::vector<int> counts(lines);
  for (int axis = 0; axis <= d; ++axis) {
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t k = 0; k < t.size(); ++k) {
      const auto p = t.point(k);
      std::size_t key = 0;
      for (int a = 0; a <= d; ++a) {
        if (a != axis) key = key * static_cast<std::size_t>(n) + static_cast<std::size_t>(p[static_cast<std::size_t>(a)]);
      }
      ++counts[key];
    }
    for (std::size_t key = 0; key < lines; ++key) {
      if (counts[key] == 1) continue;
      LineViolation v{axis, std::vector<int>(static_cast<std::size_t>(d)), counts[key]};
      std::size_t rest = key;
      for (int a = d - 1; a >= 0; --a) {
        v.line[static_cast<std::size_t>(a)] = static_cast<int>(rest % static_cast<std::size_t>(n));
        rest /= static_cast<std::size_t>(n);
      }
      TensorVerdict verdict;
      verdict.valid = false;
      verdict.message = "axis " + std::to_string(axis + 1) + " line " + format_tuple(v.line) + " holds " +
                        std::to_string(v.count) + " support points (expected 1)";
      verdict.violation = std::move(v);
      return verdict;
    }
  }
  return {true, std::nullopt, "valid " + std::to_string(d) + "-dimensional permutation of order " + std::to_string(n)};
}

// ------------------------------------------------------------- LatinSquare

LatinVerdict check_latin(int n, std::span<const int> cells) {
  if (n < 1) return {false, "order must be at least 1"};
  const auto un = static_cast<std::size_t>(n);
  if (cells.size() != un * un) return {false, "expected " + std::to_string(un * un) + " cells"};
  for (std::size_t r = 0; r < un; ++r) {
    for (std::size_t c = 0; c < un; ++c) {
      const int s = cells[r * un + c];
      if (s < 0 || s >= n) {
        return {false, "row " + std::to_string(r + 1) + " column " + std::to_string(c + 1) + " holds symbol " +
                           std::to_string(s + 1) + " outside 1.." + std::to_string(n)};
      }
    }
  }
  std::vector<char> seen(un);
  for (std::size_t r = 0; r < un; ++r) {
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t c = 0; c < un; ++c) {
      const auto s = static_cast<std::size_t>(cells[r * un + c]);
      if (seen[s]) return {false, "row " + std::to_string(r + 1) + " repeats symbol " + std::to_string(s + 1)};
      seen[s] = 1;
    }
  }
  for (std::size_t c = 0; c < un; ++c) {
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t r = 0; r < un; ++r) {
      const auto s = static_cast<std::size_t>(cells[r * un + c]);
      if (seen[s]) return {false, "column " + std::to_string(c + 1) + " repeats symbol " + std::to_string(s + 1)};
      seen[s] = 1;
    }
  }
  return {true, "valid Latin square of order " + std::to_string(n)};
}

LatinSquare::LatinSquare(int n, std::vector<int> cells) : n_(n), cells_(std::move(cells)) {
  const auto verdict = check_latin(n_, cells_);
  if (!verdict.valid) throw InvalidObject(verdict.message);
}

LatinSquare LatinSquare::cyclic(int n) {
  if (n < 1) throw DomainError("order must be at least 1");
  std::vector<int> cells(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) cells[static_cast<std::size_t>(r * n + c)] = (r + c) % n;
  }
  return LatinSquare(n, std::move(cells));
}

LatinSquare LatinSquare::transposed() const {
  std::vector<int> cells(cells_.size());
  for (int r = 0; r < n_; ++r) {
    for (int c = 0; c < n_; ++c) cells[static_cast<std::size_t>(c * n_ + r)] = at(r, c);
  }
  return LatinSquare(n_, std::move(cells));
}

bool LatinSquare::is_symmetric() const { return *this == transposed(); }

bool LatinSquare::is_idempotent() const {
  for (int i = 0; i < n_; ++i) {
    if (at(i, i) != i) return false;
  }
  return true;
}

LatinSquare LatinSquare::relabeled(std::span<const int> rows, std::span<const int> cols,
                                   std::span<const int> symbols) const {
  const auto un = static_cast<std::size_t>(n_);
  if (rows.size() != un || cols.size() != un || symbols.size() != un) {
    throw DomainError("relabeling permutations must have length n");
  }
  std::vector<int> cells(cells_.size(), -1);
  for (int r = 0; r < n_; ++r) {
    for (int c = 0; c < n_; ++c) {
      cells[static_cast<std::size_t>(rows[static_cast<std::size_t>(r)]) * un +
            static_cast<std::size_t>(cols[static_cast<std::size_t>(c)])] = symbols[static_cast<std::size_t>(at(r, c))];
    }
  }
  return LatinSquare(n_, std::move(cells));
}

PermTensor tensor_of(const LatinSquare& ls) {
  const int n = ls.order();
  std::vector<std::vector<int>> points;
  points.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) points.push_back({r, c, ls.at(r, c)});
  }
  return PermTensor(2, n, std::move(points));
}

LatinSquare latin_of(const PermTensor& t) {
  if (t.dimension() != 2) throw InvalidObject("only 2-dimensional permutations are Latin squares");
  const auto verdict = validate_tensor(t);
  if (!verdict.valid) throw InvalidObject(verdict.message);
  const int n = t.order();
  std::vector<int> cells(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < t.size(); ++k) {
    const auto p = t.point(k);
    cells[static_cast<std::size_t>(p[0] * n + p[1])] = p[2];
  }
  return LatinSquare(n, std::move(cells));
}

// ---------------------------------------------------------------- counting

std::uint64_t count_in_box(const PermTensor& t, const Box& b) {
  const int d = t.dimension();
  if (b.arity() != d + 1) {
    throw DomainError("box has " + std::to_string(b.arity()) + " parts, tensor needs " + std::to_string(d + 1));
  }
  if (b.order() != t.order()) throw DomainError("box universe does not match tensor order");
  if (b.has_empty_part()) return 0;

  // Walk whichever is smaller: the prefix cells of the box or the support.
  std::uint64_t prefix_cells = 1;
  bool prefix_small = true;
  for (int a = 0; a < d; ++a) {
    if (__builtin_mul_overflow(prefix_cells, static_cast<std::uint64_t>(b.part(a).size()), &prefix_cells) ||
        prefix_cells > t.size()) {
      prefix_small = false;
      break;
    }
  }

  std::uint64_t count = 0;
  if (!prefix_small) {
    for (std::size_t k = 0; k < t.size(); ++k) {
      const auto p = t.point(k);
      bool inside = true;
      for (int a = 0; a <= d && inside; ++a) inside = b.part(a).contains(p[static_cast<std::size_t>(a)]);
      count += inside ? 1 : 0;
    }
    return count;
  }

  std::vector<std::vector<int>> members(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) members[static_cast<std::size_t>(a)] = b.part(a).indices();
  std::vector<std::size_t> pos(static_cast<std::size_t>(d), 0);
  const IndexSet& last = b.part(d);
  while (true) {
    std::size_t key = 0;
    for (int a = 0; a < d; ++a) {
      key = key * static_cast<std::size_t>(t.order()) + static_cast<std::size_t>(members[static_cast<std::size_t>(a)][pos[static_cast<std::size_t>(a)]]);
    }
    for (int x : t.completions(key)) count += last.contains(x) ? 1 : 0;
    int a = d - 1;
    while (a >= 0) {
      auto& p = pos[static_cast<std::size_t>(a)];
      if (++p < members[static_cast<std::size_t>(a)].size()) break;
      p = 0;
      --a;
    }
    if (a < 0) break;
  }
  return count;
}

std::uint64_t count_in_box(const LatinSquare& ls, const Box& b) {
  if (b.arity() != 3) throw DomainError("a Latin square box needs 3 parts");
  if (b.order() != ls.order()) throw DomainError("box universe does not match square order");
  std::uint64_t count = 0;
  const IndexSet& symbols = b.part(2);
  b.part(0).for_each([&](int r) {
    b.part(1).for_each([&](int c) { count += symbols.contains(ls.at(r, c)) ? 1 : 0; });
  });
  return count;
}

double discrepancy_score(std::uint64_t count, std::uint64_t volume, int n) {
  if (volume == 0) throw DomainError("discrepancy score is undefined for a box of volume 0");
  if (n < 1) throw DomainError("order must be at least 1");
  const double expected = static_cast<double>(volume) / static_cast<double>(n);
  return std::abs(static_cast<double>(count) - expected) / std::sqrt(static_cast<double>(volume));
}

BoxReport make_box_report(const LatinSquare& ls, const Box& b) {
  BoxReport report{b, count_in_box(ls, b), 0.0};
  report.score = discrepancy_score(report.count, b.volume(), ls.order());
  return report;
}

// ----------------------------------------------------------------- section

std::vector<std::pair<int, int>> BipartiteGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int u = 0; u < n; ++u) {
    adjacency[static_cast<std::size_t>(u)].for_each([&](int v) { out.emplace_back(u, v); });
  }
  return out;
}

int BipartiteGraph::right_degree(int v) const {
  int deg = 0;
  for (const auto& row : adjacency) deg += row.contains(v) ? 1 : 0;
  return deg;
}

std::uint64_t BipartiteGraph::edges_between(const IndexSet& a, const IndexSet& b) const {
  std::uint64_t e = 0;
  a.for_each([&](int u) { e += static_cast<std::uint64_t>((adjacency[static_cast<std::size_t>(u)] & b).size()); });
  return e;
}

BipartiteGraph extract_section(const LatinSquare& ls, const IndexSet& s, int axis) {
  const int n = ls.order();
  if (s.universe() != n) throw DomainError("section set universe does not match square order");
  if (s.empty()) throw DomainError("section set must be nonempty");
  if (axis < 1 || axis > 3) throw DomainError("section axis must be 1, 2 or 3");
  BipartiteGraph g{n, std::vector<IndexSet>(static_cast<std::size_t>(n), IndexSet(n))};
  // Support points are (row, col, symbol); drop coordinate `axis`.
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const int sym = ls.at(r, c);
      const int coords[3] = {r, c, sym};
      if (!s.contains(coords[axis - 1])) continue;
      const int u = axis == 1 ? coords[1] : coords[0];
      const int v = axis == 3 ? coords[1] : coords[2];
      g.adjacency[static_cast<std::size_t>(u)].insert(v);
    }
  }
  return g;
}

}  // namespace latdisc

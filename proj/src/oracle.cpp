#include "latdisc/oracle.hpp"

#include <bit>
#include <cmath>
#include <thread>

#include "latdisc/generators.hpp"
#include "latdisc/rng.hpp"

namespace latdisc {

namespace {

std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

// Cell-by-cell backtracking in row-major order with row, column and
// forbidden-symbol masks. Cells before `start` must already be placed.
class Filler {
 public:
  explicit Filler(int n) : n_(n), cells_(static_cast<std::size_t>(n * n), -1), rows_(static_cast<std::size_t>(n), 0),
                           cols_(static_cast<std::size_t>(n), 0), forbid_(static_cast<std::size_t>(n * n), 0) {}

  void forbid(int i, int j, std::uint32_t symbols) { forbid_[idx(i, j)] |= symbols; }

  bool place(int i, int j, int s) {
    const std::uint32_t bit = 1U << s;
    if ((rows_[static_cast<std::size_t>(i)] | cols_[static_cast<std::size_t>(j)] | forbid_[idx(i, j)]) & bit) return false;
    rows_[static_cast<std::size_t>(i)] |= bit;
    cols_[static_cast<std::size_t>(j)] |= bit;
    cells_[idx(i, j)] = s;
    return true;
  }

  void unplace(int i, int j) {
    const std::uint32_t bit = 1U << cells_[idx(i, j)];
    rows_[static_cast<std::size_t>(i)] &= ~bit;
    cols_[static_cast<std::size_t>(j)] &= ~bit;
    cells_[idx(i, j)] = -1;
  }

  std::uint64_t count(int cell) {
    while (cell < n_ * n_ && cells_[static_cast<std::size_t>(cell)] >= 0) ++cell;
    if (cell == n_ * n_) return 1;
    const int i = cell / n_, j = cell % n_;
    const std::uint32_t full = (1U << n_) - 1;
    std::uint32_t avail = full & ~(rows_[static_cast<std::size_t>(i)] | cols_[static_cast<std::size_t>(j)] | forbid_[static_cast<std::size_t>(cell)]);
    std::uint64_t total = 0;
    while (avail != 0) {
      const int s = std::countr_zero(avail);
      avail &= avail - 1;
      place(i, j, s);
      total += count(cell + 1);
      unplace(i, j);
    }
    return total;
  }

  template <class F>
  void visit(int cell, F& f) {
    while (cell < n_ * n_ && cells_[static_cast<std::size_t>(cell)] >= 0) ++cell;
    if (cell == n_ * n_) {
      f(cells_);
      return;
    }
    const int i = cell / n_, j = cell % n_;
    const std::uint32_t full = (1U << n_) - 1;
    std::uint32_t avail = full & ~(rows_[static_cast<std::size_t>(i)] | cols_[static_cast<std::size_t>(j)] | forbid_[static_cast<std::size_t>(cell)]);
    while (avail != 0) {
      const int s = std::countr_zero(avail);
      avail &= avail - 1;
      place(i, j, s);
      visit(cell + 1, f);
      unplace(i, j);
    }
  }

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i * n_ + j); }

  int n_;
  std::vector<int> cells_;
  std::vector<std::uint32_t> rows_, cols_, forbid_;
};

void check_order(int n, int cap, const char* what) {
  if (n < 1) throw DomainError(std::string(what) + " needs n >= 1");
  if (n > cap) throw LimitExceeded(std::string(what) + " is limited to n <= " + std::to_string(cap));
}

std::uint64_t count_reduced(int n, unsigned threads) {
  auto seeded = [n]() {
    Filler f(n);
    for (int j = 0; j < n; ++j) f.place(0, j, j);
    for (int i = 1; i < n; ++i) f.place(i, 0, i);
    return f;
  };
  if (n < 3) return seeded().count(0);
  // Disjoint subtrees by the symbol in cell (1, 1).
  std::vector<int> firsts;
  for (int s = 0; s < n; ++s) {
    if (s != 1) firsts.push_back(s);
  }
  std::vector<std::uint64_t> partial(firsts.size(), 0);
  auto work = [&](std::size_t t) {
    Filler f = seeded();
    if (f.place(1, 1, firsts[t])) partial[t] = f.count(0);
  };
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  if (threads == 1 || n < 7) {
    for (std::size_t t = 0; t < firsts.size(); ++t) work(t);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < firsts.size(); ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  std::uint64_t total = 0;
  for (auto p : partial) total += p;
  return total;
}

}  // namespace

std::uint64_t count_ls(int n, unsigned threads) {
  check_order(n, kCountLimit, "count_ls");
  return count_reduced(n, threads) * factorial(n) * factorial(n - 1);
}

void for_each_ls(int n, const std::function<void(const LatinSquare&)>& visit) {
  check_order(n, kEnumerateLimit, "enumerate_ls");
  Filler f(n);
  auto emit = [&](const std::vector<int>& cells) { visit(LatinSquare(n, cells)); };
  f.visit(0, emit);
}

std::vector<LatinSquare> enumerate_ls(int n) {
  std::vector<LatinSquare> out;
  for_each_ls(n, [&](const LatinSquare& ls) { out.push_back(ls); });
  return out;
}

std::uint64_t constrained_count(int n, const Box& forbidden) {
  check_order(n, kCountLimit, "constrained_count");
  if (forbidden.arity() != 3 || forbidden.order() != n) throw DomainError("forbidden box must be a 3-part box over [n]");
  if (forbidden.has_empty_part()) return count_ls(n);
  const IndexSet& x = forbidden.part(0);
  const IndexSet& y = forbidden.part(1);
  const IndexSet& z = forbidden.part(2);
  const auto zmask = static_cast<std::uint32_t>(z.mask());
  const int zs = z.size();

  // Symbol permutations fixing Z act freely on first rows, and the orbit of a
  // first row is fixed by the columns P holding Z-symbols. Count one
  // canonical row per P and weight by the orbit size.
  const std::uint64_t orbit = factorial(zs) * factorial(n - zs);
  std::vector<int> zsyms, others;
  for (int k = 0; k < n; ++k) (z.contains(k) ? zsyms : others).push_back(k);
  std::uint64_t total = 0;
  for (std::uint32_t p = 0; p < (1U << n); ++p) {
    if (std::popcount(p) != zs) continue;
    Filler f(n);
    for (int i = 0; i < n; ++i) {
      if (!x.contains(i)) continue;
      y.for_each([&](int j) { f.forbid(i, j, zmask); });
    }
    std::size_t zi = 0, oi = 0;
    bool ok = true;
    for (int j = 0; j < n && ok; ++j) {
      const int s = (p >> j) & 1U ? zsyms[zi++] : others[oi++];
      ok = f.place(0, j, s);
    }
    if (ok) total += orbit * f.count(0);
  }
  return total;
}

BinaryTensor BinaryTensor::all_ones(int d, int n) {
  if (d < 1 || n < 1) throw DomainError("tensor needs d >= 1 and n >= 1");
  std::size_t size = 1;
  for (int a = 0; a <= d; ++a) size *= static_cast<std::size_t>(n);
  return {d, n, std::vector<std::uint8_t>(size, 1)};
}

BinaryTensor BinaryTensor::box_complement(int n, const Box& b) {
  if (b.order() != n || b.arity() < 2) throw DomainError("box does not match the tensor");
  BinaryTensor t = all_ones(b.arity() - 1, n);
  const int k = b.arity();
  std::vector<int> coord(static_cast<std::size_t>(k), 0);
  for (std::size_t cell = 0; cell < t.cells.size(); ++cell) {
    std::size_t rest = cell;
    bool inside = true;
    for (int a = k - 1; a >= 0; --a) {
      const int c = static_cast<int>(rest % static_cast<std::size_t>(n));
      rest /= static_cast<std::size_t>(n);
      inside = inside && b.part(a).contains(c);
    }
    if (inside) t.cells[cell] = 0;
  }
  return t;
}

std::vector<int> line_counts(const BinaryTensor& t) {
  const std::size_t lines = t.cells.size() / static_cast<std::size_t>(t.n);
  std::vector<int> r(lines, 0);
  for (std::size_t l = 0; l < lines; ++l) {
    for (int c = 0; c < t.n; ++c) r[l] += t.at(l, c);
  }
  return r;
}

double first_order_bound(const BinaryTensor& t) {
  const auto r = line_counts(t);
  double sum = 0.0;
  for (std::size_t l = 0; l < r.size(); ++l) {
    if (r[l] == 0) {
      throw ZeroLineError(l, "line " + std::to_string(l) + " has no ones; the permanent is 0");
    }
    sum += std::log(static_cast<double>(r[l])) - static_cast<double>(t.d);
  }
  return sum;
}

ProbEstimate empty_prob_exact(int n, const Box& b) {
  check_order(n, kEnumerateLimit, "exact empty_prob");
  ProbEstimate e;
  e.p = static_cast<double>(constrained_count(n, b)) / static_cast<double>(count_ls(n));
  return e;
}

ProbEstimate empty_prob_mc(int n, const Box& b, std::uint64_t samples, std::uint64_t seed, std::uint64_t burn_in) {
  if (samples < 1) throw DomainError("monte carlo needs at least one sample");
  if (b.arity() != 3 || b.order() != n) throw DomainError("box must be a 3-part box over [n]");
  if (burn_in == 0) burn_in = default_burn_in(n);
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const LatinSquare ls = jm_sample(n, burn_in, derive_seed(seed, s));
    if (count_in_box(ls, b) == 0) ++hits;
  }
  ProbEstimate e;
  e.samples = samples;
  e.p = static_cast<double>(hits) / static_cast<double>(samples);
  e.stderr_ = std::sqrt(e.p * (1.0 - e.p) / static_cast<double>(samples));
  return e;
}

UnionBoundDiagnostic typical_bound_diagnostic(int n, double c, double big_m) {
  if (n < 2) throw DomainError("the union-bound diagnostic needs n >= 2");
  const double dn = static_cast<double>(n);
  const double l = std::log(dn);
  UnionBoundDiagnostic out;
  out.log_bound = 3.0 * dn * std::log(2.0) + (c - big_m) * dn * l * l;
  out.vanishing = out.log_bound < 0.0;
  return out;
}

}  // namespace latdisc

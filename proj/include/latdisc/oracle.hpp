#pragma once

// Brute-force ground truth at desk scale: Latin-square counts and
// enumeration, counts avoiding a forbidden box, empty-box probabilities and
// the first-order permanent bound kernel.

#include <cstdint>
#include <functional>
#include <vector>

#include "latdisc/core.hpp"
#include "latdisc/error.hpp"

namespace latdisc {

inline constexpr int kCountLimit = 7;
inline constexpr int kEnumerateLimit = 5;

/// Number of Latin squares of order n (n <= 7). Counts reduced squares and
/// multiplies by n!(n-1)!.
std::uint64_t count_ls(int n, unsigned threads = 0);

/// Every square of order n <= 5 in row-major backtracking order.
void for_each_ls(int n, const std::function<void(const LatinSquare&)>& visit);
std::vector<LatinSquare> enumerate_ls(int n);

/// Squares of order n <= 7 with no cell of X x Y carrying a symbol of Z.
/// A box with an empty part forbids nothing.
std::uint64_t constrained_count(int n, const Box& forbidden);

/// 0-1 array on [n]^(d+1), last coordinate fastest.
struct BinaryTensor {
  int d = 2;
  int n = 0;
  std::vector<std::uint8_t> cells;

  static BinaryTensor all_ones(int d, int n);
  /// Zero on the box, one elsewhere.
  static BinaryTensor box_complement(int n, const Box& b);
  std::uint8_t at(std::size_t line, int last) const {
    return cells[line * static_cast<std::size_t>(n) + static_cast<std::size_t>(last)];
  }
};

/// r for each of the n^d lines along the last axis.
std::vector<int> line_counts(const BinaryTensor& t);

class ZeroLineError : public DomainError {
 public:
  ZeroLineError(std::size_t line, std::string msg) : DomainError(std::move(msg)), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// sum over lines of ln(r / e^d). Throws ZeroLineError if some r = 0.
double first_order_bound(const BinaryTensor& t);

struct ProbEstimate {
  double p = 0.0;
  double stderr_ = 0.0;  // 0 in exact mode
  std::uint64_t samples = 0;
};

/// constrained_count / count_ls, n <= 5.
ProbEstimate empty_prob_exact(int n, const Box& b);
/// Fraction of jm_sample draws (one derived seed per draw) with count 0 in b.
ProbEstimate empty_prob_mc(int n, const Box& b, std::uint64_t samples, std::uint64_t seed,
                           std::uint64_t burn_in = 0);

struct UnionBoundDiagnostic {
  double log_bound = 0.0;
  bool vanishing = false;
};

/// 3n ln 2 + c n ln^2 n - M n ln^2 n; vanishing when negative. Requires n >= 2.
UnionBoundDiagnostic typical_bound_diagnostic(int n, double c, double big_m);

}  // namespace latdisc

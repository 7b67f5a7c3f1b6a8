#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "latdisc/core.hpp"
#include "latdisc/error.hpp"

namespace latdisc {

/// The abelian group Z_{m1} x .. x Z_{mr}. Elements are enumerated in mixed
/// radix with the first factor most significant.
struct GroupTable {
  std::vector<int> moduli;

  int order() const;
  std::vector<int> element(int index) const;
  int index_of(std::span<const int> element) const;
  /// index of element(i) + element(j)
  int add(int i, int j) const;
};

/// grid(i, j) = index(elem_i + elem_j).
LatinSquare group_table(const GroupTable& g);

/// 0-based points, strictly increasing.
using Triple = std::array<int, 3>;

struct StsVerdict {
  bool valid = true;
  bool complete = false;
  std::string message;
};

/// Partial-STS check on raw triples (0-based, any values): points in range,
/// three distinct points, and no pair covered twice.
StsVerdict check_triple_system(int n, std::span<const Triple> triples);

/// Partial Steiner triple system: every pair lies in at most one triple.
class TripleSystem {
 public:
  /// Points inside a triple may be given in any order. Throws InvalidObject
  /// when the partial-STS property fails.
  TripleSystem(int n, std::vector<Triple> triples);

  int order() const noexcept { return n_; }
  std::span<const Triple> triples() const noexcept { return triples_; }
  std::size_t size() const noexcept { return triples_.size(); }
  /// |triples| = n(n-1)/6
  bool complete() const noexcept;
  /// Third point of the triple through {i, j}, or -1.
  int third_point(int i, int j) const {
    return third_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)];
  }
  /// Lexicographically first pair not covered by any triple.
  std::optional<std::pair<int, int>> first_uncovered_pair() const;
  /// New system with every point p renamed perm[p].
  TripleSystem relabeled(std::span<const int> perm) const;

 private:
  int n_;
  std::vector<Triple> triples_;
  std::vector<int> third_;
};

class ResidueError : public DomainError {
 public:
  using DomainError::DomainError;
};

class IncompleteSystem : public Error {
 public:
  explicit IncompleteSystem(std::pair<int, int> pair);
  std::pair<int, int> pair() const noexcept { return pair_; }

 private:
  std::pair<int, int> pair_;
};

class RestartBudgetExhausted : public Error {
 public:
  RestartBudgetExhausted(const std::string& what, TripleSystem best) : Error(what), best_(std::move(best)) {}
  const TripleSystem& best() const noexcept { return best_; }

 private:
  TripleSystem best_;
};

/// Complete STS for n = 3 (mod 6).
TripleSystem bose_sts(int n);
/// Complete STS for n = 1 (mod 6).
TripleSystem skolem_sts(int n);

/// L(i, i) = i and L(i, j) = third point of the triple through {i, j}.
/// Throws IncompleteSystem naming an uncovered pair.
LatinSquare sts_to_ls(const TripleSystem& x);

/// 2n^3
std::uint64_t default_burn_in(int n);

/// Random Latin square from the Jacobson-Matthews walk: `burn_in` moves from
/// the cyclic square, then further moves until the state is proper.
LatinSquare jm_sample(int n, std::uint64_t burn_in, std::uint64_t seed);

/// Runs the random greedy triple process to exhaustion, restarting on dead
/// ends. Throws ResidueError for n not 1 or 3 (mod 6) and
/// RestartBudgetExhausted (carrying the largest partial system) when no run
/// completes within `max_restarts` attempts.
TripleSystem complete_random_greedy(int n, int max_restarts, std::uint64_t seed);

}  // namespace latdisc

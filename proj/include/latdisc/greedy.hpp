#pragma once

// First stage of the random greedy triple process: triples are drawn
// uniformly from the legal ones (those sharing no pair with a chosen triple)
// for floor(lambda * n^2) steps, while trackers follow the triples meeting
// three fixed vertex sets.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "latdisc/core.hpp"
#include "latdisc/generators.hpp"

namespace latdisc {

inline constexpr double kDefaultLambda = 1.0 / 1500.0;

struct GreedyConfig {
  int n = 0;
  double lambda = kDefaultLambda;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> step_override;
  bool record_trace = false;
};

/// floor(lambda * n^2), or the override. Products within 1e-9 of an integer
/// are snapped to it so that e.g. n = 300, lambda = 1/1500 gives 60.
std::uint64_t first_stage_steps(const GreedyConfig& cfg);

/// Symmetric pair set over n points.
class CoveredPairs {
 public:
  CoveredPairs() = default;
  explicit CoveredPairs(int n);

  bool covered(int a, int b) const noexcept {
    const std::size_t bit = static_cast<std::size_t>(a) * stride_ + static_cast<std::size_t>(b);
    return (bits_[bit >> 6] >> (bit & 63)) & 1U;
  }
  /// Returns false when the pair was already covered.
  bool cover(int a, int b);
  std::size_t count() const noexcept { return count_; }

 private:
  std::size_t stride_ = 0;
  std::vector<std::uint64_t> bits_;
  std::size_t count_ = 0;
};

bool is_legal(const CoveredPairs& pairs, const Triple& t);

struct GreedyState {
  int n = 0;
  std::vector<Triple> chosen;
  CoveredPairs covered;
  std::uint64_t step = 0;
  bool stuck = false;

  explicit GreedyState(int order) : n(order), covered(order) {}
  /// Throws InvalidObject if t is not legal.
  void add(const Triple& t);
};

enum class TripleType : int { abc = 0, ab_not_c, a_not_b_c, not_a_bc, other };
inline constexpr int kTripleTypes = 5;

/// A triple "meets" a set when at least one of its points lies in the set.
TripleType classify(const Triple& t, const IndexSet& a, const IndexSet& b, const IndexSet& c);

struct BoxTracker {
  IndexSet a, b, c;
  std::uint64_t f_initial = 0;  // triples meeting a, b and c
  std::uint64_t f_legal = 0;    // of those, still legal
  std::array<std::uint64_t, kTripleTypes> type_counts{};

  static BoxTracker make(IndexSet a, IndexSet b, IndexSet c);
};

/// Number of 3-subsets of the universe meeting all of a, b and c, by
/// inclusion-exclusion on the sets they avoid.
std::uint64_t count_meeting_triples(const IndexSet& a, const IndexSet& b, const IndexSet& c);

struct TraceRow {
  std::uint64_t step;
  Triple triple;
  double legal_estimate;  // fraction of all triples still legal after the step
};

struct FirstStageResult {
  GreedyState state;
  std::vector<BoxTracker> trackers;
  std::vector<TraceRow> trace;
  std::uint64_t planned_steps = 0;
};

FirstStageResult run_first_stage(const GreedyConfig& cfg, std::vector<BoxTracker> trackers);

struct LegalCount {
  std::uint64_t f_initial = 0;
  std::uint64_t f_legal = 0;
};

/// Exhaustive recount of the triples meeting a, b, c and of those still legal.
LegalCount recount_legal(const GreedyState& state, const IndexSet& a, const IndexSet& b, const IndexSet& c);
/// f_legal / f_initial by exhaustive recount. Throws DomainError if f_initial = 0.
double legal_fraction(const GreedyState& state, const IndexSet& a, const IndexSet& b, const IndexSet& c);

/// exp(-delta^2 / (2 + delta) * N * p): the tail bound for sums of Bernoulli
/// variables whose joint success probabilities are at most p^|S|.
double tail_bound(double delta, std::uint64_t trials, double p);

struct ProofBudget {
  double q = 0;           // per-step probability cap for an AB(not C) draw
  double k = 0;           // ratio of the |A||B|/108 threshold to the mean bound
  double mean_bound = 0;  // 6 lambda a b / (1 - 18 lambda)
  double tail_bound_value = 0;
};

/// Evaluates the first-stage estimates with the small-order terms replaced by
/// `epsilon` (0 by default). Throws DomainError unless 1 - 18 lambda - epsilon > 0.
ProofBudget proof_budget(double lambda, int n, std::uint64_t a, std::uint64_t b, std::uint64_t f,
                         double epsilon = 0.0);

}  // namespace latdisc

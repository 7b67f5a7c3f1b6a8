#include "latdisc/greedy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "latdisc/error.hpp"
#include "latdisc/rng.hpp"

namespace latdisc {

namespace {

std::uint64_t choose3(std::uint64_t m) { return m < 3 ? 0 : m * (m - 1) * (m - 2) / 6; }

Triple random_triple(int n, Rng& rng) {
  const auto un = static_cast<std::uint64_t>(n);
  int a = static_cast<int>(rng.below(un));
  int b = static_cast<int>(rng.below(un - 1));
  if (b >= a) ++b;
  int c = static_cast<int>(rng.below(un - 2));
  const int lo = std::min(a, b);
  const int hi = std::max(a, b);
  if (c >= lo) ++c;
  if (c >= hi) ++c;
  Triple t{a, b, c};
  std::sort(t.begin(), t.end());
  return t;
}

bool meets(const Triple& t, const IndexSet& s) {
  return s.contains(t[0]) || s.contains(t[1]) || s.contains(t[2]);
}

}  // namespace

std::uint64_t first_stage_steps(const GreedyConfig& cfg) {
  if (cfg.step_override) return *cfg.step_override;
  if (!(cfg.lambda > 0.0) || !std::isfinite(cfg.lambda)) throw DomainError("lambda must be positive and finite");
  const double x = cfg.lambda * static_cast<double>(cfg.n) * static_cast<double>(cfg.n);
  const double r = std::nearbyint(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<std::uint64_t>(r);
  return static_cast<std::uint64_t>(std::floor(x));
}

CoveredPairs::CoveredPairs(int n) : stride_(static_cast<std::size_t>(n)) {
  bits_.assign((stride_ * stride_ + 63) / 64, 0);
}

bool CoveredPairs::cover(int a, int b) {
  if (covered(a, b)) return false;
  const std::size_t ab = static_cast<std::size_t>(a) * stride_ + static_cast<std::size_t>(b);
  const std::size_t ba = static_cast<std::size_t>(b) * stride_ + static_cast<std::size_t>(a);
  bits_[ab >> 6] |= 1ULL << (ab & 63);
  bits_[ba >> 6] |= 1ULL << (ba & 63);
  ++count_;
  return true;
}

bool is_legal(const CoveredPairs& pairs, const Triple& t) {
  return !pairs.covered(t[0], t[1]) && !pairs.covered(t[0], t[2]) && !pairs.covered(t[1], t[2]);
}

void GreedyState::add(const Triple& t) {
  if (!is_legal(covered, t)) throw InvalidObject("triple shares a covered pair with an earlier triple");
  covered.cover(t[0], t[1]);
  covered.cover(t[0], t[2]);
  covered.cover(t[1], t[2]);
  chosen.push_back(t);
  ++step;
}

TripleType classify(const Triple& t, const IndexSet& a, const IndexSet& b, const IndexSet& c) {
  const bool ma = meets(t, a);
  const bool mb = meets(t, b);
  const bool mc = meets(t, c);
  if (ma && mb && mc) return TripleType::abc;
  if (ma && mb) return TripleType::ab_not_c;
  if (ma && mc) return TripleType::a_not_b_c;
  if (mb && mc) return TripleType::not_a_bc;
  return TripleType::other;
}

std::uint64_t count_meeting_triples(const IndexSet& a, const IndexSet& b, const IndexSet& c) {
  const int n = a.universe();
  const IndexSet* sets[3] = {&a, &b, &c};
  long long total = 0;
  for (int subset = 0; subset < 8; ++subset) {
    IndexSet un(n);
    for (int k = 0; k < 3; ++k) {
      if (subset & (1 << k)) un |= *sets[k];
    }
    const auto avoid = choose3(static_cast<std::uint64_t>(n - un.size()));
    total += (std::popcount(static_cast<unsigned>(subset)) % 2 == 0 ? 1 : -1) * static_cast<long long>(avoid);
  }
  return static_cast<std::uint64_t>(total);
}

BoxTracker BoxTracker::make(IndexSet a, IndexSet b, IndexSet c) {
  if (a.universe() != b.universe() || a.universe() != c.universe()) {
    throw DomainError("tracker sets must share one universe");
  }
  BoxTracker t;
  t.f_initial = count_meeting_triples(a, b, c);
  t.f_legal = t.f_initial;
  t.a = std::move(a);
  t.b = std::move(b);
  t.c = std::move(c);
  return t;
}

FirstStageResult run_first_stage(const GreedyConfig& cfg, std::vector<BoxTracker> trackers) {
  if (cfg.n < 3) throw DomainError("the greedy process needs n >= 3");
  for (const auto& t : trackers) {
    if (t.a.universe() != cfg.n) throw DomainError("tracker universe does not match n");
  }
  const int n = cfg.n;
  const std::uint64_t total = choose3(static_cast<std::uint64_t>(n));
  FirstStageResult result{GreedyState(n), std::move(trackers), {}, first_stage_steps(cfg)};
  GreedyState& state = result.state;
  Rng rng(cfg.seed);
  std::uint64_t legal_total = total;

  for (std::uint64_t s = 0; s < result.planned_steps; ++s) {
    if (legal_total == 0) {
      state.stuck = true;
      break;
    }
    Triple t{};
    if (legal_total * 64 >= total) {
      do {
        t = random_triple(n, rng);
      } while (!is_legal(state.covered, t));
    } else {
      // Sparse legal set: pick the r-th legal triple in lexicographic order.
      std::uint64_t r = rng.below(legal_total);
      bool found = false;
      for (int a = 0; a < n && !found; ++a) {
        for (int b = a + 1; b < n && !found; ++b) {
          if (state.covered.covered(a, b)) continue;
          for (int c = b + 1; c < n; ++c) {
            const Triple u{a, b, c};
            if (is_legal(state.covered, u) && r-- == 0) {
              t = u;
              found = true;
              break;
            }
          }
        }
      }
    }

    // Triples losing legality are exactly those through one of t's pairs;
    // only t itself contains two of them.
    const std::pair<int, int> new_pairs[3] = {{t[0], t[1]}, {t[0], t[2]}, {t[1], t[2]}};
    const int thirds[3] = {t[2], t[1], t[0]};
    for (int p = 0; p < 3; ++p) {
      const auto [u, v] = new_pairs[p];
      for (int w = 0; w < n; ++w) {
        if (w == u || w == v || (p > 0 && w == thirds[p])) continue;
        Triple cand{u, v, w};
        std::sort(cand.begin(), cand.end());
        if (!is_legal(state.covered, cand)) continue;
        --legal_total;
        for (auto& tr : result.trackers) {
          if (classify(cand, tr.a, tr.b, tr.c) == TripleType::abc) --tr.f_legal;
        }
      }
    }
    for (auto& tr : result.trackers) ++tr.type_counts[static_cast<std::size_t>(classify(t, tr.a, tr.b, tr.c))];
    state.add(t);
    if (cfg.record_trace) {
      result.trace.push_back({state.step, t, static_cast<double>(legal_total) / static_cast<double>(total)});
    }
  }
  return result;
}

LegalCount recount_legal(const GreedyState& state, const IndexSet& a, const IndexSet& b, const IndexSet& c) {
  LegalCount out;
  const int n = state.n;
  for (int x = 0; x < n; ++x) {
    for (int y = x + 1; y < n; ++y) {
      for (int z = y + 1; z < n; ++z) {
        const Triple t{x, y, z};
        if (!(meets(t, a) && meets(t, b) && meets(t, c))) continue;
        ++out.f_initial;
        if (is_legal(state.covered, t)) ++out.f_legal;
      }
    }
  }
  return out;
}

double legal_fraction(const GreedyState& state, const IndexSet& a, const IndexSet& b, const IndexSet& c) {
  const auto cnt = recount_legal(state, a, b, c);
  if (cnt.f_initial == 0) throw DomainError("no triple meets all three sets; legal fraction undefined");
  return static_cast<double>(cnt.f_legal) / static_cast<double>(cnt.f_initial);
}

double tail_bound(double delta, std::uint64_t trials, double p) {
  if (!(delta >= 0.0)) throw DomainError("tail_bound needs delta >= 0");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("tail_bound needs 0 < p < 1");
  if (trials < 1) throw DomainError("tail_bound needs N >= 1");
  return std::exp(-delta * delta / (2.0 + delta) * static_cast<double>(trials) * p);
}

ProofBudget proof_budget(double lambda, int n, std::uint64_t a, std::uint64_t b, std::uint64_t f, double epsilon) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  const double slack = 1.0 - 18.0 * lambda - epsilon;
  if (!(slack > 0.0)) throw DomainError("1 - 18 lambda must be positive (lambda < 1/18)");
  if (n < 3 || a < 1 || b < 1 || f < 1) throw DomainError("proof_budget needs n >= 3 and positive sizes");
  const double dn = static_cast<double>(n);
  const double denom = static_cast<double>(choose3(static_cast<std::uint64_t>(n))) - 3.0 * lambda * dn * dn * dn;
  if (!(denom > 0.0)) throw DomainError("C(n,3) - 3 lambda n^3 must be positive");
  const double ab = static_cast<double>(a) * static_cast<double>(b);
  ProofBudget out;
  out.q = ab * dn / denom;
  out.mean_bound = 6.0 * lambda * ab / slack;
  out.k = slack / (648.0 * lambda);
  out.tail_bound_value =
      std::exp(-(out.k - 1.0) * (out.k - 1.0) / (out.k + 1.0) * 6.0 * lambda * static_cast<double>(f) / (dn * slack));
  return out;
}

}  // namespace latdisc

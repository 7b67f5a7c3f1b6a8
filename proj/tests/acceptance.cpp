// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "brute.hpp"
#include "cli.hpp"
#include "latdisc/core.hpp"
#include "latdisc/generators.hpp"
#include "latdisc/greedy.hpp"
#include "latdisc/oracle.hpp"
#include "latdisc/rng.hpp"
#include "latdisc/search.hpp"

using namespace latdisc;

namespace {

// Tolerances and budgets.
constexpr double kScoreTol = 1e-9;
constexpr double kTailTol = 1e-12;
constexpr double kKTol = 1e-9;
constexpr double kSigmas = 3.0;
constexpr double kOracleSeconds = 10.0;
constexpr double kGuaranteedSeconds = 60.0;
constexpr double kHeuristicSeconds = 600.0;
constexpr double kGreedySeconds = 60.0;
constexpr int kAgreementNeeded = 18;
constexpr std::uint64_t kMasterSeed = 20240601;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok && out_.pass) out_.detail = what;
    out_.pass = out_.pass && ok;
  }
  void note(const std::string& s) {
    if (out_.pass) out_.detail = s;
  }
  Outcome result() const { return out_; }

 private:
  Outcome out_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// JM samples are shared between criteria; (n, index) -> square.
const LatinSquare& jm(int n, int index) {
  static std::map<std::pair<int, int>, LatinSquare> cache;
  const auto key = std::make_pair(n, index);
  auto it = cache.find(key);
  if (it == cache.end()) {
    const auto seed = derive_seed(kMasterSeed, static_cast<std::uint64_t>(n) * 1000 + static_cast<std::uint64_t>(index));
    it = cache.emplace(key, jm_sample(n, default_burn_in(n), seed)).first;
  }
  return it->second;
}

std::vector<int> random_perm(int n, Rng& rng) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  rng.shuffle(p.begin(), p.end());
  return p;
}

int run_cli(const std::vector<std::string>& args, std::string& out) {
  std::ostringstream o, e;
  const int rc = cli::run(args, o, e);
  out = o.str();
  return rc;
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

// ----------------------------------------------------------------- criteria

Outcome oracle_counts() {
  Check c;
  const std::uint64_t expect[] = {1, 2, 12, 576, 161280};
  const auto t0 = std::chrono::steady_clock::now();
  for (int n = 1; n <= 5; ++n) {
    const auto got = count_ls(n);
    c.require(got == expect[n - 1], fmt("count_ls(%d) = %llu", n, static_cast<unsigned long long>(got)));
  }
  const double t = seconds_since(t0);
  c.require(t < kOracleSeconds, fmt("n <= 5 took %.1f s", t));
  const auto six = count_ls(6);
  c.require(six == 812851200ULL, fmt("count_ls(6) = %llu", static_cast<unsigned long long>(six)));
  c.note(fmt("1, 2, 12, 576, 161280 in %.2f s; n=6 gives %llu", t, static_cast<unsigned long long>(six)));
  return c.result();
}

Outcome constrained_symmetry() {
  Check c;
  Rng rng(derive_seed(kMasterSeed, 2));
  std::string cells;
  for (int trial = 0; trial < 5; ++trial) {
    const int i = static_cast<int>(rng.below(4)), j = static_cast<int>(rng.below(4)), k = static_cast<int>(rng.below(4));
    const Box b({IndexSet(4, {i}), IndexSet(4, {j}), IndexSet(4, {k})});
    const auto got = constrained_count(4, b);
    const auto oracle = brute::constrained(4, {1U << i, 1U << j, 1U << k});
    c.require(got == 432 && oracle == 432,
              fmt("cell (%d,%d) symbol %d: %llu (enumeration %llu)", i + 1, j + 1, k + 1,
                  static_cast<unsigned long long>(got), static_cast<unsigned long long>(oracle)));
    cells += fmt(" (%d,%d,%d)", i + 1, j + 1, k + 1);
  }
  c.note("432 at" + cells);
  return c.result();
}

Outcome guaranteed_box() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  int checked = 0;
  for (int n : {8, 16, 32, 64}) {
    const auto want = static_cast<std::uint64_t>((n / 2) * (n / 2));
    for (int s = 0; s < 20; ++s) {
      const auto& l = jm(n, s);
      const Box b = guaranteed_empty_box(l);
      c.require(b.volume() == want && count_in_box(l, b) == 0, fmt("n=%d sample %d", n, s));
      ++checked;
    }
    const auto cyc = LatinSquare::cyclic(n);
    const Box b = guaranteed_empty_box(cyc);
    c.require(b.volume() == want && count_in_box(cyc, b) == 0, fmt("cyclic n=%d", n));
    ++checked;
  }
  const double t = seconds_since(t0);
  c.require(t < kGuaranteedSeconds, fmt("took %.1f s", t));
  c.note(fmt("%d squares, volume floor(n/2)^2 and count 0 each, %.1f s", checked, t));
  return c.result();
}

Outcome cube_construction() {
  Check c;
  for (int n = 1; n <= 64; ++n) {
    const auto& l = jm(n, 0);
    const int s = trivial_cube_side(n);
    c.require(s == static_cast<int>(std::floor(std::sqrt(n + 0.25) - 0.5)), fmt("side formula at n=%d", n));
    if (s == 0) continue;
    const Box b = greedy_empty_cube(l);
    c.require(b.is_cube() && b.part(0).size() == s && count_in_box(l, b) == 0, fmt("greedy cube at n=%d", n));
  }
  std::string sides;
  for (int n : {16, 32, 64}) {
    const auto& l = jm(n, 0);
    const auto r = max_empty_cube(l, 10, derive_seed(kMasterSeed, 4));
    const double bound = 100.0 * std::sqrt(n * std::log(n));
    c.require(count_in_box(l, r.box) == 0 && r.side >= trivial_cube_side(n) && r.side <= bound,
              fmt("max cube at n=%d side %d", n, r.side));
    sides += fmt(" n=%d:%d(<=%.0f)", n, r.side, bound);
  }
  c.note("greedy side exact for n<=64; max sides" + sides);
  return c.result();
}

Outcome heuristic_vs_exact() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  int eps_hit = 0, disc_hit = 0;
  for (int s = 0; s < 20; ++s) {
    const auto& l = jm(8, 100 + s);
    const auto ex = eps_exact(l);
    const auto h = eps_heuristic(l, 200, derive_seed(kMasterSeed, 500 + static_cast<std::uint64_t>(s)));
    c.require(h.volume <= ex.volume && count_in_box(l, h.box) == 0, fmt("eps heuristic invalid on sample %d", s));
    if (h.volume == ex.volume) ++eps_hit;
    const auto dx = disc_exact(l);
    const auto dh = disc_heuristic(l, 200, derive_seed(kMasterSeed, 600 + static_cast<std::uint64_t>(s)));
    c.require(dh.best.score <= dx.best.score + kScoreTol, fmt("disc heuristic exceeds exact on sample %d", s));
    if (std::abs(dh.best.score - dx.best.score) <= kScoreTol) ++disc_hit;
  }
  const double t = seconds_since(t0);
  c.require(eps_hit >= kAgreementNeeded, fmt("eps agreement %d/20", eps_hit));
  c.require(disc_hit >= kAgreementNeeded, fmt("disc agreement %d/20", disc_hit));
  c.require(t < kHeuristicSeconds, fmt("took %.1f s", t));
  c.note(fmt("eps %d/20, disc %d/20 (tol %.0e), %.1f s", eps_hit, disc_hit, kScoreTol, t));
  return c.result();
}

Outcome small_values() {
  Check c;
  const auto e3 = eps_exact(LatinSquare::cyclic(3)).volume;
  const auto e2 = eps_exact(LatinSquare::cyclic(2)).volume;
  const int z5 = product_free(GroupTable{{5}}, 10, 1).size();
  const int z6 = product_free(GroupTable{{6}}, 10, 1).size();
  const int k4 = product_free(GroupTable{{2, 2}}, 10, 1).size();
  c.require(e3 == 2, "eps(Z_3)");
  c.require(e2 == 1, "eps(Z_2)");
  c.require(z5 == 2 && z6 == 3 && k4 == 2, "product-free sizes");
  const auto grid = [](const LatinSquare& l) { return brute::Grid(l.cells().begin(), l.cells().end()); };
  c.require(brute::eps(grid(LatinSquare::cyclic(3)), 3) == 2 && brute::eps(grid(LatinSquare::cyclic(2)), 2) == 1,
            "brute eps disagrees");
  c.require(brute::product_free(grid(group_table(GroupTable{{5}})), 5) == 2 &&
                brute::product_free(grid(group_table(GroupTable{{6}})), 6) == 3 &&
                brute::product_free(grid(group_table(GroupTable{{2, 2}})), 4) == 2,
            "brute product-free disagrees");
  c.note(fmt("eps(Z_3)=%llu eps(Z_2)=%llu; product-free Z_5=%d Z_6=%d Z_2xZ_2=%d",
             static_cast<unsigned long long>(e3), static_cast<unsigned long long>(e2), z5, z6, k4));
  return c.result();
}

Outcome sts_pipeline() {
  Check c;
  struct Named {
    const char* name;
    TripleSystem x;
  };
  const std::vector<Named> systems{{"bose 9", bose_sts(9)}, {"bose 15", bose_sts(15)},
                                   {"skolem 7", skolem_sts(7)}, {"skolem 13", skolem_sts(13)}};
  std::string contain;
  for (const auto& [name, x] : systems) {
    const auto v = check_triple_system(x.order(), x.triples());
    c.require(v.valid && v.complete && x.size() == static_cast<std::size_t>(x.order() * (x.order() - 1) / 6),
              std::string(name) + " not a complete system");
    const LatinSquare l = sts_to_ls(x);
    c.require(validate_tensor(tensor_of(l)).valid && l.is_symmetric() && l.is_idempotent(),
              std::string(name) + " square not symmetric idempotent Latin");
    if (x.order() <= 9) {
      const auto e = eps_exact(l).volume;
      const auto p = phi(x, 20, 1);
      c.require(p.exact && e <= p.volume, std::string(name) + " containment fails");
      contain += fmt(" %s: %llu<=%llu", name, static_cast<unsigned long long>(e), static_cast<unsigned long long>(p.volume));
    }
  }
  c.note("4 systems valid; eps(L)<=phi(X)" + contain);
  return c.result();
}

Outcome greedy_first_stage() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  double min_frac = 1.0;
  const IndexSet all = IndexSet::full(300);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GreedyConfig cfg;
    cfg.n = 300;
    cfg.seed = derive_seed(kMasterSeed, 800 + seed);
    const auto r = run_first_stage(cfg, {BoxTracker::make(all, all, all)});
    // Pair multiplicities straight from the chosen list.
    std::vector<int> cover(300 * 300, 0);
    bool twice = false;
    for (const auto& t : r.state.chosen) {
      for (auto [a, b] : {std::pair{t[0], t[1]}, std::pair{t[0], t[2]}, std::pair{t[1], t[2]}})
        twice = twice || ++cover[static_cast<std::size_t>(a * 300 + b)] > 1;
    }
    const double frac = static_cast<double>(r.trackers[0].f_legal) / static_cast<double>(r.trackers[0].f_initial);
    c.require(r.state.step == 60 && r.state.covered.count() == 180 && !twice,
              fmt("seed %llu: %llu steps", static_cast<unsigned long long>(seed), static_cast<unsigned long long>(r.state.step)));
    c.require(frac >= 0.9, fmt("legal fraction %.4f", frac));
    min_frac = std::min(min_frac, frac);
  }
  Rng rng(derive_seed(kMasterSeed, 8));
  for (int trial = 0; trial < 5; ++trial) {
    GreedyConfig cfg;
    cfg.n = 60;
    cfg.seed = rng();
    cfg.step_override = 100 + rng.below(200);
    std::vector<BoxTracker> trackers{BoxTracker::make(IndexSet::full(60), IndexSet::full(60), IndexSet::full(60)),
                                     BoxTracker::make(IndexSet::prefix(60, 20), IndexSet::prefix(60, 35),
                                                      IndexSet(60, {3, 9, 27, 44, 59}))};
    const auto r = run_first_stage(cfg, trackers);
    for (const auto& tr : r.trackers) {
      const auto cnt = recount_legal(r.state, tr.a, tr.b, tr.c);
      c.require(cnt.f_initial == tr.f_initial && cnt.f_legal == tr.f_legal, "incremental tracker differs from recount");
    }
  }
  const double t = seconds_since(t0);
  c.require(t < kGreedySeconds, fmt("took %.1f s", t));
  c.note(fmt("60 steps / 180 pairs in 10 runs, min legal fraction %.6f; n=60 recounts equal; %.1f s", min_frac, t));
  return c.result();
}

Outcome probabilities() {
  Check c;
  const double p1 = empty_prob_exact(4, Box({IndexSet(4, {0}), IndexSet(4, {0}), IndexSet(4, {0})})).p;
  const double p2 = empty_prob_exact(4, Box({IndexSet(4, {0}), IndexSet(4, {0}), IndexSet(4, {0, 1})})).p;
  const double p3 = empty_prob_exact(3, Box({IndexSet(3, {0, 1}), IndexSet(3, {0}), IndexSet(3, {0})})).p;
  c.require(std::abs(p1 - 0.75) < 1e-15 && std::abs(p2 - 0.5) < 1e-15 && std::abs(p3 - 1.0 / 3.0) < 1e-15,
            fmt("exact values %.6f %.6f %.6f", p1, p2, p3));
  Rng rng(derive_seed(kMasterSeed, 9));
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<IndexSet> parts;
    for (int a = 0; a < 3; ++a) {
      const auto size = 1 + static_cast<int>(rng.below(3));
      const auto p = random_perm(4, rng);
      parts.push_back(IndexSet(4, std::vector<int>(p.begin(), p.begin() + size)));
    }
    const Box b(parts);
    const auto ex = empty_prob_exact(4, b);
    const auto mc = empty_prob_mc(4, b, 10000, derive_seed(kMasterSeed, 900 + static_cast<std::uint64_t>(trial)));
    const double z = mc.stderr_ > 0 ? std::abs(mc.p - ex.p) / mc.stderr_ : (mc.p == ex.p ? 0.0 : 1e9);
    worst = std::max(worst, z);
    c.require(z <= kSigmas, fmt("box %d: mc %.4f exact %.4f (%.2f sigma)", trial, mc.p, ex.p, z));
  }
  std::string out;
  const int rc = run_cli({"oracle-prob", "--n", "5", "--all-shapes", "--samples", "1000"}, out);
  const auto rows = csv(out);
  c.require(rc == 0 && rows.size() == 1 + 125, fmt("bound-shape report rc=%d rows=%zu", rc, rows.size()));
  c.note(fmt("0.75, 0.5, 1/3 exact; MC worst %.2f sigma over 5 boxes; n=5 report %zu rows", worst, rows.size() - 1));
  return c.result();
}

Outcome calculators() {
  Check c;
  const double tb = tail_bound(1.0, 100, 0.1);
  c.require(std::abs(tb - std::exp(-10.0 / 3.0)) <= kTailTol, fmt("tail_bound %.15g", tb));
  const auto pb = proof_budget(1.0 / 1500.0, 300, 150, 150, 1000);
  const double k = (1.0 - 18.0 / 1500.0) / (648.0 / 1500.0);
  c.require(std::abs(pb.k - k) <= kKTol && std::abs(pb.k - 2.28703703704) <= kKTol, fmt("K %.12f", pb.k));
  c.note(fmt("tail_bound %.12f, K %.10f, mean bound %.6f", tb, pb.k, pb.mean_bound));
  return c.result();
}

Outcome invariance() {
  Check c;
  Rng rng(derive_seed(kMasterSeed, 11));
  const auto& l = jm(8, 300);
  const auto eps = eps_exact(l).volume;
  const double disc = disc_exact(l).best.score;
  const int cube = max_empty_cube(l, 5, 1).side;
  // An 8-point partial triple system grown greedily from a random order.
  std::vector<Triple> all;
  for (int a = 0; a < 8; ++a)
    for (int b = a + 1; b < 8; ++b)
      for (int d = b + 1; d < 8; ++d) all.push_back({a, b, d});
  rng.shuffle(all.begin(), all.end());
  std::vector<Triple> chosen;
  for (const auto& t : all) {
    chosen.push_back(t);
    if (!check_triple_system(8, chosen).valid) chosen.pop_back();
  }
  const TripleSystem x(8, chosen);
  const auto ph = phi(x, 5, 1);
  c.require(ph.exact, "phi not exact at n=8");
  for (int k = 0; k < 5; ++k) {
    const auto r = l.relabeled(random_perm(8, rng), random_perm(8, rng), random_perm(8, rng));
    c.require(eps_exact(r).volume == eps, "eps changed");
    c.require(std::abs(disc_exact(r).best.score - disc) <= kScoreTol, "disc changed");
    c.require(max_empty_cube(r, 5, 1).side == cube, "cube side changed");
    c.require(phi(x.relabeled(random_perm(8, rng)), 5, 1).volume == ph.volume, "phi changed");
  }
  c.note(fmt("eps %llu, disc %.9f, cube %d, phi %llu unchanged under 5 relabelings",
             static_cast<unsigned long long>(eps), disc, cube, static_cast<unsigned long long>(ph.volume)));
  return c.result();
}

Outcome scaling_report() {
  Check c;
  std::string out;
  const int rc = run_cli({"--seed", "12", "scan-eps", "--n-list", "8,16,32,64", "--samples", "10"}, out);
  const auto rows = csv(out);
  c.require(rc == 0 && rows.size() == 41, fmt("scan-eps rc=%d rows=%zu", rc, rows.size()));
  if (rows.empty()) return c.result();
  const auto& h = rows[0];
  auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < h.size(); ++i)
      if (h[i] == name) return static_cast<int>(i);
    return -1;
  };
  const int cn = col("n"), ce = col("eps"), cr = col("eps_over_n2"), cl = col("eps_over_n2_ln2n");
  c.require(cn >= 0 && ce >= 0 && cr >= 0 && cl >= 0, "missing columns");
  if (cn < 0 || ce < 0 || cr < 0 || cl < 0) return c.result();
  std::map<int, double> mean_ratio;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const int n = std::stoi(rows[i][static_cast<std::size_t>(cn)]);
    const long long e = std::stoll(rows[i][static_cast<std::size_t>(ce)]);
    c.require(e >= static_cast<long long>((n / 2) * (n / 2)), fmt("row %zu: eps %lld < floor(n/2)^2", i, e));
    c.require(!rows[i][static_cast<std::size_t>(cr)].empty() && !rows[i][static_cast<std::size_t>(cl)].empty(),
              "empty ratio column");
    mean_ratio[n] += std::stod(rows[i][static_cast<std::size_t>(cr)]) / 10.0;
  }
  std::string trend;
  for (const auto& [n, r] : mean_ratio) trend += fmt(" n=%d:%.3f", n, r);
  c.note("40 rows, eps>=floor(n/2)^2 each; mean eps/n^2" + trend);
  return c.result();
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"oracle counts", oracle_counts},
      {"constrained permanent symmetry", constrained_symmetry},
      {"guaranteed empty box", guaranteed_box},
      {"empty cube construction", cube_construction},
      {"heuristic vs exact", heuristic_vs_exact},
      {"exact small values", small_values},
      {"triple system pipeline", sts_pipeline},
      {"greedy first stage", greedy_first_stage},
      {"probability estimates", probabilities},
      {"calculators", calculators},
      {"invariance suite", invariance},
      {"scaling report", scaling_report},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}

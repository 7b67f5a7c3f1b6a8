#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>

#include "latdisc/core.hpp"
#include "latdisc/error.hpp"
#include "latdisc/generators.hpp"
#include "latdisc/greedy.hpp"
#include "latdisc/io.hpp"
#include "latdisc/oracle.hpp"
#include "latdisc/rng.hpp"
#include "latdisc/search.hpp"

namespace latdisc::cli {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitUsage = 2;

struct Globals {
  std::uint64_t seed = 1;
  int restarts = 50;
  std::string format;
  std::string out_path;
  std::optional<int> limit_exact;
  double lambda = kDefaultLambda;
  double big_m = 9000.0;
  bool timing = false;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string fmt12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// Rounded to 12 significant digits so that JSON output matches the CSV text.
double round12(double x) { return std::stod(fmt12(x)); }

json index_array(const IndexSet& s) {
  json a = json::array();
  s.for_each([&](int i) { a.push_back(i + 1); });
  return a;
}

std::string space_list(const IndexSet& s) {
  std::string out;
  s.for_each([&](int i) {
    if (!out.empty()) out += ' ';
    out += std::to_string(i + 1);
  });
  return out;
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string row;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) row += ',';
    row += cells[i];
  }
  return row + '\n';
}

LatinSquare load_latin(const std::string& path) {
  const std::string text = read_text_file(path);
  switch (detect_kind(text)) {
    case FileKind::latin:
      return parse_latin(text);
    case FileKind::tensor: {
      const PermTensor t = parse_tensor(text);
      if (t.dimension() != 2) throw UsageError(path + ": expected a Latin square, got a " + std::to_string(t.dimension()) + "-dimensional tensor");
      return latin_of(t);
    }
    case FileKind::sts:
      break;
  }
  throw UsageError(path + ": expected a Latin square, got a triple system");
}

TripleSystem load_sts(const std::string& path) {
  const std::string text = read_text_file(path);
  if (detect_kind(text) != FileKind::sts) throw UsageError(path + ": expected a triple system");
  return parse_sts(text);
}

class Emitter {
 public:
  Emitter(const Globals& g, std::ostream& out, std::string default_format)
      : g_(g), out_(out), format_(g.format.empty() ? std::move(default_format) : g.format) {
    if (format_ != "json" && format_ != "csv") throw UsageError("--format must be json or csv");
  }

  bool csv() const { return format_ == "csv"; }

  void emit(const std::string& text) {
    if (g_.out_path.empty()) {
      out_ << text;
    } else {
      write_text_file(g_.out_path, text);
    }
  }

  void emit(const json& j) { emit(j.dump(2) + "\n"); }

 private:
  const Globals& g_;
  std::ostream& out_;
  std::string format_;
};

struct SearchRecord {
  std::string kind;
  int n = 0;
  bool exact = false;
  json value;
  std::string value_text;
  std::vector<std::pair<std::string, IndexSet>> witness;
  int restarts_used = 0;
  json extra = json::object();
  std::vector<std::pair<std::string, std::string>> extra_csv;
};

void emit_search(Emitter& em, const Globals& g, const SearchRecord& r, double elapsed_ms) {
  if (em.csv()) {
    std::vector<std::string> head{"kind", "n", "exact", "volume_or_score"};
    std::vector<std::string> row{r.kind, std::to_string(r.n), r.exact ? "1" : "0", r.value_text};
    for (const auto& [name, set] : r.witness) {
      head.push_back(name);
      row.push_back(space_list(set));
    }
    head.push_back("restarts_used");
    row.push_back(std::to_string(r.restarts_used));
    for (const auto& [k, v] : r.extra_csv) {
      head.push_back(k);
      row.push_back(v);
    }
    if (g.timing) {
      head.push_back("elapsed_ms");
      row.push_back(fmt12(elapsed_ms));
    }
    em.emit(csv_row(head) + csv_row(row));
    return;
  }
  json j = r.extra;
  j["kind"] = r.kind;
  j["n"] = r.n;
  j["exact"] = r.exact;
  j["volume_or_score"] = r.value;
  json w = json::object();
  for (const auto& [name, set] : r.witness) w[name] = index_array(set);
  j["witness"] = w;
  j["restarts_used"] = r.restarts_used;
  if (g.timing) j["elapsed_ms"] = round12(elapsed_ms);
  em.emit(j);
}

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::vector<int> parse_int_list(const std::string& spec) {
  std::vector<int> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("invalid integer '" + tok + "' in list '" + spec + "'");
    }
  }
  if (out.empty()) throw UsageError("empty integer list");
  return out;
}

// "X;Y;Z" with comma-separated 1-based indices in each part.
Box parse_box(const std::string& spec, int n) {
  std::vector<IndexSet> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t end = std::min(spec.find(';', pos), spec.size());
    parts.push_back(parse_index_list(std::string_view(spec).substr(pos, end - pos), n));
    if (end == spec.size()) break;
    pos = end + 1;
  }
  if (parts.size() != 3) throw UsageError("box '" + spec + "' must have three parts separated by ';'");
  return Box(std::move(parts));
}

// ------------------------------------------------------------------ gen

int cmd_gen(const Globals& g, const std::string& kind, int n, const std::string& moduli, std::uint64_t burn_in,
            int max_restarts, std::ostream& out, std::ostream& err) {
  std::string text;
  std::string verdict;
  if (kind == "jm" || kind == "group") {
    const LatinSquare ls = kind == "jm" ? jm_sample(n, burn_in ? burn_in : default_burn_in(n), g.seed)
                                         : group_table(parse_moduli(moduli));
    text = format_latin(ls);
    verdict = "valid Latin square of order " + std::to_string(ls.order());
  } else if (kind == "bose" || kind == "skolem" || kind == "greedy-sts") {
    const TripleSystem x = kind == "bose"     ? bose_sts(n)
                           : kind == "skolem" ? skolem_sts(n)
                                              : complete_random_greedy(n, max_restarts, g.seed);
    text = format_sts(x);
    verdict = std::string("valid ") + (x.complete() ? "complete" : "partial") + " triple system of order " +
              std::to_string(x.order()) + " with " + std::to_string(x.size()) + " triples";
  } else {
    throw UsageError("unknown generator '" + kind + "' (expected jm, group, bose, skolem or greedy-sts)");
  }
  if (g.out_path.empty()) {
    out << text;
    err << verdict << "\n";
  } else {
    write_text_file(g.out_path, text);
    out << verdict << "\n";
  }
  return kExitOk;
}

// ------------------------------------------------------------- validate

std::string validate_text(const std::string& text, bool& ok) {
  switch (detect_kind(text)) {
    case FileKind::latin: {
      const RawGrid grid = parse_grid(text);
      const auto v = check_latin(grid.n, grid.cells);
      ok = v.valid;
      return ok ? "valid Latin square of order " + std::to_string(grid.n) : "invalid Latin square: " + v.message;
    }
    case FileKind::tensor: {
      try {
        const PermTensor t = parse_tensor(text);
        const auto v = validate_tensor(t);
        ok = v.valid;
        return ok ? "valid " + std::to_string(t.dimension()) + "-dimensional permutation of order " +
                        std::to_string(t.order())
                  : "invalid tensor: " + v.message;
      } catch (const InvalidObject& e) {
        ok = false;
        return std::string("invalid tensor: ") + e.what();
      }
    }
    case FileKind::sts: {
      const RawTriples raw = parse_triples(text);
      for (const auto& t : raw.triples) {
        if (!(t[0] < t[1] && t[1] < t[2])) {
          ok = false;
          return "invalid triple system: triple " + std::to_string(t[0] + 1) + " " + std::to_string(t[1] + 1) + " " +
                 std::to_string(t[2] + 1) + " is not written in increasing order";
        }
      }
      const auto v = check_triple_system(raw.n, raw.triples);
      ok = v.valid;
      if (!ok) return "invalid triple system: " + v.message;
      return std::string("valid ") + (v.complete ? "complete" : "partial") + " triple system of order " +
             std::to_string(raw.n);
    }
  }
  ok = false;
  return "unknown kind";
}

int cmd_validate(const std::vector<std::string>& paths, std::ostream& out, std::ostream& err) {
  int status = kExitOk;
  for (const auto& path : paths) {
    try {
      bool ok = false;
      const std::string msg = validate_text(read_text_file(path), ok);
      out << path << ": " << msg << "\n";
      if (!ok) status = std::max(status, kExitInvalid);
    } catch (const Error& e) {
      err << path << ": error: " << e.what() << "\n";
      status = kExitUsage;
    }
  }
  return status;
}

// -------------------------------------------------------------- searches

SearchRecord box_record(const std::string& kind, int n, bool exact, const Box& b, int restarts_used,
                        const char* names = "XYZ") {
  SearchRecord r;
  r.kind = kind;
  r.n = n;
  r.exact = exact;
  r.restarts_used = restarts_used;
  for (int a = 0; a < b.arity(); ++a) r.witness.emplace_back(std::string(1, names[a]), b.part(a));
  return r;
}

int cmd_eps(const Globals& g, const std::string& path, bool force_heuristic, std::ostream& out) {
  Emitter em(g, out, "json");
  const Stopwatch sw;
  const LatinSquare ls = load_latin(path);
  const int limit = g.limit_exact.value_or(kEpsExactLimit);
  const bool exact = !force_heuristic && ls.order() <= limit;
  const EmptyBoxReport rep = exact ? eps_exact(ls, limit) : eps_heuristic(ls, g.restarts, g.seed);
  SearchRecord r = box_record("eps", ls.order(), rep.exact, rep.box, rep.restarts_used);
  r.value = rep.volume;
  r.value_text = std::to_string(rep.volume);
  emit_search(em, g, r, sw.ms());
  return kExitOk;
}

int cmd_disc(const Globals& g, const std::string& path, bool force_heuristic, std::ostream& out) {
  Emitter em(g, out, "json");
  const Stopwatch sw;
  const LatinSquare ls = load_latin(path);
  const int limit = g.limit_exact.value_or(kDiscExactLimit);
  const bool exact = !force_heuristic && ls.order() <= limit;
  const DiscReport rep = exact ? disc_exact(ls, limit) : disc_heuristic(ls, g.restarts, g.seed);
  SearchRecord r = box_record("disc", ls.order(), rep.exact, rep.best.box, rep.restarts_used);
  r.value = round12(rep.best.score);
  r.value_text = fmt12(rep.best.score);
  r.extra["count"] = rep.best.count;
  r.extra["volume"] = rep.best.box.volume();
  r.extra_csv = {{"count", std::to_string(rep.best.count)}, {"volume", std::to_string(rep.best.box.volume())}};
  emit_search(em, g, r, sw.ms());
  return kExitOk;
}

int cmd_cube(const Globals& g, const std::string& path, std::ostream& out) {
  Emitter em(g, out, "json");
  const Stopwatch sw;
  const LatinSquare ls = load_latin(path);
  const CubeReport rep = max_empty_cube(ls, g.restarts, g.seed, g.limit_exact.value_or(kCubeExactLimit));
  SearchRecord r = box_record("cube", ls.order(), rep.exact, rep.box, rep.restarts_used, "ABC");
  r.value = rep.side;
  r.value_text = std::to_string(rep.side);
  r.extra["trivial_side"] = trivial_cube_side(ls.order());
  r.extra_csv = {{"trivial_side", std::to_string(trivial_cube_side(ls.order()))}};
  emit_search(em, g, r, sw.ms());
  return kExitOk;
}

int cmd_phi(const Globals& g, const std::string& path, std::ostream& out) {
  Emitter em(g, out, "json");
  const Stopwatch sw;
  const TripleSystem x = load_sts(path);
  const PhiReport rep = phi(x, g.restarts, g.seed, g.limit_exact.value_or(kPhiExactLimit));
  SearchRecord r = box_record("phi", x.order(), rep.exact, rep.box, rep.restarts_used, "ABC");
  r.value = rep.volume;
  r.value_text = std::to_string(rep.volume);
  if (rep.latin_eps) {
    r.extra["latin_eps"] = *rep.latin_eps;
    r.extra["containment_holds"] = rep.containment_holds;
  }
  r.extra_csv = {{"latin_eps", rep.latin_eps ? std::to_string(*rep.latin_eps) : ""},
                 {"containment_holds", rep.latin_eps ? (rep.containment_holds ? "1" : "0") : ""}};
  emit_search(em, g, r, sw.ms());
  return rep.containment_holds ? kExitOk : kExitInvalid;
}

int cmd_product_free(const Globals& g, const std::string& path, const std::string& moduli, std::ostream& out) {
  Emitter em(g, out, "json");
  const Stopwatch sw;
  if (path.empty() == moduli.empty()) throw UsageError("product-free needs exactly one of --moduli or a table file");
  const LatinSquare table = moduli.empty() ? load_latin(path) : group_table(parse_moduli(moduli));
  const auto rep = product_free(table, g.restarts, g.seed, g.limit_exact.value_or(kProductFreeExactLimit));
  SearchRecord r;
  r.kind = "product-free";
  r.n = table.order();
  r.exact = rep.exact;
  r.restarts_used = rep.restarts_used;
  r.value = rep.size();
  r.value_text = std::to_string(rep.size());
  r.witness.emplace_back("S", rep.set);
  emit_search(em, g, r, sw.ms());
  return kExitOk;
}

int cmd_section(const Globals& g, const std::string& path, const std::string& set_spec, int axis, std::ostream& out) {
  Emitter em(g, out, "json");
  const Stopwatch sw;
  const LatinSquare ls = load_latin(path);
  const IndexSet s = parse_index_list(set_spec, ls.order());
  const auto rep = section_discrepancy(ls, s, axis, g.restarts, g.seed, g.limit_exact.value_or(kDiscExactLimit));
  SearchRecord r;
  r.kind = "section";
  r.n = ls.order();
  r.exact = rep.exact;
  r.restarts_used = rep.restarts_used;
  r.value = round12(rep.deviation);
  r.value_text = fmt12(rep.deviation);
  r.witness = {{"A", rep.a}, {"B", rep.b}};
  r.extra["scaled_deviation"] = rep.scaled_deviation;
  r.extra["axis"] = axis;
  r.extra["k"] = s.size();
  r.extra_csv = {{"scaled_deviation", std::to_string(rep.scaled_deviation)}};
  emit_search(em, g, r, sw.ms());
  return kExitOk;
}

// --------------------------------------------------------------- greedy

BoxTracker parse_tracker(const std::string& spec, int n, Rng& rng) {
  if (spec == "full") return BoxTracker::make(IndexSet::full(n), IndexSet::full(n), IndexSet::full(n));
  if (spec.rfind("random:", 0) == 0) {
    const auto sizes = parse_int_list(spec.substr(7));
    if (sizes.size() != 3) throw UsageError("tracker '" + spec + "' needs three sizes");
    std::vector<IndexSet> sets;
    for (int s : sizes) {
      if (s < 0 || s > n) throw UsageError("tracker size " + std::to_string(s) + " is outside 0.." + std::to_string(n));
      std::vector<int> items(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) items[static_cast<std::size_t>(i)] = i;
      rng.shuffle(items.begin(), items.end());
      items.resize(static_cast<std::size_t>(s));
      sets.emplace_back(n, items);
    }
    return BoxTracker::make(sets[0], sets[1], sets[2]);
  }
  const Box b = parse_box(spec, n);
  return BoxTracker::make(b.part(0), b.part(1), b.part(2));
}

const char* type_name(int t) {
  static const char* names[kTripleTypes] = {"abc", "ab_not_c", "a_not_b_c", "not_a_bc", "other"};
  return names[t];
}

int cmd_greedy(const Globals& g, int n, const std::vector<std::string>& tracker_specs, std::optional<std::uint64_t> steps,
               const std::string& trace_path, std::ostream& out, std::ostream& err) {
  Emitter em(g, out, "json");
  const Stopwatch sw;
  if (n < 3) throw UsageError("greedy needs --n >= 3");
  GreedyConfig cfg;
  cfg.n = n;
  cfg.lambda = g.lambda;
  cfg.seed = g.seed;
  cfg.step_override = steps;
  cfg.record_trace = !trace_path.empty();
  Rng tracker_rng(derive_seed(g.seed, 0x7472616b));
  std::vector<BoxTracker> trackers;
  for (const auto& spec : tracker_specs.empty() ? std::vector<std::string>{"full"} : tracker_specs) {
    trackers.push_back(parse_tracker(spec, n, tracker_rng));
  }
  const auto result = run_first_stage(cfg, std::move(trackers));
  if (result.planned_steps == 0) {
    err << "warning: the first stage has 0 steps at n = " << n << " (lambda n^2 < 1)\n";
  }
  if (em.csv()) {
    std::string text = csv_row({"tracker", "a", "b", "c", "f_initial", "f_legal", "legal_fraction", "abc",
                                "ab_not_c", "a_not_b_c", "not_a_bc", "other", "steps", "stuck"});
    for (std::size_t t = 0; t < result.trackers.size(); ++t) {
      const auto& tr = result.trackers[t];
      std::vector<std::string> row{std::to_string(t), std::to_string(tr.a.size()), std::to_string(tr.b.size()),
                                   std::to_string(tr.c.size()), std::to_string(tr.f_initial), std::to_string(tr.f_legal),
                                   tr.f_initial ? fmt12(static_cast<double>(tr.f_legal) / static_cast<double>(tr.f_initial)) : ""};
      for (int k = 0; k < kTripleTypes; ++k) row.push_back(std::to_string(tr.type_counts[static_cast<std::size_t>(k)]));
      row.push_back(std::to_string(result.state.step));
      row.push_back(result.state.stuck ? "1" : "0");
      text += csv_row(row);
    }
    em.emit(text);
  } else {
    json j;
    j["n"] = n;
    j["lambda"] = round12(g.lambda);
    j["steps"] = result.state.step;
    j["planned_steps"] = result.planned_steps;
    j["stuck"] = result.state.stuck;
    j["covered_pairs"] = result.state.covered.count();
    json trs = json::array();
    for (const auto& tr : result.trackers) {
      json t;
      t["sizes"] = {tr.a.size(), tr.b.size(), tr.c.size()};
      t["f_initial"] = tr.f_initial;
      t["f_legal"] = tr.f_legal;
      if (tr.f_initial) t["legal_fraction"] = round12(static_cast<double>(tr.f_legal) / static_cast<double>(tr.f_initial));
      json types;
      for (int k = 0; k < kTripleTypes; ++k) types[type_name(k)] = tr.type_counts[static_cast<std::size_t>(k)];
      t["type_counts"] = types;
      trs.push_back(t);
    }
    j["trackers"] = trs;
    if (g.timing) j["elapsed_ms"] = round12(sw.ms());
    em.emit(j);
  }
  if (!trace_path.empty()) {
    std::string text = csv_row({"step", "triple", "legal_estimate"});
    for (const auto& row : result.trace) {
      text += csv_row({std::to_string(row.step),
                       std::to_string(row.triple[0] + 1) + " " + std::to_string(row.triple[1] + 1) + " " +
                           std::to_string(row.triple[2] + 1),
                       fmt12(row.legal_estimate)});
    }
    write_text_file(trace_path, text);
  }
  return kExitOk;
}

// --------------------------------------------------------------- oracle

int cmd_oracle_count(const Globals& g, int n, unsigned threads, std::ostream& out) {
  Emitter em(g, out, "json");
  const std::uint64_t c = count_ls(n, threads);
  if (em.csv()) {
    em.emit(csv_row({"n", "count"}) + csv_row({std::to_string(n), std::to_string(c)}));
  } else {
    em.emit(json{{"n", n}, {"count", c}});
  }
  return kExitOk;
}

int cmd_oracle_prob(const Globals& g, int n, const std::vector<std::string>& box_specs, bool all_shapes,
                    std::uint64_t samples, double c, std::ostream& out) {
  Emitter em(g, out, "csv");
  std::vector<Box> boxes;
  for (const auto& spec : box_specs) boxes.push_back(parse_box(spec, n));
  if (all_shapes) {
    for (int x = 1; x <= n; ++x) {
      for (int y = 1; y <= n; ++y) {
        for (int z = 1; z <= n; ++z) {
          boxes.emplace_back(std::vector<IndexSet>{IndexSet::prefix(n, x), IndexSet::prefix(n, y), IndexSet::prefix(n, z)});
        }
      }
    }
  }
  if (boxes.empty()) throw UsageError("oracle-prob needs --box or --all-shapes");
  const bool exact = n <= kEnumerateLimit;
  if (!exact && samples == 0) throw UsageError("exact probabilities need n <= 5; pass --samples for monte carlo");
  const bool have_diag = n >= 2;
  const UnionBoundDiagnostic diag = have_diag ? typical_bound_diagnostic(n, c, g.big_m) : UnionBoundDiagnostic{};
  std::string text = csv_row({"n", "x", "y", "z", "exact_prob", "mc_prob", "mc_stderr", "volume",
                              "exp_neg_vol_over_n", "log_union_bound", "vanishing"});
  json rows = json::array();
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    const Box& b = boxes[k];
    std::optional<ProbEstimate> ex, mc;
    if (exact) ex = empty_prob_exact(n, b);
    if (samples > 0) mc = empty_prob_mc(n, b, samples, derive_seed(g.seed, k));
    const auto vol = b.volume();
    const double shape = std::exp(-static_cast<double>(vol) / static_cast<double>(n));
    text += csv_row({std::to_string(n), std::to_string(b.part(0).size()), std::to_string(b.part(1).size()),
                     std::to_string(b.part(2).size()), ex ? fmt12(ex->p) : "", mc ? fmt12(mc->p) : "",
                     mc ? fmt12(mc->stderr_) : "", std::to_string(vol), fmt12(shape),
                     have_diag ? fmt12(diag.log_bound) : "", have_diag ? (diag.vanishing ? "1" : "0") : ""});
    json row{{"n", n},
             {"x", b.part(0).size()},
             {"y", b.part(1).size()},
             {"z", b.part(2).size()},
             {"volume", vol},
             {"exp_neg_vol_over_n", round12(shape)}};
    if (ex) row["exact_prob"] = round12(ex->p);
    if (mc) {
      row["mc_prob"] = round12(mc->p);
      row["mc_stderr"] = round12(mc->stderr_);
    }
    if (have_diag) {
      row["log_union_bound"] = round12(diag.log_bound);
      row["vanishing"] = diag.vanishing;
    }
    rows.push_back(row);
  }
  if (em.csv()) {
    em.emit(text);
  } else {
    em.emit(rows);
  }
  return kExitOk;
}

// ----------------------------------------------------------------- scans

int cmd_scan_eps(const Globals& g, const std::string& n_list, int samples, std::ostream& out) {
  Emitter em(g, out, "csv");
  const auto ns = parse_int_list(n_list);
  std::string text = csv_row({"n", "sample_id", "eps", "exact", "eps_over_n2", "eps_over_n2_ln2n", "guaranteed_volume",
                              "guaranteed_empty"});
  json rows = json::array();
  const int limit = g.limit_exact.value_or(kEpsExactLimit);
  bool all_ok = true;
  for (std::size_t a = 0; a < ns.size(); ++a) {
    const int n = ns[a];
    if (n < 2) throw UsageError("scan-eps needs n >= 2");
    for (int s = 0; s < samples; ++s) {
      const std::uint64_t stream = derive_seed(g.seed, (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint64_t>(s));
      const LatinSquare ls = jm_sample(n, default_burn_in(n), stream);
      const EmptyBoxReport rep = n <= limit ? eps_exact(ls, limit) : eps_heuristic(ls, g.restarts, derive_seed(stream, 1));
      const Box gb = guaranteed_empty_box(ls);
      const bool gb_empty = count_in_box(ls, gb) == 0;
      const auto gv = gb.volume();
      all_ok = all_ok && gb_empty && rep.volume >= gv;
      const double dn = static_cast<double>(n);
      const double r2 = static_cast<double>(rep.volume) / (dn * dn);
      const double rl = r2 / (std::log(dn) * std::log(dn));
      text += csv_row({std::to_string(n), std::to_string(s), std::to_string(rep.volume), rep.exact ? "1" : "0", fmt12(r2),
                       fmt12(rl), std::to_string(gv), gb_empty ? "1" : "0"});
      rows.push_back(json{{"n", n},
                          {"sample_id", s},
                          {"eps", rep.volume},
                          {"exact", rep.exact},
                          {"eps_over_n2", round12(r2)},
                          {"eps_over_n2_ln2n", round12(rl)},
                          {"guaranteed_volume", gv},
                          {"guaranteed_empty", gb_empty}});
    }
  }
  if (em.csv()) {
    em.emit(text);
  } else {
    em.emit(rows);
  }
  return all_ok ? kExitOk : kExitInvalid;
}

int cmd_scan_cube(const Globals& g, const std::string& n_list, int samples, double constant, std::ostream& out) {
  Emitter em(g, out, "csv");
  const auto ns = parse_int_list(n_list);
  std::string text = csv_row({"n", "sample_id", "trivial_side", "greedy_empty", "max_side", "exact", "side_bound"});
  json rows = json::array();
  const int limit = g.limit_exact.value_or(kCubeExactLimit);
  bool all_ok = true;
  for (const int n : ns) {
    if (n < 1) throw UsageError("scan-cube needs n >= 1");
    for (int s = 0; s < samples; ++s) {
      const std::uint64_t stream = derive_seed(g.seed, (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint64_t>(s));
      const LatinSquare ls = jm_sample(n, default_burn_in(n), stream);
      const Box gc = greedy_empty_cube(ls);
      const int side = trivial_cube_side(n);
      const bool gc_ok = count_in_box(ls, gc) == 0 && gc.part(0).size() == side && gc.is_cube();
      const CubeReport rep = max_empty_cube(ls, g.restarts, derive_seed(stream, 1), limit);
      const double bound = n >= 2 ? constant * std::sqrt(static_cast<double>(n) * std::log(static_cast<double>(n))) : 0.0;
      all_ok = all_ok && gc_ok && rep.side >= side && count_in_box(ls, rep.box) == 0;
      text += csv_row({std::to_string(n), std::to_string(s), std::to_string(side), gc_ok ? "1" : "0",
                       std::to_string(rep.side), rep.exact ? "1" : "0", fmt12(bound)});
      rows.push_back(json{{"n", n},
                          {"sample_id", s},
                          {"trivial_side", side},
                          {"greedy_empty", gc_ok},
                          {"max_side", rep.side},
                          {"exact", rep.exact},
                          {"side_bound", round12(bound)}});
    }
  }
  if (em.csv()) {
    em.emit(text);
  } else {
    em.emit(rows);
  }
  return all_ok ? kExitOk : kExitInvalid;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Latin-square discrepancy and empty-box toolkit", "latdisc"};
  app.fallthrough();
  app.require_subcommand(1);

  Globals g;
  app.add_option("--seed", g.seed, "master seed")->capture_default_str();
  app.add_option("--restarts", g.restarts, "restarts for randomised searches")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", g.out_path, "write the main output to this file");
  app.add_option("--limit-exact", g.limit_exact, "largest n handled by the exact searcher");
  app.add_option("--lambda", g.lambda, "first-stage length factor")->capture_default_str();
  app.add_option("--big-m", g.big_m, "constant M of the union-bound diagnostic")->capture_default_str();
  app.add_flag("--timing", g.timing, "add elapsed_ms to reports (output is then not reproducible)");

  // gen
  std::string gen_kind, gen_moduli;
  int gen_n = 0, gen_restarts = 1000;
  std::uint64_t gen_burn = 0;
  auto* gen = app.add_subcommand("gen", "generate a square or a triple system");
  gen->add_option("kind", gen_kind, "jm, group, bose, skolem or greedy-sts")->required();
  gen->add_option("--n", gen_n, "order");
  gen->add_option("--moduli", gen_moduli, "group moduli, e.g. 2,2");
  gen->add_option("--burn-in", gen_burn, "walk length for jm (default 2n^3)");
  gen->add_option("--max-restarts", gen_restarts, "restart budget for greedy-sts")->capture_default_str();

  std::vector<std::string> validate_paths;
  auto* validate = app.add_subcommand("validate", "check structural invariants of files");
  validate->add_option("paths", validate_paths)->required();

  std::string in_path;
  bool heuristic = false;
  auto* eps = app.add_subcommand("eps", "largest empty box of a Latin square");
  eps->add_option("input", in_path)->required();
  eps->add_flag("--heuristic", heuristic, "skip the exact search");

  auto* disc = app.add_subcommand("disc", "largest discrepancy score of a box");
  disc->add_option("input", in_path)->required();
  disc->add_flag("--heuristic", heuristic, "skip the exact search");

  auto* cube = app.add_subcommand("cube", "largest empty cube");
  cube->add_option("input", in_path)->required();

  auto* phi_cmd = app.add_subcommand("phi", "largest empty box of a triple system");
  phi_cmd->add_option("input", in_path)->required();

  std::string pf_moduli;
  auto* pf = app.add_subcommand("product-free", "largest product-free set of a group table");
  pf->add_option("input", in_path);
  pf->add_option("--moduli", pf_moduli, "abelian group moduli");

  std::string section_set;
  int section_axis = 3;
  auto* section = app.add_subcommand("section", "section discrepancy");
  section->add_option("input", in_path)->required();
  section->add_option("--set", section_set, "1-based set S, e.g. 1,2")->required();
  section->add_option("--axis", section_axis, "axis removed by the section (1, 2 or 3)")->capture_default_str()->check(CLI::Range(1, 3));

  int greedy_n = 0;
  std::vector<std::string> tracker_specs;
  std::optional<std::uint64_t> greedy_steps;
  std::string trace_path;
  auto* greedy = app.add_subcommand("greedy", "first stage of the random greedy triple process");
  greedy->add_option("--n", greedy_n, "number of points")->required();
  greedy->add_option("--tracker", tracker_specs, "full, random:a,b,c or X;Y;Z (repeatable)");
  greedy->add_option("--steps", greedy_steps, "override the number of steps");
  greedy->add_option("--trace", trace_path, "write the per-step CSV trace here");

  int oc_n = 0;
  unsigned oc_threads = 0;
  auto* oc = app.add_subcommand("oracle-count", "exact number of Latin squares");
  oc->add_option("--n", oc_n)->required();
  oc->add_option("--threads", oc_threads, "worker threads (0 = all cores)");

  int op_n = 0;
  std::vector<std::string> op_boxes;
  bool op_all = false;
  std::uint64_t op_samples = 0;
  double op_c = 1.0;
  auto* op = app.add_subcommand("oracle-prob", "probability that a box is empty");
  op->add_option("--n", op_n)->required();
  op->add_option("--box", op_boxes, "X;Y;Z with 1-based comma lists (repeatable)");
  op->add_flag("--all-shapes", op_all, "every prefix box of sizes 1..n");
  op->add_option("--samples", op_samples, "monte carlo samples (0 = none)");
  op->add_option("--c", op_c, "exponent constant of the union-bound diagnostic")->capture_default_str();

  std::string scan_ns;
  int scan_samples = 10;
  double cube_constant = 100.0;
  auto* scan_eps = app.add_subcommand("scan-eps", "empty-box volume over a range of orders");
  scan_eps->add_option("--n-list", scan_ns, "comma-separated orders")->required();
  scan_eps->add_option("--samples", scan_samples)->capture_default_str();
  auto* scan_cube = app.add_subcommand("scan-cube", "empty-cube side over a range of orders");
  scan_cube->add_option("--n-list", scan_ns, "comma-separated orders")->required();
  scan_cube->add_option("--samples", scan_samples)->capture_default_str();
  scan_cube->add_option("--cube-constant", cube_constant, "constant of the side bound")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(g, gen_kind, gen_n, gen_moduli, gen_burn, gen_restarts, out, err);
    if (validate->parsed()) return cmd_validate(validate_paths, out, err);
    if (eps->parsed()) return cmd_eps(g, in_path, heuristic, out);
    if (disc->parsed()) return cmd_disc(g, in_path, heuristic, out);
    if (cube->parsed()) return cmd_cube(g, in_path, out);
    if (phi_cmd->parsed()) return cmd_phi(g, in_path, out);
    if (pf->parsed()) return cmd_product_free(g, in_path, pf_moduli, out);
    if (section->parsed()) return cmd_section(g, in_path, section_set, section_axis, out);
    if (greedy->parsed()) return cmd_greedy(g, greedy_n, tracker_specs, greedy_steps, trace_path, out, err);
    if (oc->parsed()) return cmd_oracle_count(g, oc_n, oc_threads, out);
    if (op->parsed()) return cmd_oracle_prob(g, op_n, op_boxes, op_all, op_samples, op_c, out);
    if (scan_eps->parsed()) return cmd_scan_eps(g, scan_ns, scan_samples, out);
    if (scan_cube->parsed()) return cmd_scan_cube(g, scan_ns, scan_samples, cube_constant, out);
  } catch (const InvalidObject& e) {
    err << "invalid: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const RestartBudgetExhausted& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace latdisc::cli

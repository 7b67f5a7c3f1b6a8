#include "latdisc/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "latdisc/error.hpp"

namespace latdisc {

namespace {

struct Line {
  std::size_t number;
  std::vector<long long> values;
};

std::vector<long long> parse_numbers(std::string_view text, std::size_t line_no) {
  std::vector<long long> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\r')) ++i;
    if (i >= text.size()) break;
    long long v = 0;
    const auto* first = text.data() + i;
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || (ptr != last && *ptr != ' ' && *ptr != '\t' && *ptr != '\r')) {
      throw ParseError("expected an integer, found '" + std::string(text.substr(i, 16)) + "'", line_no);
    }
    out.push_back(v);
    i += static_cast<std::size_t>(ptr - first);
  }
  return out;
}

// Non-blank lines with their 1-based line numbers.
std::vector<Line> numeric_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    ++line_no;
    auto values = parse_numbers(text.substr(pos, end - pos), line_no);
    if (!values.empty()) lines.push_back({line_no, std::move(values)});
    if (end == text.size()) break;
    pos = end + 1;
  }
  return lines;
}

int checked_int(long long v, long long lo, long long hi, const char* what, std::size_t line_no) {
  if (v < lo || v > hi) {
    throw ParseError(std::string(what) + " " + std::to_string(v) + " outside " + std::to_string(lo) + ".." +
                         std::to_string(hi), line_no);
  }
  return static_cast<int>(v);
}

constexpr long long kMaxOrder = 1 << 21;

int header_order(const std::vector<Line>& lines) {
  if (lines.empty()) throw ParseError("empty input", 0);
  if (lines[0].values.size() != 1) throw ParseError("header must hold the single number n", lines[0].number);
  return checked_int(lines[0].values[0], 1, kMaxOrder, "order", lines[0].number);
}

}  // namespace

RawGrid parse_grid(std::string_view text) {
  const auto lines = numeric_lines(text);
  RawGrid g;
  g.n = header_order(lines);
  const auto un = static_cast<std::size_t>(g.n);
  if (lines.size() != un + 1) {
    throw ParseError("expected " + std::to_string(un) + " rows, found " + std::to_string(lines.size() - 1), 0);
  }
  g.cells.reserve(un * un);
  for (std::size_t r = 1; r <= un; ++r) {
    if (lines[r].values.size() != un) {
      throw ParseError("row " + std::to_string(r) + " has " + std::to_string(lines[r].values.size()) +
                           " entries, expected " + std::to_string(un), lines[r].number);
    }
    // Out-of-range symbols are kept so the structural check can name them.
    for (long long v : lines[r].values) g.cells.push_back(static_cast<int>(std::clamp(v, -1LL, kMaxOrder)) - 1);
  }
  return g;
}

LatinSquare parse_latin(std::string_view text) {
  auto g = parse_grid(text);
  return LatinSquare(g.n, std::move(g.cells));
}

std::string format_latin(const LatinSquare& ls) {
  std::string out = std::to_string(ls.order()) + "\n";
  for (int r = 0; r < ls.order(); ++r) {
    for (int c = 0; c < ls.order(); ++c) {
      if (c != 0) out += ' ';
      out += std::to_string(ls.at(r, c) + 1);
    }
    out += '\n';
  }
  return out;
}

PermTensor parse_tensor(std::string_view text) {
  const auto lines = numeric_lines(text);
  if (lines.empty()) throw ParseError("empty input", 0);
  if (lines[0].values.size() != 2) throw ParseError("tensor header must be \"d n\"", lines[0].number);
  const int d = checked_int(lines[0].values[0], 1, 64, "dimension", lines[0].number);
  const int n = checked_int(lines[0].values[1], 1, kMaxOrder, "order", lines[0].number);
  std::vector<std::vector<int>> points;
  points.reserve(lines.size() - 1);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    if (lines[k].values.size() != static_cast<std::size_t>(d + 1)) {
      throw ParseError("support point needs " + std::to_string(d + 1) + " coordinates", lines[k].number);
    }
    std::vector<int> p;
    for (long long v : lines[k].values) p.push_back(checked_int(v, 1, n, "coordinate", lines[k].number) - 1);
    points.push_back(std::move(p));
  }
  return PermTensor(d, n, std::move(points));
}

std::string format_tensor(const PermTensor& t) {
  std::string out = std::to_string(t.dimension()) + " " + std::to_string(t.order()) + "\n";
  for (std::size_t k = 0; k < t.size(); ++k) {
    const auto p = t.point(k);
    for (std::size_t a = 0; a < p.size(); ++a) {
      if (a != 0) out += ' ';
      out += std::to_string(p[a] + 1);
    }
    out += '\n';
  }
  return out;
}

RawTriples parse_triples(std::string_view text) {
  const auto lines = numeric_lines(text);
  RawTriples raw;
  raw.n = header_order(lines);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    if (lines[k].values.size() != 3) throw ParseError("a triple line needs exactly 3 points", lines[k].number);
    Triple t{};
    for (std::size_t a = 0; a < 3; ++a) t[a] = checked_int(lines[k].values[a], 1, raw.n, "point", lines[k].number) - 1;
    raw.triples.push_back(t);
  }
  return raw;
}

TripleSystem parse_sts(std::string_view text) {
  auto raw = parse_triples(text);
  for (std::size_t k = 0; k < raw.triples.size(); ++k) {
    const auto& t = raw.triples[k];
    if (!(t[0] < t[1] && t[1] < t[2])) {
      throw InvalidObject("triple " + std::to_string(k + 1) + " is not written in increasing order");
    }
  }
  return TripleSystem(raw.n, std::move(raw.triples));
}

std::string format_sts(const TripleSystem& x) {
  std::string out = std::to_string(x.order()) + "\n";
  for (const auto& t : x.triples()) {
    out += std::to_string(t[0] + 1) + " " + std::to_string(t[1] + 1) + " " + std::to_string(t[2] + 1) + "\n";
  }
  return out;
}

FileKind detect_kind(std::string_view text) {
  const auto lines = numeric_lines(text);
  if (lines.empty()) throw ParseError("empty input", 0);
  if (lines[0].values.size() == 2) return FileKind::tensor;
  if (lines[0].values.size() != 1) throw ParseError("unrecognised header", lines[0].number);
  const long long n = lines[0].values[0];
  if (n >= 1 && lines.size() == static_cast<std::size_t>(n) + 1) {
    bool square = true;
    for (std::size_t k = 1; k < lines.size() && square; ++k) square = lines[k].values.size() == static_cast<std::size_t>(n);
    if (square) return FileKind::latin;
  }
  return FileKind::sts;
}

GroupTable parse_moduli(std::string_view spec) {
  GroupTable g;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const std::size_t end = std::min(spec.find(',', pos), spec.size());
    const auto token = spec.substr(pos, end - pos);
    int v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size() || v < 1) {
      throw ParseError("invalid modulus '" + std::string(token) + "'", 0);
    }
    g.moduli.push_back(v);
    if (end == spec.size()) break;
    pos = end + 1;
  }
  (void)g.order();
  return g;
}

IndexSet parse_index_list(std::string_view spec, int universe) {
  IndexSet s(universe);
  if (spec.empty()) return s;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const std::size_t end = std::min(spec.find(',', pos), spec.size());
    const auto token = spec.substr(pos, end - pos);
    int v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      throw ParseError("invalid index '" + std::string(token) + "'", 0);
    }
    if (v < 1 || v > universe) {
      throw ParseError("index " + std::to_string(v) + " outside 1.." + std::to_string(universe), 0);
    }
    s.insert(v - 1);
    if (end == spec.size()) break;
    pos = end + 1;
  }
  return s;
}

std::string format_index_list(const IndexSet& s) {
  std::string out;
  s.for_each([&](int i) {
    if (!out.empty()) out += ',';
    out += std::to_string(i + 1);
  });
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace latdisc

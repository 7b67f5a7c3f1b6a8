#pragma once

// Text formats, all 1-based:
//   Latin square:  "n" then n lines of n space-separated symbols.
//   Tensor:        "d n" then one line of d+1 coordinates per support point.
//   Triple system: "n" then one "i j k" line per triple with i < j < k.
// Writers emit exactly the layout above, so canonical files round-trip
// byte for byte.

#include <string>
#include <string_view>
#include <vector>

#include "latdisc/core.hpp"
#include "latdisc/generators.hpp"

namespace latdisc {

struct RawGrid {
  int n = 0;
  std::vector<int> cells;  // 0-based, unchecked
};

struct RawTriples {
  int n = 0;
  std::vector<Triple> triples;  // 0-based, as written (not sorted)
};

enum class FileKind { latin, tensor, sts };

RawGrid parse_grid(std::string_view text);
LatinSquare parse_latin(std::string_view text);
std::string format_latin(const LatinSquare& ls);

PermTensor parse_tensor(std::string_view text);
std::string format_tensor(const PermTensor& t);

RawTriples parse_triples(std::string_view text);
/// Also enforces the i < j < k line format.
TripleSystem parse_sts(std::string_view text);
std::string format_sts(const TripleSystem& x);

/// A two-number header means a tensor; a single-number header followed by n
/// rows of n numbers a Latin square; anything else a triple system.
FileKind detect_kind(std::string_view text);

/// "3" or "2,2" -> moduli
GroupTable parse_moduli(std::string_view spec);

/// Comma-separated 1-based indices ("1,3,4"); empty string is the empty set.
IndexSet parse_index_list(std::string_view spec, int universe);
std::string format_index_list(const IndexSet& s);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace latdisc

#include "brute.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace brute {

namespace {

void extend(int n, int row, Grid& g, const std::vector<std::vector<int>>& perms, std::vector<Grid>& out) {
  if (row == n) {
    out.push_back(g);
    return;
  }
  for (const auto& p : perms) {
    bool ok = true;
    for (int j = 0; j < n && ok; ++j) {
      for (int r = 0; r < row && ok; ++r) ok = g[static_cast<std::size_t>(r * n + j)] != p[static_cast<std::size_t>(j)];
    }
    if (!ok) continue;
    for (int j = 0; j < n; ++j) g[static_cast<std::size_t>(row * n + j)] = p[static_cast<std::size_t>(j)];
    extend(n, row + 1, g, perms, out);
  }
}

bool empty_box(const Grid& g, int n, std::uint32_t x, std::uint32_t y, std::uint32_t z) {
  for (int i = 0; i < n; ++i) {
    if (!((x >> i) & 1U)) continue;
    for (int j = 0; j < n; ++j) {
      if (((y >> j) & 1U) && ((z >> g[static_cast<std::size_t>(i * n + j)]) & 1U)) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<Grid> all_squares(int n) {
  std::vector<std::vector<int>> perms;
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  do {
    perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  std::vector<Grid> out;
  Grid g(static_cast<std::size_t>(n * n), -1);
  extend(n, 0, g, perms, out);
  return out;
}

std::uint64_t eps(const Grid& g, int n) {
  std::uint64_t best = 0;
  const std::uint32_t lim = 1U << n;
  for (std::uint32_t x = 1; x < lim; ++x) {
    for (std::uint32_t y = 1; y < lim; ++y) {
      for (std::uint32_t z = 1; z < lim; ++z) {
        const std::uint64_t v = static_cast<std::uint64_t>(std::popcount(x)) * std::popcount(y) * std::popcount(z);
        if (v > best && empty_box(g, n, x, y, z)) best = v;
      }
    }
  }
  return best;
}

double disc(const Grid& g, int n) {
  double best = 0.0;
  const std::uint32_t lim = 1U << n;
  for (std::uint32_t x = 1; x < lim; ++x) {
    for (std::uint32_t y = 1; y < lim; ++y) {
      for (std::uint32_t z = 1; z < lim; ++z) {
        int count = 0;
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            if (((x >> i) & 1U) && ((y >> j) & 1U) && ((z >> g[static_cast<std::size_t>(i * n + j)]) & 1U)) ++count;
          }
        }
        const double vol = static_cast<double>(std::popcount(x)) * std::popcount(y) * std::popcount(z);
        best = std::max(best, std::abs(count - vol / n) / std::sqrt(vol));
      }
    }
  }
  return best;
}

int cube_side(const Grid& g, int n) {
  int best = 0;
  const std::uint32_t lim = 1U << n;
  for (std::uint32_t x = 1; x < lim; ++x) {
    for (std::uint32_t y = 1; y < lim; ++y) {
      if (std::popcount(x) != std::popcount(y) || std::popcount(x) <= best) continue;
      for (std::uint32_t z = 1; z < lim; ++z) {
        if (std::popcount(z) == std::popcount(x) && empty_box(g, n, x, y, z)) best = std::popcount(x);
      }
    }
  }
  return best;
}

std::uint64_t phi(int n, const std::vector<std::array<int, 3>>& triples) {
  std::uint64_t best = 0;
  const std::uint32_t lim = 1U << n;
  for (std::uint32_t a = 1; a < lim; ++a) {
    for (std::uint32_t b = 1; b < lim; ++b) {
      for (std::uint32_t c = 1; c < lim; ++c) {
        const std::uint64_t v = static_cast<std::uint64_t>(std::popcount(a)) * std::popcount(b) * std::popcount(c);
        if (v <= best) continue;
        bool empty = true;
        for (const auto& t : triples) {
          std::array<int, 3> p = t;
          std::sort(p.begin(), p.end());
          do {
            if (((a >> p[0]) & 1U) && ((b >> p[1]) & 1U) && ((c >> p[2]) & 1U)) empty = false;
          } while (empty && std::next_permutation(p.begin(), p.end()));
          if (!empty) break;
        }
        if (empty) best = v;
      }
    }
  }
  return best;
}

int product_free(const Grid& g, int n) {
  int best = 0;
  for (std::uint32_t s = 1; s < (1U << n); ++s) {
    if (std::popcount(s) <= best) continue;
    bool ok = true;
    for (int x = 0; x < n && ok; ++x) {
      for (int y = 0; y < n && ok; ++y) {
        if (((s >> x) & 1U) && ((s >> y) & 1U) && ((s >> g[static_cast<std::size_t>(x * n + y)]) & 1U)) ok = false;
      }
    }
    if (ok) best = std::popcount(s);
  }
  return best;
}

std::uint64_t constrained(int n, const MaskBox& b) {
  std::uint64_t count = 0;
  for (const auto& g : all_squares(n)) {
    if (b.x == 0 || b.y == 0 || b.z == 0 || empty_box(g, n, b.x, b.y, b.z)) ++count;
  }
  return count;
}

std::uint64_t section_scaled(const std::vector<std::uint32_t>& adj, int n, int k) {
  std::uint64_t best = 0;
  for (std::uint32_t a = 0; a < (1U << n); ++a) {
    for (std::uint32_t b = 0; b < (1U << n); ++b) {
      long long e = 0;
      for (int u = 0; u < n; ++u) {
        if ((a >> u) & 1U) e += std::popcount(adj[static_cast<std::size_t>(u)] & b);
      }
      const long long dev = static_cast<long long>(n) * e - static_cast<long long>(k) * std::popcount(a) * std::popcount(b);
      best = std::max<std::uint64_t>(best, static_cast<std::uint64_t>(dev < 0 ? -dev : dev));
    }
  }
  return best;
}

}  // namespace brute

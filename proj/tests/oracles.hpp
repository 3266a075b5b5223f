#pragma once

// Brute-force reference computations. Nothing here calls into the library's
// counting code; only the plain data types are shared.

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <set>
#include <vector>

#include "pil/padic.hpp"

namespace oracle {

using u64 = std::uint64_t;

inline u64 ipow(u64 p, unsigned e) {
  u64 r = 1;
  while (e--) r *= p;
  return r;
}

/// y == a x + b (mod p^level), on plain integers.
inline bool on_line(u64 p, unsigned level, u64 a, u64 b, u64 x, u64 y) {
  const u64 q = ipow(p, level);
  return (y % q + q * q - (a % q) * (x % q) % q - b % q) % q == 0;
}

inline bool contains(u64 p, const pil::Tube& t, const pil::Cube& c) { return on_line(p, t.level, t.a, t.b, c.x, c.y); }

/// Every level-m tube, enumerated by (a, b).
inline std::vector<pil::Tube> every_tube(u64 p, unsigned m) {
  std::vector<pil::Tube> out;
  const u64 q = ipow(p, m);
  for (u64 a = 0; a < q; ++a)
    for (u64 b = 0; b < q; ++b) out.push_back(pil::Tube{m, a, b});
  return out;
}

inline u64 common_tubes(u64 p, const pil::Cube& c1, const pil::Cube& c2) {
  u64 n = 0;
  for (const auto& t : every_tube(p, c1.level))
    if (contains(p, t, c1) && contains(p, t, c2)) ++n;
  return n;
}

/// Multiset expanded into a flat list.
template <class Set>
auto expand(const Set& s) {
  std::vector<typename Set::Entry> out;
  for (const auto& e : s.entries())
    for (u64 i = 0; i < e.multiplicity; ++i) out.push_back(e);
  return out;
}

/// sum over expanded cubes and tubes of w(p) [p in T], as a double.
inline double incidences(u64 p, const pil::CubeSet& P, const pil::TubeSet& T) {
  double total = 0;
  for (const auto& c : expand(P))
    for (const auto& t : expand(T))
      if (contains(p, t.cell, c.cell)) total += c.weight.to_double();
  return total;
}

inline pil::Cube reduce(u64 p, const pil::Cube& c, unsigned level) {
  const u64 q = ipow(p, level);
  return pil::Cube{level, c.x % q, c.y % q};
}

/// #{(p1, p2, T)} over ordered pairs of expanded cubes in different Delta-cells.
inline u64 triples(u64 p, const pil::CubeSet& P, unsigned delta) {
  const auto pts = expand(P);
  u64 J = 0;
  for (const auto& t : every_tube(p, P.level()))
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = 0; j < pts.size(); ++j) {
        if (i == j || reduce(p, pts[i].cell, delta) == reduce(p, pts[j].cell, delta)) continue;
        if (contains(p, t, pts[i].cell) && contains(p, t, pts[j].cell)) ++J;
      }
  return J;
}

inline u64 n_delta_b(u64 p, const pil::Tube& t, const pil::CubeSet& P, unsigned delta, u64 b) {
  std::map<pil::Cube, u64> per;
  for (const auto& c : expand(P))
    if (contains(p, t, c.cell)) ++per[reduce(p, c.cell, delta)];
  u64 n = 0;
  for (const auto& [q, k] : per)
    if (k >= b) ++n;
  return n;
}

using Grid = std::vector<std::complex<double>>;

/// Direct double sum with exp evaluated per term.
inline Grid dft(const Grid& f, u64 q) {
  Grid out(q * q);
  for (u64 k1 = 0; k1 < q; ++k1)
    for (u64 k2 = 0; k2 < q; ++k2) {
      std::complex<double> acc = 0;
      for (u64 x = 0; x < q; ++x)
        for (u64 y = 0; y < q; ++y) {
          const double phase = -2.0 * std::numbers::pi * static_cast<double>((k1 * x + k2 * y) % q) / q;
          acc += f[x * q + y] * std::exp(std::complex<double>(0, phase));
        }
      out[k1 * q + k2] = acc / static_cast<double>(q);
    }
  return out;
}

inline Grid convolve(const Grid& f, const Grid& g, u64 q) {
  Grid out(q * q);
  for (u64 x1 = 0; x1 < q; ++x1)
    for (u64 x2 = 0; x2 < q; ++x2)
      for (u64 y1 = 0; y1 < q; ++y1)
        for (u64 y2 = 0; y2 < q; ++y2)
          out[x1 * q + x2] += f[y1 * q + y2] * g[((x1 + q - y1) % q) * q + (x2 + q - y2) % q];
  return out;
}

/// Branching classes over the ladder; true when each step has a single class.
inline bool uniform(u64 p, const std::set<pil::Cube>& P, const std::vector<unsigned>& ladder) {
  for (std::size_t j = 1; j < ladder.size(); ++j) {
    std::map<pil::Cube, std::set<pil::Cube>> kids;
    for (const auto& c : P) kids[reduce(p, c, ladder[j - 1])].insert(reduce(p, c, ladder[j]));
    std::set<u64> classes;
    for (const auto& [q, k] : kids) {
      u64 N = p;
      while (N <= k.size()) N *= p;
      classes.insert(N);
    }
    if (classes.size() > 1) return false;
  }
  return true;
}

/// Largest uniform subset, by trying every subset (|P| <= 16).
inline std::size_t best_uniform_subset(u64 p, const std::vector<pil::Cube>& P, const std::vector<unsigned>& ladder) {
  std::size_t best = 0;
  for (u64 mask = 1; mask < (u64{1} << P.size()); ++mask) {
    std::set<pil::Cube> sub;
    for (std::size_t i = 0; i < P.size(); ++i)
      if (mask >> i & 1) sub.insert(P[i]);
    if (sub.size() > best && uniform(p, sub, ladder)) best = sub.size();
  }
  return best;
}

}  // namespace oracle

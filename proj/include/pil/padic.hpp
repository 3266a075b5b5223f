#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pil/rational.hpp"

namespace pil {

using Residue = std::uint64_t;

/// The grid (Z/p^n Z)^2: a prime p in [2, 13] and a top level n >= 1 with
/// p^{2n} <= 2^40, so the finest scale is delta = p^{-n}.
class Ambient {
 public:
  static constexpr unsigned kMaxPrime = 13;

  Ambient(unsigned p, unsigned n);

  unsigned p() const { return p_; }
  unsigned n() const { return n_; }

  /// p^level for 0 <= level <= n.
  Residue modulus(unsigned level) const {
    if (level > n_) throw std::out_of_range("level above top level");
    return pow_[level];
  }
  Residue top_modulus() const { return pow_[n_]; }

  /// min(v_p(x mod p^level), level); equals `level` iff x == 0 mod p^level.
  unsigned valuation(Residue x, unsigned level) const;

  Residue reduce(Residue x, unsigned level) const { return x % modulus(level); }
  Residue sub(Residue a, Residue b, unsigned level) const {
    const Residue q = modulus(level);
    a %= q;
    b %= q;
    return a >= b ? a - b : a + q - b;
  }
  Residue add(Residue a, Residue b, unsigned level) const { return (a % modulus(level) + b % modulus(level)) % modulus(level); }
  Residue mul(Residue a, Residue b, unsigned level) const {
    const Residue q = modulus(level);
    return (a % q) * (b % q) % q;  // residues < 2^20, product fits
  }

  friend bool operator==(const Ambient& a, const Ambient& b) { return a.p_ == b.p_ && a.n_ == b.n_; }

 private:
  unsigned p_;
  unsigned n_;
  std::array<Residue, 41> pow_{};
};

/// norm exponent v with ||x|| = p^{-v}; v == n iff x == 0.
unsigned valuation_norm(Residue x, const Ambient& amb);

/// A level-m cube: the residue class (x, y) mod p^m.
struct Cube {
  unsigned level = 0;
  Residue x = 0;
  Residue y = 0;
  friend auto operator<=>(const Cube&, const Cube&) = default;
};

/// A level-m tube: points with y == a*x + b (mod p^m).
struct Tube {
  unsigned level = 0;
  Residue a = 0;
  Residue b = 0;
  friend auto operator<=>(const Tube&, const Tube&) = default;
};

struct CubeHash {
  std::size_t operator()(const Cube& c) const noexcept {
    return std::hash<std::uint64_t>{}((c.x * 0x9E3779B97F4A7C15ULL) ^ (c.y + (std::uint64_t{c.level} << 58)));
  }
};
struct TubeHash {
  std::size_t operator()(const Tube& t) const noexcept {
    return std::hash<std::uint64_t>{}((t.a * 0x9E3779B97F4A7C15ULL) ^ (t.b + (std::uint64_t{t.level} << 58)));
  }
};

Cube make_cube(const Ambient& amb, unsigned level, Residue x, Residue y);
Tube make_tube(const Ambient& amb, unsigned level, Residue a, Residue b);

/// Point-line duality: the parameter cube (a, b) maps to the tube y = a x + b.
inline Tube duality(const Cube& c) { return Tube{c.level, c.x, c.y}; }
inline Cube dual_parameters(const Tube& t) { return Cube{t.level, t.a, t.b}; }

/// Whether tube t contains cube c; requires level(c) >= level(t).
bool tube_contains(const Ambient& amb, const Tube& t, const Cube& c);

Cube parent(const Ambient& amb, const Cube& c, unsigned level);
Tube parent(const Ambient& amb, const Tube& t, unsigned level);

/// Distance exponent k with dist = p^{-k}; std::nullopt for coincident cubes.
std::optional<unsigned> cube_distance(const Ambient& amb, const Cube& c1, const Cube& c2);

/// Number of tubes at the cubes' level containing both (distinct) cubes.
Residue count_common_tubes(const Ambient& amb, const Cube& c1, const Cube& c2);

/// Cubes of level `level` (>= t.level) lying in t, ordered by x.
std::vector<Cube> cubes_in_tube(const Ambient& amb, const Tube& t, unsigned level);

// Text forms "p^m:(x,y)" and "p^m:[a,b]".
std::string to_text(const Ambient& amb, const Cube& c);
std::string to_text(const Ambient& amb, const Tube& t);
Cube parse_cube(const Ambient& amb, std::string_view text);
Tube parse_tube(const Ambient& amb, std::string_view text);

/// Finite multiset of same-level cells kept as a sorted list with
/// multiplicity counters and an exact nonnegative weight per distinct cell.
template <class Cell>
class CellSet {
 public:
  struct Entry {
    Cell cell;
    std::uint64_t multiplicity = 1;
    Rational weight{1};
  };

  CellSet(Ambient amb, unsigned level) : amb_(amb), level_(level) {
    if (level > amb.n()) throw std::invalid_argument("cell set level above ambient top level");
  }

  /// Builds from a list that may repeat cells; repeats become multiplicity.
  static CellSet from_cells(Ambient amb, unsigned level, std::span<const Cell> cells) {
    CellSet s(amb, level);
    std::vector<Cell> sorted(cells.begin(), cells.end());
    std::sort(sorted.begin(), sorted.end());
    for (const Cell& c : sorted) {
      s.check_level(c);
      if (!s.entries_.empty() && s.entries_.back().cell == c) {
        ++s.entries_.back().multiplicity;
      } else {
        s.entries_.push_back(Entry{c, 1, Rational(1)});
      }
    }
    return s;
  }

  const Ambient& ambient() const { return amb_; }
  unsigned level() const { return level_; }
  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t distinct_size() const { return entries_.size(); }
  std::uint64_t total_multiplicity() const {
    std::uint64_t t = 0;
    for (const auto& e : entries_) t += e.multiplicity;
    return t;
  }
  bool weighted() const { return weighted_; }

  void insert(const Cell& c, std::uint64_t multiplicity = 1) {
    if (multiplicity == 0) throw std::invalid_argument("multiplicity must be positive");
    check_level(c);
    auto it = lower(c);
    if (it != entries_.end() && it->cell == c) {
      it->multiplicity += multiplicity;
    } else {
      entries_.insert(it, Entry{c, multiplicity, Rational(1)});
    }
  }

  void set_weight(const Cell& c, Rational w) {
    if (w < Rational(0)) throw std::invalid_argument("weights must be nonnegative");
    auto it = lower(c);
    if (it == entries_.end() || !(it->cell == c)) throw std::invalid_argument("weight for absent cell");
    it->weight = w;
    weighted_ = true;
  }

  bool contains(const Cell& c) const { return multiplicity(c) > 0; }
  std::uint64_t multiplicity(const Cell& c) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), c,
                               [](const Entry& e, const Cell& v) { return e.cell < v; });
    return (it != entries_.end() && it->cell == c) ? it->multiplicity : 0;
  }
  Rational weight(const Cell& c) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), c,
                               [](const Entry& e, const Cell& v) { return e.cell < v; });
    if (it == entries_.end() || !(it->cell == c)) throw std::invalid_argument("weight of absent cell");
    return it->weight;
  }

  std::vector<Cell> cells() const {
    std::vector<Cell> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.cell);
    return out;
  }

  friend bool operator==(const CellSet& a, const CellSet& b) {
    if (!(a.amb_ == b.amb_) || a.level_ != b.level_ || a.entries_.size() != b.entries_.size()) return false;
    for (std::size_t i = 0; i < a.entries_.size(); ++i) {
      const auto& x = a.entries_[i];
      const auto& y = b.entries_[i];
      if (!(x.cell == y.cell) || x.multiplicity != y.multiplicity || !(x.weight == y.weight)) return false;
    }
    return true;
  }

 private:
  void check_level(const Cell& c) const {
    if (c.level != level_) throw std::invalid_argument("cell level differs from set level");
  }
  typename std::vector<Entry>::iterator lower(const Cell& c) {
    return std::lower_bound(entries_.begin(), entries_.end(), c,
                            [](const Entry& e, const Cell& v) { return e.cell < v; });
  }

  Ambient amb_;
  unsigned level_;
  std::vector<Entry> entries_;
  bool weighted_ = false;
};

using CubeSet = CellSet<Cube>;
using TubeSet = CellSet<Tube>;

/// The p^level tubes through c, one per slope, as a set at c's level.
TubeSet tubes_through(const Ambient& amb, const Cube& c);

/// Every cube of the given level (p^{2 level} of them).
CubeSet full_grid(const Ambient& amb, unsigned level);

/// Every tube of the given level.
TubeSet all_tubes(const Ambient& amb, unsigned level);

}  // namespace pil

#include "pil/padic.hpp"

#include <charconv>
#include <string>

namespace pil {
namespace {

bool is_prime(unsigned p) {
  if (p < 2) return false;
  for (unsigned d = 2; d * d <= p; ++d) {
    if (p % d == 0) return false;
  }
  return true;
}

void require_same_level(const Cube& a, const Cube& b) {
  if (a.level != b.level) throw std::invalid_argument("cubes at different levels");
}

// Parses "p^m:" followed by an open char, two comma-separated residues and a close char.
struct ParsedCell {
  unsigned p;
  unsigned level;
  Residue u;
  Residue v;
};

ParsedCell parse_cell(std::string_view text, char open, char close) {
  auto fail = [&]() { throw std::invalid_argument("malformed cell literal: '" + std::string(text) + "'"); };
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  auto read_uint = [&](std::string_view& s, std::uint64_t& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr == s.data()) fail();
    s.remove_prefix(static_cast<std::size_t>(ptr - s.data()));
  };
  auto expect = [&](std::string_view& s, char c) {
    if (s.empty() || s.front() != c) fail();
    s.remove_prefix(1);
  };
  std::string_view s = text;
  std::uint64_t p = 0, m = 0, u = 0, v = 0;
  read_uint(s, p);
  expect(s, '^');
  read_uint(s, m);
  expect(s, ':');
  expect(s, open);
  read_uint(s, u);
  expect(s, ',');
  read_uint(s, v);
  expect(s, close);
  if (!s.empty()) fail();
  return ParsedCell{static_cast<unsigned>(p), static_cast<unsigned>(m), u, v};
}

}  // namespace

Ambient::Ambient(unsigned p, unsigned n) : p_(p), n_(n) {
  if (!is_prime(p) || p > kMaxPrime) throw std::invalid_argument("p must be a prime in [2, 13]");
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  pow_[0] = 1;
  for (unsigned i = 1; i <= n; ++i) {
    pow_[i] = pow_[i - 1] * p;
    if (pow_[i] > (Residue{1} << 20)) throw std::invalid_argument("p^{2n} exceeds 2^40");
  }
}

unsigned Ambient::valuation(Residue x, unsigned level) const {
  x %= modulus(level);
  if (x == 0) return level;
  unsigned v = 0;
  while (x % p_ == 0) {
    x /= p_;
    ++v;
  }
  return v;
}

unsigned valuation_norm(Residue x, const Ambient& amb) {
  if (x >= amb.top_modulus()) throw std::out_of_range("residue not reduced mod p^n");
  return amb.valuation(x, amb.n());
}

Cube make_cube(const Ambient& amb, unsigned level, Residue x, Residue y) {
  return Cube{level, amb.reduce(x, level), amb.reduce(y, level)};
}

Tube make_tube(const Ambient& amb, unsigned level, Residue a, Residue b) {
  return Tube{level, amb.reduce(a, level), amb.reduce(b, level)};
}

bool tube_contains(const Ambient& amb, const Tube& t, const Cube& c) {
  if (c.level < t.level) throw std::invalid_argument("cube coarser than tube");
  const unsigned m = t.level;
  return amb.reduce(c.y, m) == amb.add(amb.mul(t.a, c.x, m), t.b, m);
}

Cube parent(const Ambient& amb, const Cube& c, unsigned level) {
  if (level > c.level) throw std::invalid_argument("parent level finer than cube");
  return Cube{level, amb.reduce(c.x, level), amb.reduce(c.y, level)};
}

Tube parent(const Ambient& amb, const Tube& t, unsigned level) {
  if (level > t.level) throw std::invalid_argument("parent level finer than tube");
  return Tube{level, amb.reduce(t.a, level), amb.reduce(t.b, level)};
}

std::optional<unsigned> cube_distance(const Ambient& amb, const Cube& c1, const Cube& c2) {
  require_same_level(c1, c2);
  if (c1 == c2) return std::nullopt;
  const unsigned m = c1.level;
  return std::min(amb.valuation(amb.sub(c1.x, c2.x, m), m), amb.valuation(amb.sub(c1.y, c2.y, m), m));
}

Residue count_common_tubes(const Ambient& amb, const Cube& c1, const Cube& c2) {
  require_same_level(c1, c2);
  if (c1 == c2) throw std::invalid_argument("count_common_tubes on coincident cubes");
  const unsigned m = c1.level;
  // y1 - y2 == a (x1 - x2) mod p^m is solvable iff v(dy) >= v(dx) = j; then a is
  // fixed mod p^{m-j}, leaving p^j slopes.
  const unsigned j = amb.valuation(amb.sub(c1.x, c2.x, m), m);
  const unsigned vy = amb.valuation(amb.sub(c1.y, c2.y, m), m);
  if (vy < j) return 0;
  return amb.modulus(j);
}

std::vector<Cube> cubes_in_tube(const Ambient& amb, const Tube& t, unsigned level) {
  if (level < t.level) throw std::invalid_argument("cube level coarser than tube");
  const Residue q = amb.modulus(level);
  const Residue extra = amb.modulus(level - t.level);
  std::vector<Cube> out;
  out.reserve(q * extra);
  for (Residue x = 0; x < q; ++x) {
    const Residue base = amb.add(amb.mul(t.a, x, t.level), t.b, t.level);
    for (Residue k = 0; k < extra; ++k) {
      out.push_back(Cube{level, x, base + k * amb.modulus(t.level)});
    }
  }
  return out;
}

std::string to_text(const Ambient& amb, const Cube& c) {
  return std::to_string(amb.p()) + "^" + std::to_string(c.level) + ":(" + std::to_string(c.x) + "," +
         std::to_string(c.y) + ")";
}

std::string to_text(const Ambient& amb, const Tube& t) {
  return std::to_string(amb.p()) + "^" + std::to_string(t.level) + ":[" + std::to_string(t.a) + "," +
         std::to_string(t.b) + "]";
}

Cube parse_cube(const Ambient& amb, std::string_view text) {
  ParsedCell c = parse_cell(text, '(', ')');
  if (c.p != amb.p()) throw std::invalid_argument("cube literal prime differs from ambient");
  if (c.level > amb.n()) throw std::invalid_argument("cube literal level above top level");
  if (c.u >= amb.modulus(c.level) || c.v >= amb.modulus(c.level)) {
    throw std::invalid_argument("cube literal residues not reduced");
  }
  return Cube{c.level, c.u, c.v};
}

Tube parse_tube(const Ambient& amb, std::string_view text) {
  ParsedCell c = parse_cell(text, '[', ']');
  if (c.p != amb.p()) throw std::invalid_argument("tube literal prime differs from ambient");
  if (c.level > amb.n()) throw std::invalid_argument("tube literal level above top level");
  if (c.u >= amb.modulus(c.level) || c.v >= amb.modulus(c.level)) {
    throw std::invalid_argument("tube literal residues not reduced");
  }
  return Tube{c.level, c.u, c.v};
}

TubeSet tubes_through(const Ambient& amb, const Cube& c) {
  const unsigned m = c.level;
  std::vector<Tube> tubes;
  tubes.reserve(amb.modulus(m));
  for (Residue a = 0; a < amb.modulus(m); ++a) {
    tubes.push_back(Tube{m, a, amb.sub(c.y, amb.mul(a, c.x, m), m)});
  }
  return TubeSet::from_cells(amb, m, tubes);
}

CubeSet full_grid(const Ambient& amb, unsigned level) {
  const Residue q = amb.modulus(level);
  std::vector<Cube> cubes;
  cubes.reserve(q * q);
  for (Residue x = 0; x < q; ++x) {
    for (Residue y = 0; y < q; ++y) cubes.push_back(Cube{level, x, y});
  }
  return CubeSet::from_cells(amb, level, cubes);
}

TubeSet all_tubes(const Ambient& amb, unsigned level) {
  const Residue q = amb.modulus(level);
  std::vector<Tube> tubes;
  tubes.reserve(q * q);
  for (Residue a = 0; a < q; ++a) {
    for (Residue b = 0; b < q; ++b) tubes.push_back(Tube{level, a, b});
  }
  return TubeSet::from_cells(amb, level, tubes);
}

}  // namespace pil

#include "pil/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pil/setstats.hpp"

namespace pil {

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("empty range");
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % bound;
  }
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  SplitMix64 rng(master ^ (index * 0xD1B54A32D192ED03ULL));
  return rng.next();
}

std::vector<std::uint64_t> sample_without_replacement(SplitMix64& rng, std::uint64_t range, std::uint64_t count) {
  if (count > range) throw std::invalid_argument("sample larger than range");
  std::set<std::uint64_t> chosen;
  for (std::uint64_t j = range - count; j < range; ++j) {
    const std::uint64_t t = rng.below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return {chosen.begin(), chosen.end()};
}

DigitSet::DigitSet(unsigned p, std::vector<unsigned> digits) : p_(p), digits_(std::move(digits)) {
  std::sort(digits_.begin(), digits_.end());
  digits_.erase(std::unique(digits_.begin(), digits_.end()), digits_.end());
  if (digits_.empty()) throw std::invalid_argument("empty digit set");
  if (digits_.back() >= p) throw std::invalid_argument("digit out of range for base " + std::to_string(p));
}

DigitSet DigitSet::full(unsigned p) {
  std::vector<unsigned> d(p);
  for (unsigned i = 0; i < p; ++i) d[i] = i;
  return DigitSet(p, d);
}

DigitSet DigitSet::parse(unsigned p, std::string_view text) {
  std::vector<unsigned> d;
  std::string item;
  std::istringstream is{std::string(text)};
  while (std::getline(is, item, ',')) {
    if (item.empty()) throw std::invalid_argument("empty digit in list");
    std::size_t used = 0;
    const unsigned long v = std::stoul(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad digit '" + item + "'");
    d.push_back(static_cast<unsigned>(v));
  }
  return DigitSet(p, d);
}

Exponent DigitSet::dimension() const {
  if (digits_.size() == 1) return Exponent::rational(Rational(0));
  if (digits_.size() == p_) return Exponent::rational(Rational(1));
  return Exponent::log_of(digits_.size());
}

std::string DigitSet::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < digits_.size(); ++i) out += (i ? "," : "") + std::to_string(digits_[i]);
  return out;
}

std::vector<Residue> cantor_1d(const Ambient& amb, const DigitSet& digits, unsigned level) {
  if (digits.p() != amb.p()) throw std::invalid_argument("digit base differs from the ambient prime");
  if (level > amb.n()) throw std::invalid_argument("level above the ambient top level");
  std::vector<Residue> out{0};
  Residue place = 1;
  for (unsigned i = 0; i < level; ++i) {
    std::vector<Residue> next;
    next.reserve(out.size() * digits.size());
    for (Residue r : out) {
      for (unsigned d : digits.digits()) next.push_back(r + d * place);
    }
    out = std::move(next);
    place *= amb.p();
  }
  std::sort(out.begin(), out.end());
  return out;
}

Configuration product_config(const Ambient& amb, std::span<const Residue> A, std::span<const Residue> B,
                             std::span<const Residue> slopes) {
  if (A.empty() || B.empty() || slopes.empty()) throw std::invalid_argument("empty factor");
  const unsigned n = amb.n();
  Configuration cfg(amb, n);
  for (Residue x : A) {
    for (Residue y : B) {
      const Cube c = make_cube(amb, n, x, y);
      std::vector<Tube> family;
      family.reserve(slopes.size());
      for (Residue a : slopes) family.push_back(Tube{n, amb.reduce(a, n), amb.sub(c.y, amb.mul(a, c.x, n), n)});
      cfg.add(c, std::move(family));
    }
  }
  return cfg;
}

Configuration random_config(std::uint64_t seed, const Ambient& amb, std::uint64_t num_cubes, std::uint64_t M,
                            const DigitSet& slope_digits) {
  const unsigned n = amb.n();
  const Residue q = amb.top_modulus();
  if (num_cubes > q * q) throw std::invalid_argument("more cubes than the grid holds");
  if (M > q) throw std::invalid_argument("family size above p^n");
  const std::vector<Residue> pool = cantor_1d(amb, slope_digits, n);
  if (M > pool.size()) throw std::invalid_argument("family size above the slope pool");
  SplitMix64 rng(seed);
  Configuration cfg(amb, n);
  for (std::uint64_t idx : sample_without_replacement(rng, q * q, num_cubes)) {
    const Cube c{n, idx / q, idx % q};
    std::vector<Tube> family;
    for (std::uint64_t k : sample_without_replacement(rng, pool.size(), M)) {
      const Residue a = pool[k];
      family.push_back(Tube{n, a, amb.sub(c.y, amb.mul(a, c.x, n), n)});
    }
    cfg.add(c, std::move(family));
  }
  return cfg;
}

Configuration wolff_grid_config(const Ambient& amb, Residue step, std::uint64_t len) {
  if (step == 0 || len == 0) throw std::invalid_argument("empty progression");
  std::set<Residue> ap;
  for (std::uint64_t i = 0; i < len; ++i) ap.insert(amb.mul(step, i, amb.n()));
  const std::vector<Residue> v(ap.begin(), ap.end());
  return product_config(amb, v, v, v);
}

StrongSpacingReport strong_spacing_ratio(const CubeSet& P, const Exponent& s) {
  if (P.empty()) throw std::invalid_argument("strong spacing of an empty set");
  const unsigned n = P.level();
  const double p = P.ambient().p();
  const double sv = s.value(P.ambient().p());
  const double total = static_cast<double>(P.distinct_size());
  StrongSpacingReport rep;
  bool first = true;
  for (unsigned m = 0; m <= n; ++m) {
    const double rho = std::pow(p, -static_cast<double>(m));
    const double denom =
        std::max(std::pow(rho, 2.0 - sv) * total, std::pow(p, static_cast<double>(n - m) * sv));
    for (const auto& [q, count] : fiber_sizes(P, m)) {
      const double r = static_cast<double>(count) / denom;
      if (first || r > rep.max_ratio) {
        rep = StrongSpacingReport{r, m, q};
        first = false;
      }
    }
  }
  return rep;
}

}  // namespace pil

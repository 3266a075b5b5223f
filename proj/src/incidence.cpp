#include "pil/incidence.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "pil/exponent.hpp"
#include "pil/setstats.hpp"

namespace pil {
namespace {

void require_same_ambient(const Ambient& a, const Ambient& b) {
  if (!(a == b)) throw std::invalid_argument("ambient mismatch");
}

// One record per (cube entry, slope): the level-`level` tube through the cube.
template <class Fn>
void for_each_tube_through(const Ambient& amb, const Cube& c, unsigned level, Fn&& fn) {
  const Residue q = amb.modulus(level);
  const Residue x = amb.reduce(c.x, level);
  const Residue y = amb.reduce(c.y, level);
  for (Residue a = 0; a < q; ++a) fn(Tube{level, a, amb.sub(y, amb.mul(a, x, level), level)});
}

struct TubeCellCount {
  Tube tube;
  Cube cell;
  std::uint64_t count;
};

// For every tube at level(P) meeting P: the multiplicity-weighted count of P
// cubes on it inside each Delta-cell, sorted by (tube, cell).
std::vector<TubeCellCount> tube_cell_counts(const CubeSet& P, unsigned delta_level) {
  const Ambient& amb = P.ambient();
  std::vector<TubeCellCount> recs;
  recs.reserve(P.distinct_size() * amb.modulus(P.level()));
  for (const auto& e : P.entries()) {
    const Cube cell = parent(amb, e.cell, delta_level);
    for_each_tube_through(amb, e.cell, P.level(),
                          [&](const Tube& t) { recs.push_back(TubeCellCount{t, cell, e.multiplicity}); });
  }
  std::sort(recs.begin(), recs.end(), [](const TubeCellCount& l, const TubeCellCount& r) {
    return std::tie(l.tube, l.cell) < std::tie(r.tube, r.cell);
  });
  std::vector<TubeCellCount> merged;
  for (const auto& r : recs) {
    if (!merged.empty() && merged.back().tube == r.tube && merged.back().cell == r.cell) {
      merged.back().count += r.count;
    } else {
      merged.push_back(r);
    }
  }
  return merged;
}

}  // namespace

Rational incidence_count(const CubeSet& P, const TubeSet& T) {
  require_same_ambient(P.ambient(), T.ambient());
  if (T.level() > P.level()) throw std::invalid_argument("tubes finer than cubes");
  const Ambient& amb = P.ambient();
  Rational total(0);
  if (T.distinct_size() < amb.modulus(T.level())) {
    for (const auto& c : P.entries()) {
      std::uint64_t hits = 0;
      for (const auto& t : T.entries()) {
        if (tube_contains(amb, t.cell, c.cell)) hits += t.multiplicity;
      }
      if (hits > 0) total += c.weight * Rational(static_cast<std::int64_t>(hits * c.multiplicity));
    }
    return total;
  }
  std::unordered_map<Tube, std::uint64_t, TubeHash> mult;
  for (const auto& t : T.entries()) mult.emplace(t.cell, t.multiplicity);
  for (const auto& c : P.entries()) {
    std::uint64_t hits = 0;
    for_each_tube_through(amb, c.cell, T.level(), [&](const Tube& t) {
      if (auto it = mult.find(t); it != mult.end()) hits += it->second;
    });
    if (hits > 0) total += c.weight * Rational(static_cast<std::int64_t>(hits * c.multiplicity));
  }
  return total;
}

TubeSet thicken_tubes(const TubeSet& T, unsigned k) {
  if (k >= T.level()) throw std::invalid_argument("thickening exponent must be below the tube level");
  const unsigned level = T.level() - k;
  TubeSet out(T.ambient(), level);
  std::map<Tube, std::uint64_t> acc;
  for (const auto& e : T.entries()) acc[parent(T.ambient(), e.cell, level)] += e.multiplicity;
  for (const auto& [t, m] : acc) out.insert(t, m);
  return out;
}

std::uint64_t n_delta_b(const Tube& t, const CubeSet& P, unsigned delta_level, std::uint64_t b) {
  if (b < 1) throw std::invalid_argument("b must be at least 1");
  if (delta_level > P.level()) throw std::invalid_argument("Delta finer than the cubes");
  std::map<Cube, std::uint64_t> per_cell;
  for (const auto& e : P.entries()) {
    if (tube_contains(P.ambient(), t, e.cell)) per_cell[parent(P.ambient(), e.cell, delta_level)] += e.multiplicity;
  }
  std::uint64_t n = 0;
  for (const auto& [q, c] : per_cell) {
    if (c >= b) ++n;
  }
  return n;
}

std::string RichTubeStats::csv_header() { return "tube,N,a,b,delta,spacing_ok"; }

std::string RichTubeStats::csv_rows(const Ambient& amb) const {
  std::ostringstream os;
  for (const auto& r : tubes) {
    os << to_text(amb, r.tube) << "," << r.n_value << "," << a << "," << b << "," << delta_level << ","
       << (r.spacing_ok ? (*r.spacing_ok ? "1" : "0") : "") << "\n";
  }
  return os.str();
}

RichTubeStats rich_tubes(const CubeSet& P, unsigned delta_level, std::uint64_t a, std::uint64_t b,
                         const RichTubeOptions& options) {
  if (a < 1 || b < 1) throw std::invalid_argument("a and b must be at least 1");
  if (delta_level > P.level()) throw std::invalid_argument("Delta finer than the cubes");
  const Ambient& amb = P.ambient();
  if (options.candidates) {
    require_same_ambient(amb, options.candidates->ambient());
    if (options.candidates->level() != P.level()) throw std::invalid_argument("candidate tubes at wrong level");
  }
  RichTubeStats stats;
  stats.delta_level = delta_level;
  stats.a = a;
  stats.b = b;

  // Tubes missing P have N = 0, so scanning the tubes through P's cubes covers
  // every tube of the grid.
  const auto recs = tube_cell_counts(P, delta_level);
  for (std::size_t i = 0; i < recs.size();) {
    std::size_t j = i;
    std::uint64_t n = 0;
    while (j < recs.size() && recs[j].tube == recs[i].tube) {
      if (recs[j].count >= b) ++n;
      ++j;
    }
    const Tube& t = recs[i].tube;
    const bool candidate = !options.candidates || options.candidates->contains(t);
    if (candidate) {
      if (n >= 2) stats.sum_squares += n * n;
      if (n >= a) stats.tubes.push_back(RichTube{t, n, std::nullopt});
    }
    i = j;
  }

  if (options.eps) {
    // |T^r ∩ D_r(P)| per level-r tube, for r = 1..delta_level.
    std::vector<std::unordered_map<Tube, std::uint64_t, TubeHash>> on_tube(delta_level + 1);
    std::vector<std::uint64_t> cover(delta_level + 1, 0);
    for (unsigned r = 1; r <= delta_level; ++r) {
      const auto fibers = fiber_sizes(P, r);
      cover[r] = fibers.size();
      for (const auto& [q, cnt] : fibers) {
        for_each_tube_through(amb, q, r, [&](const Tube& t) { ++on_tube[r][t]; });
      }
    }
    const Exponent eps_exp = Exponent::rational(*options.eps);
    for (auto& rt : stats.tubes) {
      bool ok = true;
      for (unsigned r = 1; r <= delta_level && ok; ++r) {
        const std::uint64_t count = on_tube[r][parent(amb, rt.tube, r)];
        // count <= p^{delta_level eps} p^{-r} |D_r(P)|
        ScaledPower lhs{BigRational(BigInt(count) * BigInt(amb.modulus(r))), amb.p(), Rational(0)};
        ScaledPower rhs = ScaledPower::of(BigRational(BigInt(cover[r])), amb.p(), eps_exp, delta_level);
        ok = compare(lhs, rhs) <= 0;
      }
      rt.spacing_ok = ok;
    }
  }

  stats.J = triple_count_J(P, delta_level);

  const std::uint64_t total = P.total_multiplicity();
  if (total > 0) {
    Rational K(0);
    for (unsigned r = 0; r <= delta_level; ++r) {
      std::map<Cube, std::uint64_t> counts;
      for (const auto& e : P.entries()) counts[parent(amb, e.cell, r)] += e.multiplicity;
      for (const auto& [q, c] : counts) {
        Rational k(static_cast<std::int64_t>(c * amb.modulus(r)), static_cast<std::int64_t>(total));
        if (k > K) K = k;
      }
    }
    stats.K = K;
    const double log_term = delta_level * std::log(static_cast<double>(amb.p()));
    if (log_term > 0 && !stats.tubes.empty()) {
      const double ab = static_cast<double>(a) * static_cast<double>(b);
      stats.weak_rich_ratio = static_cast<double>(stats.tubes.size()) * ab * ab /
                              (K.to_double() * log_term * static_cast<double>(total) * static_cast<double>(total));
    }
  }
  return stats;
}

std::uint64_t triple_count_J_by_tubes(const CubeSet& P, unsigned delta_level) {
  if (delta_level > P.level()) throw std::invalid_argument("Delta finer than the cubes");
  const auto recs = tube_cell_counts(P, delta_level);
  std::uint64_t J = 0;
  for (std::size_t i = 0; i < recs.size();) {
    std::size_t j = i;
    std::uint64_t sum = 0, sq = 0;
    while (j < recs.size() && recs[j].tube == recs[i].tube) {
      sum += recs[j].count;
      sq += recs[j].count * recs[j].count;
      ++j;
    }
    // Ordered pairs on this tube lying in different Delta-cells.
    J += sum * sum - sq;
    i = j;
  }
  return J;
}

std::uint64_t triple_count_J_by_pairs(const CubeSet& P, unsigned delta_level) {
  if (delta_level > P.level()) throw std::invalid_argument("Delta finer than the cubes");
  const Ambient& amb = P.ambient();
  const auto& es = P.entries();
  std::vector<Cube> cells;
  cells.reserve(es.size());
  for (const auto& e : es) cells.push_back(parent(amb, e.cell, delta_level));
  std::uint64_t J = 0;
  for (std::size_t i = 0; i < es.size(); ++i) {
    for (std::size_t j = 0; j < es.size(); ++j) {
      if (i == j || cells[i] == cells[j]) continue;
      J += es[i].multiplicity * es[j].multiplicity * count_common_tubes(amb, es[i].cell, es[j].cell);
    }
  }
  return J;
}

std::uint64_t triple_count_J(const CubeSet& P, unsigned delta_level) {
  const std::uint64_t by_tubes = triple_count_J_by_tubes(P, delta_level);
  const std::uint64_t by_pairs = triple_count_J_by_pairs(P, delta_level);
  if (by_tubes != by_pairs) {
    throw std::logic_error("triple count mismatch: " + std::to_string(by_tubes) + " vs " + std::to_string(by_pairs));
  }
  return by_tubes;
}

std::optional<Tubelet> tubelet_of(const Ambient& amb, const Tube& t, const Cube& q) {
  if (q.level > t.level) throw std::invalid_argument("tubelet cell finer than tube");
  const unsigned n = t.level;
  const unsigned m = q.level;
  if (!tube_contains(amb, parent(amb, t, m), q)) return std::nullopt;
  // T ∩ Q = {(x_Q + p^m s, a x_Q + b + a p^m s)}: determined by a mod p^{n-m} and a x_Q + b mod p^n.
  return Tubelet{q, amb.reduce(t.a, n - m), amb.add(amb.mul(t.a, q.x, n), t.b, n)};
}

TubeletDecomposition tubelet_decompose(const TubeSet& Tset, const CubeSet& P, unsigned w_level,
                                       unsigned delta_level, std::uint64_t b) {
  require_same_ambient(Tset.ambient(), P.ambient());
  if (Tset.level() != P.level()) throw std::invalid_argument("tubes and cubes must share the fine level");
  if (w_level > P.level() || delta_level > P.level()) throw std::invalid_argument("scale finer than the cubes");
  if (b < 1) throw std::invalid_argument("b must be at least 1");
  const Ambient& amb = P.ambient();

  std::map<Cube, std::vector<const CubeSet::Entry*>> by_cell;
  for (const auto& e : P.entries()) by_cell[parent(amb, e.cell, w_level)].push_back(&e);

  struct Acc {
    Tube representative;
    std::uint64_t multiplicity = 0;
  };
  std::map<Tubelet, Acc> acc;
  for (const auto& [q, members] : by_cell) {
    for (const auto& t : Tset.entries()) {
      if (auto u = tubelet_of(amb, t.cell, q)) {
        auto [it, inserted] = acc.try_emplace(*u, Acc{t.cell, 0});
        it->second.multiplicity += t.multiplicity;
      }
    }
  }

  TubeletDecomposition out;
  out.w_level = w_level;
  out.delta_level = delta_level;
  out.b = b;
  for (const auto& [u, a] : acc) {
    std::map<Cube, std::uint64_t> per_cell;
    for (const auto* e : by_cell[u.cell]) {
      if (tube_contains(amb, a.representative, e->cell)) per_cell[parent(amb, e->cell, delta_level)] += e->multiplicity;
    }
    std::uint64_t n = 0;
    for (const auto& [c, cnt] : per_cell) {
      if (cnt >= b) ++n;
    }
    out.tubelets.push_back(TubeletEntry{u, n, a.multiplicity});
    out.total_multiplicity += a.multiplicity;
  }
  return out;
}

std::uint64_t tube_cell_incidences(const TubeSet& Tset, const CubeSet& P, unsigned w_level) {
  const Ambient& amb = P.ambient();
  const auto cells = fiber_sizes(P, w_level);
  std::uint64_t total = 0;
  for (const auto& t : Tset.entries()) {
    const Tube coarse = parent(amb, t.cell, w_level);
    for (const auto& [q, cnt] : cells) {
      if (tube_contains(amb, coarse, q)) total += t.multiplicity;
    }
  }
  return total;
}

std::vector<std::pair<Tube, std::uint64_t>> family_multiplicities(const Configuration& cfg) {
  std::map<Tube, std::uint64_t> mult;
  for (const auto& [c, family] : cfg.families) {
    for (const Tube& t : family) ++mult[t];
  }
  return {mult.begin(), mult.end()};
}

std::string FilterResult::csv_header() {
  return "theta,bad_tubes,retained_fraction,max_original_multiplicity,max_surviving_multiplicity";
}

std::string FilterResult::csv_row() const {
  std::ostringstream os;
  os.precision(17);
  os << theta << "," << bad_tubes.size() << "," << retained_fraction << "," << max_original_multiplicity << ","
     << max_surviving_multiplicity;
  return os.str();
}

FilterResult bad_tube_filter(const Configuration& cfg, double theta) {
  if (!(theta >= 1.0)) throw std::invalid_argument("theta must be at least 1");
  for (const auto& e : cfg.cubes.entries()) {
    if (cfg.family_size(e.cell) == 0) throw std::invalid_argument("cube without a family: " + to_text(cfg.amb, e.cell));
  }
  FilterResult out{Configuration(cfg.amb, cfg.level()), {}, theta, 0.0, 0, 0};
  std::set<Tube> bad;
  for (const auto& [t, m] : family_multiplicities(cfg)) {
    out.max_original_multiplicity = std::max(out.max_original_multiplicity, m);
    if (static_cast<double>(m) >= theta) bad.insert(t);
  }
  out.bad_tubes.assign(bad.begin(), bad.end());
  for (const auto& e : cfg.cubes.entries()) {
    const auto& family = cfg.families.at(e.cell);
    std::vector<Tube> kept;
    for (const Tube& t : family) {
      if (!bad.contains(t)) kept.push_back(t);
    }
    if (2 * kept.size() >= family.size()) {
      out.config.cubes.insert(e.cell, e.multiplicity);
      out.config.add(e.cell, std::move(kept));
    }
  }
  out.retained_fraction = cfg.cubes.empty() ? 0.0
                                            : static_cast<double>(out.config.cubes.distinct_size()) /
                                                  static_cast<double>(cfg.cubes.distinct_size());
  for (const auto& [t, m] : family_multiplicities(out.config)) {
    out.max_surviving_multiplicity = std::max(out.max_surviving_multiplicity, m);
  }
  return out;
}

}  // namespace pil

#include "pil/setstats.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace pil {

std::uint64_t covering_number(const CubeSet& P, unsigned level) {
  if (level > P.level()) throw std::invalid_argument("covering level finer than set level");
  std::set<Cube> parents;
  for (const auto& e : P.entries()) parents.insert(parent(P.ambient(), e.cell, level));
  return parents.size();
}

std::map<Cube, std::uint64_t> fiber_sizes(const CubeSet& P, unsigned level) {
  if (level > P.level()) throw std::invalid_argument("fiber level finer than set level");
  std::map<Cube, std::uint64_t> out;
  for (const auto& e : P.entries()) ++out[parent(P.ambient(), e.cell, level)];
  return out;
}

std::vector<ScaleMaximum> scale_maxima(const CubeSet& P) {
  std::vector<ScaleMaximum> out;
  for (unsigned m = 0; m <= P.level(); ++m) {
    ScaleMaximum best{m, 0, Cube{m, 0, 0}};
    for (const auto& [q, count] : fiber_sizes(P, m)) {
      if (count > best.count) best = ScaleMaximum{m, count, q};
    }
    out.push_back(best);
  }
  return out;
}

namespace {

ScaledPower constant_at(const SpacingCertificate::Kind kind, unsigned p, const Exponent& s, unsigned level,
                        std::uint64_t total, unsigned m, std::uint64_t count) {
  if (kind == SpacingCertificate::Kind::Frostman) {
    // count <= C p^{-ms} total  <=>  C >= count p^{ms} / total
    return ScaledPower::of(BigRational(BigInt(count), BigInt(total)), p, s, static_cast<std::int64_t>(m));
  }
  // count <= C (p^{n-m})^s  <=>  C >= count p^{-(n-m)s}
  return ScaledPower::of(BigRational(BigInt(count)), p, s,
                         static_cast<std::int64_t>(m) - static_cast<std::int64_t>(level));
}

SpacingCertificate certify(const CubeSet& P, const Exponent& s, SpacingCertificate::Kind kind) {
  if (P.empty()) throw std::invalid_argument("spacing certificate of an empty set");
  if (s.coeff < Rational(0)) throw std::invalid_argument("negative dimension exponent");
  const unsigned p = P.ambient().p();
  SpacingCertificate cert;
  cert.kind = kind;
  cert.s = s;
  cert.p = p;
  cert.delta_level = P.level();
  cert.covering = P.distinct_size();
  bool first = true;
  for (const ScaleMaximum& sm : scale_maxima(P)) {
    ScaledPower c = constant_at(kind, p, s, P.level(), cert.covering, sm.level, sm.count);
    if (first || compare(c, cert.c_min) > 0) {
      cert.c_min = c;
      cert.witness_level = sm.level;
      cert.witness = sm.witness;
      cert.witness_count = sm.count;
      first = false;
    }
  }
  return cert;
}

bool holds(const CubeSet& P, const Exponent& s, const ScaledPower& C, SpacingCertificate::Kind kind) {
  if (P.empty()) throw std::invalid_argument("spacing check of an empty set");
  const std::uint64_t total = P.distinct_size();
  for (const ScaleMaximum& sm : scale_maxima(P)) {
    if (compare(constant_at(kind, P.ambient().p(), s, P.level(), total, sm.level, sm.count), C) > 0) return false;
  }
  return true;
}

}  // namespace

std::string SpacingCertificate::to_record(const Ambient& amb) const {
  std::ostringstream os;
  os << "kind=" << (kind == Kind::Frostman ? "frostman" : "katz-tao") << " s=" << s.to_string()
     << " C_min=" << c_min.to_string() << " C_min_approx=" << c_min.to_double() << " scale=" << witness_level
     << " witness=" << to_text(amb, witness) << " witness_count=" << witness_count << " covering=" << covering;
  return os.str();
}

SpacingCertificate frostman_certificate(const CubeSet& P, const Exponent& s) {
  return certify(P, s, SpacingCertificate::Kind::Frostman);
}

SpacingCertificate katz_tao_certificate(const CubeSet& P, const Exponent& s) {
  return certify(P, s, SpacingCertificate::Kind::KatzTao);
}

bool frostman_holds(const CubeSet& P, const Exponent& s, const ScaledPower& C) {
  return holds(P, s, C, SpacingCertificate::Kind::Frostman);
}

bool katz_tao_holds(const CubeSet& P, const Exponent& s, const ScaledPower& C) {
  return holds(P, s, C, SpacingCertificate::Kind::KatzTao);
}

ScaledPower evaluate_witness(const CubeSet& P, const SpacingCertificate& cert) {
  std::uint64_t count = 0;
  for (const auto& e : P.entries()) {
    if (parent(P.ambient(), e.cell, cert.witness_level) == cert.witness) ++count;
  }
  return constant_at(cert.kind, cert.p, cert.s, cert.delta_level, P.distinct_size(), cert.witness_level, count);
}

bool covering_lower_bound_holds(const SpacingCertificate& cert) {
  // |P| * C >= p^{n s}
  ScaledPower lhs = cert.c_min.scaled(BigRational(BigInt(cert.covering)));
  ScaledPower rhs = ScaledPower::of(BigRational(1), cert.p, cert.s, cert.delta_level);
  return compare(lhs, rhs) >= 0;
}

std::uint64_t power_class_ceiling(std::uint64_t count, unsigned p) {
  if (count == 0) throw std::invalid_argument("power class of zero");
  std::uint64_t n = p;
  while (n <= count) n *= p;
  return n;
}

unsigned power_class(std::uint64_t count, unsigned p) {
  if (count == 0) throw std::invalid_argument("power class of zero");
  unsigned k = 0;
  while (count >= p) {
    count /= p;
    ++k;
  }
  return k;
}

UniformityResult uniformity_check_ladder(const CubeSet& P, const std::vector<unsigned>& ladder) {
  if (ladder.size() < 2 || ladder.front() != 0 || ladder.back() != P.level()) {
    throw std::invalid_argument("ladder must run from level 0 to the set level");
  }
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    if (ladder[i] <= ladder[i - 1]) throw std::invalid_argument("ladder must be strictly increasing");
  }
  if (P.empty()) return UniformityResult{};
  const Ambient& amb = P.ambient();
  BranchingProfile profile;
  profile.ladder = ladder;
  for (std::size_t j = 1; j < ladder.size(); ++j) {
    std::set<Cube> children;
    for (const auto& e : P.entries()) children.insert(parent(amb, e.cell, ladder[j]));
    std::map<Cube, std::uint64_t> branching;
    for (const Cube& c : children) ++branching[parent(amb, c, ladder[j - 1])];
    std::uint64_t cls = 0;
    for (const auto& [q, count] : branching) {
      const std::uint64_t c = power_class_ceiling(count, amb.p());
      if (cls == 0) cls = c;
      if (c != cls) return UniformityResult{};
    }
    profile.counts.push_back(cls);
  }
  return UniformityResult{true, profile};
}

UniformityResult uniformity_check(const CubeSet& P, unsigned block, unsigned levels) {
  if (block == 0 || levels == 0) throw std::invalid_argument("block and level count must be positive");
  if (P.level() % block != 0 || P.level() / block != levels) {
    throw std::invalid_argument("set level is not block * levels");
  }
  std::vector<unsigned> ladder;
  for (unsigned j = 0; j <= levels; ++j) ladder.push_back(j * block);
  return uniformity_check_ladder(P, ladder);
}

BoxDimFit box_dim_fit(const CubeSet& P, unsigned lo, unsigned hi) {
  if (hi <= lo) throw std::invalid_argument("box dimension fit needs at least two levels");
  if (hi > P.level()) throw std::invalid_argument("fit range above set level");
  if (P.empty()) throw std::invalid_argument("box dimension of an empty set");
  BoxDimFit fit;
  fit.lo = lo;
  fit.hi = hi;
  const double lp = std::log(static_cast<double>(P.ambient().p()));
  std::vector<double> xs, ys;
  for (unsigned m = lo; m <= hi; ++m) {
    fit.counts.push_back(covering_number(P, m));
    xs.push_back(m);
    ys.push_back(std::log(static_cast<double>(fit.counts.back())) / lp);
  }
  const double k = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  fit.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / k;
  for (std::size_t i = 0; i < xs.size(); ++i) fit.residuals.push_back(ys[i] - (fit.intercept + fit.slope * xs[i]));
  fit.exact_fit = true;
  for (std::size_t i = 1; i + 1 < fit.counts.size(); ++i) {
    const unsigned __int128 mid = static_cast<unsigned __int128>(fit.counts[i]) * fit.counts[i];
    const unsigned __int128 outer = static_cast<unsigned __int128>(fit.counts[i - 1]) * fit.counts[i + 1];
    if (mid != outer) fit.exact_fit = false;
  }
  if (fit.exact_fit) {
    // Collinear in exact arithmetic; clear the floating-point noise.
    for (double& r : fit.residuals) r = 0.0;
  }
  return fit;
}

}  // namespace pil

#include "pil/multiscale.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pil {
namespace {

CubeSet parameter_set(const Configuration& cfg, const std::vector<Tube>& family) {
  CubeSet out(cfg.amb, cfg.level());
  for (const Tube& t : family) out.insert(dual_parameters(t));
  return out;
}

std::vector<Tube> tubes_of(const CubeSet& params) {
  std::vector<Tube> out;
  for (const auto& e : params.entries()) out.push_back(duality(e.cell));
  return out;
}

/// Picks the key with the largest mass, ties to the smaller key.
template <class Key>
Key best_class(const std::map<Key, std::uint64_t>& mass) {
  if (mass.empty()) throw std::logic_error("pigeonhole over no classes");
  auto best = mass.begin();
  for (auto it = mass.begin(); it != mass.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

std::uint64_t family_mass(const std::map<Cube, std::vector<Tube>>& families) {
  std::uint64_t m = 0;
  for (const auto& [c, f] : families) m += f.size();
  return m;
}

double safe_ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double default_slack(unsigned level) {
  const double l = static_cast<double>(level) + 1.0;
  return l * l * l;
}

std::string NiceCertificate::to_record(const Ambient& amb) const {
  std::ostringstream os;
  os << "kind=nice s=" << s.to_string() << " C=" << C.to_string() << " C_approx=" << C.to_double()
     << " worst_cube=" << to_text(amb, worst_cube) << " M_min=" << M_min << " M_max=" << M_max
     << " similar_factor=" << similar_factor << " sigma=" << sigma.to_string() << " nice=" << (nice ? 1 : 0)
     << " size_bound_ok=" << (size_bound_ok ? 1 : 0);
  return os.str();
}

NiceCertificate nice_certify(const Configuration& cfg, const Exponent& s, Rational sigma) {
  if (cfg.cubes.empty()) throw std::invalid_argument("nice certificate of an empty configuration");
  NiceCertificate cert;
  cert.s = s;
  cert.sigma = sigma;
  bool first = true;
  for (const auto& e : cfg.cubes.entries()) {
    auto it = cfg.families.find(e.cell);
    if (it == cfg.families.end() || it->second.empty()) {
      throw std::invalid_argument("empty family at " + to_text(cfg.amb, e.cell));
    }
    const std::uint64_t size = it->second.size();
    const SpacingCertificate fc = frostman_certificate(parameter_set(cfg, it->second), s);
    if (first || compare(fc.c_min, cert.C) > 0) {
      cert.C = fc.c_min;
      cert.worst_cube = e.cell;
    }
    cert.M_min = first ? size : std::min(cert.M_min, size);
    cert.M_max = first ? size : std::max(cert.M_max, size);
    first = false;
  }
  cert.similar_factor = safe_ratio(cert.M_max, cert.M_min);
  cert.nice = Rational(static_cast<std::int64_t>(cert.M_max)) <= sigma * Rational(static_cast<std::int64_t>(cert.M_min));
  const ScaledPower lhs = cert.C.scaled(BigRational(BigInt(cert.M_min)));
  const ScaledPower rhs = ScaledPower::of(BigRational(1), cfg.amb.p(), s, cfg.level());
  cert.size_bound_ok = compare(lhs, rhs) >= 0;
  return cert;
}

UniformizeResult uniformize_ladder(const CubeSet& P, const std::vector<unsigned>& ladder) {
  if (P.empty()) throw std::invalid_argument("uniformizing an empty set");
  if (ladder.size() < 2 || ladder.front() != 0 || ladder.back() != P.level()) {
    throw std::invalid_argument("ladder must run from level 0 to the set level");
  }
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    if (ladder[i] <= ladder[i - 1]) throw std::invalid_argument("ladder must be strictly increasing");
  }
  const Ambient& amb = P.ambient();
  const unsigned p = amb.p();
  std::vector<Cube> alive = P.cells();
  UniformizeResult res(CubeSet(amb, P.level()));
  res.profile.ladder = ladder;
  res.profile.counts.assign(ladder.size() - 1, 0);
  res.guaranteed = 1.0;

  for (std::size_t j = ladder.size() - 1; j >= 1; --j) {
    const unsigned fine = ladder[j];
    const unsigned coarse = ladder[j - 1];
    std::map<Cube, std::set<Cube>> children;
    std::map<Cube, std::uint64_t> mass;
    for (const Cube& c : alive) {
      const Cube q = parent(amb, c, coarse);
      children[q].insert(parent(amb, c, fine));
      ++mass[q];
    }
    std::map<std::uint64_t, std::uint64_t> class_mass;
    std::map<Cube, std::uint64_t> cls;
    for (const auto& [q, kids] : children) {
      cls[q] = power_class_ceiling(kids.size(), p);
      class_mass[cls[q]] += mass[q];
    }
    const std::uint64_t keep = best_class(class_mass);
    std::vector<Cube> next;
    for (const Cube& c : alive) {
      if (cls[parent(amb, c, coarse)] == keep) next.push_back(c);
    }
    res.stages.push_back(UniformizeStage{coarse, fine, keep, alive.size(), next.size()});
    res.profile.counts[j - 1] = keep;
    res.guaranteed /= 2.0 * (fine - coarse) + 1.0;
    alive = std::move(next);
  }

  for (const Cube& c : alive) {
    res.kept.insert(c, P.multiplicity(c));
    if (P.weighted()) res.kept.set_weight(c, P.weight(c));
  }
  res.ratio = safe_ratio(alive.size(), P.distinct_size());
  // |P'| prod (2 d_j + 1) >= |P|, in integers.
  unsigned __int128 scaled = alive.size();
  for (std::size_t j = 1; j < ladder.size(); ++j) scaled *= 2 * (ladder[j] - ladder[j - 1]) + 1;
  res.meets_guarantee = scaled >= P.distinct_size();
  return res;
}

UniformizeResult uniformize(const CubeSet& P, unsigned block, unsigned levels) {
  if (block == 0 || levels == 0) throw std::invalid_argument("block and level count must be positive");
  if (P.level() != block * levels) throw std::invalid_argument("set level is not block * levels");
  std::vector<unsigned> ladder;
  for (unsigned j = 0; j <= levels; ++j) ladder.push_back(j * block);
  UniformizeResult res = uniformize_ladder(P, ladder);
  const double pT = static_cast<double>(P.ambient().p()) * block;
  res.block_bound = std::pow(pT, -static_cast<double>(levels));
  unsigned __int128 scaled = res.kept.distinct_size();
  for (unsigned j = 0; j < levels; ++j) scaled *= static_cast<unsigned __int128>(P.ambient().p()) * block;
  res.meets_block_bound = scaled >= P.distinct_size();
  return res;
}

RefinementReport refinement_check(const CubeSet& sub, const CubeSet& P, std::optional<unsigned> delta_level,
                                  std::optional<double> slack) {
  if (!(sub.ambient() == P.ambient()) || sub.level() != P.level()) {
    throw std::invalid_argument("refinement on a different grid");
  }
  for (const auto& e : sub.entries()) {
    if (P.multiplicity(e.cell) < e.multiplicity) {
      throw std::invalid_argument("refinement not contained in the set: " + to_text(P.ambient(), e.cell));
    }
  }
  RefinementReport r;
  r.kind = delta_level ? RefinementKind::AtResolution : RefinementKind::Plain;
  r.slack = slack.value_or(default_slack(P.level()));
  r.covering_ratio = safe_ratio(sub.distinct_size(), P.distinct_size());
  r.valid = !sub.empty() && r.covering_ratio * r.slack >= 1.0;
  if (!r.valid) r.reason = "covering ratio below 1/slack";
  if (delta_level) {
    if (*delta_level > P.level()) throw std::invalid_argument("Delta finer than the set");
    const Ambient& amb = P.ambient();
    std::set<Cube> cells;
    for (const auto& e : sub.entries()) cells.insert(parent(amb, e.cell, *delta_level));
    for (const auto& e : P.entries()) {
      if (cells.contains(parent(amb, e.cell, *delta_level)) && sub.multiplicity(e.cell) != e.multiplicity) {
        r.valid = false;
        r.reason = "fiber over " + to_text(amb, parent(amb, e.cell, *delta_level)) + " is not full";
        break;
      }
    }
  }
  return r;
}

RefinementReport configuration_refinement_check(const Configuration& cfg, const Configuration& cfg0,
                                                std::optional<double> slack) {
  RefinementReport r = refinement_check(cfg.cubes, cfg0.cubes, std::nullopt, slack);
  r.kind = RefinementKind::Nice;
  std::uint64_t m0 = 0;
  for (const auto& [c, f] : cfg0.families) m0 = std::max<std::uint64_t>(m0, f.size());
  std::uint64_t mass = 0;
  for (const auto& e : cfg.cubes.entries()) {
    const auto it = cfg.families.find(e.cell);
    const auto it0 = cfg0.families.find(e.cell);
    const std::size_t size = it == cfg.families.end() ? 0 : it->second.size();
    const std::size_t size0 = it0 == cfg0.families.end() ? 0 : it0->second.size();
    if (size > 0) {
      if (size0 == 0 || !std::includes(it0->second.begin(), it0->second.end(), it->second.begin(), it->second.end())) {
        r.valid = false;
        r.reason = "family at " + to_text(cfg.amb, e.cell) + " is not a subfamily";
      }
    }
    mass += size;
    r.family_factors.push_back(safe_ratio(size, size0));
  }
  r.mass_ratio = safe_ratio(mass, cfg0.cubes.distinct_size() * m0);
  if (r.valid && *r.mass_ratio * r.slack < 1.0) {
    r.valid = false;
    r.reason = "family mass below 1/slack";
  }
  return r;
}

NiceRefineResult nice_refine(const Configuration& cfg0, const NiceCertificate& cert0, const Configuration& cfg,
                             std::optional<double> slack) {
  (void)cert0;
  const RefinementReport input = configuration_refinement_check(cfg, cfg0, slack);
  if (!input.valid) throw std::invalid_argument("not a refinement: " + input.reason);
  const unsigned p = cfg.amb.p();
  std::map<unsigned, std::uint64_t> class_mass;
  std::uint64_t total = 0;
  for (const auto& [c, f] : cfg.families) {
    if (f.empty() || !cfg.cubes.contains(c)) continue;
    class_mass[power_class(f.size(), p)] += f.size();
    total += f.size();
  }
  if (class_mass.empty()) throw std::invalid_argument("refinement has no families");
  const unsigned keep = best_class(class_mass);
  std::vector<Cube> kept;
  for (const auto& [c, f] : cfg.families) {
    if (!f.empty() && cfg.cubes.contains(c) && power_class(f.size(), p) == keep) kept.push_back(c);
  }
  NiceRefineResult res{restrict_to(cfg, kept), {}, keep, 0.0, 0.0, false};
  res.report = configuration_refinement_check(res.config, cfg0, slack);
  for (double f : res.report.family_factors) {
    if (f * res.report.slack < 1.0) {
      res.report.valid = false;
      res.report.reason = "family factor below 1/slack";
    }
  }
  res.mass_ratio = safe_ratio(class_mass[keep], total);
  res.mass_floor = 1.0 / (2.0 * cfg.level() + 1.0);
  res.mass_bound_ok = res.mass_ratio >= res.mass_floor;
  return res;
}

std::string ScaleStage::csv_header() { return "stage,kept_class,retained_ratio"; }

std::string ScaleStage::csv_row() const {
  std::ostringstream os;
  os.precision(17);
  os << stage << ",";
  if (kept_class) os << *kept_class;
  os << "," << retained_ratio;
  return os.str();
}

std::string CoverReport::csv_header() {
  return "fine_level,delta_level,input_cubes,input_M,covered_mass,ratio,floor,ratio_ok,x_identity_min,"
         "x_identity_max,x_identity_ok,slack";
}

std::string CoverReport::csv_row() const {
  std::ostringstream os;
  os.precision(17);
  os << fine_level << "," << delta_level << "," << input_cubes << "," << input_M << "," << covered_mass << ","
     << ratio << "," << floor << "," << (ratio_ok ? 1 : 0) << "," << x_identity_min << "," << x_identity_max << ","
     << (x_identity_ok ? 1 : 0) << "," << slack;
  return os.str();
}

ScaleDeltaResult build_scale_delta(const Configuration& cfg, unsigned delta_level, const Exponent& s,
                                   std::optional<double> slack) {
  const unsigned n = cfg.level();
  const Ambient& amb = cfg.amb;
  const unsigned p = amb.p();
  if (delta_level == 0 || delta_level >= n) throw std::invalid_argument("Delta must lie strictly between delta and 1");
  if (cfg.cubes.empty()) throw std::invalid_argument("empty configuration");
  const std::vector<unsigned> ladder{0, delta_level, n};

  ScaleDeltaResult res{Configuration(amb, n), Configuration(amb, delta_level), {}, {}, std::nullopt};
  std::map<Cube, std::vector<Tube>> fam;
  for (const auto& e : cfg.cubes.entries()) {
    auto it = cfg.families.find(e.cell);
    if (it == cfg.families.end() || it->second.empty()) {
      throw std::invalid_argument("empty family at " + to_text(amb, e.cell));
    }
    fam[e.cell] = it->second;
  }
  const std::uint64_t input_mass = family_mass(fam);
  auto record = [&](std::string name, std::optional<std::uint64_t> cls, std::uint64_t before) {
    res.stages.push_back(ScaleStage{std::move(name), cls, safe_ratio(family_mass(fam), before)});
  };

  // (i) each family uniform over {1, Delta, delta} in parameter space.
  std::uint64_t before = family_mass(fam);
  std::map<Cube, std::uint64_t> m_of;
  for (auto& [c, f] : fam) {
    const UniformizeResult u = uniformize_ladder(parameter_set(cfg, f), ladder);
    f = tubes_of(u.kept);
    m_of[c] = covering_number(u.kept, delta_level);
  }
  record("family_uniformize", std::nullopt, before);

  // (ii) common class for m(p) = |T1(p)|_Delta.
  before = family_mass(fam);
  {
    std::map<std::uint64_t, std::uint64_t> class_mass;
    for (const auto& [c, f] : fam) class_mass[power_class_ceiling(m_of[c], p)] += f.size();
    const std::uint64_t keep = best_class(class_mass);
    std::erase_if(fam, [&](const auto& kv) { return power_class_ceiling(m_of[kv.first], p) != keep; });
    record("delta_tube_count_class", keep, before);
  }

  // (iii) P uniform over {1, Delta, delta}.
  before = family_mass(fam);
  {
    CubeSet P(amb, n);
    for (const auto& [c, f] : fam) P.insert(c);
    const UniformizeResult u = uniformize_ladder(P, ladder);
    std::erase_if(fam, [&](const auto& kv) { return !u.kept.contains(kv.first); });
    record("cube_uniformize", std::nullopt, before);
  }

  // (iv) per Delta-cell, keep the Delta-tubes of one multiplicity class.
  before = family_mass(fam);
  std::map<Cube, std::vector<Cube>> cell_cubes;
  for (const auto& [c, f] : fam) cell_cubes[parent(amb, c, delta_level)].push_back(c);
  std::map<Cube, std::uint64_t> x_class;
  std::map<Cube, double> x_ratio;
  for (const auto& [q, cubes] : cell_cubes) {
    std::map<Tube, std::uint64_t> X;
    std::uint64_t m_total = 0;
    for (const Cube& c : cubes) {
      std::set<Tube> coarse;
      for (const Tube& t : fam[c]) coarse.insert(parent(amb, t, delta_level));
      for (const Tube& T : coarse) ++X[T];
      m_total += m_of[c];
    }
    std::map<std::uint64_t, std::uint64_t> class_mass;
    for (const auto& [T, x] : X) class_mass[power_class_ceiling(x, p)] += x;
    const std::uint64_t keep = best_class(class_mass);
    std::set<Tube> kept;
    std::uint64_t kept_x = 0;
    for (const auto& [T, x] : X) {
      if (power_class_ceiling(x, p) == keep) {
        kept.insert(T);
        kept_x += x;
      }
    }
    x_class[q] = keep;
    // X(Q) |T1(Q)|_Delta / (|P1 ∩ Q| m) with X(Q) and m the mean kept multiplicity and mean m(p).
    x_ratio[q] = safe_ratio(kept_x, m_total);
    for (const Cube& c : cubes) {
      std::erase_if(fam[c], [&](const Tube& t) { return !kept.contains(parent(amb, t, delta_level)); });
    }
  }
  std::erase_if(fam, [](const auto& kv) { return kv.second.empty(); });
  record("delta_tube_multiplicity_class", std::nullopt, before);

  // (v) common X class across Delta-cells.
  before = family_mass(fam);
  {
    std::map<std::uint64_t, std::uint64_t> class_mass;
    for (const auto& [c, f] : fam) class_mass[x_class[parent(amb, c, delta_level)]] += f.size();
    if (!class_mass.empty()) {
      const std::uint64_t keep = best_class(class_mass);
      std::erase_if(fam, [&](const auto& kv) { return x_class[parent(amb, kv.first, delta_level)] != keep; });
      record("common_multiplicity_class", keep, before);
    } else {
      record("common_multiplicity_class", std::nullopt, before);
    }
  }

  std::map<Cube, std::set<Tube>> coarse_families;
  for (const auto& [c, f] : fam) {
    res.fine.cubes.insert(c, cfg.cubes.multiplicity(c));
    if (cfg.cubes.weighted()) res.fine.cubes.set_weight(c, cfg.cubes.weight(c));
    res.fine.add(c, f);
    auto& cf = coarse_families[parent(amb, c, delta_level)];
    for (const Tube& t : f) cf.insert(parent(amb, t, delta_level));
  }
  for (const auto& [q, f] : coarse_families) res.coarse.add(q, std::vector<Tube>(f.begin(), f.end()));

  CoverReport& r = res.report;
  r.fine_level = n;
  r.delta_level = delta_level;
  r.input_cubes = cfg.cubes.distinct_size();
  r.input_M = safe_ratio(input_mass, r.input_cubes);
  r.covered_mass = family_mass(fam);
  r.ratio = safe_ratio(r.covered_mass, input_mass);
  r.floor = std::pow(static_cast<double>(n) + 1.0, -5.0);
  r.ratio_ok = r.ratio >= r.floor;
  r.slack = slack.value_or(default_slack(n));
  bool first = true;
  for (const auto& [q, f] : coarse_families) {
    const double x = x_ratio[q];
    r.x_identity_min = first ? x : std::min(r.x_identity_min, x);
    r.x_identity_max = first ? x : std::max(r.x_identity_max, x);
    first = false;
  }
  r.x_identity_ok = !first && r.x_identity_min * r.slack >= 1.0 && r.x_identity_max <= r.slack;
  if (!res.coarse.cubes.empty()) res.coarse_certificate = nice_certify(res.coarse, s);
  return res;
}

}  // namespace pil

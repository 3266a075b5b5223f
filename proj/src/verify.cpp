#include "pil/verify.hpp"

#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pil/constructions.hpp"
#include "pil/fourier.hpp"
#include "pil/incidence.hpp"
#include "pil/multiscale.hpp"
#include "pil/setstats.hpp"

namespace pil {
namespace {

class Checker {
 public:
  explicit Checker(std::ostream& log) : log_(log) {}

  bool operator()(bool ok, const std::string& label, const std::string& detail = {}) {
    ++result_.checks;
    if (!ok) {
      ++result_.failures;
      log_ << "FAIL [" << label << "]" << (detail.empty() ? "" : " " + detail) << "\n";
    }
    return ok;
  }

  SuiteResult result() const { return result_; }

 private:
  std::ostream& log_;
  SuiteResult result_;
};

std::string str(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

GridFunction random_function(const Ambient& amb, SplitMix64& rng) {
  GridFunction f(amb);
  auto unit = [&] { return static_cast<double>(rng.below(1u << 20)) / static_cast<double>(1u << 19) - 1.0; };
  for (auto& v : f.values()) v = Complex(unit(), unit());
  return f;
}

CubeSet random_cubes(const Ambient& amb, SplitMix64& rng, std::uint64_t max_size, bool weighted) {
  const Residue q = amb.top_modulus();
  const std::uint64_t size = 1 + rng.below(std::min<std::uint64_t>(max_size, q * q));
  CubeSet P(amb, amb.n());
  for (std::uint64_t idx : sample_without_replacement(rng, q * q, size)) {
    const Cube c{amb.n(), idx / q, idx % q};
    P.insert(c);
    if (weighted) P.set_weight(c, Rational(static_cast<std::int64_t>(rng.below(9)), 1 + static_cast<std::int64_t>(rng.below(4))));
  }
  return P;
}

TubeSet random_tubes(const Ambient& amb, SplitMix64& rng, std::uint64_t max_size) {
  const Residue q = amb.top_modulus();
  const std::uint64_t size = 1 + rng.below(std::min<std::uint64_t>(max_size, q * q));
  TubeSet T(amb, amb.n());
  for (std::uint64_t idx : sample_without_replacement(rng, q * q, size)) T.insert(Tube{amb.n(), idx / q, idx % q});
  return T;
}

/// Random multiset: cubes drawn with replacement from a few cells.
CubeSet random_multiset(const Ambient& amb, SplitMix64& rng, std::uint64_t draws) {
  const Residue q = amb.top_modulus();
  const std::uint64_t pool = 1 + rng.below(std::min<std::uint64_t>(q * q, 24));
  const auto cells = sample_without_replacement(rng, q * q, pool);
  CubeSet P(amb, amb.n());
  for (std::uint64_t i = 0; i < draws; ++i) {
    const std::uint64_t idx = cells[rng.below(cells.size())];
    P.insert(Cube{amb.n(), idx / q, idx % q});
  }
  return P;
}

SuiteResult suite_fourier(const SuiteOptions& o, std::ostream& out, std::ostream& log) {
  const Ambient amb(o.p.value_or(3), o.n.value_or(2));
  SplitMix64 rng(o.seed);
  Checker check(log);
  out << "trial,parseval,self_parseval,convolution,reflection,tube_off_line\n";
  for (unsigned t = 0; t < o.trials; ++t) {
    const GridFunction f = random_function(amb, rng);
    const GridFunction g = random_function(amb, rng);
    const ParsevalReport pr = check_parseval(f, g);
    const double conv = convolution_spectral_deviation(f, g);
    const double refl = reflection_deviation(f);
    const Residue q = amb.top_modulus();
    const Tube tube{amb.n(), rng.below(q), rng.below(q)};
    TubeSet ts(amb, amb.n());
    ts.insert(tube);
    const double off = off_line_spectral_mass(tube_indicator(ts), tube.a);
    check(pr.deviation < 1e-9 && pr.self_deviation < 1e-9, "Parseval identity", "deviation " + str(pr.deviation));
    check(conv < 1e-9, "convolution identity", "deviation " + str(conv));
    check(refl < 1e-10, "double transform is reflection", "deviation " + str(refl));
    check(off < 1e-9, "tube spectrum on the perpendicular line", "off-line mass " + str(off));
    out.precision(6);
    out << t << "," << pr.deviation << "," << pr.self_deviation << "," << conv << "," << refl << "," << off << "\n";
  }
  return check.result();
}

SuiteResult suite_highlow(const SuiteOptions& o, std::ostream& out, std::ostream& log) {
  const Ambient amb(o.p.value_or(3), o.n.value_or(3));
  if (amb.n() < 2) throw std::invalid_argument("highlow suite needs n >= 2");
  SplitMix64 rng(o.seed);
  Checker check(log);
  out << "trial,p,n," << HighLowReport::csv_header() << "\n";
  for (unsigned t = 0; t < o.trials; ++t) {
    const CubeSet P = random_cubes(amb, rng, 200, true);
    const TubeSet T = random_tubes(amb, rng, 200);
    for (const HighLowReport& r : highlow_split_all(P, T)) {
      const std::string where = "trial " + std::to_string(t) + " k=" + std::to_string(r.k);
      check(r.identity_ok(), "high-low decomposition", where);
      check(r.low_ok(), "low term equals thickened count", where);
      check(r.high_ok(), "high term estimate", where);
      check(r.inequality_ok(), "high-low incidence bound", where);
      out << t << "," << amb.p() << "," << amb.n() << "," << r.csv_row() << "\n";
    }
  }
  return check.result();
}

SuiteResult suite_geometry(const SuiteOptions& o, std::ostream& out, std::ostream& log) {
  const Ambient amb(o.p.value_or(3), o.n.value_or(2));
  const unsigned n = amb.n();
  const Residue q = amb.top_modulus();
  if (q * q > 4096) throw std::invalid_argument("geometry suite is exhaustive; needs p^{2n} <= 4096");
  Checker check(log);
  for (unsigned m = 0; m <= n; ++m) {
    std::set<Tube> images;
    for (const auto& e : full_grid(amb, m).entries()) {
      images.insert(duality(e.cell));
      check(parent(amb, duality(e.cell), 0) == duality(parent(amb, e.cell, 0)), "duality commutes with parents");
      if (m > 0) {
        check(parent(amb, duality(e.cell), m - 1) == duality(parent(amb, e.cell, m - 1)),
              "duality commutes with parents");
      }
    }
    check(images.size() == amb.modulus(m) * amb.modulus(m), "duality is a bijection", "level " + std::to_string(m));
  }
  const CubeSet grid = full_grid(amb, n);
  const TubeSet tubes = all_tubes(amb, n);
  std::map<Cube, std::uint64_t> on_cube;
  for (const auto& t : tubes.entries()) {
    std::uint64_t count = 0;
    for (const auto& c : grid.entries()) {
      if (tube_contains(amb, t.cell, c.cell)) {
        ++count;
        ++on_cube[c.cell];
        for (unsigned m = 0; m <= n; ++m) {
          check(tube_contains(amb, parent(amb, t.cell, m), parent(amb, c.cell, m)), "containment passes to parents");
        }
      }
    }
    check(count == q, "tube holds p^n cubes", to_text(amb, t.cell));
  }
  for (const auto& [c, count] : on_cube) check(count == q, "cube lies on p^n tubes", to_text(amb, c));
  const auto cells = grid.cells();
  for (const Cube& a : cells) {
    for (const Cube& b : cells) {
      if (a == b) {
        check(!cube_distance(amb, a, b).has_value(), "coincident cubes have no distance");
        continue;
      }
      std::uint64_t brute = 0;
      for (const auto& t : tubes.entries()) {
        if (tube_contains(amb, t.cell, a) && tube_contains(amb, t.cell, b)) ++brute;
      }
      const Residue got = count_common_tubes(amb, a, b);
      const unsigned k = *cube_distance(amb, a, b);
      const unsigned v = amb.valuation(amb.sub(a.x, b.x, n), n);
      check(got == brute, "common tube count", to_text(amb, a) + " " + to_text(amb, b));
      check(got == 0 || got == amb.modulus(v), "common tube count is 0 or p^v");
      check(got <= amb.modulus(k), "common tubes at most p^k");
    }
  }
  if (cells.size() <= 81) {
    for (const Cube& a : cells) {
      for (const Cube& b : cells) {
        for (const Cube& c : cells) {
          if (a == b || b == c || a == c) continue;
          // Larger exponent means smaller distance.
          const unsigned ac = *cube_distance(amb, a, c);
          const unsigned ab = *cube_distance(amb, a, b);
          const unsigned bc = *cube_distance(amb, b, c);
          check(ac >= std::min(ab, bc), "ultrametric inequality");
        }
      }
    }
  }
  out << "suite,p,n,checks,failures\ngeometry," << amb.p() << "," << n << "," << check.result().checks << ","
      << check.result().failures << "\n";
  return check.result();
}

SuiteResult suite_counting(const SuiteOptions& o, std::ostream& out, std::ostream& log) {
  const Ambient amb(o.p.value_or(2), o.n.value_or(3));
  const unsigned n = amb.n();
  SplitMix64 rng(o.seed);
  Checker check(log);
  out << "trial,delta,b,J,sum_squares\n";
  for (unsigned t = 0; t < o.trials; ++t) {
    const CubeSet P = random_multiset(amb, rng, 1 + rng.below(40));
    const TubeSet T = random_tubes(amb, rng, 40);
    // Incidences by a plain double loop.
    std::int64_t brute = 0;
    for (const auto& c : P.entries()) {
      for (const auto& tb : T.entries()) {
        if (tube_contains(amb, tb.cell, c.cell)) brute += static_cast<std::int64_t>(c.multiplicity * tb.multiplicity);
      }
    }
    check(incidence_count(P, T) == Rational(brute), "incidence count", "trial " + std::to_string(t));
    for (unsigned k = 1; k < n; ++k) {
      check(incidence_count(P, thicken_tubes(T, k)) >= incidence_count(P, T), "thickening adds incidences");
    }
    for (unsigned d = 0; d <= n; ++d) {
      const std::uint64_t j1 = triple_count_J_by_tubes(P, d);
      const std::uint64_t j2 = triple_count_J_by_pairs(P, d);
      check(j1 == j2, "triple count two ways", std::to_string(j1) + " vs " + std::to_string(j2));
      for (std::uint64_t b = 1; b <= 3; ++b) {
        const RichTubeStats st = rich_tubes(P, d, 1, b);
        check(st.sum_squares * b * b <= 2 * st.J, "rich tube square sum against J",
              "delta " + std::to_string(d) + " b " + std::to_string(b));
        for (const RichTube& rt : st.tubes) {
          check(n_delta_b(rt.tube, P, d, b) == rt.n_value, "rich tube count");
          check(n_delta_b(rt.tube, P, d, b + 1) <= rt.n_value, "N monotone in b");
        }
        out << t << "," << d << "," << b << "," << st.J << "," << st.sum_squares << "\n";
      }
    }
  }
  return check.result();
}

SuiteResult suite_multiscale(const SuiteOptions& o, std::ostream& out, std::ostream& log) {
  const unsigned p = o.p.value_or(3);
  SplitMix64 rng(o.seed);
  Checker check(log);
  out << "case,block,levels,input,kept,ratio,guaranteed,meets_block_bound\n";
  for (unsigned t = 0; t < o.trials; ++t) {
    const unsigned block = 1 + static_cast<unsigned>(rng.below(2));
    const unsigned levels = 2 + static_cast<unsigned>(rng.below(2));
    const Ambient amb(p, block * levels);
    const CubeSet P = random_cubes(amb, rng, 150, false);
    const UniformizeResult u = uniformize(P, block, levels);
    check(uniformity_check(u.kept, block, levels).uniform, "uniformized set is uniform");
    check(u.meets_guarantee, "uniformization keeps its share of cubes");
    out << "uniformize," << block << "," << levels << "," << P.distinct_size() << "," << u.kept.distinct_size() << ","
        << u.ratio << "," << u.guaranteed << "," << (u.meets_block_bound ? 1 : 0) << "\n";
  }
  // Digit-{0,1} product in base 3.
  const Ambient amb(3, 4);
  const DigitSet d01(3, {0, 1});
  const auto A = cantor_1d(amb, d01);
  const Configuration cfg = product_config(amb, A, A, A);
  const Exponent s = d01.dimension();
  const NiceCertificate cert = nice_certify(cfg, s);
  check(compare(cert.C, ScaledPower{}) == 0, "product families have Frostman constant 1", cert.C.to_string());
  check(cert.M_min == 16 && cert.M_max == 16, "product families have 16 tubes");
  check(cert.size_bound_ok, "family size lower bound");
  const ScaleDeltaResult sd = build_scale_delta(cfg, 2, s);
  check(sd.coarse.cubes.distinct_size() > 0, "Delta configuration is nonempty");
  sd.coarse.validate();
  check(sd.coarse_certificate && sd.coarse_certificate->C.to_double() <= sd.report.slack,
        "Delta configuration constant within slack");
  check(sd.report.ratio_ok, "covering ratio above floor", str(sd.report.ratio));
  check(sd.report.x_identity_ok, "multiplicity mass identity within slack");
  const NiceRefineResult nr = nice_refine(cfg, cert, cfg);
  check(nr.mass_bound_ok, "nice refinement keeps a class share");
  out << "buildscale,,,," << sd.fine.cubes.distinct_size() << "," << sd.report.ratio << "," << sd.report.floor << ",\n";
  return check.result();
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"fourier", "highlow", "geometry", "counting", "multiscale"};
  return names;
}

SuiteResult run_suite(const std::string& name, const SuiteOptions& opts, std::ostream& out, std::ostream& log) {
  SuiteResult r;
  if (name == "fourier") {
    r = suite_fourier(opts, out, log);
  } else if (name == "highlow") {
    r = suite_highlow(opts, out, log);
  } else if (name == "geometry") {
    r = suite_geometry(opts, out, log);
  } else if (name == "counting") {
    r = suite_counting(opts, out, log);
  } else if (name == "multiscale") {
    r = suite_multiscale(opts, out, log);
  } else {
    throw std::invalid_argument("unknown suite '" + name + "'");
  }
  log << "suite=" << name << " checks=" << r.checks << " failures=" << r.failures << "\n";
  return r;
}

}  // namespace pil

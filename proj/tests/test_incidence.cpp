#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pil/constructions.hpp"
#include "pil/incidence.hpp"

using namespace pil;

namespace {

CubeSet random_multiset(const Ambient& amb, SplitMix64& rng, std::uint64_t pool, std::uint64_t draws) {
  const Residue q = amb.top_modulus();
  const auto cells = sample_without_replacement(rng, q * q, std::min<std::uint64_t>(pool, q * q));
  CubeSet P(amb, amb.n());
  for (std::uint64_t i = 0; i < draws; ++i) {
    const auto idx = cells[rng.below(cells.size())];
    P.insert(Cube{amb.n(), idx / q, idx % q});
  }
  return P;
}

TubeSet random_tubes(const Ambient& amb, SplitMix64& rng, unsigned level, std::uint64_t draws) {
  const Residue q = amb.modulus(level);
  TubeSet T(amb, level);
  for (std::uint64_t i = 0; i < draws; ++i) T.insert(Tube{level, rng.below(q), rng.below(q)});
  return T;
}

}  // namespace

TEST_CASE("incidence counts") {
  const Ambient amb(2, 3);
  CHECK(incidence_count(full_grid(amb, 3), all_tubes(amb, 3)) == Rational(512));
  CubeSet one(amb, 3);
  one.insert(Cube{3, 0, 1});
  TubeSet miss(amb, 3);
  miss.insert(Tube{3, 0, 0});
  CHECK(incidence_count(one, miss) == Rational(0));
}

TEST_CASE("incidence counts match the double loop") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const Ambient amb(trial % 2 ? 2 : 3, trial % 2 ? 3 : 2);
    CubeSet P = random_multiset(amb, rng, 20, 30);
    for (const Cube& c : P.cells()) P.set_weight(c, Rational(static_cast<std::int64_t>(rng.below(7)), 1 + rng.below(5)));
    // Few tubes exercise the pairwise path, many the slope scan.
    for (std::uint64_t draws : {3u, 200u}) {
      const unsigned level = static_cast<unsigned>(rng.below(amb.n() + 1));
      const TubeSet T = random_tubes(amb, rng, level, draws);
      CHECK(incidence_count(P, T).to_double() == doctest::Approx(oracle::incidences(amb.p(), P, T)));
    }
  }
}

TEST_CASE("thickening") {
  const Ambient amb(3, 2);
  TubeSet T(amb, 2);
  T.insert(Tube{2, 1, 1});
  T.insert(Tube{2, 4, 7});
  const TubeSet th = thicken_tubes(T, 1);
  CHECK(th.distinct_size() == 1);
  CHECK(th.multiplicity(Tube{1, 1, 1}) == 2);
  const Ambient amb2(2, 3);
  const TubeSet all = thicken_tubes(all_tubes(amb2, 3), 1);
  CHECK(all.distinct_size() == 16);
  for (const auto& e : all.entries()) CHECK(e.multiplicity == 4);
  CHECK_THROWS(thicken_tubes(T, 2));
  CHECK(thicken_tubes(T, 0) == T);
}

TEST_CASE("thickening never loses incidences") {
  SplitMix64 rng(3);
  const Ambient amb(2, 4);
  for (int trial = 0; trial < 20; ++trial) {
    const CubeSet P = random_multiset(amb, rng, 30, 40);
    const TubeSet T = random_tubes(amb, rng, 4, 30);
    for (unsigned k = 1; k < 4; ++k) CHECK(incidence_count(P, thicken_tubes(T, k)) >= incidence_count(P, T));
  }
}

TEST_CASE("N_{Delta,b} on the full grid") {
  const Ambient amb(2, 3);
  const CubeSet grid = full_grid(amb, 3);
  const Tube t{3, 3, 5};
  for (unsigned m = 0; m <= 3; ++m) {
    const std::uint64_t per = std::uint64_t{1} << (3 - m);
    CHECK(n_delta_b(t, grid, m, per) == (std::uint64_t{1} << m));
    CHECK(n_delta_b(t, grid, m, per + 1) == 0);
  }
  CHECK_THROWS(n_delta_b(t, grid, 1, 0));
}

TEST_CASE("rich tubes agree with per-tube recounts") {
  SplitMix64 rng(17);
  const Ambient amb(3, 2);
  for (int trial = 0; trial < 15; ++trial) {
    const CubeSet P = random_multiset(amb, rng, 12, 25);
    for (unsigned d = 0; d <= 2; ++d)
      for (std::uint64_t b : {1u, 2u}) {
        const RichTubeStats st = rich_tubes(P, d, 2, b);
        std::size_t expected = 0;
        std::uint64_t squares = 0;
        for (const Tube& t : oracle::every_tube(3, 2)) {
          const auto N = oracle::n_delta_b(3, t, P, d, b);
          if (N >= 2) {
            ++expected;
            squares += N * N;
          }
        }
        CHECK(st.tubes.size() == expected);
        CHECK(st.sum_squares == squares);
        for (const RichTube& rt : st.tubes) CHECK(rt.n_value == oracle::n_delta_b(3, rt.tube, P, d, b));
        CHECK(st.sum_squares * b * b <= 2 * st.J);
      }
  }
}

TEST_CASE("rich tube examples") {
  const Ambient amb(2, 3);
  CubeSet rep(amb, 3);
  rep.insert(Cube{3, 1, 2}, 4);
  CHECK(rich_tubes(rep, 1, 1, 5).tubes.empty());
  const RichTubeStats full = rich_tubes(full_grid(amb, 3), 1, 2, 4);
  CHECK(full.tubes.size() == 64);
  CHECK(rich_tubes(full_grid(amb, 3), 1, 2, 4).J == triple_count_J_by_pairs(full_grid(amb, 3), 1));
  CHECK_THROWS(rich_tubes(rep, 1, 0, 1));
}

TEST_CASE("rich tube spacing check") {
  const Ambient amb(2, 3);
  const RichTubeStats st = rich_tubes(full_grid(amb, 3), 2, 4, 2, RichTubeOptions{Rational(0), std::nullopt});
  REQUIRE(!st.tubes.empty());
  // On the full grid |T^rho ∩ D_rho| = rho |D_rho| exactly.
  for (const RichTube& t : st.tubes) CHECK(t.spacing_ok == true);
  CubeSet line(amb, 3);
  for (Residue x = 0; x < 8; ++x) line.insert(Cube{3, x, 0});
  const RichTubeStats lt = rich_tubes(line, 2, 4, 2, RichTubeOptions{Rational(0), std::nullopt});
  REQUIRE(!lt.tubes.empty());
  CHECK(lt.tubes.front().spacing_ok == false);
}

TEST_CASE("rich tubes over candidates") {
  const Ambient amb(2, 3);
  TubeSet cand(amb, 3);
  cand.insert(Tube{3, 0, 0});
  const RichTubeStats st = rich_tubes(full_grid(amb, 3), 1, 2, 4, RichTubeOptions{std::nullopt, cand});
  REQUIRE(st.tubes.size() == 1);
  CHECK(st.tubes.front().tube == Tube{3, 0, 0});
}

TEST_CASE("triple count J") {
  const Ambient amb(3, 2);
  CubeSet P(amb, 2);
  P.insert(Cube{2, 0, 0});
  P.insert(Cube{2, 3, 0});
  CHECK(triple_count_J(P, 1) == 0);
  CHECK(triple_count_J(P, 2) == 6);
  CHECK(triple_count_J(P, 0) == 0);
  SplitMix64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Ambient a(2, 3);
    const CubeSet Q = random_multiset(a, rng, 10, 15);
    for (unsigned d = 0; d <= 3; ++d) {
      const auto J = triple_count_J(Q, d);
      CHECK(J == oracle::triples(2, Q, d));
      CHECK(J == triple_count_J_by_pairs(Q, d));
    }
  }
}

TEST_CASE("every a-rich tube contributes ab (a-1) b triples") {
  SplitMix64 rng(29);
  const Ambient amb(2, 3);
  for (int trial = 0; trial < 10; ++trial) {
    const CubeSet P = random_multiset(amb, rng, 16, 40);
    for (std::uint64_t b : {1u, 2u, 3u}) {
      const RichTubeStats st = rich_tubes(P, 1, 2, b);
      for (const RichTube& rt : st.tubes) {
        // Triples on this tube alone.
        CubeSet on(amb, 3);
        for (const auto& e : P.entries())
          if (tube_contains(amb, rt.tube, e.cell)) on.insert(e.cell, e.multiplicity);
        std::uint64_t own = 0;
        const auto pts = oracle::expand(on);
        for (std::size_t i = 0; i < pts.size(); ++i)
          for (std::size_t j = 0; j < pts.size(); ++j)
            if (i != j && parent(amb, pts[i].cell, 1) != parent(amb, pts[j].cell, 1)) ++own;
        CHECK(own >= rt.n_value * b * (rt.n_value - 1) * b);
      }
    }
  }
}

TEST_CASE("N is monotone in b and under shrinking P") {
  SplitMix64 rng(31);
  const Ambient amb(3, 2);
  for (int trial = 0; trial < 10; ++trial) {
    const CubeSet P = random_multiset(amb, rng, 15, 30);
    CubeSet smaller(amb, 2);
    for (const auto& e : P.entries())
      if (rng.below(2)) smaller.insert(e.cell, e.multiplicity);
    for (const Tube& t : oracle::every_tube(3, 2)) {
      for (std::uint64_t b = 1; b < 4; ++b) {
        CHECK(n_delta_b(t, P, 1, b + 1) <= n_delta_b(t, P, 1, b));
        CHECK(n_delta_b(t, smaller, 1, b) <= n_delta_b(t, P, 1, b));
      }
    }
  }
}

TEST_CASE("tubelets") {
  const Ambient amb(3, 3);
  const Cube q{1, 1, 2};
  // a = 1, b = 1 meets Q: 2 == 1*1 + 1 mod 3.
  const auto u = tubelet_of(amb, Tube{3, 1, 1}, q);
  REQUIRE(u.has_value());
  CHECK(u->slope_class == 1);
  CHECK(u->anchor == 2);
  CHECK_FALSE(tubelet_of(amb, Tube{3, 0, 0}, q).has_value());
  // a' = a + 9 and b' = b - 9 x_Q keep the same slope class and anchor.
  const auto v = tubelet_of(amb, Tube{3, 10, (1 + 27 - 9) % 27}, q);
  REQUIRE(v.has_value());
  CHECK(*u == *v);
}

TEST_CASE("equal tubelets are equal point sets") {
  const Ambient amb(2, 3);
  const auto tubes = all_tubes(amb, 3).cells();
  for (const Cube& q : full_grid(amb, 1).cells()) {
    for (const Tube& t1 : tubes)
      for (const Tube& t2 : tubes) {
        const auto u1 = tubelet_of(amb, t1, q);
        const auto u2 = tubelet_of(amb, t2, q);
        if (!u1 || !u2) continue;
        bool same = true;
        for (const Cube& c : full_grid(amb, 3).cells()) {
          if (parent(amb, c, 1) != q) continue;
          if (tube_contains(amb, t1, c) != tube_contains(amb, t2, c)) same = false;
        }
        CHECK((*u1 == *u2) == same);
      }
  }
}

TEST_CASE("tubelet decomposition conserves incidences") {
  const Ambient amb(2, 3);
  TubeSet one(amb, 3);
  one.insert(Tube{3, 1, 0});
  CubeSet P(amb, 3);
  P.insert(Cube{3, 0, 0});
  const TubeletDecomposition d = tubelet_decompose(one, P, 1, 2, 1);
  REQUIRE(d.tubelets.size() == 1);
  CHECK(d.tubelets.front().multiplicity == 1);
  CHECK(d.tubelets.front().n_value == 1);

  TubeSet two(amb, 3);
  two.insert(Tube{3, 1, 0});
  two.insert(Tube{3, 5, 4});  // same slope mod 4 and anchor at x_Q = 1
  CubeSet Q(amb, 3);
  Q.insert(Cube{3, 1, 1});
  const TubeletDecomposition d2 = tubelet_decompose(two, Q, 1, 2, 1);
  REQUIRE(d2.tubelets.size() == 1);
  CHECK(d2.tubelets.front().multiplicity == 2);

  SplitMix64 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const CubeSet R = random_multiset(amb, rng, 20, 25);
    const TubeSet T = random_tubes(amb, rng, 3, 20);
    for (unsigned w = 0; w <= 3; ++w) {
      const TubeletDecomposition dd = tubelet_decompose(T, R, w, 1, 1);
      CHECK(dd.total_multiplicity == tube_cell_incidences(T, R, w));
    }
  }
}

TEST_CASE("bad tube filter") {
  const Ambient amb(3, 2);
  Configuration disjoint(amb, 2);
  disjoint.add(Cube{2, 0, 0}, {Tube{2, 0, 0}});
  disjoint.add(Cube{2, 1, 1}, {Tube{2, 0, 1}});
  const FilterResult r = bad_tube_filter(disjoint, 2);
  CHECK(r.bad_tubes.empty());
  CHECK(r.config.cubes == disjoint.cubes);
  CHECK(r.retained_fraction == 1.0);

  Configuration shared(amb, 2);
  // The tube y = 0 passes through (0,0), (1,0), (2,0).
  shared.add(Cube{2, 0, 0}, {Tube{2, 0, 0}, Tube{2, 1, 0}});
  shared.add(Cube{2, 1, 0}, {Tube{2, 0, 0}, Tube{2, 1, 8}});
  shared.add(Cube{2, 2, 0}, {Tube{2, 0, 0}, Tube{2, 1, 7}});
  const FilterResult s = bad_tube_filter(shared, 3);
  CHECK(s.bad_tubes == std::vector<Tube>{{2, 0, 0}});
  CHECK(s.config.cubes.distinct_size() == 3);
  for (const auto& [c, f] : s.config.families) CHECK(f.size() == 1);
  CHECK(s.max_surviving_multiplicity < 3);
  CHECK_THROWS(bad_tube_filter(shared, 0.5));
  Configuration bare(amb, 2);
  bare.cubes.insert(Cube{2, 0, 0});
  CHECK_THROWS(bad_tube_filter(bare, 2));
}

#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "pil/padic.hpp"

using namespace pil;

TEST_CASE("valuation norm") {
  CHECK(valuation_norm(0, Ambient(3, 2)) == 2);
  CHECK(valuation_norm(4, Ambient(2, 3)) == 2);
  CHECK(valuation_norm(6, Ambient(3, 3)) == 1);
  CHECK(valuation_norm(1, Ambient(5, 2)) == 0);
}

TEST_CASE("ambient limits") {
  CHECK_THROWS(Ambient(4, 2));
  CHECK_THROWS(Ambient(17, 1));
  CHECK_THROWS(Ambient(3, 0));
  CHECK_THROWS(Ambient(2, 21));
  CHECK_NOTHROW(Ambient(2, 20));
}

TEST_CASE("duality evaluates the line") {
  const Ambient amb(3, 1);
  const Tube t = duality(make_cube(amb, 1, 1, 2));
  std::set<std::pair<Residue, Residue>> pts;
  for (const Cube& c : cubes_in_tube(amb, t, 1)) pts.insert({c.x, c.y});
  CHECK(pts == std::set<std::pair<Residue, Residue>>{{0, 2}, {1, 0}, {2, 1}});
  const Ambient amb2(2, 2);
  for (const Cube& c : cubes_in_tube(amb2, duality(make_cube(amb2, 2, 0, 0)), 2)) CHECK(c.y == 0);
}

TEST_CASE("duality is a bijection and commutes with parents") {
  for (unsigned p : {2u, 3u}) {
    for (unsigned m = 0; m <= 3; ++m) {
      const Ambient amb(p, 3);
      std::set<Tube> seen;
      for (const Cube& c : full_grid(amb, m).cells()) {
        seen.insert(duality(c));
        CHECK(dual_parameters(duality(c)) == c);
        for (unsigned l = 0; l <= m; ++l) CHECK(parent(amb, duality(c), l) == duality(parent(amb, c, l)));
      }
      CHECK(seen.size() == oracle::ipow(p, 2 * m));
    }
  }
}

TEST_CASE("tube containment") {
  const Ambient amb(2, 3);
  CHECK(tube_contains(amb, make_tube(amb, 2, 1, 2), make_cube(amb, 3, 5, 3)));
  CHECK_THROWS(tube_contains(amb, make_tube(amb, 3, 1, 2), make_cube(amb, 2, 1, 3)));
  const Ambient amb3(3, 2);
  // 27 level-2 cubes per level-1 tube.
  for (const Tube& t : all_tubes(amb3, 1).cells()) {
    std::size_t count = 0;
    for (const Cube& c : full_grid(amb3, 2).cells()) count += tube_contains(amb3, t, c);
    CHECK(count == 27);
    CHECK(cubes_in_tube(amb3, t, 2).size() == 27);
  }
}

TEST_CASE("containment agrees with the plain congruence and passes to parents") {
  const Ambient amb(3, 2);
  for (const Tube& t : all_tubes(amb, 2).cells()) {
    for (const Cube& c : full_grid(amb, 2).cells()) {
      const bool in = tube_contains(amb, t, c);
      CHECK(in == oracle::contains(3, t, c));
      if (in) {
        for (unsigned l = 0; l <= 2; ++l) CHECK(tube_contains(amb, parent(amb, t, l), parent(amb, c, l)));
      }
    }
  }
}

TEST_CASE("parents") {
  const Ambient amb(2, 3);
  CHECK(parent(amb, make_cube(amb, 3, 5, 3), 1) == Cube{1, 1, 1});
  CHECK(parent(amb, make_cube(amb, 3, 5, 3), 3) == make_cube(amb, 3, 5, 3));
  CHECK(parent(amb, parent(amb, make_cube(amb, 3, 7, 6), 2), 1) == parent(amb, make_cube(amb, 3, 7, 6), 1));
  CHECK_THROWS(parent(amb, make_cube(amb, 1, 1, 1), 2));
}

TEST_CASE("cube distance") {
  const Ambient amb(2, 3);
  CHECK(cube_distance(amb, make_cube(amb, 3, 1, 2), make_cube(amb, 3, 5, 2)) == 2u);
  CHECK_FALSE(cube_distance(amb, make_cube(amb, 3, 1, 2), make_cube(amb, 3, 1, 2)).has_value());
  const Ambient amb3(3, 2);
  const auto cells = full_grid(amb3, 2).cells();
  for (const Cube& a : cells)
    for (const Cube& b : cells)
      for (const Cube& c : cells) {
        if (a == b || b == c || a == c) continue;
        CHECK(*cube_distance(amb3, a, c) >= std::min(*cube_distance(amb3, a, b), *cube_distance(amb3, b, c)));
      }
}

TEST_CASE("common tubes match enumeration") {
  const Ambient amb(3, 2);
  CHECK(count_common_tubes(amb, make_cube(amb, 2, 0, 0), make_cube(amb, 2, 3, 0)) == 3);
  const Ambient amb2(2, 2);
  CHECK(count_common_tubes(amb2, make_cube(amb2, 2, 0, 0), make_cube(amb2, 2, 1, 1)) == 1);
  CHECK(count_common_tubes(amb, make_cube(amb, 2, 0, 0), make_cube(amb, 2, 3, 1)) == 0);
  CHECK_THROWS(count_common_tubes(amb, make_cube(amb, 2, 1, 1), make_cube(amb, 2, 1, 1)));
  for (const Ambient& a : {Ambient(2, 3), Ambient(3, 2)}) {
    const auto cells = full_grid(a, a.n()).cells();
    for (const Cube& c1 : cells)
      for (const Cube& c2 : cells) {
        if (c1 == c2) continue;
        const Residue got = count_common_tubes(a, c1, c2);
        CHECK(got == oracle::common_tubes(a.p(), c1, c2));
        CHECK(got <= a.modulus(*cube_distance(a, c1, c2)));
      }
  }
}

TEST_CASE("tubes through a cube") {
  const Ambient amb(3, 3);
  const TubeSet t = tubes_through(amb, make_cube(amb, 1, 0, 0));
  CHECK(t.cells() == std::vector<Tube>{{1, 0, 0}, {1, 1, 0}, {1, 2, 0}});
  for (unsigned p : {2u, 3u})
    for (unsigned m = 0; m <= 3; ++m) {
      const Ambient a(p, 3);
      for (const Cube& c : full_grid(a, m).cells()) {
        const TubeSet ts = tubes_through(a, c);
        CHECK(ts.distinct_size() == a.modulus(m));
        for (const Tube& tb : ts.cells()) CHECK(tube_contains(a, tb, c));
      }
    }
}

TEST_CASE("every top-level cube lies on p^n tubes") {
  const Ambient amb(2, 3);
  const auto tubes = all_tubes(amb, 3).cells();
  for (const Cube& c : full_grid(amb, 3).cells()) {
    std::size_t n = 0;
    for (const Tube& t : tubes) n += tube_contains(amb, t, c);
    CHECK(n == 8);
  }
}

TEST_CASE("text forms round trip") {
  const Ambient amb(3, 3);
  CHECK(to_text(amb, make_cube(amb, 2, 4, 7)) == "3^2:(4,7)");
  CHECK(to_text(amb, make_tube(amb, 3, 1, 26)) == "3^3:[1,26]");
  CHECK(parse_cube(amb, "3^2:(4,7)") == make_cube(amb, 2, 4, 7));
  CHECK(parse_tube(amb, "3^3:[1,26]") == make_tube(amb, 3, 1, 26));
  CHECK_THROWS(parse_cube(amb, "3^2:(9,0)"));
  CHECK_THROWS(parse_cube(amb, "2^2:(1,0)"));
  CHECK_THROWS(parse_tube(amb, "3^4:[0,0]"));
}

TEST_CASE("cell sets keep multiplicity and weights") {
  const Ambient amb(2, 2);
  std::vector<Cube> cells{{2, 1, 1}, {2, 0, 0}, {2, 1, 1}};
  CubeSet s = CubeSet::from_cells(amb, 2, cells);
  CHECK(s.distinct_size() == 2);
  CHECK(s.total_multiplicity() == 3);
  CHECK(s.multiplicity(Cube{2, 1, 1}) == 2);
  s.set_weight(Cube{2, 0, 0}, Rational(1, 3));
  CHECK(s.weight(Cube{2, 0, 0}) == Rational(1, 3));
  CHECK_THROWS(s.set_weight(Cube{2, 3, 3}, Rational(1)));
  CHECK_THROWS(s.set_weight(Cube{2, 0, 0}, Rational(-1)));
  CHECK_THROWS(s.insert(Cube{1, 0, 0}));
}

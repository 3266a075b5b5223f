#include <doctest.h>

#include <cmath>

#include "pil/constructions.hpp"
#include "pil/setstats.hpp"

using namespace pil;

namespace {

CubeSet cubes(const Ambient& amb, unsigned level, std::vector<Cube> cs) { return CubeSet::from_cells(amb, level, cs); }

CubeSet cantor_product(unsigned n) {
  const Ambient amb(3, n);
  const auto A = cantor_1d(amb, DigitSet(3, {0, 1}));
  CubeSet P(amb, n);
  for (Residue x : A)
    for (Residue y : A) P.insert(Cube{n, x, y});
  return P;
}

const ScaledPower kOne{};

}  // namespace

TEST_CASE("covering numbers") {
  const Ambient amb(2, 3);
  const CubeSet P = cubes(amb, 3, {{3, 0, 0}, {3, 1, 0}, {3, 4, 4}});
  CHECK(covering_number(P, 1) == 2);
  CHECK(covering_number(P, 3) == 3);
  CHECK(covering_number(P, 0) == 1);
  const CubeSet grid = full_grid(amb, 3);
  for (unsigned m = 0; m <= 3; ++m) CHECK(covering_number(grid, m) == (Residue{1} << (2 * m)));
  CHECK_THROWS(covering_number(cubes(amb, 2, {{2, 0, 0}}), 3));
}

TEST_CASE("Frostman certificate of the Cantor product is 1") {
  const Exponent s = Exponent::log_of(2, Rational(2));
  for (unsigned n = 1; n <= 4; ++n) {
    const CubeSet P = cantor_product(n);
    const SpacingCertificate c = frostman_certificate(P, s);
    CHECK(compare(c.c_min, kOne) == 0);
    CHECK(compare(evaluate_witness(P, c), c.c_min) == 0);
    CHECK(covering_lower_bound_holds(c));
  }
}

TEST_CASE("Frostman certificate examples") {
  const Ambient amb(3, 2);
  CHECK(compare(frostman_certificate(full_grid(amb, 2), Exponent::rational(2)).c_min, kOne) == 0);
  // Singleton: C = p^{n s}.
  const CubeSet single = cubes(amb, 2, {{2, 1, 1}});
  const SpacingCertificate c = frostman_certificate(single, Exponent::rational(Rational(1, 2)));
  CHECK(compare(c.c_min, ScaledPower{BigRational(3), 1, Rational(0)}) == 0);
  CHECK(c.witness_level == 2);
  CHECK_THROWS(frostman_certificate(CubeSet(amb, 2), Exponent::rational(1)));
}

TEST_CASE("minimal constant is tight") {
  const Ambient amb(2, 4);
  CubeSet P(amb, 4);
  for (Residue x : {0u, 1u, 5u, 6u, 7u, 12u}) P.insert(Cube{4, x, x * 3 % 16});
  for (const Exponent& s : {Exponent::rational(Rational(1, 2)), Exponent::rational(Rational(3, 2)), Exponent::log_of(3)}) {
    const SpacingCertificate c = frostman_certificate(P, s);
    CHECK(frostman_holds(P, s, c.c_min));
    CHECK_FALSE(frostman_holds(P, s, c.c_min.scaled(BigRational(999999999, 1000000000))));
    CHECK(covering_lower_bound_holds(c));
    const SpacingCertificate k = katz_tao_certificate(P, s);
    CHECK(katz_tao_holds(P, s, k.c_min));
    CHECK_FALSE(katz_tao_holds(P, s, k.c_min.scaled(BigRational(999999999, 1000000000))));
  }
}

TEST_CASE("Katz-Tao certificate examples") {
  const Ambient amb(3, 3);
  CHECK(compare(katz_tao_certificate(cubes(amb, 3, {{3, 4, 5}}), Exponent::rational(1)).c_min, kOne) == 0);
  CHECK(compare(katz_tao_certificate(full_grid(amb, 3), Exponent::rational(2)).c_min, kOne) == 0);
  const auto A = cantor_1d(amb, DigitSet(3, {0, 1}));
  CubeSet line(amb, 3);
  for (Residue x : A) line.insert(Cube{3, x, 0});
  CHECK(compare(katz_tao_certificate(line, Exponent::log_of(2)).c_min, kOne) == 0);
}

TEST_CASE("uniformity check") {
  const Ambient amb(2, 2);
  const auto full = uniformity_check(full_grid(amb, 2), 1, 2);
  REQUIRE(full.uniform);
  CHECK(full.profile->counts == std::vector<std::uint64_t>{8, 8});
  // One level-1 cell with 3 children, another with 1.
  const CubeSet skew = cubes(amb, 2, {{2, 0, 0}, {2, 2, 0}, {2, 0, 2}, {2, 1, 1}});
  CHECK_FALSE(uniformity_check(skew, 1, 2).uniform);
  CHECK_THROWS(uniformity_check(skew, 3, 1));
  const CubeSet cp = cantor_product(4);
  for (unsigned T : {1u, 2u, 4u}) {
    const auto u = uniformity_check(cp, T, 4 / T);
    REQUIRE(u.uniform);
    for (auto N : u.profile->counts) CHECK(N == power_class_ceiling(std::uint64_t{1} << (2 * T), 3));
  }
}

TEST_CASE("uniformity is invariant under swapping coordinates") {
  SplitMix64 rng(5);
  const Ambient amb(2, 4);
  for (int trial = 0; trial < 50; ++trial) {
    CubeSet P(amb, 4), Q(amb, 4);
    for (std::uint64_t idx : sample_without_replacement(rng, 256, 1 + rng.below(40))) {
      P.insert(Cube{4, idx / 16, idx % 16});
      Q.insert(Cube{4, idx % 16, idx / 16});
    }
    CHECK(uniformity_check(P, 2, 2).uniform == uniformity_check(Q, 2, 2).uniform);
    CHECK(uniformity_check(P, 1, 4).uniform == uniformity_check(Q, 1, 4).uniform);
  }
}

TEST_CASE("power classes") {
  CHECK(power_class_ceiling(1, 2) == 2);
  CHECK(power_class_ceiling(3, 2) == 4);
  CHECK(power_class_ceiling(4, 2) == 8);
  CHECK(power_class(1, 3) == 0);
  CHECK(power_class(9, 3) == 2);
  CHECK_THROWS(power_class(0, 3));
}

TEST_CASE("box dimension fits") {
  const Ambient amb(3, 3);
  const BoxDimFit g = box_dim_fit(full_grid(amb, 3), 0, 3);
  CHECK(g.slope == doctest::Approx(2.0));
  CHECK(g.exact_fit);
  const BoxDimFit c = box_dim_fit(cantor_product(6), 0, 6);
  CHECK(c.slope == doctest::Approx(2 * std::log(2.0) / std::log(3.0)).epsilon(1e-12));
  CHECK(c.exact_fit);
  for (double r : c.residuals) CHECK(r == 0.0);
  for (unsigned m = 0; m <= 6; ++m) CHECK(c.counts[m] == (std::uint64_t{1} << (2 * m)));
  const BoxDimFit s = box_dim_fit(cubes(amb, 3, {{3, 1, 1}}), 0, 3);
  CHECK(s.slope == doctest::Approx(0.0));
  CHECK_THROWS(box_dim_fit(full_grid(amb, 3), 2, 2));
}

TEST_CASE("certificate record") {
  const Ambient amb(3, 2);
  const auto rec = frostman_certificate(full_grid(amb, 2), Exponent::rational(2)).to_record(amb);
  CHECK(rec.find("kind=frostman") != std::string::npos);
  CHECK(rec.find("s=2/1") != std::string::npos);
  CHECK(rec.find("C_min=1/1") != std::string::npos);
}

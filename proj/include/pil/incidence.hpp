#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pil/configuration.hpp"
#include "pil/padic.hpp"
#include "pil/rational.hpp"

namespace pil {

/// Weighted incidences: sum over cubes p (with multiplicity) of w(p) times the
/// number of tubes (with multiplicity) containing p. Tubes may be coarser than
/// the cubes.
Rational incidence_count(const CubeSet& P, const TubeSet& T);

/// Level-(level(T) - k) parents of T, keeping total multiplicity.
TubeSet thicken_tubes(const TubeSet& T, unsigned k);

/// Number of distinct Q in D_Delta(P) with |T ∩ Q ∩ P| >= b, where the count
/// inside Q uses P's multiplicities.
std::uint64_t n_delta_b(const Tube& t, const CubeSet& P, unsigned delta_level, std::uint64_t b);

struct RichTube {
  Tube tube;
  std::uint64_t n_value = 0;
  /// |T^rho ∩ D_rho(P)| <= Delta^{-eps} rho |D_rho(P)| at every level 1..delta_level;
  /// std::nullopt when no eps was supplied.
  std::optional<bool> spacing_ok;
};

struct RichTubeStats {
  unsigned delta_level = 0;
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::vector<RichTube> tubes;      ///< tubes with N_{Delta,b} >= a, sorted
  std::uint64_t sum_squares = 0;    ///< sum of N^2 over all scanned tubes with N >= 2
  std::uint64_t J = 0;              ///< triple count at Delta
  Rational K{0};                    ///< smallest K making P a (Delta, 1, K)-set (multiset counts)
  /// |T_{a,b}| a^2 b^2 / (K log(1/Delta) |P|^2); 0 when undefined.
  double weak_rich_ratio = 0.0;

  static std::string csv_header();
  /// One row per rich tube: tube,N,a,b,delta,spacing_ok
  std::string csv_rows(const Ambient& amb) const;
};

struct RichTubeOptions {
  std::optional<Rational> eps;
  /// Candidate tubes at level(P); default scans every tube (p^{2n} <= 10^6).
  std::optional<TubeSet> candidates;
};

RichTubeStats rich_tubes(const CubeSet& P, unsigned delta_level, std::uint64_t a, std::uint64_t b,
                         const RichTubeOptions& options = {});

/// J = #{(p1, p2, T): p1^Delta != p2^Delta, p1, p2 ∈ T}, ordered pairs with
/// multiplicity, T ranging over all tubes at level(P). Computed by scanning
/// tubes and by summing common-tube counts over cube pairs; throws
/// std::logic_error if the two disagree.
std::uint64_t triple_count_J(const CubeSet& P, unsigned delta_level);
std::uint64_t triple_count_J_by_tubes(const CubeSet& P, unsigned delta_level);
std::uint64_t triple_count_J_by_pairs(const CubeSet& P, unsigned delta_level);

/// The intersection of a level-n tube with a level-m cube Q, keyed by
/// (Q, slope mod p^{n-m}, anchor = a x_Q + b mod p^n).
struct Tubelet {
  Cube cell;
  Residue slope_class = 0;
  Residue anchor = 0;
  friend auto operator<=>(const Tubelet&, const Tubelet&) = default;
};

/// Tubelet of tube t inside cube q, or std::nullopt when they are disjoint.
std::optional<Tubelet> tubelet_of(const Ambient& amb, const Tube& t, const Cube& q);

struct TubeletEntry {
  Tubelet tubelet;
  std::uint64_t n_value = 0;       ///< N_{Delta,b}(u)
  std::uint64_t multiplicity = 0;  ///< m(u): tubes of the family (with multiplicity) containing u
};

struct TubeletDecomposition {
  unsigned w_level = 0;
  unsigned delta_level = 0;
  std::uint64_t b = 0;
  std::vector<TubeletEntry> tubelets;  ///< sorted by tubelet
  std::uint64_t total_multiplicity = 0;
};

/// Tubelets T ∩ Q for T in Tset and Q in D_w(P).
TubeletDecomposition tubelet_decompose(const TubeSet& Tset, const CubeSet& P, unsigned w_level,
                                       unsigned delta_level, std::uint64_t b);

/// sum over T of |T^w ∩ D_w(P)| (with T's multiplicity).
std::uint64_t tube_cell_incidences(const TubeSet& Tset, const CubeSet& P, unsigned w_level);

struct FilterResult {
  Configuration config;                 ///< P' with families T'(p)
  std::vector<Tube> bad_tubes;          ///< tubes shared by >= theta cubes
  double theta = 0.0;
  double retained_fraction = 0.0;       ///< |P'| / |P| over distinct cubes
  std::uint64_t max_original_multiplicity = 0;
  std::uint64_t max_surviving_multiplicity = 0;

  static std::string csv_header();
  std::string csv_row() const;
};

/// Removes tubes shared by >= theta families and keeps the cubes that retain
/// at least half their family. Throws if theta < 1 or a cube has no family.
FilterResult bad_tube_filter(const Configuration& cfg, double theta);

/// Multiplicity of every family tube: |{p : T ∈ T(p)}|.
std::vector<std::pair<Tube, std::uint64_t>> family_multiplicities(const Configuration& cfg);

}  // namespace pil

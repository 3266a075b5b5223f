#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pil/configuration.hpp"
#include "pil/exponent.hpp"
#include "pil/padic.hpp"
#include "pil/rational.hpp"
#include "pil/setstats.hpp"

namespace pil {

/// Default polylog slack (log_p(1/delta) + 1)^3 for a configuration at `level`.
double default_slack(unsigned level);

struct NiceCertificate {
  Exponent s;
  ScaledPower C;                ///< max over cubes of the family's Frostman constant
  Cube worst_cube;              ///< cube whose family attains C
  std::uint64_t M_min = 0;
  std::uint64_t M_max = 0;
  double similar_factor = 0.0;  ///< M_max / M_min
  Rational sigma{2};
  bool nice = false;            ///< M_max <= sigma * M_min
  bool size_bound_ok = false;   ///< M_min >= C^{-1} delta^{-s}, decided exactly

  std::string to_record(const Ambient& amb) const;
};

/// Frostman certificates of every family in tube-parameter space (via duality),
/// plus the family-size range. Throws if some cube has an empty family.
NiceCertificate nice_certify(const Configuration& cfg, const Exponent& s, Rational sigma = Rational(2));

struct UniformizeStage {
  unsigned from_level = 0;         ///< l_{j-1}
  unsigned to_level = 0;           ///< l_j
  std::uint64_t kept_class = 0;    ///< N_j: kept cells had branching in [N_j/p, N_j)
  std::uint64_t before = 0;        ///< |P|_delta entering the stage
  std::uint64_t after = 0;         ///< |P|_delta leaving the stage
};

struct UniformizeResult {
  CubeSet kept;
  BranchingProfile profile;
  std::vector<UniformizeStage> stages;  ///< in processing order (finest step first)
  double ratio = 0.0;                   ///< |P'|_delta / |P|_delta
  double guaranteed = 0.0;              ///< prod_j 1/(2 (l_j - l_{j-1}) + 1)
  std::optional<double> block_bound;    ///< (pT)^{-N}; block ladders only
  bool meets_guarantee = false;
  bool meets_block_bound = false;

  explicit UniformizeResult(const CubeSet& empty) : kept(empty) {}
};

/// Bottom-up pigeonholing over the ladder 0 = l_0 < ... < l_N = level(P):
/// at each step, cells of level l_{j-1} are classed by the p-power class of
/// their number of surviving level-l_j children; the class with the most
/// surviving delta-cubes is kept (ties to the smaller class).
UniformizeResult uniformize_ladder(const CubeSet& P, const std::vector<unsigned>& ladder);
/// The ladder Delta_j = p^{-jT}; requires level(P) == N*T.
UniformizeResult uniformize(const CubeSet& P, unsigned block, unsigned levels);

enum class RefinementKind { Plain, AtResolution, Nice };

struct RefinementReport {
  RefinementKind kind = RefinementKind::Plain;
  bool valid = false;
  double covering_ratio = 0.0;       ///< |P'|_delta / |P|_delta
  std::optional<double> mass_ratio;  ///< sum |T'(p)| / (|P0|_delta M0) for configurations
  std::vector<double> family_factors;  ///< |T'(p)| / |T0(p)| per kept cube
  double slack = 0.0;
  std::string reason;                ///< why the check failed; empty when valid
};

/// Sub-multiset check of P' against P. With `delta_level`, P' must also be a
/// union of full fibers P ∩ Q over some Delta-cells Q. Ratios are tested
/// against 1/slack. Throws if P' is not contained in P.
RefinementReport refinement_check(const CubeSet& sub, const CubeSet& P, std::optional<unsigned> delta_level = {},
                                  std::optional<double> slack = {});

/// Configuration refinement: P ⊆ P0, T(p) ⊆ T0(p) and
/// sum |T(p)| >= |P0|_delta M0 / slack, with M0 = the largest family size of cfg0.
RefinementReport configuration_refinement_check(const Configuration& cfg, const Configuration& cfg0,
                                                std::optional<double> slack = {});

struct NiceRefineResult {
  Configuration config;
  RefinementReport report;        ///< refinement check of the output against cfg0
  unsigned kept_class = 0;        ///< family sizes in [p^c, p^{c+1})
  double mass_ratio = 0.0;        ///< kept family mass / input family mass
  double mass_floor = 0.0;        ///< 1 / (2 log_p(1/delta) + 1)
  bool mass_bound_ok = false;
};

/// Pigeonholes the cubes of a refinement `cfg` of `cfg0` by the p-power class
/// of |T(p)| and keeps the class with the largest total family size. Throws
/// std::invalid_argument if cfg fails configuration_refinement_check.
NiceRefineResult nice_refine(const Configuration& cfg0, const NiceCertificate& cert0, const Configuration& cfg,
                             std::optional<double> slack = {});

struct ScaleStage {
  std::string stage;
  std::optional<std::uint64_t> kept_class;  ///< upper end of the kept p-power class
  double retained_ratio = 0.0;

  static std::string csv_header();  ///< stage,kept_class,retained_ratio
  std::string csv_row() const;
};

struct CoverReport {
  unsigned fine_level = 0;
  unsigned delta_level = 0;
  std::uint64_t input_cubes = 0;    ///< |P|_delta of the input
  double input_M = 0.0;             ///< mean input family size
  std::uint64_t covered_mass = 0;   ///< sum over Delta-cells, cubes and Delta-tubes of |T_p ∩ T|_delta
  double ratio = 0.0;               ///< covered_mass / (|P|_delta M)
  double floor = 0.0;               ///< (log_p(1/delta) + 1)^{-5}
  bool ratio_ok = false;
  double x_identity_min = 0.0;      ///< min over Delta-cells of X |T1(Q)|_Delta / (|P1 ∩ Q| m)
  double x_identity_max = 0.0;
  bool x_identity_ok = false;       ///< every ratio within [1/slack, slack]
  double slack = 0.0;

  static std::string csv_header();
  std::string csv_row() const;
};

struct ScaleDeltaResult {
  Configuration fine;
  Configuration coarse;
  CoverReport report;
  std::vector<ScaleStage> stages;
  std::optional<NiceCertificate> coarse_certificate;  ///< nice_certify(coarse, s) when coarse is nonempty
};

/// Passes to a refinement of cfg that is uniform over {1, Delta, delta} and
/// covered by a configuration at level delta_level, following five pigeonhole
/// stages. Requires 0 < delta_level < level(cfg) and a nonempty family for
/// every cube.
ScaleDeltaResult build_scale_delta(const Configuration& cfg, unsigned delta_level, const Exponent& s,
                                   std::optional<double> slack = {});

}  // namespace pil

#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pil/padic.hpp"

namespace pil {

/// A cube set P, a tube set T and, for each cube, its associated family
/// T(p) ⊆ T of tubes that contain it.
struct Configuration {
  Ambient amb;
  CubeSet cubes;
  TubeSet tubes;
  std::map<Cube, std::vector<Tube>> families;  ///< sorted, duplicate-free tube lists

  Configuration(Ambient a, unsigned level) : amb(a), cubes(a, level), tubes(a, level) {}

  unsigned level() const { return cubes.level(); }

  /// Adds a cube with its family; family tubes are added to T.
  void add(const Cube& c, std::vector<Tube> family);

  /// Throws std::invalid_argument if a family member misses its cube, a
  /// family is not contained in T, or a family key is not in P.
  void validate() const;

  std::size_t family_size(const Cube& c) const;
  std::size_t total_family_size() const;
};

/// Line-oriented text form: a header "p n", then one line per cube
/// ("p^m:(x,y)", optional " *mult" and " w=num/den"), one line per tube of T
/// ("p^m:[a,b]", optional " *mult"), and one "cube -> tube,tube,..." line per
/// family. '#' starts a comment.
void write_configuration(std::ostream& os, const Configuration& cfg);
Configuration read_configuration(std::istream& is);

std::string to_string(const Configuration& cfg);

/// Restriction to the given cubes, keeping only their families; T becomes the union of those families.
Configuration restrict_to(const Configuration& cfg, const std::vector<Cube>& keep);

}  // namespace pil

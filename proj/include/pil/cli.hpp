#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pil {

/// Invalid experiment-spec field; `field` names the offending key.
class SpecError : public std::invalid_argument {
 public:
  SpecError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct GeneratorSpec {
  std::string kind = "product";  ///< product | random | wolff | full
  std::string a_digits = "0,1";
  std::string b_digits = "0,1";
  std::string slope_digits = "0,1";
  std::uint64_t cubes = 16;      ///< random: |P|
  std::uint64_t M = 4;           ///< random: family size
  std::uint64_t step = 1;        ///< wolff: progression step
  std::uint64_t len = 2;         ///< wolff: progression length
};

/// A command with its parameters; loaded from JSON, overridden by flags.
struct ExperimentSpec {
  std::string command;
  unsigned p = 3;
  unsigned n = 3;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string input;  ///< configuration text file; generator used when empty
  GeneratorSpec generator;
  std::string s;      ///< exponent text, e.g. "1/2" or "1/1*log(2)"
  std::string t = "1/2";
  std::string eps;
  std::string eta;
  unsigned k = 1;
  std::optional<unsigned> delta;
  std::uint64_t a = 1;
  std::uint64_t b = 1;
  unsigned block = 1;
  std::optional<unsigned> levels;
  std::vector<unsigned> n_grid;
  std::vector<std::string> t_grid;
  std::string slack;
  unsigned trials = 20;
};

/// Parses the JSON experiment document (see docs/experiment.schema.json).
/// Throws SpecError naming the first invalid field.
ExperimentSpec parse_experiment_spec(const std::string& json_text);

/// Column order of `sweep` output.
std::string sweep_csv_header();

/// Runs the command line `args` (without the program name). Returns 0 on
/// success, 1 on an assertion failure and 2 on a usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pil

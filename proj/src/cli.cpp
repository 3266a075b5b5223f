#include "pil/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>
#include <type_traits>

#include "pil/configuration.hpp"
#include "pil/constructions.hpp"
#include "pil/exponent.hpp"
#include "pil/fourier.hpp"
#include "pil/incidence.hpp"
#include "pil/multiscale.hpp"
#include "pil/setstats.hpp"
#include "pil/verify.hpp"

namespace pil {
namespace {

using json = nlohmann::json;

template <class T>
T get_field(const json& j, const std::string& field) {
  if constexpr (std::is_unsigned_v<T>) {
    if (!j.is_number_unsigned()) throw SpecError(field, "expected a non-negative integer");
    if (j.get<std::uint64_t>() > std::numeric_limits<T>::max()) throw SpecError(field, "out of range");
  }
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw SpecError(field, "wrong type");
  }
}

void read_generator(const json& j, GeneratorSpec& g) {
  if (!j.is_object()) throw SpecError("generator", "expected an object");
  for (const auto& [key, v] : j.items()) {
    const std::string f = "generator." + key;
    if (key == "kind") {
      g.kind = get_field<std::string>(v, f);
    } else if (key == "a_digits") {
      g.a_digits = get_field<std::string>(v, f);
    } else if (key == "b_digits") {
      g.b_digits = get_field<std::string>(v, f);
    } else if (key == "slope_digits") {
      g.slope_digits = get_field<std::string>(v, f);
    } else if (key == "cubes") {
      g.cubes = get_field<std::uint64_t>(v, f);
    } else if (key == "M") {
      g.M = get_field<std::uint64_t>(v, f);
    } else if (key == "step") {
      g.step = get_field<std::uint64_t>(v, f);
    } else if (key == "len") {
      g.len = get_field<std::uint64_t>(v, f);
    } else {
      throw SpecError(f, "unknown field");
    }
  }
}

void read_params(const json& j, ExperimentSpec& s) {
  if (!j.is_object()) throw SpecError("params", "expected an object");
  for (const auto& [key, v] : j.items()) {
    const std::string f = "params." + key;
    if (key == "s") {
      s.s = get_field<std::string>(v, f);
    } else if (key == "t") {
      s.t = get_field<std::string>(v, f);
    } else if (key == "eps") {
      s.eps = get_field<std::string>(v, f);
    } else if (key == "eta") {
      s.eta = get_field<std::string>(v, f);
    } else if (key == "k") {
      s.k = get_field<unsigned>(v, f);
    } else if (key == "delta") {
      s.delta = get_field<unsigned>(v, f);
    } else if (key == "a") {
      s.a = get_field<std::uint64_t>(v, f);
    } else if (key == "b") {
      s.b = get_field<std::uint64_t>(v, f);
    } else if (key == "block") {
      s.block = get_field<unsigned>(v, f);
    } else if (key == "levels") {
      s.levels = get_field<unsigned>(v, f);
    } else if (key == "n_grid") {
      s.n_grid = get_field<std::vector<unsigned>>(v, f);
    } else if (key == "t_grid") {
      s.t_grid = get_field<std::vector<std::string>>(v, f);
    } else {
      throw SpecError(f, "unknown field");
    }
  }
}

Ambient checked_ambient(unsigned p, unsigned n, const std::string& field) {
  try {
    return Ambient(p, n);
  } catch (const std::exception& e) {
    throw SpecError(field, e.what());
  }
}

Exponent checked_exponent(const std::string& text, const std::string& field) {
  try {
    return Exponent::parse(text);
  } catch (const std::exception& e) {
    throw SpecError(field, e.what());
  }
}

Rational checked_rational(const std::string& text, const std::string& field) {
  try {
    return Rational::parse(text);
  } catch (const std::exception& e) {
    throw SpecError(field, e.what());
  }
}

DigitSet checked_digits(unsigned p, const std::string& text, const std::string& field) {
  try {
    return DigitSet::parse(p, text);
  } catch (const std::exception& e) {
    throw SpecError(field, e.what());
  }
}

void validate(const ExperimentSpec& s) {
  checked_ambient(s.p, s.n, "n");
  if (!s.s.empty()) checked_exponent(s.s, "s");
  checked_exponent(s.t, "t");
  if (!s.eps.empty()) checked_rational(s.eps, "eps");
  if (!s.eta.empty()) checked_rational(s.eta, "eta");
  if (!s.slack.empty() && checked_rational(s.slack, "slack") <= Rational(0)) throw SpecError("slack", "must be positive");
  if (s.a < 1) throw SpecError("a", "must be at least 1");
  if (s.b < 1) throw SpecError("b", "must be at least 1");
  if (s.block < 1) throw SpecError("block", "must be at least 1");
  for (unsigned n : s.n_grid) checked_ambient(s.p, n, "n_grid");
  for (const auto& t : s.t_grid) checked_exponent(t, "t_grid");
  const auto& g = s.generator;
  if (g.kind != "product" && g.kind != "random" && g.kind != "wolff" && g.kind != "full") {
    throw SpecError("generator.kind", "expected product, random, wolff or full");
  }
  if (g.kind == "product") checked_digits(s.p, g.a_digits, "generator.a_digits");
  if (g.kind == "product") checked_digits(s.p, g.b_digits, "generator.b_digits");
  if (g.kind == "product" || g.kind == "random") checked_digits(s.p, g.slope_digits, "generator.slope_digits");
}

Configuration generate(const GeneratorSpec& g, const Ambient& amb, std::optional<std::uint64_t> seed) {
  if (g.kind == "product") {
    const auto A = cantor_1d(amb, checked_digits(amb.p(), g.a_digits, "generator.a_digits"));
    const auto B = cantor_1d(amb, checked_digits(amb.p(), g.b_digits, "generator.b_digits"));
    const auto S = cantor_1d(amb, checked_digits(amb.p(), g.slope_digits, "generator.slope_digits"));
    return product_config(amb, A, B, S);
  }
  if (g.kind == "random") {
    if (!seed) throw SpecError("seed", "required for random generators");
    try {
      return random_config(*seed, amb, g.cubes, g.M, checked_digits(amb.p(), g.slope_digits, "generator.slope_digits"));
    } catch (const SpecError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw SpecError("generator", e.what());
    }
  }
  if (g.kind == "wolff") return wolff_grid_config(amb, g.step, g.len);
  const auto all = cantor_1d(amb, DigitSet::full(amb.p()));
  return product_config(amb, all, all, all);
}

Configuration load_configuration(const ExperimentSpec& s) {
  if (!s.input.empty()) {
    std::ifstream is(s.input);
    if (!is) throw SpecError("input", "cannot open '" + s.input + "'");
    return read_configuration(is);
  }
  return generate(s.generator, checked_ambient(s.p, s.n, "n"), s.seed);
}

/// The exponent s for commands that need one: explicit, else the slope-digit dimension.
Exponent resolve_s(const ExperimentSpec& s) {
  if (!s.s.empty()) return checked_exponent(s.s, "s");
  if (s.input.empty() && (s.generator.kind == "product" || s.generator.kind == "random")) {
    return checked_digits(s.p, s.generator.slope_digits, "generator.slope_digits").dimension();
  }
  throw SpecError("s", "required");
}

std::optional<double> resolve_slack(const ExperimentSpec& s) {
  if (s.slack.empty()) return std::nullopt;
  return checked_rational(s.slack, "slack").to_double();
}

unsigned worker_count(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PIL_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

std::string sweep_row(const ExperimentSpec& spec, std::size_t index, unsigned n, const std::string& t_text) {
  const Ambient amb(spec.p, n);
  const std::uint64_t seed = derive_seed(spec.seed.value_or(0), index);
  const Configuration cfg = generate(spec.generator, amb, seed);
  const std::uint64_t tubes = cfg.tubes.distinct_size();
  std::uint64_t M = 0;
  for (const auto& [c, f] : cfg.families) M = std::max<std::uint64_t>(M, f.size());
  const Exponent t = Exponent::parse(t_text);
  // |T|_delta / (delta^{-t} M) = (|T| / M) p^{-n t}
  const ScaledPower ratio = ScaledPower::of(BigRational(BigInt(tubes), BigInt(M)), amb.p(), t, -static_cast<std::int64_t>(n));
  const bool ge_one = compare(ratio, ScaledPower{}) >= 0;
  const unsigned delta = std::min(spec.delta.value_or(n / 2), n);
  const RichTubeStats rich = rich_tubes(cfg.cubes, delta, spec.a, spec.b);
  std::ostringstream os;
  os.precision(17);
  os << index << "," << amb.p() << "," << n << "," << t.to_string() << "," << spec.eps << "," << spec.eta << "," << seed
     << "," << cfg.cubes.distinct_size() << "," << tubes << "," << M << "," << ratio.to_double() << ","
     << (ge_one ? 1 : 0) << "," << delta << "," << rich.tubes.size() << "," << rich.sum_squares << "," << rich.J << ","
     << rich.weak_rich_ratio;
  return os.str();
}

int cmd_sweep(const ExperimentSpec& spec, std::ostream& out) {
  struct Point {
    unsigned n;
    std::string t;
  };
  std::vector<Point> points;
  const std::vector<std::string> ts = spec.t_grid.empty() ? std::vector<std::string>{spec.t} : spec.t_grid;
  for (unsigned n : spec.n_grid) {
    for (const auto& t : ts) points.push_back(Point{n, t});
  }
  if (spec.generator.kind == "random" && !points.empty() && !spec.seed) throw SpecError("seed", "required for random generators");
  std::vector<std::string> rows(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        rows[i] = sweep_row(spec, i, points[i].n, points[i].t);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned workers = worker_count(points.size());
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  out << sweep_csv_header() << "\n";
  for (const auto& r : rows) out << r << "\n";
  return 0;
}

int cmd_check(const ExperimentSpec& spec, std::ostream& out) {
  const Configuration cfg = load_configuration(spec);
  cfg.validate();
  out << "p=" << cfg.amb.p() << " n=" << cfg.amb.n() << " level=" << cfg.level() << " cubes=" << cfg.cubes.distinct_size()
      << " tubes=" << cfg.tubes.distinct_size() << " families=" << cfg.families.size()
      << " family_mass=" << cfg.total_family_size() << "\n";
  if (!spec.s.empty() || spec.input.empty()) {
    const Exponent s = resolve_s(spec);
    if (!cfg.cubes.empty()) out << frostman_certificate(cfg.cubes, s).to_record(cfg.amb) << "\n";
    if (!cfg.cubes.empty() && cfg.families.size() == cfg.cubes.distinct_size()) {
      out << nice_certify(cfg, s).to_record(cfg.amb) << "\n";
    } else if (!cfg.cubes.empty()) {
      out << "nice=skipped cubes_without_family=" << cfg.cubes.distinct_size() - cfg.families.size() << "\n";
    }
  }
  return 0;
}

int cmd_incidence(const ExperimentSpec& spec, std::ostream& out) {
  const Configuration cfg = load_configuration(spec);
  out << "k,tube_level,incidences\n";
  for (unsigned k = 0; k < std::max(cfg.tubes.level(), 1u); ++k) {
    const TubeSet T = k == 0 ? cfg.tubes : thicken_tubes(cfg.tubes, k);
    out << k << "," << T.level() << "," << incidence_count(cfg.cubes, T).to_string() << "\n";
  }
  return 0;
}

int cmd_dft(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  const Configuration cfg = load_configuration(spec);
  out << HighLowReport::csv_header() << "\n";
  int status = 0;
  for (const HighLowReport& r : highlow_split_all(cfg.cubes, cfg.tubes)) {
    out << r.csv_row() << "\n";
    if (!r.identity_ok() || !r.low_ok() || !r.high_ok() || !r.inequality_ok()) {
      err << "FAIL [high-low split] k=" << r.k << "\n";
      status = 1;
    }
  }
  return status;
}

int cmd_uniformize(const ExperimentSpec& spec, const std::string& save, std::ostream& out) {
  const Configuration cfg = load_configuration(spec);
  const unsigned levels = spec.levels.value_or(cfg.level() / spec.block);
  const UniformizeResult u = uniformize(cfg.cubes, spec.block, levels);
  out.precision(17);
  out << "block,levels,input,kept,ratio,guaranteed,meets_guarantee,block_bound,meets_block_bound\n"
      << spec.block << "," << levels << "," << cfg.cubes.distinct_size() << "," << u.kept.distinct_size() << ","
      << u.ratio << "," << u.guaranteed << "," << (u.meets_guarantee ? 1 : 0) << "," << u.block_bound.value_or(0.0) << ","
      << (u.meets_block_bound ? 1 : 0) << "\n";
  if (!save.empty()) {
    std::ofstream os(save);
    if (!os) throw SpecError("save", "cannot write '" + save + "'");
    write_configuration(os, restrict_to(cfg, u.kept.cells()));
  }
  return u.meets_guarantee ? 0 : 1;
}

int cmd_richtubes(const ExperimentSpec& spec, std::ostream& out) {
  const Configuration cfg = load_configuration(spec);
  RichTubeOptions opts;
  if (!spec.eps.empty()) opts.eps = checked_rational(spec.eps, "eps");
  const unsigned delta = spec.delta.value_or(cfg.level() / 2);
  if (delta > cfg.level()) throw SpecError("delta", "finer than the configuration");
  const RichTubeStats st = rich_tubes(cfg.cubes, delta, spec.a, spec.b, opts);
  out << RichTubeStats::csv_header() << "\n" << st.csv_rows(cfg.amb);
  return st.sum_squares * spec.b * spec.b <= 2 * st.J ? 0 : 1;
}

int cmd_buildscale(const ExperimentSpec& spec, const std::string& fine_out, const std::string& coarse_out,
                   const std::string& stages_out, std::ostream& out) {
  const Configuration cfg = load_configuration(spec);
  const unsigned delta = spec.delta.value_or(cfg.level() / 2);
  const ScaleDeltaResult r = build_scale_delta(cfg, delta, resolve_s(spec), resolve_slack(spec));
  out << CoverReport::csv_header() << "\n" << r.report.csv_row() << "\n";
  auto save = [](const std::string& path, const std::string& field, const std::function<void(std::ostream&)>& fn) {
    if (path.empty()) return;
    std::ofstream os(path);
    if (!os) throw SpecError(field, "cannot write '" + path + "'");
    fn(os);
  };
  save(fine_out, "fine-out", [&](std::ostream& os) { write_configuration(os, r.fine); });
  save(coarse_out, "coarse-out", [&](std::ostream& os) { write_configuration(os, r.coarse); });
  save(stages_out, "stages-out", [&](std::ostream& os) {
    os << ScaleStage::csv_header() << "\n";
    for (const auto& st : r.stages) os << st.csv_row() << "\n";
  });
  return 0;
}

/// Registers a flag that overrides the spec only when given on the command line.
class Overrides {
 public:
  explicit Overrides(CLI::App* app) : app_(app) {}

  template <class T>
  void add(const std::string& name, const std::string& desc, std::function<void(ExperimentSpec&, const T&)> set) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app_->add_option(name, *value, desc);
    options_.emplace_back(name, opt);
    apply_.push_back([opt, value, set](ExperimentSpec& s) {
      if (opt->count() > 0) set(s, *value);
    });
  }

  void apply(ExperimentSpec& s) const {
    for (const auto& fn : apply_) fn(s);
  }

  bool given(const std::string& name) const {
    for (const auto& [n, opt] : options_) {
      if (n == name) return opt->count() > 0;
    }
    return false;
  }

 private:
  CLI::App* app_;
  std::vector<std::function<void(ExperimentSpec&)>> apply_;
  std::vector<std::pair<std::string, CLI::Option*>> options_;
};

void add_spec_flags(Overrides& o) {
  o.add<unsigned>("--p", "prime p", [](ExperimentSpec& s, const unsigned& v) { s.p = v; });
  o.add<unsigned>("--n", "top level n (delta = p^-n)", [](ExperimentSpec& s, const unsigned& v) { s.n = v; });
  o.add<std::uint64_t>("--seed", "master seed", [](ExperimentSpec& s, const std::uint64_t& v) { s.seed = v; });
  o.add<std::string>("--out", "output path (default stdout)", [](ExperimentSpec& s, const std::string& v) { s.out = v; });
  o.add<std::string>("--slack", "polylog slack as num/den", [](ExperimentSpec& s, const std::string& v) { s.slack = v; });
  o.add<unsigned>("--trials", "number of random trials", [](ExperimentSpec& s, const unsigned& v) { s.trials = v; });
  o.add<std::string>("--in", "configuration text file", [](ExperimentSpec& s, const std::string& v) { s.input = v; });
  o.add<std::string>("--kind", "generator: product|random|wolff|full",
                     [](ExperimentSpec& s, const std::string& v) { s.generator.kind = v; });
  o.add<std::string>("--a-digits", "digits of A", [](ExperimentSpec& s, const std::string& v) { s.generator.a_digits = v; });
  o.add<std::string>("--b-digits", "digits of B", [](ExperimentSpec& s, const std::string& v) { s.generator.b_digits = v; });
  o.add<std::string>("--slope-digits", "slope digits",
                     [](ExperimentSpec& s, const std::string& v) { s.generator.slope_digits = v; });
  o.add<std::uint64_t>("--cubes", "random: number of cubes",
                       [](ExperimentSpec& s, const std::uint64_t& v) { s.generator.cubes = v; });
  o.add<std::uint64_t>("--M", "random: family size", [](ExperimentSpec& s, const std::uint64_t& v) { s.generator.M = v; });
  o.add<std::uint64_t>("--step", "wolff: progression step",
                       [](ExperimentSpec& s, const std::uint64_t& v) { s.generator.step = v; });
  o.add<std::uint64_t>("--len", "wolff: progression length",
                       [](ExperimentSpec& s, const std::uint64_t& v) { s.generator.len = v; });
  o.add<std::string>("--s", "exponent s", [](ExperimentSpec& s, const std::string& v) { s.s = v; });
  o.add<std::string>("--t", "exponent t", [](ExperimentSpec& s, const std::string& v) { s.t = v; });
  o.add<std::string>("--eps", "epsilon as num/den", [](ExperimentSpec& s, const std::string& v) { s.eps = v; });
  o.add<std::string>("--eta", "eta as num/den", [](ExperimentSpec& s, const std::string& v) { s.eta = v; });
  o.add<unsigned>("--k", "cutoff exponent", [](ExperimentSpec& s, const unsigned& v) { s.k = v; });
  o.add<unsigned>("--delta", "Delta level", [](ExperimentSpec& s, const unsigned& v) { s.delta = v; });
  o.add<std::uint64_t>("--a", "rich threshold a", [](ExperimentSpec& s, const std::uint64_t& v) { s.a = v; });
  o.add<std::uint64_t>("--b", "rich threshold b", [](ExperimentSpec& s, const std::uint64_t& v) { s.b = v; });
  o.add<unsigned>("--block", "block exponent T", [](ExperimentSpec& s, const unsigned& v) { s.block = v; });
  o.add<unsigned>("--levels", "number of levels N", [](ExperimentSpec& s, const unsigned& v) { s.levels = v; });
  o.add<std::vector<unsigned>>("--n-grid", "sweep levels",
                               [](ExperimentSpec& s, const std::vector<unsigned>& v) { s.n_grid = v; });
  o.add<std::vector<std::string>>("--t-grid", "sweep exponents",
                                  [](ExperimentSpec& s, const std::vector<std::string>& v) { s.t_grid = v; });
}

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw SpecError("config", "cannot open '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

ExperimentSpec parse_experiment_spec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw SpecError("config", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SpecError("config", "expected a JSON object");
  ExperimentSpec s;
  for (const auto& [key, v] : j.items()) {
    if (key == "command") {
      s.command = get_field<std::string>(v, key);
    } else if (key == "p") {
      s.p = get_field<unsigned>(v, key);
    } else if (key == "n") {
      s.n = get_field<unsigned>(v, key);
    } else if (key == "seed") {
      s.seed = get_field<std::uint64_t>(v, key);
    } else if (key == "out") {
      s.out = get_field<std::string>(v, key);
    } else if (key == "input") {
      s.input = get_field<std::string>(v, key);
    } else if (key == "generator") {
      read_generator(v, s.generator);
    } else if (key == "params") {
      read_params(v, s);
    } else if (key == "slack") {
      s.slack = get_field<std::string>(v, key);
    } else if (key == "trials") {
      s.trials = get_field<unsigned>(v, key);
    } else {
      throw SpecError(key, "unknown field");
    }
  }
  return s;
}

std::string sweep_csv_header() {
  return "point,p,n,t,eps,eta,seed,cubes,tubes,M,ratio,ratio_ge_1,delta,rich_tubes,sum_squares,J,weak_rich_ratio";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discretized p-adic incidence toolkit", "pil"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::string suite;
  std::string save, fine_out, coarse_out, stages_out;

  struct Sub {
    CLI::App* app;
    std::unique_ptr<Overrides> flags;
  };
  std::vector<Sub> subs;
  auto make = [&](const std::string& name, const std::string& desc) -> CLI::App* {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "JSON experiment spec");
    auto o = std::make_unique<Overrides>(sub);
    add_spec_flags(*o);
    subs.push_back(Sub{sub, std::move(o)});
    return sub;
  };
  make("verify", "run an invariant suite")->add_option("suite", suite, "fourier|highlow|geometry|counting|multiscale")->required();
  make("gen", "generate a configuration");
  make("check", "validate a configuration and print certificates");
  make("incidence", "exact incidence counts under thickening");
  make("dft", "high/low split of the incidence count");
  make("uniformize", "pigeonhole the cube set to a uniform subset")->add_option("--save", save, "write the kept configuration");
  make("richtubes", "rich tube statistics");
  CLI::App* bs = make("buildscale", "refine and cover at a coarser scale");
  bs->add_option("--fine-out", fine_out, "write the refined configuration");
  bs->add_option("--coarse-out", coarse_out, "write the Delta configuration");
  bs->add_option("--stages-out", stages_out, "write the stage CSV");
  make("sweep", "experiment sweep over levels and exponents");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  const Sub* active = nullptr;
  for (const auto& s : subs) {
    if (s.app->parsed()) active = &s;
  }
  const std::string command = active->app->get_name();

  try {
    ExperimentSpec spec = config_path.empty() ? ExperimentSpec{} : parse_experiment_spec(read_file(config_path));
    active->flags->apply(spec);
    spec.command = command;
    validate(spec);

    std::ofstream file;
    std::ostream* target = &out;
    if (!spec.out.empty()) {
      file.open(spec.out);
      if (!file) throw SpecError("out", "cannot write '" + spec.out + "'");
      target = &file;
    }

    if (command == "verify") {
      const auto& names = suite_names();
      if (std::find(names.begin(), names.end(), suite) == names.end()) {
        err << "usage error: unknown suite '" << suite << "'\n";
        return 2;
      }
      SuiteOptions o;
      if (active->flags->given("--p") || !config_path.empty()) o.p = spec.p;
      if (active->flags->given("--n") || !config_path.empty()) o.n = spec.n;
      o.seed = spec.seed.value_or(1);
      o.trials = spec.trials;
      const SuiteResult r = run_suite(suite, o, *target, err);
      return r.failures == 0 ? 0 : 1;
    }
    if (command == "gen") {
      write_configuration(*target, load_configuration(spec));
      return 0;
    }
    if (command == "check") return cmd_check(spec, *target);
    if (command == "incidence") return cmd_incidence(spec, *target);
    if (command == "dft") return cmd_dft(spec, *target, err);
    if (command == "uniformize") return cmd_uniformize(spec, save, *target);
    if (command == "richtubes") return cmd_richtubes(spec, *target);
    if (command == "buildscale") return cmd_buildscale(spec, fine_out, coarse_out, stages_out, *target);
    if (command == "sweep") return cmd_sweep(spec, *target);
  } catch (const SpecError& e) {
    err << "invalid spec field '" << e.field() << "': " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace pil

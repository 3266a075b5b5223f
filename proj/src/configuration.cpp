#include "pil/configuration.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace pil {

void Configuration::add(const Cube& c, std::vector<Tube> family) {
  std::sort(family.begin(), family.end());
  family.erase(std::unique(family.begin(), family.end()), family.end());
  if (!cubes.contains(c)) cubes.insert(c);
  for (const Tube& t : family) {
    if (!tubes.contains(t)) tubes.insert(t);
  }
  auto& slot = families[c];
  std::vector<Tube> merged;
  std::set_union(slot.begin(), slot.end(), family.begin(), family.end(), std::back_inserter(merged));
  slot = std::move(merged);
}

void Configuration::validate() const {
  for (const auto& [c, family] : families) {
    if (!cubes.contains(c)) throw std::invalid_argument("family attached to a cube outside P: " + to_text(amb, c));
    for (const Tube& t : family) {
      if (!tube_contains(amb, t, c)) {
        throw std::invalid_argument("tube " + to_text(amb, t) + " does not contain " + to_text(amb, c));
      }
      if (!tubes.contains(t)) throw std::invalid_argument("family tube outside T: " + to_text(amb, t));
    }
  }
}

std::size_t Configuration::family_size(const Cube& c) const {
  auto it = families.find(c);
  return it == families.end() ? 0 : it->second.size();
}

std::size_t Configuration::total_family_size() const {
  std::size_t total = 0;
  for (const auto& [c, f] : families) total += f.size();
  return total;
}

void write_configuration(std::ostream& os, const Configuration& cfg) {
  os << cfg.amb.p() << " " << cfg.amb.n() << "\n";
  for (const auto& e : cfg.cubes.entries()) {
    os << to_text(cfg.amb, e.cell);
    if (e.multiplicity != 1) os << " *" << e.multiplicity;
    if (cfg.cubes.weighted()) os << " w=" << e.weight.to_string();
    os << "\n";
  }
  for (const auto& e : cfg.tubes.entries()) {
    os << to_text(cfg.amb, e.cell);
    if (e.multiplicity != 1) os << " *" << e.multiplicity;
    os << "\n";
  }
  for (const auto& [c, family] : cfg.families) {
    os << to_text(cfg.amb, c) << " ->";
    for (std::size_t i = 0; i < family.size(); ++i) os << (i == 0 ? " " : ",") << to_text(cfg.amb, family[i]);
    os << "\n";
  }
}

std::string to_string(const Configuration& cfg) {
  std::ostringstream os;
  write_configuration(os, cfg);
  return os.str();
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::uint64_t parse_mult(std::string_view tok) {
  tok.remove_prefix(1);
  std::uint64_t m = std::stoull(std::string(tok));
  if (m == 0) throw std::invalid_argument("multiplicity must be positive");
  return m;
}

}  // namespace

Configuration read_configuration(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<Configuration> cfg;
  std::optional<unsigned> level;
  std::vector<std::pair<Cube, std::vector<Tube>>> assoc;
  std::vector<std::tuple<Cube, std::uint64_t, std::optional<Rational>>> cube_lines;
  std::vector<std::pair<Tube, std::uint64_t>> tube_lines;
  unsigned p = 0, n = 0;
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("configuration line " + std::to_string(lineno) + ": " + what);
  };
  auto set_level = [&](unsigned l) {
    if (!level) level = l;
    if (*level != l) fail("mixed levels");
  };
  while (std::getline(is, line)) {
    ++lineno;
    std::string_view s = line;
    if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    if (p == 0) {
      auto toks = split_ws(s);
      if (toks.size() != 2) fail("expected header 'p n'");
      p = static_cast<unsigned>(std::stoul(std::string(toks[0])));
      n = static_cast<unsigned>(std::stoul(std::string(toks[1])));
      cfg.emplace(Ambient(p, n), 0);
      continue;
    }
    const Ambient& amb = cfg->amb;
    try {
      if (auto arrow = s.find("->"); arrow != std::string_view::npos) {
        Cube c = parse_cube(amb, trim(s.substr(0, arrow)));
        std::vector<Tube> family;
        std::string_view rest = trim(s.substr(arrow + 2));
        while (!rest.empty()) {
          auto close = rest.find(']');
          if (close == std::string_view::npos) fail("unterminated tube literal");
          family.push_back(parse_tube(amb, trim(rest.substr(0, close + 1))));
          rest = trim(rest.substr(close + 1));
          if (!rest.empty()) {
            if (rest.front() != ',') fail("expected ',' between tubes");
            rest = trim(rest.substr(1));
          }
        }
        set_level(c.level);
        assoc.emplace_back(c, std::move(family));
        continue;
      }
      auto toks = split_ws(s);
      if (toks[0].find('(') != std::string_view::npos) {
        Cube c = parse_cube(amb, toks[0]);
        std::uint64_t mult = 1;
        std::optional<Rational> w;
        for (std::size_t i = 1; i < toks.size(); ++i) {
          if (toks[i].starts_with("*")) {
            mult = parse_mult(toks[i]);
          } else if (toks[i].starts_with("w=")) {
            w = Rational::parse(toks[i].substr(2));
          } else {
            fail("unexpected token '" + std::string(toks[i]) + "'");
          }
        }
        set_level(c.level);
        cube_lines.emplace_back(c, mult, w);
      } else {
        Tube t = parse_tube(amb, toks[0]);
        std::uint64_t mult = 1;
        for (std::size_t i = 1; i < toks.size(); ++i) {
          if (!toks[i].starts_with("*")) fail("unexpected token '" + std::string(toks[i]) + "'");
          mult = parse_mult(toks[i]);
        }
        set_level(t.level);
        tube_lines.emplace_back(t, mult);
      }
    } catch (const std::invalid_argument& e) {
      if (std::string(e.what()).starts_with("configuration line")) throw;
      fail(e.what());
    }
  }
  if (!cfg) throw std::invalid_argument("configuration: missing header");
  Configuration out(cfg->amb, level.value_or(cfg->amb.n()));
  for (const auto& [c, mult, w] : cube_lines) {
    out.cubes.insert(c, mult);
    if (w) out.cubes.set_weight(c, *w);
  }
  for (const auto& [t, mult] : tube_lines) out.tubes.insert(t, mult);
  for (auto& [c, family] : assoc) {
    if (!out.cubes.contains(c)) out.cubes.insert(c);
    for (const Tube& t : family) {
      if (!out.tubes.contains(t)) out.tubes.insert(t);
    }
    std::sort(family.begin(), family.end());
    family.erase(std::unique(family.begin(), family.end()), family.end());
    out.families[c] = std::move(family);
  }
  out.validate();
  return out;
}

Configuration restrict_to(const Configuration& cfg, const std::vector<Cube>& keep) {
  Configuration out(cfg.amb, cfg.level());
  for (const Cube& c : keep) {
    const std::uint64_t mult = cfg.cubes.multiplicity(c);
    if (mult == 0) throw std::invalid_argument("restriction to a cube outside P");
    out.cubes.insert(c, mult);
    if (cfg.cubes.weighted()) out.cubes.set_weight(c, cfg.cubes.weight(c));
    auto it = cfg.families.find(c);
    if (it != cfg.families.end()) {
      for (const Tube& t : it->second) {
        if (!out.tubes.contains(t)) out.tubes.insert(t);
      }
      out.families[c] = it->second;
    }
  }
  return out;
}

}  // namespace pil

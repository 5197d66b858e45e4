#include "levykernel/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace levykernel {

namespace {

using nlohmann::json;

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(where + "." + key + ": missing");
  return *it;
}

double number(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return number(obj, key, where);
}

bool flag_or(const json& obj, const char* key, bool fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(where + "." + key + ": expected true/false");
  return v.get<bool>();
}

std::vector<double> numbers(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_array()) throw ConfigError(where + "." + key + ": expected an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(where + "." + key + ": expected numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

RadialProfile radial_from_json(const json& r, const std::filesystem::path& base_dir) {
  const std::string where = "radial";
  const json& fam = field(r, "family", where);
  if (!fam.is_string()) throw ConfigError("radial.family: expected a string");
  const std::string name = fam.get<std::string>();
  try {
    if (name == "truncated") {
      return RadialProfile(TruncatedStable{number(r, "alpha", where), number(r, "r0", where),
                                           number_or(r, "scale", 1.0, where)});
    }
    if (name == "tempered") {
      return RadialProfile(TemperedStable{number(r, "alpha", where), number_or(r, "kappa", 0.0, where),
                                          number(r, "m", where), number_or(r, "beta", 1.0, where),
                                          number_or(r, "scale", 1.0, where)});
    }
    if (name == "high_intensity") {
      HighIntensity p{number(r, "beta", where), number_or(r, "scale", 1.0, where), Continuation::Zero};
      if (r.contains("continuation")) {
        const std::string c = r.at("continuation").is_string() ? r.at("continuation").get<std::string>() : "";
        if (c == "exponential") p.continuation = Continuation::Exponential;
        else if (c != "zero") throw ConfigError("radial.continuation: expected \"zero\" or \"exponential\"");
      }
      return RadialProfile(p);
    }
    if (name == "custom") {
      CustomProfile p;
      if (r.contains("csv")) {
        if (!r.at("csv").is_string()) throw ConfigError("radial.csv: expected a path");
        std::filesystem::path path = r.at("csv").get<std::string>();
        if (path.is_relative()) path = base_dir / path;
        p = read_profile_csv(path);
      } else {
        p.s = numbers(r, "s", where);
        p.q = numbers(r, "q", where);
      }
      p.monotone = flag_or(r, "monotone", true, where);
      p.extend_below = flag_or(r, "extend_below", false, where);
      p.extend_above = flag_or(r, "extend_above", false, where);
      return RadialProfile(p);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("radial: ") + e.what());
  }
  throw ConfigError("radial.family: unknown family \"" + name + "\"");
}

AngularMeasure angular_from_json(const json& a, int d) {
  const std::string where = "angular";
  const json& type = field(a, "type", where);
  if (!type.is_string()) throw ConfigError("angular.type: expected a string");
  try {
    if (type == "uniform") return AngularMeasure::uniform(d, number(a, "mass", where));
    if (type == "atoms") {
      const json& list = field(a, "atoms", where);
      if (!list.is_array()) throw ConfigError("angular.atoms: expected an array");
      std::vector<Atom> atoms;
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string w = "angular.atoms[" + std::to_string(i) + "]";
        const auto dir = numbers(list[i], "direction", w);
        if (static_cast<int>(dir.size()) != d) throw ConfigError(w + ".direction: expected " + std::to_string(d) + " components");
        atoms.push_back({Point(dir[0], d == 2 ? dir[1] : 0.0), number(list[i], "weight", w)});
      }
      return AngularMeasure::atoms(d, std::move(atoms));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("angular: ") + e.what());
  }
  throw ConfigError("angular.type: expected \"uniform\" or \"atoms\"");
}

}  // namespace

LevyMeasure measure_from_json(const json& doc, const std::filesystem::path& base_dir) {
  const json& dj = field(doc, "d", "measure");
  if (!dj.is_number_integer() || (dj.get<int>() != 1 && dj.get<int>() != 2))
    throw ConfigError("measure.d: expected 1 or 2");
  const int d = dj.get<int>();
  RadialProfile radial = radial_from_json(field(doc, "radial", "measure"), base_dir);
  AngularMeasure angular = angular_from_json(field(doc, "angular", "measure"), d);
  return LevyMeasure(d, std::move(radial), std::move(angular));
}

LevyMeasure load_measure(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open measure config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return measure_from_json(doc, path.parent_path());
}

json measure_to_json(const LevyMeasure& nu) {
  json radial = std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, TruncatedStable>) {
          return {{"family", "truncated"}, {"alpha", p.alpha}, {"r0", p.r0}, {"scale", p.scale}};
        } else if constexpr (std::is_same_v<T, TemperedStable>) {
          return {{"family", "tempered"}, {"alpha", p.alpha}, {"kappa", p.kappa}, {"m", p.m},
                  {"beta", p.beta}, {"scale", p.scale}};
        } else if constexpr (std::is_same_v<T, HighIntensity>) {
          return {{"family", "high_intensity"}, {"beta", p.beta}, {"scale", p.scale},
                  {"continuation", p.continuation == Continuation::Zero ? "zero" : "exponential"}};
        } else {
          return {{"family", "custom"}, {"s", p.s}, {"q", p.q}, {"monotone", p.monotone},
                  {"extend_below", p.extend_below}, {"extend_above", p.extend_above}};
        }
      },
      nu.radial().family());
  json angular;
  if (nu.angular().is_uniform()) {
    angular = {{"type", "uniform"}, {"mass", nu.angular().total_mass()}};
  } else {
    json atoms = json::array();
    for (const auto& a : nu.angular().atom_list()) {
      json dir = nu.dim() == 1 ? json::array({a.direction[0]}) : json::array({a.direction[0], a.direction[1]});
      atoms.push_back({{"direction", dir}, {"weight", a.weight}});
    }
    angular = {{"type", "atoms"}, {"atoms", atoms}};
  }
  return {{"d", nu.dim()}, {"radial", radial}, {"angular", angular}};
}

CustomProfile read_profile_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open profile table " + path.string());
  CustomProfile p;
  std::string line;
  int lineno = 0;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    for (char& c : line)
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    std::istringstream fields(line);
    double s = 0.0, q = 0.0;
    if (!(fields >> s >> q)) {
      if (header_allowed) {
        header_allowed = false;
        continue;
      }
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected two numbers");
    }
    header_allowed = false;
    p.s.push_back(s);
    p.q.push_back(q);
  }
  return p;
}

LevyMeasure builtin_measure(const std::string& name) {
  if (name == "truncated")
    return LevyMeasure(1, RadialProfile(TruncatedStable{1.5, 1.0, 1.0}), AngularMeasure::uniform(1, 2.0));
  if (name == "tempered")
    return LevyMeasure(1, RadialProfile(TemperedStable{0.5, 0.0, 1.0, 1.0, 1.0}), AngularMeasure::uniform(1, 2.0));
  if (name == "high_intensity")
    return LevyMeasure(1, RadialProfile(HighIntensity{2.0, 1.0, Continuation::Zero}), AngularMeasure::uniform(1, 2.0));
  if (name == "cauchy") {
    // (1/pi) s^{-2} on both half-lines gives Phi(xi) = |xi|
    CustomProfile p;
    p.s = {1.0, 10.0};
    p.q = {1.0 / std::numbers::pi, 1.0 / (100.0 * std::numbers::pi)};
    p.extend_below = p.extend_above = true;
    return LevyMeasure(1, RadialProfile(p), AngularMeasure::uniform(1, 2.0));
  }
  throw ConfigError("unknown built-in family \"" + name + "\"");
}

}  // namespace levykernel

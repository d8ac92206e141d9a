#include "hypflow/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hypflow {

using nlohmann::json;

const std::vector<std::string>& experiment_keys() {
  static const std::vector<std::string> k = {"K",  "alpha", "m",     "delta", "T_star",      "n",   "dt",
                                             "t_end", "xi0", "x0",   "filter_strength", "gamma_plus",
                                             "h",  "ell",   "gamma_minus", "box_factor", "samples",
                                             "nodes_per_wave"};
  return k;
}

std::optional<double> RunConfig::get(const std::string& key) const {
  auto it = experiment.find(key);
  if (it == experiment.end()) return std::nullopt;
  return it->second;
}

double RunConfig::get_or(const std::string& key, double fallback) const { return get(key).value_or(fallback); }

namespace {

json to_json(const RunConfig& c) {
  json j = json::object();
  j["command"] = c.command;
  j["example"] = {{"name", c.example}, {"state", c.state}, {"params", json::object()}};
  for (const auto& [k, v] : c.params) j["example"]["params"][k] = v;
  j["experiment"] = json::object();
  for (const auto& [k, v] : c.experiment) j["experiment"][k] = v;
  j["experiment"]["eps_ladder"] = c.eps_ladder;
  j["tolerances"] = {{"eq", c.tol_eq}, {"margin", c.tol_margin}};
  j["output"] = {{"dir", c.out_dir}, {"seed", c.seed}};
  return j;
}

double as_number(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      size_t pos = 0;
      const std::string s = v.get<std::string>();
      const double d = std::stod(s, &pos);
      if (pos == s.size()) return d;
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("config: " + key + " must be a number");
}

std::string as_string(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  throw ConfigError("config: " + key + " must be a string");
}

RunConfig from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  RunConfig c;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    if (k == "command") {
      c.command = as_string(v, k);
    } else if (k == "example") {
      if (!v.is_object()) throw ConfigError("config: example must be a section");
      for (auto e = v.begin(); e != v.end(); ++e) {
        if (e.key() == "name") c.example = as_string(e.value(), "example.name");
        else if (e.key() == "state") c.state = as_string(e.value(), "example.state");
        else if (e.key() == "params") {
          if (!e.value().is_object()) throw ConfigError("config: example.params must be a section");
          for (auto p = e.value().begin(); p != e.value().end(); ++p)
            c.params[p.key()] = as_number(p.value(), "params." + p.key());
        } else throw ConfigError("config: unknown key example." + e.key());
      }
    } else if (k == "params") {
      for (auto p = v.begin(); p != v.end(); ++p) c.params[p.key()] = as_number(p.value(), "params." + p.key());
    } else if (k == "experiment") {
      if (!v.is_object()) throw ConfigError("config: experiment must be a section");
      for (auto e = v.begin(); e != v.end(); ++e) {
        if (e.key() == "eps_ladder") {
          if (!e.value().is_array()) throw ConfigError("config: eps_ladder must be a list");
          for (const json& x : e.value()) c.eps_ladder.push_back(as_number(x, "eps_ladder"));
        } else {
          c.experiment[e.key()] = as_number(e.value(), "experiment." + e.key());
        }
      }
    } else if (k == "tolerances") {
      for (auto e = v.begin(); e != v.end(); ++e) {
        if (e.key() == "eq") c.tol_eq = as_number(e.value(), "tolerances.eq");
        else if (e.key() == "margin") c.tol_margin = as_number(e.value(), "tolerances.margin");
        else throw ConfigError("config: unknown key tolerances." + e.key());
      }
    } else if (k == "output") {
      for (auto e = v.begin(); e != v.end(); ++e) {
        if (e.key() == "dir") c.out_dir = as_string(e.value(), "output.dir");
        else if (e.key() == "seed") {
          const double s = as_number(e.value(), "output.seed");
          if (s < 0 || s != std::floor(s)) throw ConfigError("config: seed must be a non-negative integer");
          c.seed = static_cast<std::uint64_t>(s);
        } else throw ConfigError("config: unknown key output." + e.key());
      }
    } else {
      throw ConfigError("config: unknown key " + k);
    }
  }
  return c;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

json ini_value(const std::string& raw) {
  const std::string v = trim(raw);
  if (v.find(',') != std::string::npos) {
    json arr = json::array();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) arr.push_back(ini_value(item));
    return arr;
  }
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos == v.size()) return d;
  } catch (const std::exception&) {
  }
  return v;
}

}  // namespace

std::string RunConfig::canonical() const { return to_json(*this).dump(2); }
std::string RunConfig::canonical_compact() const { return to_json(*this).dump(); }

RunConfig RunConfig::parse_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return from_json(j);
}

RunConfig RunConfig::parse_ini(const std::string& text) {
  json j = json::object();
  std::string section;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "example" && section != "params" && section != "experiment" && section != "tolerances" &&
          section != "output")
        throw ConfigError("config line " + std::to_string(lineno) + ": unknown section " + section);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    json val = ini_value(line.substr(eq + 1));
    if (section.empty()) {
      j[key] = val;
    } else if (section == "params") {
      j["example"]["params"][key] = val;
    } else {
      if (section == "experiment" && key == "eps_ladder" && !val.is_array()) val = json::array({val});
      j[section][key] = val;
    }
  }
  return from_json(j);
}

RunConfig RunConfig::parse(const std::string& text) {
  const auto p = text.find_first_not_of(" \t\r\n");
  if (p != std::string::npos && text[p] == '{') return parse_json(text);
  return parse_ini(text);
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void RunConfig::validate() const {
  for (const auto& [k, v] : experiment) {
    const auto& keys = experiment_keys();
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw ConfigError("config: unknown experiment key " + k);
    if (!std::isfinite(v)) throw ConfigError("config: experiment." + k + " must be finite");
  }
  for (double e : eps_ladder)
    if (!(e > 0 && e < 1)) throw ConfigError("config: eps_ladder entries must lie in (0, 1)");
  if (!(tol_eq > 0) || !(tol_margin > 0)) throw ConfigError("config: tolerances must be positive");
  if (auto a = get("alpha"); a && !(*a > 0.5 && *a <= 1)) throw ConfigError("config: alpha must lie in (1/2, 1]");
  if (auto d = get("delta"); d && !(*d > 0.5)) throw ConfigError("config: delta must exceed 1/2");
  if (auto n = get("n"); n && (*n < 8 || std::floor(*n) != *n || (static_cast<long>(*n) & (static_cast<long>(*n) - 1))))
    throw ConfigError("config: n must be a power of two >= 8");
  const auto K = get("K"), m = get("m"), h = get("h");
  if (K && h) {
    const double alpha = get_or("alpha", 0.6), mm = m.value_or(2.0);
    const double lhs = (2 * alpha - 1) * *K, rhs = 2 * alpha * mm + (1 - alpha) * (1 - *h);
    if (!(lhs > rhs))
      throw ConfigError("config: (2*alpha-1)*K > 2*alpha*m + (1-alpha)*(1-h)*d violated (" + std::to_string(lhs) +
                        " <= " + std::to_string(rhs) + ")");
  }
  if (K && get("T_star") && get("gamma_minus") && !(*get("gamma_minus") * *get("T_star") > *K))
    throw ConfigError("config: gamma_minus*T_star > K violated");
}

}  // namespace hypflow

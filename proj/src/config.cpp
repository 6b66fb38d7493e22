#include "netspec/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>
#include <string>

#include "netspec/errors.hpp"

namespace netspec::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

struct Entry {
  std::string key, value;
  int line = 0;
};

std::vector<Entry> split_entries(const std::string& text) {
  std::vector<Entry> out;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(line) +
                       ": expected `key = value`");
    Entry e;
    e.key = trim(s.substr(0, eq));
    e.value = trim(s.substr(eq + 1));
    e.line = line;
    if (e.key.empty() || e.value.empty())
      throw ParseError("line " + std::to_string(line) +
                       ": empty key or value");
    out.push_back(std::move(e));
  }
  return out;
}

long long to_int(const Entry& e) {
  char* end = nullptr;
  const long long v = std::strtoll(e.value.c_str(), &end, 10);
  if (end == e.value.c_str() || *end != '\0')
    throw ValidationError(e.key + ": `" + e.value + "` is not an integer");
  return v;
}

std::uint64_t to_seed(const Entry& e) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(e.value.c_str(), &end, 10);
  if (end == e.value.c_str() || *end != '\0')
    throw ValidationError(e.key + ": `" + e.value + "` is not an integer");
  return v;
}

double to_double(const Entry& e) {
  char* end = nullptr;
  const double v = std::strtod(e.value.c_str(), &end);
  if (end == e.value.c_str() || *end != '\0')
    throw ValidationError(e.key + ": `" + e.value + "` is not a number");
  return v;
}

bool to_bool(const Entry& e) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  throw ValidationError(e.key + ": `" + e.value + "` is not a boolean");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : v) {
    if (c == ',') {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(trim(cur));
  return parts;
}

std::vector<double> to_list(const Entry& e) {
  std::vector<double> out;
  for (const std::string& p : split_list(e.value)) {
    char* end = nullptr;
    const double v = std::strtod(p.c_str(), &end);
    if (p.empty() || end == p.c_str() || *end != '\0')
      throw ValidationError(e.key + ": `" + p + "` is not a number");
    out.push_back(v);
  }
  return out;
}

std::vector<std::pair<double, double>> to_tracks(const Entry& e) {
  std::vector<std::pair<double, double>> out;
  for (const std::string& p : split_list(e.value)) {
    const std::size_t colon = p.find(':');
    if (colon == std::string::npos)
      throw ValidationError(e.key + ": `" + p + "` is not `start:end`");
    char* end = nullptr;
    const std::string a = trim(p.substr(0, colon));
    const std::string b = trim(p.substr(colon + 1));
    const double av = std::strtod(a.c_str(), &end);
    if (a.empty() || *end != '\0')
      throw ValidationError(e.key + ": `" + a + "` is not a number");
    const double bv = std::strtod(b.c_str(), &end);
    if (b.empty() || *end != '\0')
      throw ValidationError(e.key + ": `" + b + "` is not a number");
    out.emplace_back(av, bv);
  }
  return out;
}

const std::set<std::string> kSuites = {
    "covariance", "doa",           "doa-track", "spectrum",
    "spectrum-track", "filter-design", "eig-bench"};

const std::set<std::string> kCommonKeys = {
    "suite",   "seed",      "protocol", "gamma",     "epsilon",   "xi",
    "topology", "nodes",    "degree",   "neighbors", "rewire_p",  "graph_seed"};

std::set<std::string> allowed_keys(const std::string& suite) {
  if (suite == "eig-bench") return {"suite", "seed", "T", "xi"};
  std::set<std::string> keys = kCommonKeys;
  if (suite == "covariance") {
    keys.insert({"T", "mode", "alpha", "window", "spectrum", "complex"});
  } else if (suite == "doa") {
    keys.insert({"T", "trials", "snr_db", "sources", "delta", "disc_radius",
                 "placement_seed"});
  } else if (suite == "doa-track") {
    keys.insert({"T", "snr_db", "tracks", "alpha", "delta", "disc_radius",
                 "placement_seed"});
  } else if (suite == "spectrum") {
    keys.insert({"mode", "start_node"});
  } else if (suite == "spectrum-track") {
    keys.insert({"mode", "start_node", "events"});
  } else if (suite == "filter-design") {
    keys.insert({"K"});
  }
  return keys;
}

void apply_entry(ScenarioConfig& c, const Entry& e) {
  const std::string& k = e.key;
  if (k == "suite") c.suite = e.value;
  else if (k == "seed") c.seed = to_seed(e);
  else if (k == "protocol") c.protocol = e.value;
  else if (k == "gamma") c.gamma = static_cast<int>(to_int(e));
  else if (k == "epsilon") c.epsilon = to_double(e);
  else if (k == "xi") c.xi = to_double(e);
  else if (k == "topology") c.topology = e.value;
  else if (k == "nodes") c.nodes = static_cast<int>(to_int(e));
  else if (k == "degree") c.degree = static_cast<int>(to_int(e));
  else if (k == "neighbors") c.neighbors = static_cast<int>(to_int(e));
  else if (k == "rewire_p") c.rewire_p = to_double(e);
  else if (k == "graph_seed") c.graph_seed = to_seed(e);
  else if (k == "T") c.T = static_cast<int>(to_int(e));
  else if (k == "trials") c.trials = static_cast<int>(to_int(e));
  else if (k == "mode") c.mode = e.value;
  else if (k == "alpha") c.alpha = to_double(e);
  else if (k == "window") c.window = static_cast<int>(to_int(e));
  else if (k == "spectrum") c.true_spectrum = to_list(e);
  else if (k == "complex") c.complex_samples = to_bool(e);
  else if (k == "sources") c.sources_deg = to_list(e);
  else if (k == "tracks") c.tracks_deg = to_tracks(e);
  else if (k == "snr_db") c.snr_db = to_double(e);
  else if (k == "delta") c.delta = to_double(e);
  else if (k == "disc_radius") c.disc_radius = to_double(e);
  else if (k == "placement_seed") c.placement_seed = to_seed(e);
  else if (k == "events") c.events = static_cast<int>(to_int(e));
  else if (k == "start_node") c.start_node = static_cast<int>(to_int(e));
  else if (k == "K") c.K = static_cast<int>(to_int(e));
  else throw ValidationError("unknown key: " + k);
}

void validate(const ScenarioConfig& c) {
  if (c.gamma < 1) throw ValidationError("gamma: must be >= 1");
  if (c.epsilon < 0.0) throw ValidationError("epsilon: must be >= 0");
  if (!(c.xi > 0.0)) throw ValidationError("xi: must be > 0");
  if (c.nodes < 0) throw ValidationError("nodes: must be >= 0");
  if (c.T < 0) throw ValidationError("T: must be >= 0");
  if (c.trials < 1) throw ValidationError("trials: must be >= 1");
  if (c.window < 1) throw ValidationError("window: must be >= 1");
  if (c.K < 1) throw ValidationError("K: must be >= 1");
  if (c.events < 0) throw ValidationError("events: must be >= 0");
  if (c.rewire_p < 0.0 || c.rewire_p > 1.0)
    throw ValidationError("rewire_p: must be in [0, 1]");
  if (c.alpha < 0.0 || c.alpha >= 1.0)
    throw ValidationError("alpha: must be in [0, 1)");
  if (!(c.delta > 0.0)) throw ValidationError("delta: must be > 0");
  static const std::set<std::string> protocols = {"ps", "ac", "ftac", "filter",
                                                  "exact"};
  if (!protocols.count(c.protocol))
    throw ValidationError("protocol: unknown value `" + c.protocol + "`");
  static const std::set<std::string> topologies = {
      "",          "path",          "cycle",     "complete",
      "pendant-cycle", "triangle-bridge", "d-regular", "small-world"};
  if (!topologies.count(c.topology))
    throw ValidationError("topology: unknown value `" + c.topology + "`");
  if (c.suite == "covariance" && !c.mode.empty() && c.mode != "finite" &&
      c.mode != "ewma" && c.mode != "sliding")
    throw ValidationError("mode: unknown covariance mode `" + c.mode + "`");
  if ((c.suite == "spectrum" || c.suite == "spectrum-track") &&
      !c.mode.empty() && c.mode != "incidence" && c.mode != "rank-two")
    throw ValidationError("mode: unknown spectrum mode `" + c.mode + "`");
  for (double th : c.sources_deg)
    if (!(std::abs(th) < 90.0))
      throw ValidationError("sources: |angle| must be < 90");
  for (const auto& tr : c.tracks_deg)
    if (!(std::abs(tr.first) < 90.0) || !(std::abs(tr.second) < 90.0))
      throw ValidationError("tracks: |angle| must be < 90");
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  const std::vector<Entry> entries = split_entries(text);
  ScenarioConfig c;
  std::set<std::string> seen;
  for (const Entry& e : entries) {
    if (!seen.insert(e.key).second)
      throw ValidationError("duplicate key: " + e.key);
    if (e.key == "suite") {
      c.suite = e.value;
      if (!kSuites.count(c.suite))
        throw ValidationError("suite: unknown value `" + c.suite + "`");
    }
  }
  if (c.suite.empty()) throw ValidationError("suite: missing");
  const std::set<std::string> allowed = allowed_keys(c.suite);
  for (const Entry& e : entries) {
    if (!allowed.count(e.key))
      throw ValidationError("unknown key: " + e.key + " (line " +
                            std::to_string(e.line) + ")");
    apply_entry(c, e);
  }
  validate(c);
  return c;
}

std::string serialize_config(const ScenarioConfig& c) {
  std::ostringstream out;
  const std::set<std::string> allowed = allowed_keys(c.suite);
  const auto put = [&](const std::string& key, const std::string& value) {
    if (allowed.count(key) && !value.empty()) out << key << " = " << value << "\n";
  };
  put("suite", c.suite);
  put("seed", std::to_string(c.seed));
  put("protocol", c.protocol);
  put("gamma", std::to_string(c.gamma));
  put("epsilon", fmt_double(c.epsilon));
  put("xi", fmt_double(c.xi));
  put("topology", c.topology);
  put("nodes", std::to_string(c.nodes));
  put("degree", std::to_string(c.degree));
  put("neighbors", std::to_string(c.neighbors));
  put("rewire_p", fmt_double(c.rewire_p));
  put("graph_seed", std::to_string(c.graph_seed));
  put("T", std::to_string(c.T));
  put("trials", std::to_string(c.trials));
  put("mode", c.mode);
  put("alpha", fmt_double(c.alpha));
  put("window", std::to_string(c.window));
  if (!c.true_spectrum.empty()) {
    std::string v;
    for (std::size_t i = 0; i < c.true_spectrum.size(); ++i)
      v += (i ? "," : "") + fmt_double(c.true_spectrum[i]);
    put("spectrum", v);
  }
  put("complex", c.complex_samples ? "true" : "false");
  if (!c.sources_deg.empty()) {
    std::string v;
    for (std::size_t i = 0; i < c.sources_deg.size(); ++i)
      v += (i ? "," : "") + fmt_double(c.sources_deg[i]);
    put("sources", v);
  }
  if (!c.tracks_deg.empty()) {
    std::string v;
    for (std::size_t i = 0; i < c.tracks_deg.size(); ++i)
      v += (i ? "," : "") + fmt_double(c.tracks_deg[i].first) + ":" +
           fmt_double(c.tracks_deg[i].second);
    put("tracks", v);
  }
  put("snr_db", fmt_double(c.snr_db));
  put("delta", fmt_double(c.delta));
  put("disc_radius", fmt_double(c.disc_radius));
  put("placement_seed", std::to_string(c.placement_seed));
  put("events", std::to_string(c.events));
  put("start_node", std::to_string(c.start_node));
  put("K", std::to_string(c.K));
  return out.str();
}

}  // namespace netspec::cli

#ifndef NETSPEC_CONFIG_HPP
#define NETSPEC_CONFIG_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace netspec::cli {

/// Flat scenario description parsed from `key = value` text. Which keys a
/// file may set depends on its suite; parse_config rejects the rest, so a
/// typo never silently falls back to a default.
struct ScenarioConfig {
  std::string suite;

  // topology
  std::string topology;  // empty resolves to the suite default
  int nodes = 0;         // 0 resolves to the suite default
  int degree = 4;        // d-regular
  int neighbors = 6;     // small-world ring neighbors
  double rewire_p = 0.1;
  std::uint64_t graph_seed = 42;

  // consensus
  std::string protocol = "ps";
  int gamma = 100;
  double epsilon = 0.0;  // 0 resolves to 1 / max degree
  double xi = 1e-12;

  // shared scenario knobs
  std::uint64_t seed = 1;
  int T = 0;  // 0 resolves to the suite default
  int trials = 100;
  std::string mode;    // covariance: finite|ewma|sliding; spectrum: incidence|rank-two
  double alpha = 0.0;  // 0 resolves to the suite default
  int window = 8;
  std::vector<double> true_spectrum;
  bool complex_samples = true;

  // doa
  std::vector<double> sources_deg;
  std::vector<std::pair<double, double>> tracks_deg;
  double snr_db = 10.0;
  double delta = 0.5;
  double disc_radius = 2.0;
  std::uint64_t placement_seed = 7;

  // spectrum
  int events = 20;
  int start_node = 0;

  // filter
  int K = 12;
};

/// Throws ParseError with the offending line number on malformed text and
/// ValidationError naming the key on unknown keys or out-of-range values.
ScenarioConfig parse_config(const std::string& text);

/// Canonical text form listing every key the suite reads; parsing it back
/// reproduces the same configuration.
std::string serialize_config(const ScenarioConfig& cfg);

struct SuiteResult {
  std::vector<std::pair<std::string, std::string>> summary;
};

/// Executes the configured suite. CSV artifacts land under out_dir (none
/// are written when it is empty). threads fans Monte Carlo trials out
/// across workers without changing any output byte.
SuiteResult run_suite(const ScenarioConfig& cfg, const std::string& out_dir,
                      int threads = 1);

}  // namespace netspec::cli

#endif

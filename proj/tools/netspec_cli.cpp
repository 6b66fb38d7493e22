#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "netspec/config.hpp"
#include "netspec/errors.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw netspec::ValidationError("cannot read config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"netspec scenario harness"};
  app.get_formatter()->column_width(28);

  std::string suite;
  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  std::string protocol;
  int gamma = 0;
  int trials_parallel = 1;

  app.add_option("suite", suite, "scenario suite to run")->required();
  app.add_option("--config", config_path, "flat key = value config file")
      ->required();
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--out", out_dir, "directory for CSV output");
  app.add_option("--protocol", protocol, "override the consensus backend")
      ->check(CLI::IsMember({"ps", "ac", "ftac", "filter"}));
  app.add_option("--gamma", gamma, "override the consensus round budget");
  app.add_option("--trials-parallel", trials_parallel,
                 "worker threads for independent trials")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    netspec::cli::ScenarioConfig cfg =
        netspec::cli::parse_config(read_file(config_path));
    if (cfg.suite != suite)
      throw netspec::ValidationError("suite: config file declares `" +
                                     cfg.suite + "`, command line asked for `" +
                                     suite + "`");
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (!protocol.empty()) cfg.protocol = protocol;
    if (gamma > 0) cfg.gamma = gamma;

    const netspec::cli::SuiteResult res =
        netspec::cli::run_suite(cfg, out_dir, trials_parallel);
    for (const auto& [key, value] : res.summary)
      std::cout << key << "=" << value << "\n";
    return 0;
  } catch (const netspec::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const netspec::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 3;
  } catch (const netspec::NonConvergence& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return 4;
  } catch (const netspec::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 6;
  }
}

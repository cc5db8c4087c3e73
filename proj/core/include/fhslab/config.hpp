#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fhslab/grid.hpp"
#include "fhslab/params.hpp"

namespace fhslab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One experiment: problem parameters, grid, optimizer knobs, named checks
// with optional per-check overrides, output location, seed, threads.
struct RunConfig {
  int N = 1;
  double p = 2.0, s = 0.4, alpha = 0.0;

  double r_min = 1e-3, r_max = 1e4;
  int M = 512;

  int max_iter = 2000;
  double tol = 1e-8;
  std::string init = "extremal-guess";
  double lambda = 1.0;

  std::vector<std::string> checks = {"monotonicity", "decay", "gamma_sweep",
                                     "dyadic_layers", "hardy_chain"};
  std::map<std::string, std::string> overrides;  // dotted keys, raw values

  std::string output_dir = "out";
  std::uint64_t seed = 42;
  int threads = 1;

  ProblemParams params() const { return make_params(N, p, s, alpha); }
  Grid grid() const { return Grid(r_min, r_max, M); }
  void validate() const;  // throws ConfigError
};

// Sectioned key = value format ([params], [grid], [optimizer], [checks],
// [run]); '#' comments; lists are comma separated. Unknown keys and type
// errors are reported with their line number.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);
void apply_override(RunConfig& cfg, const std::string& key,
                    const std::string& value);

// canonical digest carried by every output file
std::string config_digest(const RunConfig& cfg);

// names understood by the verify runner
const std::vector<std::string>& known_checks();

std::vector<double> parse_double_list(const std::string& text);

}  // namespace fhslab

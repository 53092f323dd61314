#pragma once

#include "bsq/grid.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace bsq {

// Free constants of the energy functionals; mu0 is fixed by the profile.
struct MuConfig {
  double mu1 = 1.0, mu2 = 1.0, mu3 = 1.0, mu4 = 1.0;
  double mu2k[3] = {1.0, 1.0, 1.0};     // mu_{2,k}, k = 0..2
  double mu3k[4] = {1.0, 1.0, 1.0, 1.0};  // mu_{3,k}, k = 0..3
};

struct RunConfig {
  GridConfig grid;
  std::string experiment = "default";
  double dt = 0.01;
  double t_end = 20.0;
  double cfl = 0.5;
  double output_every = 0.1;
  int n_modes = 0;  // 0 = solver default
  int seeds = 10;
  double amplitude = 1e-3;  // perturbation size for nonlinear runs
  MuConfig mu;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, int line, const std::string& what);
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

// key = value text, '#' or ';' comments, optional [section] headers that prefix keys
// with "section.". Every key must be known; alpha is required.
RunConfig parse_config(const std::string& text, bool require_alpha = true);
RunConfig load_config(const std::string& path, bool require_alpha = true);
// Applies one key = value pair (used for command-line overrides).
void set_config_value(RunConfig& rc, const std::string& key, const std::string& value, int line = 0);
void validate(const RunConfig& rc);
// Canonical key = value rendering, parseable by parse_config.
std::string to_text(const RunConfig& rc);

}  // namespace bsq

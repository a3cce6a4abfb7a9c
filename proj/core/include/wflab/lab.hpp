#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "wflab/flow.hpp"
#include "wflab/moebius.hpp"

namespace wflab {

// Batch experiment configuration: flat key=value file plus command-line
// overrides; every key has a typed default below.
struct ExperimentConfig {
  std::string command;
  int grid_n = 64;
  std::uint64_t seed = 1;
  double amplitude = 0.02;
  int max_freq = 8;          // spectrum enumeration bound
  int count = 0;             // equilibria battery size (0: use the given z)
  double z_max = 0.1;        // battery radius
  double eps_fd = 1e-3;      // finite-difference step for the rank check
  std::array<double, 10> z{};
  FlowConfig flow;
  bool snapshots = false;    // per-record field CSVs and meshes
  bool parallel = false;
  std::string output_dir = "wflab_out";

  void validate() const;
};

// Parse "key=value" lines (# comments, blank lines ignored).
void load_config_file(const std::filesystem::path& file, ExperimentConfig& cfg);
// Apply one override; throws std::invalid_argument for unknown keys.
void apply_config_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);
std::map<std::string, std::string> resolved_config(const ExperimentConfig& cfg);

// Each command writes its artifacts under cfg.output_dir plus a manifest
// listing them with the resolved configuration, and returns 0 only if all
// built-in assertions hold.
int cmd_spectrum(const ExperimentConfig& cfg);
int cmd_linearize(const ExperimentConfig& cfg);
int cmd_flow(const ExperimentConfig& cfg);
int cmd_equilibria(const ExperimentConfig& cfg);
int cmd_invariance(const ExperimentConfig& cfg);
int cmd_export(const ExperimentConfig& cfg);

int run_command(const ExperimentConfig& cfg);

// The 13-mode battery used by linearize: the 8 kernel modes plus 5 stable
// modes (constant, cos 2u, sin 2v, cos(2u+v), sin(u+2v)).
std::vector<std::pair<std::string, ScalarField>> linearize_battery(GridSpec g);

}  // namespace wflab

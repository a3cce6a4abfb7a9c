#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "wflab/lab.hpp"

namespace {

void usage() {
  std::fprintf(stderr,
               "usage: wflab <command> [--config FILE] [--key value ...]\n"
               "\n"
               "commands:\n"
               "  spectrum    eigenvalues of the torus Laplacian and the linearized operator\n"
               "  linearize   finite-difference checks of the linearization at the Clifford torus\n"
               "  flow        evolve a seeded random perturbation and record diagnostics\n"
               "  equilibria  conformally transformed tori: residuals, energy, rank check\n"
               "  invariance  Willmore invariance under Moebius maps, stereographic roundtrips\n"
               "  export      write a field CSV and the projected surface mesh\n"
               "\n"
               "keys: grid_n seed amplitude max_freq count z_max eps_fd z dt t_end\n"
               "      residual_tol a0_floor record_every tube_halfwidth classical\n"
               "      snapshots parallel output_dir\n");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    usage();
    return 2;
  }
  const std::string command = argv[1];
  if (command == "-h" || command == "--help" || command == "help") {
    usage();
    return 0;
  }

  wflab::ExperimentConfig cfg;
  try {
    std::vector<std::pair<std::string, std::string>> overrides;
    for (int i = 2; i < argc; ++i) {
      std::string key = argv[i];
      if (key.rfind("--", 0) != 0 || i + 1 >= argc) {
        std::fprintf(stderr, "wflab: expected --key value pairs after the command\n");
        return 2;
      }
      overrides.emplace_back(key.substr(2), argv[++i]);
    }
    for (const auto& [k, v] : overrides)
      if (k == "config") wflab::load_config_file(v, cfg);
    cfg.command = command;
    for (const auto& [k, v] : overrides)
      if (k != "config") wflab::apply_config_override(cfg, k, v);
    return wflab::run_command(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "wflab: %s\n", e.what());
    return 2;
  }
}

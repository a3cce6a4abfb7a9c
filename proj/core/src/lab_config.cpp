#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "wflab/lab.hpp"

namespace wflab {
namespace {

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double x;
  try {
    x = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad numeric value for " + key + ": '" + value + "'");
  }
  if (pos != value.size() || !std::isfinite(x))
    throw std::invalid_argument("bad numeric value for " + key + ": '" + value + "'");
  return x;
}

long parse_int(const std::string& key, const std::string& value) {
  const double x = parse_double(key, value);
  const long i = std::lround(x);
  if (x != static_cast<double>(i))
    throw std::invalid_argument("expected integer for " + key + ": '" + value + "'");
  return i;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true") return true;
  if (value == "0" || value == "false") return false;
  throw std::invalid_argument("expected 0/1/true/false for " + key + ": '" + value + "'");
}

std::array<double, 10> parse_z(const std::string& value) {
  std::array<double, 10> z{};
  std::stringstream ss(value);
  std::string item;
  int k = 0;
  while (std::getline(ss, item, ',')) {
    if (k >= 10) throw std::invalid_argument("z takes exactly 10 comma-separated reals");
    z[k++] = parse_double("z", item);
  }
  if (k != 10) throw std::invalid_argument("z takes exactly 10 comma-separated reals");
  return z;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trimmed(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

void ExperimentConfig::validate() const {
  GridSpec probe(grid_n);  // even, >= 16
  (void)probe;
  if (!(amplitude >= 0.0 && amplitude < kPi / 8.0))
    throw std::invalid_argument("amplitude must be in [0, pi/8)");
  if (max_freq < 2) throw std::invalid_argument("max_freq must be >= 2");
  if (count < 0) throw std::invalid_argument("count must be >= 0");
  if (!(z_max > 0.0 && z_max <= 0.2)) throw std::invalid_argument("z_max must be in (0, 0.2]");
  if (!(eps_fd > 0.0 && eps_fd <= 0.1)) throw std::invalid_argument("eps_fd must be in (0, 0.1]");
  double zn = 0.0;
  for (double c : z) zn += c * c;
  if (!(std::sqrt(zn) <= 0.2))
    throw std::invalid_argument("|z| must be <= 0.2 to stay graphical over the Clifford torus");
  if (output_dir.empty()) throw std::invalid_argument("output_dir must not be empty");
  flow.validate();
}

void apply_config_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "grid_n")
    cfg.grid_n = static_cast<int>(parse_int(key, value));
  else if (key == "seed")
    cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "amplitude")
    cfg.amplitude = parse_double(key, value);
  else if (key == "max_freq")
    cfg.max_freq = static_cast<int>(parse_int(key, value));
  else if (key == "count")
    cfg.count = static_cast<int>(parse_int(key, value));
  else if (key == "z_max")
    cfg.z_max = parse_double(key, value);
  else if (key == "eps_fd")
    cfg.eps_fd = parse_double(key, value);
  else if (key == "z")
    cfg.z = parse_z(value);
  else if (key == "dt")
    cfg.flow.dt = parse_double(key, value);
  else if (key == "t_end")
    cfg.flow.t_end = parse_double(key, value);
  else if (key == "residual_tol")
    cfg.flow.residual_tol = parse_double(key, value);
  else if (key == "a0_floor")
    cfg.flow.a0_floor = parse_double(key, value);
  else if (key == "record_every")
    cfg.flow.record_every = static_cast<int>(parse_int(key, value));
  else if (key == "tube_halfwidth")
    cfg.flow.tube_halfwidth = parse_double(key, value);
  else if (key == "classical")
    cfg.flow.classical = parse_bool(key, value);
  else if (key == "snapshots")
    cfg.snapshots = parse_bool(key, value);
  else if (key == "parallel")
    cfg.parallel = parse_bool(key, value);
  else if (key == "output_dir")
    cfg.output_dir = value;
  else if (key == "command")
    cfg.command = value;
  else
    throw std::invalid_argument("unknown config key: " + key);
}

void load_config_file(const std::filesystem::path& file, ExperimentConfig& cfg) {
  std::ifstream is(file);
  if (!is) throw std::runtime_error("cannot open config file " + file.string());
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trimmed(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(file.string() + ":" + std::to_string(lineno) +
                               ": expected key=value");
    apply_config_override(cfg, trimmed(t.substr(0, eq)), trimmed(t.substr(eq + 1)));
  }
}

std::map<std::string, std::string> resolved_config(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> m;
  m["grid_n"] = std::to_string(cfg.grid_n);
  m["seed"] = std::to_string(cfg.seed);
  m["amplitude"] = fmt(cfg.amplitude);
  m["max_freq"] = std::to_string(cfg.max_freq);
  m["count"] = std::to_string(cfg.count);
  m["z_max"] = fmt(cfg.z_max);
  m["eps_fd"] = fmt(cfg.eps_fd);
  std::string zs;
  for (int k = 0; k < 10; ++k) {
    if (k) zs += ',';
    zs += fmt(cfg.z[k]);
  }
  m["z"] = zs;
  m["dt"] = fmt(cfg.flow.dt);
  m["t_end"] = fmt(cfg.flow.t_end);
  m["residual_tol"] = fmt(cfg.flow.residual_tol);
  m["a0_floor"] = fmt(cfg.flow.a0_floor);
  m["record_every"] = std::to_string(cfg.flow.record_every);
  m["tube_halfwidth"] = fmt(cfg.flow.tube_halfwidth);
  m["classical"] = cfg.flow.classical ? "1" : "0";
  m["snapshots"] = cfg.snapshots ? "1" : "0";
  m["parallel"] = cfg.parallel ? "1" : "0";
  m["output_dir"] = cfg.output_dir;
  return m;
}

}  // namespace wflab

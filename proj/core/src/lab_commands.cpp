#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "wflab/errors.hpp"
#include "wflab/lab.hpp"
#include "wflab/parallel.hpp"
#include "wflab/spectral.hpp"

namespace wflab {
namespace {

namespace fs = std::filesystem;

constexpr double kWillmoreMin = 2.0 * kPi * kPi;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream os(dir / name);
  if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
  return os;
}

void write_manifest(const ExperimentConfig& cfg, const std::vector<std::string>& artifacts) {
  std::ofstream os = open_out(cfg.output_dir, "manifest.txt");
  os << "command: " << cfg.command << "\n";
  for (const std::string& a : artifacts) os << "artifact: " << a << "\n";
  for (const auto& [k, v] : resolved_config(cfg)) os << "config: " << k << "=" << v << "\n";
}

struct CheckList {
  std::ostringstream log;
  bool ok = true;

  void check(bool pass, const std::string& what, double value) {
    log << (pass ? "PASS " : "FAIL ") << what << " (" << fmt(value) << ")\n";
    ok = ok && pass;
  }
  void note(const std::string& line) { log << line << "\n"; }
};

double uniform_pm1(std::mt19937_64& rng) {
  return 2.0 * (static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0)) - 1.0;
}

ConformalParams random_params(std::mt19937_64& rng, double z_max) {
  ConformalParams p;
  double nrm = 0.0;
  do {
    nrm = 0.0;
    for (double& c : p.z) {
      c = uniform_pm1(rng);
      nrm += c * c;
    }
    nrm = std::sqrt(nrm);
  } while (nrm < 1e-6);
  const double radius = z_max * (0.5 + 0.5 * (0.5 * (uniform_pm1(rng) + 1.0)));
  for (double& c : p.z) c *= radius / nrm;
  return p;
}

// Least-squares slope of log(residual) against log(h).
double fitted_order(const std::vector<double>& hs, const std::vector<double>& rs) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = hs.size();
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const double x = std::log(hs[i]);
    const double y = std::log(std::max(rs[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

std::vector<std::pair<std::string, ScalarField>> linearize_battery(GridSpec g) {
  auto mode = [g](double cm, double cn, bool sine) {
    return ScalarField::sample(g, [cm, cn, sine](double u, double v) {
      const double ph = cm * u + cn * v;
      return sine ? std::sin(ph) : std::cos(ph);
    });
  };
  std::vector<std::pair<std::string, ScalarField>> battery;
  battery.emplace_back("cos_u", mode(1, 0, false));
  battery.emplace_back("sin_u", mode(1, 0, true));
  battery.emplace_back("cos_v", mode(0, 1, false));
  battery.emplace_back("sin_v", mode(0, 1, true));
  battery.emplace_back("cos_u+v", mode(1, 1, false));
  battery.emplace_back("sin_u+v", mode(1, 1, true));
  battery.emplace_back("cos_u-v", mode(1, -1, false));
  battery.emplace_back("sin_u-v", mode(1, -1, true));
  battery.emplace_back("const", ScalarField::constant(g, 1.0));
  battery.emplace_back("cos_2u", mode(2, 0, false));
  battery.emplace_back("sin_2v", mode(0, 2, true));
  battery.emplace_back("cos_2u+v", mode(2, 1, false));
  battery.emplace_back("sin_u+2v", mode(1, 2, true));
  return battery;
}

int cmd_spectrum(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto entries = tcc_spectrum(cfg.max_freq);

  std::ofstream csv = open_out(cfg.output_dir, "spectrum.csv");
  csv << "m,n,lambda_laplace,lambda_tcc\n";
  for (const auto& e : entries)
    csv << e.m << ',' << e.n << ',' << fmt(laplace_symbol(e.m, e.n)) << ',' << fmt(e.eigenvalue)
        << '\n';

  CheckList checks;
  int zeros = 0;
  double min_t = entries.front().eigenvalue;
  double mu1 = std::numeric_limits<double>::infinity();
  bool kernel_modes_correct = true;
  for (const auto& e : entries) {
    min_t = std::min(min_t, e.eigenvalue);
    const int q = e.m * e.m + e.n * e.n;
    if (e.eigenvalue == 0.0) {
      ++zeros;
      kernel_modes_correct = kernel_modes_correct && (q == 1 || q == 2);
    } else if (e.eigenvalue > 0.0) {
      mu1 = std::min(mu1, e.eigenvalue);
    }
  }
  // Discrete multipliers on the working grid agree exactly with the symbols.
  const GridSpec g(cfg.grid_n);
  const SpectralOperator lap = SpectralOperator::laplacian(g);
  bool discrete_exact = true;
  for (int m = -g.n / 2; m <= g.n / 2 - 1 && discrete_exact; ++m)
    for (int n = -g.n / 2; n <= g.n / 2 - 1; ++n)
      if (lap.multiplier(m, n) != laplace_symbol(m, n)) {
        discrete_exact = false;
        break;
      }

  checks.check(discrete_exact, "discrete laplacian multipliers equal -2(m^2+n^2) exactly",
               discrete_exact ? 0.0 : 1.0);
  checks.check(min_t >= 0.0, "no negative eigenvalue of the linearized operator", min_t);
  checks.check(zeros == 8, "kernel dimension is 8", zeros);
  checks.check(kernel_modes_correct, "kernel modes have m^2+n^2 in {1,2}",
               kernel_modes_correct ? 0.0 : 1.0);
  checks.check(std::abs(mu1 - 2.0) <= 1e-12, "smallest positive eigenvalue mu_1 = 2", mu1);

  std::ofstream sum = open_out(cfg.output_dir, "summary.txt");
  sum << "kernel_dimension: " << zeros << "\n";
  sum << "mu_1: " << fmt(mu1) << "\n";
  sum << checks.log.str();
  write_manifest(cfg, {"spectrum.csv", "summary.txt"});
  return checks.ok ? 0 : 1;
}

int cmd_linearize(const ExperimentConfig& cfg) {
  cfg.validate();
  const GridSpec g(cfg.grid_n);
  const auto battery = linearize_battery(g);
  const std::vector<double> hs{1e-3, 1e-4, 1e-5};

  std::ofstream csv = open_out(cfg.output_dir, "linearize.csv");
  csv << "mode,h,velocity_resid,velocity_resid_central,meancurv_resid,meancurv_resid_central\n";

  CheckList checks;
  struct Row {
    std::array<double, 3> vel, velc, mc, mcc;
  };
  std::vector<Row> rows(battery.size());
  parallel_for(
      static_cast<int>(battery.size()),
      [&](int b) {
        for (std::size_t ih = 0; ih < hs.size(); ++ih) {
          rows[b].vel[ih] = linearization_residual(battery[b].second, hs[ih], false);
          rows[b].velc[ih] = linearization_residual(battery[b].second, hs[ih], true);
          rows[b].mc[ih] = mean_curvature_derivative_check(battery[b].second, hs[ih], false);
          rows[b].mcc[ih] = mean_curvature_derivative_check(battery[b].second, hs[ih], true);
        }
      },
      cfg.parallel);

  for (std::size_t b = 0; b < battery.size(); ++b) {
    for (std::size_t ih = 0; ih < hs.size(); ++ih)
      csv << battery[b].first << ',' << fmt(hs[ih]) << ',' << fmt(rows[b].vel[ih]) << ','
          << fmt(rows[b].velc[ih]) << ',' << fmt(rows[b].mc[ih]) << ',' << fmt(rows[b].mcc[ih])
          << '\n';

    const ScalarField& phi = battery[b].second;
    const double vel_scale = std::max(1.0, tcc_apply(phi).sup_norm());
    ScalarField hf_target = laplace_cc(phi);
    ScalarField four_phi = phi;
    four_phi *= 4.0;
    hf_target += four_phi;
    const double mc_scale = std::max(1.0, hf_target.sup_norm());

    const double order_vel = fitted_order(hs, {rows[b].vel.begin(), rows[b].vel.end()});
    const double order_mc = fitted_order(hs, {rows[b].mc.begin(), rows[b].mc.end()});
    checks.check(order_vel >= 0.9, battery[b].first + ": velocity derivative order >= 0.9",
                 order_vel);
    checks.check(order_mc >= 0.9, battery[b].first + ": mean curvature derivative order >= 0.9",
                 order_mc);
    checks.check(rows[b].velc[2] / vel_scale <= 1e-4,
                 battery[b].first + ": velocity derivative matches -(1/4)(Lap+4)(Lap+2)",
                 rows[b].velc[2] / vel_scale);
    checks.check(rows[b].mcc[2] / mc_scale <= 1e-5,
                 battery[b].first + ": mean curvature derivative matches -(Lap+4)",
                 rows[b].mcc[2] / mc_scale);
  }

  std::ofstream sum = open_out(cfg.output_dir, "summary.txt");
  sum << checks.log.str();
  write_manifest(cfg, {"linearize.csv", "summary.txt"});
  return checks.ok ? 0 : 1;
}

int cmd_flow(const ExperimentConfig& cfg) {
  cfg.validate();
  const GridSpec g(cfg.grid_n);
  const ScalarField rho0 = random_band_limited(g, cfg.seed, 4, cfg.amplitude);
  const FlowTrajectory traj = run(rho0, cfg.flow);

  std::vector<std::string> artifacts{"trajectory.csv", "terminal_field.csv", "summary.txt"};
  {
    std::ofstream os = open_out(cfg.output_dir, "trajectory.csv");
    write_trajectory_csv(os, traj);
  }
  {
    std::ofstream os = open_out(cfg.output_dir, "terminal_field.csv");
    write_csv(os, traj.terminal);
  }
  if (cfg.snapshots) {
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof name, "field_%06zu.csv", i);
      std::ofstream os = open_out(cfg.output_dir, name);
      write_csv(os, traj.states[i]);
      artifacts.push_back(name);
      std::snprintf(name, sizeof name, "surface_%06zu.obj", i);
      std::ofstream om = open_out(cfg.output_dir, name);
      write_mesh_obj(om, graph_geometry(traj.states[i]), S3Point{{0, 0, 0, 1}});
      artifacts.push_back(name);
    }
  }

  CheckList checks;
  const bool converged = traj.status == FlowStatus::converged;
  checks.check(converged, "flow reached the residual tolerance",
               traj.samples.empty() ? -1.0 : traj.samples.back().residual);
  double rate = std::numeric_limits<double>::quiet_NaN();
  if (converged && traj.samples.size() >= 6 && cfg.amplitude > 0.0) {
    try {
      const auto [t_lo, t_hi] = final_decade_window(traj);
      rate = decay_rate(traj, t_lo, t_hi);
    } catch (const insufficient_data_error&) {
    }
  }

  std::ofstream sum = open_out(cfg.output_dir, "summary.txt");
  const char* status_name[] = {"converged", "reached_t_end", "aborted_chart", "aborted_umbilic",
                               "aborted_energy"};
  sum << "status: " << status_name[static_cast<int>(traj.status)] << "\n";
  if (!traj.message.empty()) sum << "detail: " << traj.message << "\n";
  sum << "steps: " << traj.steps << "\n";
  if (!traj.samples.empty()) {
    sum << "terminal_energy: " << fmt(traj.samples.back().energy) << "\n";
    sum << "terminal_residual: " << fmt(traj.samples.back().residual) << "\n";
  }
  sum << "fitted_decay_rate: " << fmt(rate) << "\n";
  sum << checks.log.str();
  write_manifest(cfg, artifacts);
  return checks.ok ? 0 : 1;
}

int cmd_equilibria(const ExperimentConfig& cfg) {
  cfg.validate();
  const GridSpec g(cfg.grid_n);

  std::vector<ConformalParams> zs;
  if (cfg.count > 0) {
    std::mt19937_64 rng(cfg.seed);
    for (int i = 0; i < cfg.count; ++i) zs.push_back(random_params(rng, cfg.z_max));
  } else {
    ConformalParams p;
    p.z = cfg.z;
    zs.push_back(p);
  }

  struct Report {
    double znorm = 0, residual = 0, energy = 0, center_norm = 0, stable_norm = 0;
    std::string error;
  };
  std::vector<Report> reports(zs.size());
  parallel_for(
      static_cast<int>(zs.size()),
      [&](int i) {
        Report& r = reports[i];
        r.znorm = zs[i].norm();
        try {
          const ScalarField rho = equilibrium_distance_function(zs[i], g);
          r.residual = velocity(rho).sup_norm();
          r.energy = willmore_energy(graph_geometry(rho));
          const CenterSplit split = project_center(rho);
          r.center_norm = norm_cc(split.center_part);
          r.stable_norm = norm_cc(split.stable_part);
        } catch (const not_a_graph_error& e) {
          r.error = e.what();
        }
      },
      cfg.parallel);

  std::ofstream csv = open_out(cfg.output_dir, "equilibria.csv");
  csv << "index,z_norm,residual,energy,center_norm,stable_norm,error\n";
  CheckList checks;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const Report& r = reports[i];
    csv << i << ',' << fmt(r.znorm) << ',' << fmt(r.residual) << ',' << fmt(r.energy) << ','
        << fmt(r.center_norm) << ',' << fmt(r.stable_norm) << ',' << r.error << '\n';
    const std::string tag = "z[" + std::to_string(i) + "]";
    checks.check(r.error.empty(), tag + ": distance function extracted", r.znorm);
    if (!r.error.empty()) continue;
    checks.check(r.residual <= 1e-6, tag + ": equilibrium residual <= 1e-6", r.residual);
    checks.check(std::abs(r.energy - kWillmoreMin) <= 1e-6,
                 tag + ": Willmore energy = 2*pi^2 within 1e-6", r.energy - kWillmoreMin);
  }

  const RankCheck rc = df0_rank_check(cfg.eps_fd, g);
  checks.check(rc.rank == 8, "coefficient matrix of the conformal family has rank 8", rc.rank);
  checks.check(rc.column_norms[8] <= 1e-8 && rc.column_norms[9] <= 1e-8,
               "columns 9,10 vanish (tangential rotations)",
               std::max(rc.column_norms[8], rc.column_norms[9]));

  std::ofstream rank = open_out(cfg.output_dir, "rank.txt");
  rank << "rank: " << rc.rank << "\n";
  for (int i = 0; i < 10; ++i) rank << "sigma_" << i + 1 << ": " << fmt(rc.singular_values[i]) << "\n";
  for (int i = 0; i < 10; ++i)
    rank << "column_norm_" << i + 1 << ": " << fmt(rc.column_norms[i]) << "\n";

  std::ofstream sum = open_out(cfg.output_dir, "summary.txt");
  sum << checks.log.str();
  write_manifest(cfg, {"equilibria.csv", "rank.txt", "summary.txt"});
  return checks.ok ? 0 : 1;
}

int cmd_invariance(const ExperimentConfig& cfg) {
  cfg.validate();
  const GridSpec g(cfg.grid_n);

  struct Entry {
    std::string name;
    ConformalParams z;
    double tol;
  };
  std::vector<Entry> battery;
  battery.push_back({"identity", ConformalParams{}, 1e-12});
  for (int k = 5; k <= 10; ++k)
    battery.push_back({"rotation_" + std::to_string(k), ConformalParams::axis(k, 0.15), 1e-9});
  for (int k = 1; k <= 4; ++k)
    battery.push_back({"translation_" + std::to_string(k), ConformalParams::axis(k, 0.1), 1e-6});
  std::mt19937_64 rng(cfg.seed);
  for (int i = 0; i < 4; ++i) {
    ConformalParams p = random_params(rng, 0.15);
    const double n = p.norm();
    for (double& c : p.z) c *= 0.15 / n;
    battery.push_back({"mixed_" + std::to_string(i), p, 1e-6});
  }

  std::vector<double> deviations(battery.size());
  parallel_for(
      static_cast<int>(battery.size()),
      [&](int i) {
        const ScalarField rho = equilibrium_distance_function(battery[i].z, g);
        deviations[i] = std::abs(willmore_energy(graph_geometry(rho)) - kWillmoreMin);
      },
      cfg.parallel);

  std::ofstream csv = open_out(cfg.output_dir, "invariance.csv");
  csv << "name,energy_deviation,tolerance\n";
  CheckList checks;
  for (std::size_t i = 0; i < battery.size(); ++i) {
    csv << battery[i].name << ',' << fmt(deviations[i]) << ',' << fmt(battery[i].tol) << '\n';
    checks.check(deviations[i] <= battery[i].tol,
                 battery[i].name + ": Willmore energy invariant", deviations[i]);
  }

  // Stereographic roundtrips on graph-surface samples, several poles.
  const ScalarField rho = random_band_limited(g, cfg.seed, 4, 0.05);
  const GraphGeometry geom = graph_geometry(rho);
  const std::vector<S3Point> poles{S3Point{{0, 0, 0, 1}}, S3Point{{1, 0, 0, 0}},
                                   S3Point{{0.5, 0.5, 0.5, 0.5}}};
  double roundtrip = 0.0;
  for (const S3Point& pole : poles)
    for (int i = 0; i < g.n; i += 4)
      for (int j = 0; j < g.n; j += 4) {
        const std::size_t k = static_cast<std::size_t>(i) * g.n + j;
        const S3Point p{{geom.theta[0].values[k], geom.theta[1].values[k],
                         geom.theta[2].values[k], geom.theta[3].values[k]}};
        const S3Point back = stereographic_inverse(stereographic(p, pole), pole);
        for (int c = 0; c < 4; ++c) roundtrip = std::max(roundtrip, std::abs(back.x[c] - p.x[c]));
      }
  csv << "stereographic_roundtrip," << fmt(roundtrip) << ',' << fmt(1e-12) << '\n';
  checks.check(roundtrip <= 1e-12, "stereographic roundtrip identity", roundtrip);

  std::ofstream sum = open_out(cfg.output_dir, "summary.txt");
  sum << checks.log.str();
  write_manifest(cfg, {"invariance.csv", "summary.txt"});
  return checks.ok ? 0 : 1;
}

int cmd_export(const ExperimentConfig& cfg) {
  cfg.validate();
  const GridSpec g(cfg.grid_n);
  ConformalParams p;
  p.z = cfg.z;
  ScalarField rho(g);
  if (p.norm() > 0.0)
    rho = equilibrium_distance_function(p, g);
  else if (cfg.amplitude > 0.0)
    rho = random_band_limited(g, cfg.seed, 4, cfg.amplitude);
  {
    std::ofstream os = open_out(cfg.output_dir, "field.csv");
    write_csv(os, rho);
  }
  {
    std::ofstream os = open_out(cfg.output_dir, "surface.obj");
    write_mesh_obj(os, graph_geometry(rho), S3Point{{0, 0, 0, 1}});
  }
  write_manifest(cfg, {"field.csv", "surface.obj"});
  return 0;
}

int run_command(const ExperimentConfig& cfg) {
  if (cfg.command == "spectrum") return cmd_spectrum(cfg);
  if (cfg.command == "linearize") return cmd_linearize(cfg);
  if (cfg.command == "flow") return cmd_flow(cfg);
  if (cfg.command == "equilibria") return cmd_equilibria(cfg);
  if (cfg.command == "invariance") return cmd_invariance(cfg);
  if (cfg.command == "export") return cmd_export(cfg);
  throw std::invalid_argument("unknown command: " + cfg.command);
}

}  // namespace wflab

#include "wflab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "wflab/errors.hpp"
#include "wflab/spectral.hpp"

namespace wflab {
namespace {

void require_band_limited(const ScalarField& phi) {
  const ScalarField trunc = dealias_two_thirds(phi);
  ScalarField diff = phi;
  diff -= trunc;
  if (diff.sup_norm() > 1e-10 * (1.0 + phi.sup_norm()))
    throw std::invalid_argument("field is not band-limited to the dealiased range");
}

ScalarField flow_mean_curvature(const ScalarField& rho) {
  GraphGeometry geom = graph_geometry(rho);
  ScalarField hf = geom.H;
  hf *= -2.0;
  return hf;
}

}  // namespace

void FlowConfig::validate() const {
  if (!(dt > 0.0 && dt <= 1e-2)) throw std::invalid_argument("FlowConfig: dt must be in (0, 1e-2]");
  if (!(t_end > 0.0)) throw std::invalid_argument("FlowConfig: t_end must be positive");
  if (!(residual_tol > 0.0 && residual_tol <= 1e-4))
    throw std::invalid_argument("FlowConfig: residual_tol must be in (0, 1e-4]");
  if (!(a0_floor > 0.0 && a0_floor < 1.0))
    throw std::invalid_argument("FlowConfig: a0_floor must be in (0, 1)");
  if (record_every < 1) throw std::invalid_argument("FlowConfig: record_every must be >= 1");
  if (!(tube_halfwidth > 0.0 && tube_halfwidth < kPi / 4.0))
    throw std::invalid_argument("FlowConfig: tube_halfwidth must be in (0, pi/4)");
}

VelocityEval velocity_eval(const ScalarField& rho, double a0_floor, bool classical) {
  GraphGeometry geom = graph_geometry(rho);
  VelocityEval ev;
  ev.energy = willmore_energy(geom);
  ev.min_a0sq = *std::min_element(geom.a0sq.values.begin(), geom.a0sq.values.end());
  if (!classical && ev.min_a0sq < a0_floor) {
    std::ostringstream msg;
    msg << "velocity: min |A0|^2 = " << ev.min_a0sq << " below the umbilic floor " << a0_floor;
    throw umbilic_error(msg.str());
  }

  ScalarField hf = geom.H;
  hf *= -2.0;
  hf = dealias_two_thirds(hf);
  const ScalarField lap_hf = beltrami(geom, hf);

  ScalarField G(rho.grid);
  if (classical) {
    for (std::size_t k = 0; k < G.values.size(); ++k)
      G.values[k] = geom.L.values[k] *
                    (lap_hf.values[k] + geom.a0sq.values[k] * hf.values[k]);
  } else {
    for (std::size_t k = 0; k < G.values.size(); ++k) {
      const double a0 = geom.a0sq.values[k];
      G.values[k] = geom.L.values[k] * (lap_hf.values[k] + a0 * hf.values[k]) / (a0 * a0);
    }
  }
  ev.G = dealias_two_thirds(G);
  return ev;
}

ScalarField velocity(const ScalarField& rho, double a0_floor, bool classical) {
  return velocity_eval(rho, a0_floor, classical).G;
}

double linearization_residual(const ScalarField& phi, double h, bool central) {
  require_finite(phi, "linearization_residual");
  require_band_limited(phi);
  if (!(h >= 1e-6 && h <= 1e-3))
    throw std::invalid_argument("linearization_residual: h must be in [1e-6, 1e-3]");
  ScalarField up = phi;
  up *= h;
  const ScalarField gp = velocity(up);
  ScalarField fd(phi.grid);
  if (central) {
    ScalarField um = phi;
    um *= -h;
    const ScalarField gm = velocity(um);
    fd = gp - gm;
    fd *= 1.0 / (2.0 * h);
  } else {
    const ScalarField g0 = velocity(ScalarField(phi.grid));
    fd = gp - g0;
    fd *= 1.0 / h;
  }
  fd += tcc_apply(phi);
  return fd.sup_norm();
}

double mean_curvature_derivative_check(const ScalarField& phi, double h, bool central) {
  require_finite(phi, "mean_curvature_derivative_check");
  require_band_limited(phi);
  if (!(h >= 1e-6 && h <= 1e-3))
    throw std::invalid_argument("mean_curvature_derivative_check: h must be in [1e-6, 1e-3]");
  ScalarField up = phi;
  up *= h;
  const ScalarField hp = flow_mean_curvature(up);
  ScalarField fd(phi.grid);
  if (central) {
    ScalarField um = phi;
    um *= -h;
    const ScalarField hm = flow_mean_curvature(um);
    fd = hp - hm;
    fd *= 1.0 / (2.0 * h);
  } else {
    const ScalarField h0 = flow_mean_curvature(ScalarField(phi.grid));
    fd = hp - h0;
    fd *= 1.0 / h;
  }
  ScalarField expect = laplace_cc(phi);
  ScalarField four_phi = phi;
  four_phi *= 4.0;
  expect += four_phi;
  fd += expect;
  return fd.sup_norm();
}

ScalarField step(const ScalarField& rho, double dt, double a0_floor) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  const ScalarField G = velocity(rho, a0_floor);
  ScalarField rhs = G + tcc_apply(rho);
  rhs *= dt;
  rhs += rho;
  return imex_resolvent(rhs, dt);
}

FlowTrajectory run(const ScalarField& rho0, const FlowConfig& cfg) {
  cfg.validate();
  require_finite(rho0, "run");
  FlowTrajectory traj;
  ScalarField rho = rho0;
  double prev_energy = std::numeric_limits<double>::infinity();
  const long max_steps = static_cast<long>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
  long s = 0;

  while (true) {
    const double t = s * cfg.dt;
    if (rho.sup_norm() >= cfg.tube_halfwidth) {
      traj.status = FlowStatus::aborted_chart;
      std::ostringstream msg;
      msg << "chart exit at step " << s << " (t = " << t << "): ||rho||_inf = " << rho.sup_norm()
          << " >= " << cfg.tube_halfwidth;
      traj.message = msg.str();
      break;
    }
    VelocityEval ev;
    try {
      ev = velocity_eval(rho, cfg.a0_floor, cfg.classical);
    } catch (const umbilic_error& e) {
      traj.status = FlowStatus::aborted_umbilic;
      traj.message = std::string(e.what()) + " at step " + std::to_string(s);
      break;
    } catch (const immersion_error& e) {
      traj.status = FlowStatus::aborted_chart;
      traj.message = std::string(e.what()) + " at step " + std::to_string(s);
      break;
    }
    if (ev.energy > prev_energy + 1e-9) {
      traj.status = FlowStatus::aborted_energy;
      std::ostringstream msg;
      msg << "energy increased at step " << s << ": " << prev_energy << " -> " << ev.energy;
      traj.message = msg.str();
      break;
    }
    prev_energy = ev.energy;

    const double residual = ev.G.sup_norm();
    const bool converged = residual < cfg.residual_tol;
    const bool out_of_time = s >= max_steps;
    if (s % cfg.record_every == 0 || converged || out_of_time) {
      const CenterSplit split = project_center(rho);
      traj.samples.push_back(
          {t, ev.energy, residual, norm_cc(split.center_part), norm_cc(split.stable_part)});
      traj.states.push_back(rho);
    }
    if (converged) {
      traj.status = FlowStatus::converged;
      break;
    }
    if (out_of_time) {
      traj.status = FlowStatus::reached_t_end;
      break;
    }

    ScalarField rhs = ev.G + tcc_apply(rho);
    rhs *= cfg.dt;
    rhs += rho;
    rho = imex_resolvent(rhs, cfg.dt);
    ++s;
  }

  traj.terminal = rho;
  traj.steps = s;
  return traj;
}

double decay_rate(const FlowTrajectory& traj, double t_lo, double t_hi) {
  if (!(t_lo < t_hi)) throw std::invalid_argument("decay_rate: need t_lo < t_hi");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const double t = traj.samples[i].t;
    if (t < t_lo || t > t_hi) continue;
    ScalarField diff = traj.states[i];
    diff -= traj.terminal;
    const double d = norm_cc(diff);
    if (d > 0.0) pts.emplace_back(t, std::log(d));
  }
  if (pts.size() < 5)
    throw insufficient_data_error("decay_rate: fewer than 5 samples in the window");
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (auto [t, y] : pts) {
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double m = pts.size();
  const double slope = (m * sty - st * sy) / (m * stt - st * st);
  return -slope;
}

std::pair<double, double> final_decade_window(const FlowTrajectory& traj) {
  if (traj.samples.size() < 2)
    throw insufficient_data_error("final_decade_window: trajectory too short");
  std::vector<std::pair<double, double>> dist;
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    ScalarField diff = traj.states[i];
    diff -= traj.terminal;
    const double d = norm_cc(diff);
    if (d > 1e-13) dist.emplace_back(traj.samples[i].t, d);
  }
  if (dist.size() < 2) throw insufficient_data_error("final_decade_window: trajectory too short");
  // The terminal state itself sits within ~residual/mu_1 of the true
  // equilibrium, so distances below a few multiples of the terminal residual
  // carry no rate information; buffer the window one further decade out.
  const double floor = std::max({5.0 * traj.samples.back().residual, 1e-13});
  double t_hi = dist.back().first;
  for (std::size_t i = dist.size(); i-- > 0;)
    if (dist[i].second >= 10.0 * floor) {
      t_hi = dist[i].first;
      break;
    }
  double t_lo = dist.front().first;
  for (std::size_t i = dist.size(); i-- > 0;)
    if (dist[i].second >= 100.0 * floor) {
      t_lo = dist[i].first;
      break;
    }
  if (!(t_lo < t_hi)) {
    t_lo = dist.front().first;
    t_hi = dist.back().first;
  }
  return {t_lo, t_hi};
}

void write_trajectory_csv(std::ostream& os, const FlowTrajectory& traj) {
  os << "t,energy,residual,center_norm,stable_norm\n";
  char buf[160];
  for (const FlowSample& s : traj.samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.energy, s.residual,
                  s.center_norm, s.stable_norm);
    os << buf;
  }
}

}  // namespace wflab

#pragma once

#include <string>
#include <vector>

#include "wflab/field.hpp"
#include "wflab/geometry.hpp"

namespace wflab {

struct FlowConfig {
  double dt = 1e-3;
  double t_end = 20.0;
  double residual_tol = 1e-8;   // sup norm of G declaring equilibrium
  double a0_floor = 0.5;        // umbilic guard on min |A0|^2
  int record_every = 10;
  double tube_halfwidth = kPi / 8.0;  // chart guard on ||rho||_inf
  bool classical = false;  // drop the |A0|^-4 factor (comparison variant)

  void validate() const;
};

enum class FlowStatus {
  converged,
  reached_t_end,
  aborted_chart,
  aborted_umbilic,
  aborted_energy,
};

struct FlowSample {
  double t;
  double energy;
  double residual;     // ||G(rho_t)||_inf
  double center_norm;  // ||pi^c rho_t||_{L^2(CC)}
  double stable_norm;  // ||pi^s rho_t||_{L^2(CC)}
};

struct FlowTrajectory {
  std::vector<FlowSample> samples;
  std::vector<ScalarField> states;  // one per sample
  ScalarField terminal;             // rho at the final step
  FlowStatus status = FlowStatus::reached_t_end;
  std::string message;
  long steps = 0;
};

// Graph velocity of the Moebius-invariant Willmore flow,
//   G(rho) = (L / |A0|^4) (Lap_rho Hf + |A0|^2 Hf),
// where Hf = -2H is the mean curvature in the trace convention with respect
// to the reversed normal. In this normalization the derivative of G at
// rho = 0 is exactly -(1/4)(Lap+4)(Lap+2), G vanishes on every conformal
// image of the Clifford torus, and the bending energy is nonincreasing along
// the flow. The nonlinear terms are dealiased by the 2/3 rule.
ScalarField velocity(const ScalarField& rho, double a0_floor = 0.5, bool classical = false);

struct VelocityEval {
  ScalarField G;
  double energy;
  double min_a0sq;
};
VelocityEval velocity_eval(const ScalarField& rho, double a0_floor = 0.5, bool classical = false);

// || (G(h phi) - G(0))/h + T phi ||_inf (one-sided), or the central-difference
// variant (G(h phi) - G(-h phi))/(2h); O(h) resp. O(h^2).
double linearization_residual(const ScalarField& phi, double h, bool central = false);

// Same protocol for the mean curvature: || dHf/dh + (Lap + 4) phi ||_inf,
// with Hf = -2H as in the velocity.
double mean_curvature_derivative_check(const ScalarField& phi, double h, bool central = false);

// Semi-implicit Euler: rho+ = (I + dt T)^{-1} (rho + dt (G(rho) + T rho)).
ScalarField step(const ScalarField& rho, double dt, double a0_floor = 0.5);

FlowTrajectory run(const ScalarField& rho0, const FlowConfig& cfg);

// Least-squares slope of log ||rho_t - rho_inf||_{L^2(CC)} over the window,
// negated. Throws insufficient_data_error with fewer than 5 usable samples.
double decay_rate(const FlowTrajectory& traj, double t_lo, double t_hi);

// Window [t_lo, t_hi] covering the last factor-10 drop of the distance to
// the terminal state.
std::pair<double, double> final_decade_window(const FlowTrajectory& traj);

void write_trajectory_csv(std::ostream& os, const FlowTrajectory& traj);

}  // namespace wflab

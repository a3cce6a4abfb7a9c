#include <cmath>

#include "doctest.h"
#include "test_helpers.hpp"
#include "wflab/errors.hpp"
#include "wflab/flow.hpp"
#include "wflab/spectral.hpp"

using namespace wflab;
using namespace wflab::testing;

namespace {

ScalarField mode(GridSpec g, double cm, double cn, bool sine = false) {
  return ScalarField::sample(g, [=](double u, double v) {
    const double ph = cm * u + cn * v;
    return sine ? std::sin(ph) : std::cos(ph);
  });
}

// modal coefficient of a trajectory state against a reference field
double coefficient(const ScalarField& state, const ScalarField& ref) {
  return inner_cc(state, ref) / inner_cc(ref, ref);
}

double fit_rate(const std::vector<std::pair<double, double>>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = pts.size();
  return -(m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

TEST_CASE("the Clifford torus is stationary") {
  GridSpec g(64);
  CHECK(velocity(ScalarField(g)).sup_norm() < 1e-10);
  CHECK(step(ScalarField(g), 1e-3).sup_norm() < 1e-13);
}

TEST_CASE("velocity on constant distance functions matches the closed form") {
  GridSpec g(64);
  // flat product torus: G(c) = -sin(4c)/2, spatially constant
  for (double c : {-0.1, -0.05, 0.05, 0.1}) {
    CAPTURE(c);
    const ScalarField G = velocity(ScalarField::constant(g, c));
    CHECK(sup_diff(G, ScalarField::constant(g, -0.5 * std::sin(4 * c))) < 1e-10);
  }
  // comparison variant without the |A0|^-4 factor: -4 sin(2c)/cos^3(2c)
  const double c = 0.08;
  const ScalarField Gc = velocity(ScalarField::constant(g, c), 0.5, true);
  const double want = -4.0 * std::sin(2 * c) / std::pow(std::cos(2 * c), 3);
  CHECK(sup_diff(Gc, ScalarField::constant(g, want)) < 1e-9);
}

TEST_CASE("umbilic guard") {
  GridSpec g(48);
  // |A0|^2 = 2 on the Clifford torus; a floor above that must trip the guard
  CHECK_THROWS_AS(velocity(ScalarField(g), 3.0), umbilic_error);
  CHECK_NOTHROW(velocity(ScalarField(g), 3.0, true));  // no guard without the factor
}

TEST_CASE("linearization against the spectral operator") {
  GridSpec g(48);
  const std::vector<std::pair<const char*, ScalarField>> battery = {
      {"cos_u", mode(g, 1, 0)},
      {"sin_u", mode(g, 1, 0, true)},
      {"cos_v", mode(g, 0, 1)},
      {"sin_v", mode(g, 0, 1, true)},
      {"cos_u+v", mode(g, 1, 1)},
      {"sin_u+v", mode(g, 1, 1, true)},
      {"cos_u-v", mode(g, 1, -1)},
      {"sin_u-v", mode(g, 1, -1, true)},
      {"const", ScalarField::constant(g, 1.0)},
      {"cos_2u", mode(g, 2, 0)},
      {"sin_2v", mode(g, 0, 2, true)},
      {"cos_2u+v", mode(g, 2, 1)},
      {"sin_u+2v", mode(g, 1, 2, true)}};

  for (const auto& [name, phi] : battery) {
    CAPTURE(name);
    const double r3 = linearization_residual(phi, 1e-3);
    const double r4 = linearization_residual(phi, 1e-4);
    CHECK(r4 < r3);  // one-sided residuals shrink with h
    const double vel_scale = std::max(1.0, tcc_apply(phi).sup_norm());
    CHECK(linearization_residual(phi, 1e-5, true) / vel_scale < 1e-4);

    const double m3 = mean_curvature_derivative_check(phi, 1e-3);
    const double m4 = mean_curvature_derivative_check(phi, 1e-4);
    CHECK(m4 < m3);
    ScalarField target = laplace_cc(phi);
    ScalarField four = phi;
    four *= 4.0;
    target += four;
    const double mc_scale = std::max(1.0, target.sup_norm());
    CHECK(mean_curvature_derivative_check(phi, 1e-5, true) / mc_scale < 1e-5);
  }
}

TEST_CASE("directional derivative values at the origin") {
  GridSpec g(48);
  const double h = 1e-4;
  // constant direction: (G(h) - G(0))/h -> -2, the symbol at (0,0)
  ScalarField fd = velocity(ScalarField::constant(g, h)) - velocity(ScalarField(g));
  fd *= 1.0 / h;
  CHECK(sup_diff(fd, ScalarField::constant(g, -2.0)) < 1e-5);

  // cos 2u direction -> -6 cos 2u
  ScalarField up = mode(g, 2, 0);
  up *= h;
  ScalarField fd2 = velocity(up) - velocity(ScalarField(g));
  fd2 *= 1.0 / h;
  ScalarField want = mode(g, 2, 0);
  want *= -6.0;
  CHECK(sup_diff(fd2, want) < 5e-2);  // one-sided, O(h) with an O(10^2) constant

  // kernel direction: the derivative vanishes
  ScalarField uk = mode(g, 1, 0);
  uk *= h;
  ScalarField fdk = velocity(uk) - velocity(ScalarField(g));
  fdk *= 1.0 / h;
  CHECK(fdk.sup_norm() < 1e-3);
}

TEST_CASE("linearization input validation") {
  GridSpec g(48);
  CHECK_THROWS_AS(linearization_residual(mode(g, 1, 0), 1e-7), std::invalid_argument);
  CHECK_THROWS_AS(linearization_residual(mode(g, 17, 0), 1e-4), std::invalid_argument);
}

TEST_CASE("semi-implicit step") {
  GridSpec g(48);
  const double dt = 1e-3;

  // stable mode decays like the resolvent of its symbol
  const double eps = 1e-3;
  ScalarField rho = mode(g, 2, 0);
  rho *= eps;
  const ScalarField next = step(rho, dt);
  ScalarField linear = rho;
  linear *= 1.0 / (1.0 + 6.0 * dt);
  CHECK(sup_diff(next, linear) < 1e-6);  // quadratic remainder O(dt eps^2), constant ~300

  // kernel modes are neutral to first order
  ScalarField rk = mode(g, 0, 1, true);
  rk *= eps;
  const ScalarField nk = step(rk, dt);
  CHECK(sup_diff(nk, rk) < 1e-8);
}

TEST_CASE("run terminates immediately on the equilibrium") {
  GridSpec g(48);
  FlowConfig cfg;
  const FlowTrajectory traj = run(ScalarField(g), cfg);
  CHECK(traj.status == FlowStatus::converged);
  CHECK(traj.steps == 0);
  REQUIRE(traj.samples.size() == 1);
  CHECK(traj.samples[0].residual < 1e-10);
  CHECK(traj.samples[0].energy == doctest::Approx(kWillmoreMin).epsilon(1e-12));
}

TEST_CASE("run aborts when the state leaves the tube") {
  GridSpec g(48);
  FlowConfig cfg;
  cfg.tube_halfwidth = 0.01;
  const FlowTrajectory traj = run(ScalarField::constant(g, 0.02), cfg);
  CHECK(traj.status == FlowStatus::aborted_chart);
  CHECK(!traj.message.empty());
}

TEST_CASE("flow config validation") {
  FlowConfig cfg;
  cfg.dt = 0.1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = FlowConfig{};
  cfg.residual_tol = 1e-3;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = FlowConfig{};
  cfg.a0_floor = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("pure cos 2u trajectory: modal rate 6, tail at the slow stable mode") {
  GridSpec g(48);
  FlowConfig cfg;
  cfg.record_every = 5;
  ScalarField rho0 = mode(g, 2, 0);
  rho0 *= 0.02;
  const FlowTrajectory traj = run(rho0, cfg);
  REQUIRE(traj.status == FlowStatus::converged);
  CHECK(traj.samples.back().t < 20.0);

  // energy is nonincreasing along the recorded samples
  for (std::size_t i = 1; i < traj.samples.size(); ++i)
    CHECK(traj.samples[i].energy <= traj.samples[i - 1].energy + 1e-9);
  CHECK(std::abs(traj.samples.back().energy - kWillmoreMin) < 1e-4);

  // the cos 2u component itself decays at its eigenvalue 6 (within 10%)
  const ScalarField ref = mode(g, 2, 0);
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const double t = traj.samples[i].t;
    if (t < 0.5 || t > 1.5) continue;
    const double a = std::abs(coefficient(traj.states[i], ref));
    if (a > 1e-12) pts.emplace_back(t, std::log(a));
  }
  REQUIRE(pts.size() >= 5);
  const double modal = fit_rate(pts);
  CHECK(modal == doctest::Approx(6.0).epsilon(0.1));

  // the trajectory tail carries second-order constant-mode content and
  // therefore fits the smallest positive eigenvalue 2
  const auto [lo, hi] = final_decade_window(traj);
  const double tail = decay_rate(traj, lo, hi);
  CHECK(tail >= 1.8);
  CHECK(tail == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("random perturbation converges with the expected diagnostics") {
  GridSpec g(48);
  FlowConfig cfg;
  cfg.record_every = 5;
  const ScalarField rho0 = random_band_limited(g, 7, 4, 0.02);
  const FlowTrajectory traj = run(rho0, cfg);
  REQUIRE(traj.status == FlowStatus::converged);
  CHECK(traj.samples.back().residual < cfg.residual_tol);
  CHECK(std::abs(traj.samples.back().energy - kWillmoreMin) < 1e-4);

  const auto [lo, hi] = final_decade_window(traj);
  CHECK(decay_rate(traj, lo, hi) >= 1.8);

  // center coordinates drift only at second order in the initial size
  double tv = 0.0;
  for (std::size_t i = 1; i < traj.samples.size(); ++i)
    tv += std::abs(traj.samples[i].center_norm - traj.samples[i - 1].center_norm);
  const double r0 = norm_cc(rho0);
  CHECK(tv <= 5.0 * r0 * r0);

  // stable norm decays monotonically after a transient of at most one unit
  double t0 = 0.0;
  for (std::size_t i = 1; i < traj.samples.size(); ++i)
    if (traj.samples[i].stable_norm > traj.samples[i - 1].stable_norm + 1e-12)
      t0 = traj.samples[i].t;
  CHECK(t0 <= 1.0);
}

TEST_CASE("halving the step shifts the terminal state only along the equilibria") {
  GridSpec g(48);
  const ScalarField rho0 = random_band_limited(g, 3, 4, 0.01);
  FlowConfig cfg;
  FlowTrajectory a = run(rho0, cfg);
  cfg.dt = 5e-4;
  FlowTrajectory b = run(rho0, cfg);
  REQUIRE(a.status == FlowStatus::converged);
  REQUIRE(b.status == FlowStatus::converged);
  ScalarField diff = a.terminal;
  diff -= b.terminal;
  // the scheme is first order: the terminal point moves O(dt) along the
  // equilibrium manifold (its center coordinates), while the off-manifold
  // component is insensitive to the step size
  CHECK(norm_cc(diff) < 1e-4);
  const CenterSplit split = project_center(diff);
  CHECK(norm_cc(split.stable_part) < 1e-6);
  CHECK(norm_cc(split.center_part) < 1e-4);
}

TEST_CASE("decay_rate on a synthetic exponential trajectory") {
  GridSpec g(16);
  const ScalarField cosu = mode(g, 1, 0);
  FlowTrajectory traj;
  const double T = 12.0;
  for (double t = 0.0; t <= T + 1e-9; t += 0.05) {
    ScalarField state = cosu;
    state *= std::exp(-2.0 * t);
    traj.states.push_back(state);
    traj.samples.push_back({t, 0.0, 0.0, 0.0, 0.0});
  }
  traj.terminal = traj.states.back();
  CHECK(decay_rate(traj, 0.5, 3.0) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK_THROWS_AS(decay_rate(traj, 0.5, 0.55), insufficient_data_error);
  CHECK_THROWS_AS(decay_rate(traj, 3.0, 0.5), std::invalid_argument);
}

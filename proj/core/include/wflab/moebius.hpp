#pragma once

#include <array>
#include <span>

#include "wflab/field.hpp"
#include "wflab/s3.hpp"

namespace wflab {

// Coefficients z in the fixed basis of conformal vector fields on S^3.
// Basis order: 1..4 the projected parallel fields Z_a(p) = a - <a,p>p for
// a = e1..e4; 5..8 the Killing rotations in the (1,3),(1,4),(2,3),(2,4)
// planes; 9..10 the rotations in the (1,2) and (3,4) planes, whose normal
// projections vanish identically on the Clifford torus.
struct ConformalParams {
  std::array<double, 10> z{};

  double norm() const;
  static ConformalParams axis(int k, double value);  // k in 1..10
};

// The k-th basis field evaluated at p (k in 1..10).
Vec4 conformal_basis_field(int k, const S3Point& p);

// V_z(p) = sum z_k v_k(p); tangent to S^3.
TangentVector conformal_field(const ConformalParams& z, const S3Point& p);

// Flow of dy/dt = V_z(y) to time t: classical 4-stage explicit integration
// with step ceil(|t|/h) at h = 1e-3 and per-step renormalization to |y| = 1.
S3Point moebius_flow(const ConformalParams& z, double t, const S3Point& p0);
void moebius_flow_batch(const ConformalParams& z, double t, std::span<S3Point> pts);

// Distance function rho_z of the transformed torus T_z(1)(CC) as a normal
// graph over CC. Requires |z| <= 0.2 so the image stays graphical inside the
// chart; throws not_a_graph_error on fold-over.
ScalarField equilibrium_distance_function(const ConformalParams& z, GridSpec grid);

// Coordinate of the normal projection of the k-th basis field along CC
// (k in 1..8): v_k(x) = <v_k(C(x)), nu(x)>.
ScalarField kernel_direction(int k, GridSpec grid);

struct RankCheck {
  int rank = 0;
  // Singular values of the 8x10 coefficient matrix, padded to 10 with zeros.
  std::array<double, 10> singular_values{};
  std::array<double, 10> column_norms{};
  // Column k-1 holds the center-basis coefficients of D_{z_k} rho_z at z=0.
  std::array<std::array<double, 8>, 10> columns{};
};

// Central finite differences of z -> rho_z at z = 0, projected onto the
// center basis; numerical rank at threshold 1e-6 * (largest singular value).
RankCheck df0_rank_check(double eps_fd, GridSpec grid);

}  // namespace wflab

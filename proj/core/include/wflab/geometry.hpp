#pragma once

#include <array>
#include <iosfwd>

#include "wflab/field.hpp"
#include "wflab/s3.hpp"

namespace wflab {

// Full geometric state of the normal graph theta(x) = exp_x(rho(x) nu(x))
// over the Clifford torus. All derivatives of the four ambient components
// are spectral; products are pointwise.
//
// Conventions: the unit normal is the normalized 4D cross product of
// (theta, d_u theta, d_v theta), oriented so it continues the Clifford
// normal as rho -> 0. h_ij = <d_ij theta, normal>; H = (1/2) sigma^{ij} h_ij
// (half trace), K = det h / det sigma, |A0|^2 = |A|^2 - 2 H^2.
struct GraphGeometry {
  GridSpec grid;
  std::array<ScalarField, 4> theta;    // immersion components
  std::array<ScalarField, 4> normal;   // unit normal in TS^3
  ScalarField sigma_uu, sigma_uv, sigma_vv;  // induced metric
  ScalarField inv_uu, inv_uv, inv_vv;        // inverse metric
  ScalarField h_uu, h_uv, h_vv;              // scalar second fundamental form
  ScalarField H;             // half trace of h
  ScalarField K;             // det h / det sigma
  ScalarField a0sq;          // |A|^2 - 2 H^2
  ScalarField L;             // gradient length of the level-set function
  ScalarField area_element;  // sqrt(det sigma)
  // Christoffel symbols of sigma: [u_uu, u_uv, u_vv, v_uu, v_uv, v_vv].
  std::array<ScalarField, 6> gamma;
};

// Degeneracy threshold on det sigma, relative to the flat value 1/4.
inline constexpr double kImmersionRelTol = 1e-8;

GraphGeometry graph_geometry(const ScalarField& rho);

// Beltrami-Laplace operator of the pullback metric:
// sigma^{jk} (d_jk f - gamma^i_{jk} d_i f).
ScalarField beltrami(const GraphGeometry& geom, const ScalarField& f);

// Conformally invariant bending energy: integral of (1 + H^2) over the
// surface measure, by periodic trapezoidal (spectrally accurate) quadrature.
double willmore_energy(const GraphGeometry& geom);

double surface_area(const GraphGeometry& geom);

// ASCII mesh of the stereographically projected surface: "v x y z" vertex
// lines followed by triangle faces of the periodic quad grid.
void write_mesh_obj(std::ostream& os, const GraphGeometry& geom, const S3Point& pole);

}  // namespace wflab

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "test_helpers.hpp"
#include "wflab/errors.hpp"
#include "wflab/geometry.hpp"
#include "wflab/spectral.hpp"

using namespace wflab;
using namespace wflab::testing;

namespace {

// Independent flat-torus oracle: S^1(a) x S^1(b) with a = (cos c - sin c)/sqrt(2),
// b = (cos c + sin c)/sqrt(2), derived symbolically from the explicit
// parametrization (a cos u, a sin u, b cos v, b sin v).
struct FlatTorus {
  double c;
  double a() const { return (std::cos(c) - std::sin(c)) / std::sqrt(2.0); }
  double b() const { return (std::cos(c) + std::sin(c)) / std::sqrt(2.0); }
  // half trace of the second fundamental form w.r.t. the normal continuing
  // the Clifford normal: principal curvatures b/a and -a/b
  double H() const { return 0.5 * (b() / a() - a() / b()); }
  double K() const { return -1.0; }
  double a0sq() const {
    const double s = b() / a();
    return 0.5 * (s + 1.0 / s) * (s + 1.0 / s);
  }
  double area() const { return 4.0 * kPi * kPi * a() * b(); }
  double energy() const { return area() * (1.0 + H() * H()); }
};

}  // namespace

TEST_CASE("clifford_point basics") {
  const double s = 1.0 / std::sqrt(2.0);
  auto p = clifford_point(0, 0);
  CHECK(p.x[0] == doctest::Approx(s).epsilon(1e-15));
  CHECK(p.x[1] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(p.x[2] == doctest::Approx(s).epsilon(1e-15));
  auto q = clifford_point(kPi / 2, 0);
  CHECK(q.x[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(q.x[1] == doctest::Approx(s).epsilon(1e-15));
  for (double u : {0.0, 0.3, 2.0, 5.5})
    for (double v : {0.0, 1.1, 4.0})
      CHECK(norm(clifford_point(u, v).x) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("clifford_normal is unit and orthogonal to the torus") {
  auto nu0 = clifford_normal(0, 0);
  CHECK(nu0.v[0] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(nu0.v[2] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  for (double u : {0.0, 0.7, 3.1})
    for (double v : {0.2, 2.9}) {
      const auto nu = clifford_normal(u, v);
      const auto p = clifford_point(u, v);
      CHECK(std::abs(dot(nu.v, p.x)) < 1e-15);
      CHECK(norm(nu.v) == doctest::Approx(1.0).epsilon(1e-15));
      // orthogonal to both coordinate tangents
      const double h = 1e-6;
      Vec4 tu, tv;
      for (int k = 0; k < 4; ++k) {
        tu[k] = (clifford_point(u + h, v).x[k] - clifford_point(u - h, v).x[k]) / (2 * h);
        tv[k] = (clifford_point(u, v + h).x[k] - clifford_point(u, v - h).x[k]) / (2 * h);
      }
      CHECK(std::abs(dot(nu.v, tu)) < 1e-9);
      CHECK(std::abs(dot(nu.v, tv)) < 1e-9);
    }
}

TEST_CASE("fermi_map basics") {
  for (double u : {0.0, 1.3})
    for (double v : {0.5, 4.2}) {
      const auto p0 = fermi_map(u, v, 0.0);
      const auto c = clifford_point(u, v);
      for (int k = 0; k < 4; ++k) CHECK(p0.x[k] == doctest::Approx(c.x[k]).epsilon(1e-15));
      for (double r : {-0.7, -0.2, 0.1, 0.55}) {
        const auto p = fermi_map(u, v, r);
        CHECK(norm(p.x) == doctest::Approx(1.0).epsilon(1e-14));
        // geodesic distance from the foot point equals |r|
        CHECK(std::acos(std::min(1.0, dot(p.x, c.x))) ==
              doctest::Approx(std::abs(r)).epsilon(1e-9));
      }
    }
  CHECK_THROWS_AS(fermi_map(0, 0, kPi / 4), chart_domain_error);
  CHECK_THROWS_AS(fermi_map(0, 0, -1.0), chart_domain_error);
}

TEST_CASE("fermi_invert closed form and roundtrip") {
  const auto c = clifford_point(1.0, 2.0);
  const auto fc0 = fermi_invert(c);
  CHECK(std::abs(fc0.r) < 1e-14);
  CHECK(fc0.u == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fc0.v == doctest::Approx(2.0).epsilon(1e-12));

  for (double u : {0.1, 2.2, 5.9})
    for (double v : {0.0, 3.3})
      for (double r : {-kPi / 8, -0.1, 0.05, kPi / 8}) {
        const auto p = fermi_map(u, v, r);
        const auto fc = fermi_invert(p);
        const auto back = fermi_map(fc.u, fc.v, fc.r);
        for (int k = 0; k < 4; ++k) CHECK(std::abs(back.x[k] - p.x[k]) < 1e-12);
        CHECK(fc.r == doctest::Approx(r).epsilon(1e-12));
      }

  // outside the tube: one circle-factor pair collapses
  CHECK_THROWS_AS(fermi_invert(S3Point{{0, 0, 1, 0}}), chart_domain_error);
  CHECK_THROWS_AS(fermi_invert(S3Point{{1, 0, 0, 0}}), chart_domain_error);
  CHECK_THROWS_AS(fermi_invert(S3Point{{0.5, 0.5, 0.5, 0.5 + 1e-3}}), std::invalid_argument);
}

TEST_CASE("stereographic projection") {
  const S3Point pole{{0, 0, 0, 1}};
  // antipode of the pole lands at the origin
  const auto y0 = stereographic(S3Point{{0, 0, 0, -1}}, pole);
  CHECK(std::abs(y0[0]) + std::abs(y0[1]) + std::abs(y0[2]) < 1e-14);
  // equatorial points land on the unit sphere
  const auto ye = stereographic(S3Point{{0.6, 0.8, 0, 0}}, pole);
  CHECK(std::sqrt(ye[0] * ye[0] + ye[1] * ye[1] + ye[2] * ye[2]) ==
        doctest::Approx(1.0).epsilon(1e-13));

  const double w = std::sqrt(1 - 0.01 - 0.04 - 0.81);
  for (const S3Point& p : {S3Point{{0.5, -0.5, 0.5, 0.5}}, S3Point{{0.1, 0.2, 0.9, w}}}) {
    for (const S3Point& pl :
         {S3Point{{0, 0, 0, 1}}, S3Point{{1, 0, 0, 0}}, S3Point{{0.5, 0.5, 0.5, 0.5}}}) {
      const auto back = stereographic_inverse(stereographic(p, pl), pl);
      for (int k = 0; k < 4; ++k) CHECK(std::abs(back.x[k] - p.x[k]) < 1e-12);
    }
  }
  CHECK_THROWS_AS(stereographic(S3Point{{0, 0, 1e-5, std::sqrt(1.0 - 1e-10)}}, pole),
                  chart_domain_error);
}

TEST_CASE("graph geometry of the Clifford torus itself") {
  for (int n : {48, 64, 96}) {
    GridSpec g(n);
    CAPTURE(n);
    const GraphGeometry geom = graph_geometry(ScalarField(g));
    CHECK(geom.H.sup_norm() < 1e-9);
    CHECK(sup_diff(geom.K, ScalarField::constant(g, -1.0)) < 1e-9);
    CHECK(sup_diff(geom.a0sq, ScalarField::constant(g, 2.0)) < 1e-9);
    CHECK(sup_diff(geom.L, ScalarField::constant(g, 1.0)) < 1e-9);
    CHECK(sup_diff(geom.area_element, ScalarField::constant(g, 0.5)) < 1e-12);
    CHECK(surface_area(geom) == doctest::Approx(kWillmoreMin).epsilon(1e-13));
    CHECK(willmore_energy(geom) == doctest::Approx(kWillmoreMin).epsilon(1e-13));

    // normal continues the Clifford normal
    for (int i = 0; i < n; i += 7)
      for (int j = 0; j < n; j += 7) {
        const auto nu = clifford_normal(g.u(i), g.v(j));
        for (int c = 0; c < 4; ++c) CHECK(std::abs(geom.normal[c].at(i, j) - nu.v[c]) < 1e-10);
      }

    // Gauss-equation bookkeeping, as two separate statements: the induced
    // metric is flat (its derivatives vanish), while det of the scalar
    // second fundamental form is -1, matching the ambient curvature 1.
    CHECK(fourier_diff(geom.sigma_uu, 1, 0).sup_norm() < 1e-11);
    CHECK(fourier_diff(geom.sigma_vv, 0, 1).sup_norm() < 1e-11);
    CHECK(sup_diff(geom.K, ScalarField::constant(g, -1.0)) < 1e-9);
  }
}

TEST_CASE("graph geometry rejects bad input") {
  GridSpec g(16);
  CHECK_THROWS_AS(graph_geometry(ScalarField::constant(g, kPi / 4)), chart_domain_error);
  ScalarField bad(g);
  bad.values[3] = std::nan("");
  CHECK_THROWS_AS(graph_geometry(bad), std::invalid_argument);
}

TEST_CASE("constant distance functions give flat product tori") {
  GridSpec g(64);
  for (double c : {-0.1, -0.05, 0.05, 0.1}) {
    CAPTURE(c);
    const FlatTorus ft{c};
    const GraphGeometry geom = graph_geometry(ScalarField::constant(g, c));

    CHECK(sup_diff(geom.H, ScalarField::constant(g, ft.H())) < 1e-9);
    CHECK(sup_diff(geom.K, ScalarField::constant(g, ft.K())) < 1e-9);
    CHECK(sup_diff(geom.a0sq, ScalarField::constant(g, ft.a0sq())) < 1e-9);
    CHECK(sup_diff(geom.L, ScalarField::constant(g, 1.0)) < 1e-10);
    CHECK(surface_area(geom) == doctest::Approx(ft.area()).epsilon(1e-12));
    CHECK(willmore_energy(geom) == doctest::Approx(ft.energy()).epsilon(1e-12));

    // induced metric diag(a^2, b^2)
    CHECK(sup_diff(geom.sigma_uu, ScalarField::constant(g, ft.a() * ft.a())) < 1e-10);
    CHECK(sup_diff(geom.sigma_vv, ScalarField::constant(g, ft.b() * ft.b())) < 1e-10);
    CHECK(geom.sigma_uv.sup_norm() < 1e-10);
  }
}

TEST_CASE("beltrami operator") {
  GridSpec g(64);
  // flat case reduces to the Clifford laplacian
  const GraphGeometry flat = graph_geometry(ScalarField(g));
  const ScalarField f = random_band_limited(g, 17, 8, 1.0);
  CHECK(sup_diff(beltrami(flat, f), laplace_cc(f)) < 1e-8);

  // constants are annihilated for curved graphs
  const ScalarField rho = random_band_limited(g, 5, 3, 0.05);
  const GraphGeometry curved = graph_geometry(rho);
  CHECK(beltrami(curved, ScalarField::constant(g, 4.2)).sup_norm() < 1e-9);

  // product torus: diagonal constant metric scales the mode laplacian
  const double c = 0.07;
  const FlatTorus ft{c};
  const GraphGeometry prod = graph_geometry(ScalarField::constant(g, c));
  const ScalarField cosu = field_of(g, [](double u, double) { return std::cos(u); });
  ScalarField want = cosu;
  want *= -1.0 / (ft.a() * ft.a());
  CHECK(sup_diff(beltrami(prod, cosu), want) < 1e-9);
}

TEST_CASE("willmore energy bounds and shift symmetry") {
  GridSpec g(64);
  // any admissible graph has at least the Clifford energy
  for (std::uint64_t seed : {1, 2, 3}) {
    const ScalarField rho = random_band_limited(g, seed, 4, 0.04);
    CHECK(willmore_energy(graph_geometry(rho)) >= kWillmoreMin - 1e-10);
  }
  // reparametrization shifts at exact grid offsets leave the energy fixed
  const ScalarField rho = random_band_limited(g, 9, 4, 0.05);
  ScalarField shifted(g);
  const int si = 5, sj = 11;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) shifted.at(i, j) = rho.at((i + si) % g.n, (j + sj) % g.n);
  const double w0 = willmore_energy(graph_geometry(rho));
  const double w1 = willmore_energy(graph_geometry(shifted));
  CHECK(std::abs(w0 - w1) < 1e-12);
}

TEST_CASE("geometry invariants on a generic graph") {
  GridSpec g(64);
  const ScalarField rho = random_band_limited(g, 23, 4, 0.05);
  const GraphGeometry geom = graph_geometry(rho);
  double worst = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec4 nu{geom.normal[0].values[k], geom.normal[1].values[k], geom.normal[2].values[k],
                  geom.normal[3].values[k]};
    const Vec4 th{geom.theta[0].values[k], geom.theta[1].values[k], geom.theta[2].values[k],
                  geom.theta[3].values[k]};
    worst = std::max(worst, std::abs(norm(nu) - 1.0));
    worst = std::max(worst, std::abs(dot(nu, th)));
    CHECK(geom.a0sq.values[k] >= 0.0);
  }
  CHECK(worst < 1e-9);

  // the normal is orthogonal to both coordinate tangents
  const GradientPair d0 = gradient(geom.theta[0]);
  const GradientPair d1 = gradient(geom.theta[1]);
  const GradientPair d2 = gradient(geom.theta[2]);
  const GradientPair d3 = gradient(geom.theta[3]);
  double tangency = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double pu = geom.normal[0].values[k] * d0.du.values[k] +
                      geom.normal[1].values[k] * d1.du.values[k] +
                      geom.normal[2].values[k] * d2.du.values[k] +
                      geom.normal[3].values[k] * d3.du.values[k];
    const double pv = geom.normal[0].values[k] * d0.dv.values[k] +
                      geom.normal[1].values[k] * d1.dv.values[k] +
                      geom.normal[2].values[k] * d2.dv.values[k] +
                      geom.normal[3].values[k] * d3.dv.values[k];
    tangency = std::max(tangency, std::max(std::abs(pu), std::abs(pv)));
  }
  CHECK(tangency < 1e-9);
}

TEST_CASE("resolution convergence of curvature fields") {
  // single-mode distance function, amplitude 0.05
  auto rho_fn = [](double u, double v) { return 0.05 * std::sin(u + 2 * v); };
  const GraphGeometry g64 = graph_geometry(field_of(GridSpec(64), rho_fn));
  const GraphGeometry g96 = graph_geometry(field_of(GridSpec(96), rho_fn));
  // compare on the common subgrid
  double dh = 0, dk = 0, da = 0;
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) {
      dh = std::max(dh, std::abs(g64.H.at(2 * i, 2 * j) - g96.H.at(3 * i, 3 * j)));
      dk = std::max(dk, std::abs(g64.K.at(2 * i, 2 * j) - g96.K.at(3 * i, 3 * j)));
      da = std::max(da, std::abs(g64.a0sq.at(2 * i, 2 * j) - g96.a0sq.at(3 * i, 3 * j)));
    }
  CHECK(dh < 1e-8);
  CHECK(dk < 1e-8);
  CHECK(da < 1e-8);
}

TEST_CASE("mesh export structure") {
  GridSpec g(16);
  std::ostringstream os;
  write_mesh_obj(os, graph_geometry(ScalarField(g)), S3Point{{0, 0, 0, 1}});
  std::size_t vcount = 0, fcount = 0;
  std::istringstream is(os.str());
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("v ", 0) == 0) ++vcount;
    if (line.rfind("f ", 0) == 0) ++fcount;
  }
  CHECK(vcount == g.size());
  CHECK(fcount == 2 * g.size());
}

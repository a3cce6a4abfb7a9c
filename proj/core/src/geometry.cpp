#include "wflab/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "wflab/errors.hpp"
#include "wflab/spectral.hpp"

namespace wflab {
namespace {

constexpr double kSqrtHalf = 0.70710678118654752440;

}  // namespace

GraphGeometry graph_geometry(const ScalarField& rho) {
  require_finite(rho, "graph_geometry");
  if (!(rho.sup_norm() < kPi / 4.0))
    throw chart_domain_error("graph_geometry: ||rho||_inf must be < pi/4");

  const GridSpec g = rho.grid;
  const int n = g.n;
  GraphGeometry geom;
  geom.grid = g;

  // theta = cos(rho) C + sin(rho) nu, assembled per ambient component.
  for (auto* f : {&geom.sigma_uu, &geom.sigma_uv, &geom.sigma_vv, &geom.inv_uu, &geom.inv_uv,
                  &geom.inv_vv, &geom.h_uu, &geom.h_uv, &geom.h_vv, &geom.H, &geom.K, &geom.a0sq,
                  &geom.L, &geom.area_element})
    *f = ScalarField(g);
  for (int c = 0; c < 4; ++c) {
    geom.theta[c] = ScalarField(g);
    geom.normal[c] = ScalarField(g);
  }
  for (auto& gm : geom.gamma) gm = ScalarField(g);

  for (int i = 0; i < n; ++i) {
    const double cu = std::cos(g.u(i)), su = std::sin(g.u(i));
    for (int j = 0; j < n; ++j) {
      const double cv = std::cos(g.v(j)), sv = std::sin(g.v(j));
      const double r = rho.at(i, j);
      const double minus = kSqrtHalf * (std::cos(r) - std::sin(r));
      const double plus = kSqrtHalf * (std::cos(r) + std::sin(r));
      geom.theta[0].at(i, j) = minus * cu;
      geom.theta[1].at(i, j) = minus * su;
      geom.theta[2].at(i, j) = plus * cv;
      geom.theta[3].at(i, j) = plus * sv;
    }
  }

  std::array<DerivativeJet, 4> jet;
  for (int c = 0; c < 4; ++c) jet[c] = derivative_jet(geom.theta[c]);

  const double flat_det = 0.25;
  for (std::size_t k = 0; k < g.size(); ++k) {
    double suu = 0, suv = 0, svv = 0;
    for (int c = 0; c < 4; ++c) {
      suu += jet[c].du.values[k] * jet[c].du.values[k];
      suv += jet[c].du.values[k] * jet[c].dv.values[k];
      svv += jet[c].dv.values[k] * jet[c].dv.values[k];
    }
    const double det = suu * svv - suv * suv;
    if (!(det > flat_det * kImmersionRelTol))
      throw immersion_error("graph_geometry: degenerate induced metric");
    geom.sigma_uu.values[k] = suu;
    geom.sigma_uv.values[k] = suv;
    geom.sigma_vv.values[k] = svv;
    geom.inv_uu.values[k] = svv / det;
    geom.inv_uv.values[k] = -suv / det;
    geom.inv_vv.values[k] = suu / det;
    geom.area_element.values[k] = std::sqrt(det);

    // Unit normal: Hodge dual of theta ^ d_u theta ^ d_v theta, with the
    // cofactor sign that continues the Clifford normal at rho = 0.
    const Vec4 th{geom.theta[0].values[k], geom.theta[1].values[k], geom.theta[2].values[k],
                  geom.theta[3].values[k]};
    const Vec4 tu{jet[0].du.values[k], jet[1].du.values[k], jet[2].du.values[k],
                  jet[3].du.values[k]};
    const Vec4 tv{jet[0].dv.values[k], jet[1].dv.values[k], jet[2].dv.values[k],
                  jet[3].dv.values[k]};
    const Vec4 nu = normalized(cross4(th, tu, tv));
    for (int c = 0; c < 4; ++c) geom.normal[c].values[k] = nu[c];

    double huu = 0, huv = 0, hvv = 0;
    for (int c = 0; c < 4; ++c) {
      huu += jet[c].duu.values[k] * nu[c];
      huv += jet[c].duv.values[k] * nu[c];
      hvv += jet[c].dvv.values[k] * nu[c];
    }
    geom.h_uu.values[k] = huu;
    geom.h_uv.values[k] = huv;
    geom.h_vv.values[k] = hvv;

    const double iuu = geom.inv_uu.values[k], iuv = geom.inv_uv.values[k],
                 ivv = geom.inv_vv.values[k];
    const double H = 0.5 * (iuu * huu + 2.0 * iuv * huv + ivv * hvv);
    // |A|^2 = tr((sigma^{-1} h)^2)
    const double m11 = iuu * huu + iuv * huv;
    const double m12 = iuu * huv + iuv * hvv;
    const double m21 = iuv * huu + ivv * huv;
    const double m22 = iuv * huv + ivv * hvv;
    const double a_sq = m11 * m11 + 2.0 * m12 * m21 + m22 * m22;
    geom.H.values[k] = H;
    geom.K.values[k] = (huu * hvv - huv * huv) / det;
    geom.a0sq.values[k] = a_sq - 2.0 * H * H;
  }

  // L^2 = 1 + w^{jk} d_j rho d_k rho with the Fermi-cylinder metric at
  // frozen radius, w = diag((1-sin 2r)/2, (1+sin 2r)/2).
  const GradientPair drho = gradient(rho);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double s2r = std::sin(2.0 * rho.values[k]);
    const double ru = drho.du.values[k], rv = drho.dv.values[k];
    geom.L.values[k] = std::sqrt(1.0 + 2.0 * ru * ru / (1.0 - s2r) + 2.0 * rv * rv / (1.0 + s2r));
  }

  const GradientPair duu = gradient(geom.sigma_uu);
  const GradientPair duv = gradient(geom.sigma_uv);
  const GradientPair dvv = gradient(geom.sigma_vv);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double iuu = geom.inv_uu.values[k], iuv = geom.inv_uv.values[k],
                 ivv = geom.inv_vv.values[k];
    const double auu_u = duu.du.values[k], auu_v = duu.dv.values[k];
    const double auv_u = duv.du.values[k], auv_v = duv.dv.values[k];
    const double avv_u = dvv.du.values[k], avv_v = dvv.dv.values[k];
    const double t_uu = 2.0 * auv_u - auu_v;  // 2 d_u sigma_uv - d_v sigma_uu
    const double t_vv = 2.0 * auv_v - avv_u;  // 2 d_v sigma_uv - d_u sigma_vv
    geom.gamma[0].values[k] = 0.5 * (iuu * auu_u + iuv * t_uu);  // u_uu
    geom.gamma[1].values[k] = 0.5 * (iuu * auu_v + iuv * avv_u); // u_uv
    geom.gamma[2].values[k] = 0.5 * (iuu * t_vv + iuv * avv_v);  // u_vv
    geom.gamma[3].values[k] = 0.5 * (iuv * auu_u + ivv * t_uu);  // v_uu
    geom.gamma[4].values[k] = 0.5 * (iuv * auu_v + ivv * avv_u); // v_uv
    geom.gamma[5].values[k] = 0.5 * (iuv * t_vv + ivv * avv_v);  // v_vv
  }

  return geom;
}

ScalarField beltrami(const GraphGeometry& geom, const ScalarField& f) {
  require_finite(f, "beltrami");
  require_same_grid(f, geom.H);
  const DerivativeJet jf = derivative_jet(f);
  ScalarField out(geom.grid);
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    const double fu = jf.du.values[k], fv = jf.dv.values[k];
    out.values[k] =
        geom.inv_uu.values[k] *
            (jf.duu.values[k] - geom.gamma[0].values[k] * fu - geom.gamma[3].values[k] * fv) +
        2.0 * geom.inv_uv.values[k] *
            (jf.duv.values[k] - geom.gamma[1].values[k] * fu - geom.gamma[4].values[k] * fv) +
        geom.inv_vv.values[k] *
            (jf.dvv.values[k] - geom.gamma[2].values[k] * fu - geom.gamma[5].values[k] * fv);
  }
  return out;
}

namespace {

double kahan_sum(const std::vector<double>& xs) {
  double s = 0.0, c = 0.0;
  for (double x : xs) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

}  // namespace

double willmore_energy(const GraphGeometry& geom) {
  std::vector<double> terms(geom.H.values.size());
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const double H = geom.H.values[k];
    terms[k] = (1.0 + H * H) * geom.area_element.values[k];
  }
  return geom.grid.cell_weight() * kahan_sum(terms);
}

double surface_area(const GraphGeometry& geom) {
  return geom.grid.cell_weight() * kahan_sum(geom.area_element.values);
}

void write_mesh_obj(std::ostream& os, const GraphGeometry& geom, const S3Point& pole) {
  const int n = geom.grid.n;
  char buf[128];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * n + j;
      const S3Point p{{geom.theta[0].values[k], geom.theta[1].values[k], geom.theta[2].values[k],
                       geom.theta[3].values[k]}};
      const Vec3 y = stereographic(p, pole);
      std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", y[0], y[1], y[2]);
      os << buf;
    }
  auto vid = [n](int i, int j) { return ((i % n) * n + (j % n)) + 1; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      os << "f " << a << ' ' << b << ' ' << c << '\n';
      os << "f " << a << ' ' << c << ' ' << d << '\n';
    }
}

}  // namespace wflab

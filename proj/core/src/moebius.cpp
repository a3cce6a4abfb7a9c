#include "wflab/moebius.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "wflab/errors.hpp"
#include "wflab/spectral.hpp"

namespace wflab {
namespace {

constexpr double kOdeStep = 1e-3;

double wrap_angle(double x) { return x - kTwoPi * std::round(x / kTwoPi); }

// Rotation planes for basis indices 5..10 (0-based ambient axes).
constexpr int kPlanes[6][2] = {{0, 2}, {0, 3}, {1, 2}, {1, 3}, {0, 1}, {2, 3}};

// Combined field V_z(p) = A p + a - <a,p> p with A antisymmetric.
struct CombinedField {
  double A[4][4] = {};
  Vec4 a{0, 0, 0, 0};

  explicit CombinedField(const ConformalParams& z) {
    for (int k = 0; k < 4; ++k) a[k] = z.z[k];
    for (int k = 0; k < 6; ++k) {
      const int i = kPlanes[k][0], j = kPlanes[k][1];
      A[i][j] += z.z[4 + k];
      A[j][i] -= z.z[4 + k];
    }
  }

  Vec4 operator()(const Vec4& p) const {
    const double ap = a[0] * p[0] + a[1] * p[1] + a[2] * p[2] + a[3] * p[3];
    Vec4 out;
    for (int i = 0; i < 4; ++i) {
      double s = a[i] - ap * p[i];
      for (int j = 0; j < 4; ++j) s += A[i][j] * p[j];
      out[i] = s;
    }
    return out;
  }
};

Vec4 rk4_renormalized(const CombinedField& field, double t, Vec4 y) {
  const long steps = std::max<long>(1, static_cast<long>(std::ceil(std::abs(t) / kOdeStep - 1e-12)));
  const double h = t / static_cast<double>(steps);
  for (long s = 0; s < steps; ++s) {
    const Vec4 k1 = field(y);
    Vec4 y2;
    for (int c = 0; c < 4; ++c) y2[c] = y[c] + 0.5 * h * k1[c];
    const Vec4 k2 = field(y2);
    for (int c = 0; c < 4; ++c) y2[c] = y[c] + 0.5 * h * k2[c];
    const Vec4 k3 = field(y2);
    for (int c = 0; c < 4; ++c) y2[c] = y[c] + h * k3[c];
    const Vec4 k4 = field(y2);
    for (int c = 0; c < 4; ++c)
      y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
    double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3]);
    for (int c = 0; c < 4; ++c) y[c] /= r;
  }
  return y;
}

}  // namespace

double ConformalParams::norm() const {
  double s = 0.0;
  for (double c : z) s += c * c;
  return std::sqrt(s);
}

ConformalParams ConformalParams::axis(int k, double value) {
  if (k < 1 || k > 10) throw std::invalid_argument("ConformalParams::axis: k must be in 1..10");
  ConformalParams p;
  p.z[k - 1] = value;
  return p;
}

Vec4 conformal_basis_field(int k, const S3Point& p) {
  if (k < 1 || k > 10) throw std::invalid_argument("conformal_basis_field: k must be in 1..10");
  if (k <= 4) {
    Vec4 a{0, 0, 0, 0};
    a[k - 1] = 1.0;
    const double ap = dot(a, p.x);
    return {a[0] - ap * p.x[0], a[1] - ap * p.x[1], a[2] - ap * p.x[2], a[3] - ap * p.x[3]};
  }
  const int i = kPlanes[k - 5][0], j = kPlanes[k - 5][1];
  Vec4 out{0, 0, 0, 0};
  out[i] = p.x[j];
  out[j] = -p.x[i];
  return out;
}

TangentVector conformal_field(const ConformalParams& z, const S3Point& p) {
  const CombinedField field(z);
  return {p, field(p.x)};
}

S3Point moebius_flow(const ConformalParams& z, double t, const S3Point& p0) {
  if (!(z.norm() < 1.0)) throw std::invalid_argument("moebius_flow: |z| must be < 1");
  if (t == 0.0) return p0;
  const CombinedField field(z);
  return {rk4_renormalized(field, t, p0.x)};
}

void moebius_flow_batch(const ConformalParams& z, double t, std::span<S3Point> pts) {
  if (!(z.norm() < 1.0)) throw std::invalid_argument("moebius_flow_batch: |z| must be < 1");
  if (t == 0.0) return;
  const CombinedField field(z);
  for (S3Point& p : pts) p.x = rk4_renormalized(field, t, p.x);
}

ScalarField equilibrium_distance_function(const ConformalParams& z, GridSpec grid) {
  if (!(z.norm() <= 0.2 + 1e-12))
    throw std::invalid_argument("equilibrium_distance_function: require |z| <= 0.2");

  const int n = grid.n;
  std::vector<S3Point> pts(grid.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) pts[static_cast<std::size_t>(i) * n + j] = clifford_point(grid.u(i), grid.v(j));
  moebius_flow_batch(z, 1.0, pts);

  // Fermi-invert every sample of the transformed torus: the source-indexed
  // tangential displacement (su, sv) and the radial sample field R.
  ScalarField su(grid), sv(grid), R(grid);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * n + j;
      FermiCoords fc;
      try {
        fc = fermi_invert(pts[k]);
      } catch (const chart_domain_error& e) {
        throw not_a_graph_error(std::string("transformed torus left the chart: ") + e.what());
      }
      su.values[k] = wrap_angle(fc.u - grid.u(i));
      sv.values[k] = wrap_angle(fc.v - grid.v(j));
      R.values[k] = fc.r;
    }

  // Fold-over guard: the source -> footpoint map must keep positive Jacobian.
  {
    const GradientPair dsu = gradient(su);
    const GradientPair dsv = gradient(sv);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double det = (1.0 + dsu.du.values[k]) * (1.0 + dsv.dv.values[k]) -
                         dsu.dv.values[k] * dsv.du.values[k];
      if (!(det > 1e-6))
        throw not_a_graph_error("transformed torus is not a graph (fold-over detected)");
    }
  }

  // Invert the footpoint map by fixed-point iteration, evaluating the
  // displacement fields spectrally at the moving source points.
  const FourierEvaluator eval_su(su), eval_sv(sv), eval_r(R);
  ScalarField rho(grid);
  for (int i = 0; i < n; ++i) {
    const double u = grid.u(i);
    for (int j = 0; j < n; ++j) {
      const double v = grid.v(j);
      double p = u - eval_su(u, v);
      double q = v - eval_sv(u, v);
      bool ok = false;
      for (int it = 0; it < 60; ++it) {
        const double np = u - eval_su(p, q);
        const double nq = v - eval_sv(p, q);
        const double upd = std::max(std::abs(wrap_angle(np - p)), std::abs(wrap_angle(nq - q)));
        p = np;
        q = nq;
        if (upd < 5e-14) {
          ok = true;
          break;
        }
      }
      if (!ok) throw not_a_graph_error("footpoint inversion did not converge");
      rho.at(i, j) = eval_r(p, q);
    }
  }
  return rho;
}

ScalarField kernel_direction(int k, GridSpec grid) {
  if (k < 1 || k > 8) throw std::invalid_argument("kernel_direction: k must be in 1..8");
  return ScalarField::sample(grid, [k](double u, double v) {
    const TangentVector nu = clifford_normal(u, v);
    return dot(conformal_basis_field(k, nu.base), nu.v);
  });
}

RankCheck df0_rank_check(double eps_fd, GridSpec grid) {
  if (!(eps_fd > 0.0 && eps_fd <= 1e-1))
    throw std::invalid_argument("df0_rank_check: eps_fd must be in (0, 0.1]");
  RankCheck rc;
  Eigen::Matrix<double, 8, 10> M;
  for (int k = 1; k <= 10; ++k) {
    const ScalarField plus = equilibrium_distance_function(ConformalParams::axis(k, eps_fd), grid);
    const ScalarField minus = equilibrium_distance_function(ConformalParams::axis(k, -eps_fd), grid);
    ScalarField diff = plus - minus;
    diff *= 1.0 / (2.0 * eps_fd);
    const CenterSplit split = project_center(diff);
    double colsq = 0.0;
    for (int r = 0; r < 8; ++r) {
      M(r, k - 1) = split.coeffs[r];
      rc.columns[k - 1][r] = split.coeffs[r];
      colsq += split.coeffs[r] * split.coeffs[r];
    }
    rc.column_norms[k - 1] = std::sqrt(colsq);
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 8, 10>> svd(M);
  const auto& sv = svd.singularValues();
  for (int i = 0; i < sv.size(); ++i) rc.singular_values[i] = sv(i);
  const double tol = 1e-6 * sv(0);
  rc.rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rc.rank;
  return rc;
}

}  // namespace wflab

#include "wflab/s3.hpp"

#include <cmath>
#include <stdexcept>

#include "wflab/errors.hpp"

namespace wflab {
namespace {

constexpr double kSqrtHalf = 0.70710678118654752440;

void require_unit(const S3Point& p, const char* label) {
  const double r2 = dot(p.x, p.x);
  if (std::abs(r2 - 1.0) > 1e-9)
    throw std::invalid_argument(std::string(label) + ": point is not on the unit sphere");
}

// Deterministic orthonormal basis of pole^perp: Gram-Schmidt of the three
// standard vectors least aligned with the pole.
std::array<Vec4, 3> pole_basis(const S3Point& pole) {
  int drop = 0;
  for (int i = 1; i < 4; ++i)
    if (std::abs(pole.x[i]) > std::abs(pole.x[drop])) drop = i;
  std::array<Vec4, 3> basis{};
  int written = 0;
  for (int i = 0; i < 4; ++i) {
    if (i == drop) continue;
    Vec4 e{0, 0, 0, 0};
    e[i] = 1.0;
    for (int c = 0; c < 4; ++c) e[c] -= pole.x[i] * pole.x[c];
    for (int k = 0; k < written; ++k) {
      const double pr = dot(e, basis[k]);
      for (int c = 0; c < 4; ++c) e[c] -= pr * basis[k][c];
    }
    basis[written++] = normalized(e);
  }
  return basis;
}

}  // namespace

double dot(const Vec4& a, const Vec4& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

double norm(const Vec4& a) { return std::sqrt(dot(a, a)); }

Vec4 normalized(const Vec4& a) {
  const double r = norm(a);
  if (r == 0.0) throw std::invalid_argument("cannot normalize the zero vector");
  return {a[0] / r, a[1] / r, a[2] / r, a[3] / r};
}

Vec4 cross4(const Vec4& a, const Vec4& b, const Vec4& c) {
  auto det3 = [](double a11, double a12, double a13, double a21, double a22, double a23,
                 double a31, double a32, double a33) {
    return a11 * (a22 * a33 - a23 * a32) - a12 * (a21 * a33 - a23 * a31) +
           a13 * (a21 * a32 - a22 * a31);
  };
  return {
      +det3(a[1], a[2], a[3], b[1], b[2], b[3], c[1], c[2], c[3]),
      -det3(a[0], a[2], a[3], b[0], b[2], b[3], c[0], c[2], c[3]),
      +det3(a[0], a[1], a[3], b[0], b[1], b[3], c[0], c[1], c[3]),
      -det3(a[0], a[1], a[2], b[0], b[1], b[2], c[0], c[1], c[2]),
  };
}

S3Point clifford_point(double u, double v) {
  return {{kSqrtHalf * std::cos(u), kSqrtHalf * std::sin(u), kSqrtHalf * std::cos(v),
           kSqrtHalf * std::sin(v)}};
}

TangentVector clifford_normal(double u, double v) {
  return {clifford_point(u, v),
          {-kSqrtHalf * std::cos(u), -kSqrtHalf * std::sin(u), kSqrtHalf * std::cos(v),
           kSqrtHalf * std::sin(v)}};
}

S3Point fermi_map(double u, double v, double r) {
  if (!(std::abs(r) < kPi / 4.0))
    throw chart_domain_error("fermi_map: |r| must be < pi/4");
  const double cr = std::cos(r), sr = std::sin(r);
  const S3Point c = clifford_point(u, v);
  const TangentVector nu = clifford_normal(u, v);
  S3Point p;
  for (int k = 0; k < 4; ++k) p.x[k] = cr * c.x[k] + sr * nu.v[k];
  return p;
}

FermiCoords fermi_invert(const S3Point& p) {
  require_unit(p, "fermi_invert");
  const double s = p.x[0] * p.x[0] + p.x[1] * p.x[1];
  if (s < 1e-6 || 1.0 - s < 1e-6)
    throw chart_domain_error("fermi_invert: point too close to the chart degeneracy");
  const double sin2r = std::max(-1.0, std::min(1.0, 1.0 - 2.0 * s));
  FermiCoords fc;
  fc.r = 0.5 * std::asin(sin2r);
  fc.u = std::atan2(p.x[1], p.x[0]);
  fc.v = std::atan2(p.x[3], p.x[2]);
  return fc;
}

Vec3 stereographic(const S3Point& p, const S3Point& pole) {
  require_unit(p, "stereographic");
  require_unit(pole, "stereographic pole");
  const double c = dot(p.x, pole.x);
  if (1.0 - c < 1e-8) throw chart_domain_error("stereographic: point too close to the pole");
  const auto basis = pole_basis(pole);
  const double denom = 1.0 - c;
  Vec3 y;
  for (int k = 0; k < 3; ++k) y[k] = dot(p.x, basis[k]) / denom;
  return y;
}

S3Point stereographic_inverse(const Vec3& y, const S3Point& pole) {
  require_unit(pole, "stereographic pole");
  const auto basis = pole_basis(pole);
  const double r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
  const double denom = r2 + 1.0;
  S3Point p;
  for (int c = 0; c < 4; ++c) {
    double x = (r2 - 1.0) / denom * pole.x[c];
    for (int k = 0; k < 3; ++k) x += 2.0 * y[k] / denom * basis[k][c];
    p.x[c] = x;
  }
  return p;
}

}  // namespace wflab

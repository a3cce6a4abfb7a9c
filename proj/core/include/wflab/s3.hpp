#pragma once

#include <array>

#include "wflab/grid.hpp"

namespace wflab {

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;

double dot(const Vec4& a, const Vec4& b);
double norm(const Vec4& a);
Vec4 normalized(const Vec4& a);

// Point on the unit 3-sphere in ambient R^4 coordinates.
struct S3Point {
  Vec4 x{0, 0, 0, 0};
};

struct TangentVector {
  S3Point base;
  Vec4 v{0, 0, 0, 0};
};

// Hodge dual of a ^ b ^ c in R^4; orthogonal to all three arguments.
Vec4 cross4(const Vec4& a, const Vec4& b, const Vec4& c);

// Clifford torus immersion C(u,v) = (cos u, sin u, cos v, sin v)/sqrt(2).
S3Point clifford_point(double u, double v);

// Global unit normal of the Clifford torus within TS^3:
// nu(u,v) = (-cos u, -sin u, cos v, sin v)/sqrt(2).
TangentVector clifford_normal(double u, double v);

// Fermi chart X(u,v,r) = exp_{C(u,v)}(r nu(u,v)) = cos(r) C + sin(r) nu.
// The chart degenerates at |r| = pi/4 where one circle factor collapses.
S3Point fermi_map(double u, double v, double r);

struct FermiCoords {
  double u, v, r;
};

// Closed-form inverse of the Fermi chart:
// r = (1/2) asin(1 - 2(p1^2+p2^2)), u = atan2(p2,p1), v = atan2(p4,p3).
FermiCoords fermi_invert(const S3Point& p);

// Stereographic projection from the given pole, expressed in a deterministic
// orthonormal basis of pole^perp; inverse satisfies the roundtrip identity.
Vec3 stereographic(const S3Point& p, const S3Point& pole);
S3Point stereographic_inverse(const Vec3& y, const S3Point& pole);

}  // namespace wflab

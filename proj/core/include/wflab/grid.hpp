#pragma once

#include <cmath>
#include <cstddef>

namespace wflab {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Uniform periodic grid on the parameter torus [0,2pi)^2 of the Clifford
// torus; u_i = 2*pi*i/n, v_j = 2*pi*j/n, no duplicated seam row/column.
struct GridSpec {
  int n = 0;

  GridSpec() = default;
  explicit GridSpec(int n_points);

  double u(int i) const { return kTwoPi * i / n; }
  double v(int j) const { return kTwoPi * j / n; }
  std::size_t size() const { return static_cast<std::size_t>(n) * n; }
  // Quadrature weight per node, (2pi/n)^2.
  double cell_weight() const { return (kTwoPi / n) * (kTwoPi / n); }

  friend bool operator==(const GridSpec& a, const GridSpec& b) = default;
};

}  // namespace wflab

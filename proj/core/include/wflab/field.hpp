#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "wflab/grid.hpp"

namespace wflab {

// Real doubly periodic scalar field sampled on a GridSpec, row-major with v
// fastest: values[i*n + j] = f(u_i, v_j).
struct ScalarField {
  GridSpec grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(GridSpec g) : grid(g), values(g.size(), 0.0) {}

  static ScalarField constant(GridSpec g, double c);
  static ScalarField sample(GridSpec g, const std::function<double(double, double)>& f);

  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * grid.n + j]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.n + j]; }

  bool all_finite() const;
  double sup_norm() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
// Pointwise product.
ScalarField hadamard(const ScalarField& a, const ScalarField& b);

// Discrete L^2(CC) inner product with the flat area element 1/2:
// <f,g> = (1/2) (2pi/n)^2 sum f*g.
double inner_cc(const ScalarField& a, const ScalarField& b);
double norm_cc(const ScalarField& a);

void require_finite(const ScalarField& f, const char* label);
void require_same_grid(const ScalarField& a, const ScalarField& b);

// CSV serialization: header "u,v,value", row-major, 17 significant digits.
void write_csv(std::ostream& os, const ScalarField& f);
ScalarField read_csv(std::istream& is);

}  // namespace wflab

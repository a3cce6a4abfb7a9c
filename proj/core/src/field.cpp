#include "wflab/field.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace wflab {

GridSpec::GridSpec(int n_points) : n(n_points) {
  if (n < 16 || n % 2 != 0)
    throw std::invalid_argument("grid size must be an even integer >= 16, got " + std::to_string(n));
}

ScalarField ScalarField::constant(GridSpec g, double c) {
  ScalarField f(g);
  f.values.assign(g.size(), c);
  return f;
}

ScalarField ScalarField::sample(GridSpec g, const std::function<double(double, double)>& fn) {
  ScalarField f(g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) f.at(i, j) = fn(g.u(i), g.v(j));
  return f;
}

bool ScalarField::all_finite() const {
  for (double x : values)
    if (!std::isfinite(x)) return false;
  return true;
}

double ScalarField::sup_norm() const {
  double m = 0.0;
  for (double x : values) m = std::max(m, std::abs(x));
  return m;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(*this, o);
  for (std::size_t k = 0; k < values.size(); ++k) values[k] += o.values[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(*this, o);
  for (std::size_t k = 0; k < values.size(); ++k) values[k] -= o.values[k];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& x : values) x *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  ScalarField r(a.grid);
  for (std::size_t k = 0; k < r.values.size(); ++k) r.values[k] = a.values[k] * b.values[k];
  return r;
}

double inner_cc(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  // compensated summation; the 1e-12 orthonormality contract is tighter
  // than a plain sum delivers at n = 96
  double s = 0.0, c = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    const double y = a.values[k] * b.values[k] - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return 0.5 * a.grid.cell_weight() * s;
}

double norm_cc(const ScalarField& a) { return std::sqrt(inner_cc(a, a)); }

void require_finite(const ScalarField& f, const char* label) {
  if (!f.all_finite()) throw std::invalid_argument(std::string(label) + ": non-finite values");
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("grid mismatch");
}

void write_csv(std::ostream& os, const ScalarField& f) {
  os << "u,v,value\n";
  char buf[96];
  for (int i = 0; i < f.grid.n; ++i)
    for (int j = 0; j < f.grid.n; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", f.grid.u(i), f.grid.v(j), f.at(i, j));
      os << buf;
    }
}

ScalarField read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("u,v,value", 0) != 0)
    throw std::runtime_error("bad field CSV header");
  std::vector<double> vals;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double u, v, x;
    char c1, c2;
    if (!(ls >> u >> c1 >> v >> c2 >> x) || c1 != ',' || c2 != ',')
      throw std::runtime_error("bad field CSV row: " + line);
    vals.push_back(x);
  }
  int n = static_cast<int>(std::lround(std::sqrt(double(vals.size()))));
  if (static_cast<std::size_t>(n) * n != vals.size())
    throw std::runtime_error("field CSV is not a square grid");
  ScalarField f{GridSpec(n)};
  f.values = std::move(vals);
  return f;
}

}  // namespace wflab

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "wflab/field.hpp"

namespace wflab {

// Fourier calculus on the flat parameter torus carrying the Clifford metric
// g = (1/2)(du^2 + dv^2). The Beltrami-Laplace operator is 2(d_uu + d_vv)
// with eigenvalues -2(m^2+n^2); the linearized flow operator is
// T = (1/4)(Lap + 4)(Lap + 2), nonnegative with an 8-dimensional kernel on
// the modes m^2+n^2 in {1,2}.

// d_u^a d_v^b f via the multiplier (i m)^a (i n)^b; exact for band-limited
// input. Odd-order derivatives zero the Nyquist row/column.
ScalarField fourier_diff(const ScalarField& f, int du_order, int dv_order);

// All derivatives up to second order from a single forward transform.
struct DerivativeJet {
  ScalarField du, dv, duu, duv, dvv;
};
DerivativeJet derivative_jet(const ScalarField& f);

struct GradientPair {
  ScalarField du, dv;
};
GradientPair gradient(const ScalarField& f);

ScalarField laplace_cc(const ScalarField& f);

double laplace_symbol(int m, int n);  // -2(m^2+n^2)
double tcc_symbol(int m, int n);      // (1/4)(lam+4)(lam+2), lam = laplace_symbol

ScalarField tcc_apply(const ScalarField& f);

// (I + dt*T)^{-1} f; well defined for dt > 0 since all symbols of T are >= 0.
ScalarField imex_resolvent(const ScalarField& f, double dt);

// Zero all modes with max(|m|,|n|) > floor(n/3).
ScalarField dealias_two_thirds(const ScalarField& f);

// Diagonal Fourier-multiplier operator; multipliers indexed over the full
// signed frequency square in FFT order, multiplier(m,n) == multiplier(-m,-n).
struct SpectralOperator {
  GridSpec grid;
  std::vector<double> multipliers;  // n*n, index [wrap(m)*n + wrap(n)]

  static SpectralOperator laplacian(GridSpec g);
  static SpectralOperator tcc(GridSpec g);

  double multiplier(int m, int n) const;
  ScalarField apply(const ScalarField& f) const;
};

struct SpectrumEntry {
  int m, n;
  double eigenvalue;
};

// Eigenvalues of T over all |m|,|n| <= max_freq, counting real eigenfunctions
// (one entry per signed frequency pair).
std::vector<SpectrumEntry> tcc_spectrum(int max_freq);

// L^2(CC)-orthonormal basis of ker T: {cos u, sin u, cos v, sin v,
// cos(u+v), sin(u+v), cos(u-v), sin(u-v)}, each normalized by 1/pi.
class CenterBasis {
 public:
  explicit CenterBasis(GridSpec g);
  const std::array<ScalarField, 8>& fields() const { return fields_; }
  const ScalarField& field(int k) const { return fields_[k]; }

 private:
  std::array<ScalarField, 8> fields_;
};

struct CenterSplit {
  std::array<double, 8> coeffs;
  ScalarField center_part;
  ScalarField stable_part;
};

// f = center + stable with center = sum <f,Y_k> Y_k; <stable, Y_k> = 0.
CenterSplit project_center(const ScalarField& f);
ScalarField project_center_part(const ScalarField& f);
ScalarField project_stable_part(const ScalarField& f);

// Trigonometric interpolation of a real grid field at arbitrary points;
// exact (to roundoff) for grid-resolved fields. Negligible modes are pruned.
class FourierEvaluator {
 public:
  explicit FourierEvaluator(const ScalarField& f);
  double operator()(double u, double v) const;

 private:
  struct Term {
    int m, k;
    double re, im;
  };
  int max_m_ = 0, max_k_ = 0;
  std::vector<Term> terms_;
};

// Seeded random real field supported on modes max(|m|,|n|) <= max_mode,
// coefficients uniform in [-1,1], scaled to the requested sup-norm. The
// construction is grid-independent: the same seed gives samples of one fixed
// function on every resolution.
ScalarField random_band_limited(GridSpec g, std::uint64_t seed, int max_mode, double amplitude);

}  // namespace wflab

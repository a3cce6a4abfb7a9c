#include "wflab/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <stdexcept>

namespace wflab {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Per-thread FFT workspace for one grid size. fftw_execute is thread safe on
// distinct plans and buffers; plan creation is serialized globally.
class FourierWorkspace {
 public:
  explicit FourierWorkspace(int n) : n_(n) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    real_ = fftw_alloc_real(static_cast<std::size_t>(n) * n);
    spec_ = fftw_alloc_complex(static_cast<std::size_t>(n) * (n / 2 + 1));
    fwd_ = fftw_plan_dft_r2c_2d(n, n, real_, spec_, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_2d(n, n, spec_, real_, FFTW_ESTIMATE);
  }
  ~FourierWorkspace() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(real_);
    fftw_free(spec_);
  }
  FourierWorkspace(const FourierWorkspace&) = delete;
  FourierWorkspace& operator=(const FourierWorkspace&) = delete;

  int n() const { return n_; }
  int spec_cols() const { return n_ / 2 + 1; }
  std::size_t spec_size() const { return static_cast<std::size_t>(n_) * spec_cols(); }

  // Unnormalized forward transform into `out`.
  void forward(const double* in, std::complex<double>* out) {
    std::copy(in, in + static_cast<std::size_t>(n_) * n_, real_);
    fftw_execute(fwd_);
    auto* s = reinterpret_cast<std::complex<double>*>(spec_);
    std::copy(s, s + spec_size(), out);
  }

  // Inverse transform with 1/n^2 normalization.
  void backward(const std::complex<double>* in, double* out) {
    auto* s = reinterpret_cast<std::complex<double>*>(spec_);
    std::copy(in, in + spec_size(), s);
    fftw_execute(bwd_);
    const double scale = 1.0 / (static_cast<double>(n_) * n_);
    for (std::size_t k = 0; k < static_cast<std::size_t>(n_) * n_; ++k) out[k] = real_[k] * scale;
  }

  static FourierWorkspace& get(int n) {
    thread_local std::map<int, std::unique_ptr<FourierWorkspace>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<FourierWorkspace>(n);
    return *slot;
  }

 private:
  int n_;
  double* real_;
  fftw_complex* spec_;
  fftw_plan fwd_, bwd_;
};

inline int signed_freq(int idx, int n) { return idx <= n / 2 ? idx : idx - n; }

using CSpec = std::vector<std::complex<double>>;

CSpec to_spectrum(const ScalarField& f) {
  auto& ws = FourierWorkspace::get(f.grid.n);
  CSpec s(ws.spec_size());
  ws.forward(f.values.data(), s.data());
  return s;
}

ScalarField from_spectrum(GridSpec g, const CSpec& s) {
  auto& ws = FourierWorkspace::get(g.n);
  ScalarField f(g);
  ws.backward(s.data(), f.values.data());
  return f;
}

// Apply a real symbol sym(m, k) on the half spectrum.
template <typename Sym>
ScalarField apply_symbol(const ScalarField& f, Sym&& sym) {
  const int n = f.grid.n;
  CSpec s = to_spectrum(f);
  const int cols = n / 2 + 1;
  for (int i = 0; i < n; ++i) {
    const int m = signed_freq(i, n);
    for (int k = 0; k < cols; ++k) s[static_cast<std::size_t>(i) * cols + k] *= sym(m, k);
  }
  return from_spectrum(f.grid, s);
}

}  // namespace

double laplace_symbol(int m, int n) { return -2.0 * (double(m) * m + double(n) * n); }

double tcc_symbol(int m, int n) {
  const double lam = laplace_symbol(m, n);
  return 0.25 * (lam + 4.0) * (lam + 2.0);
}

ScalarField fourier_diff(const ScalarField& f, int du_order, int dv_order) {
  require_finite(f, "fourier_diff");
  if (du_order < 0 || dv_order < 0 || du_order + dv_order > 4)
    throw std::invalid_argument("fourier_diff: orders must be nonnegative with total <= 4");
  if (du_order == 0 && dv_order == 0) return f;
  const int n = f.grid.n;
  CSpec s = to_spectrum(f);
  const int cols = n / 2 + 1;
  const std::complex<double> iu(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    const int m = signed_freq(i, n);
    for (int k = 0; k < cols; ++k) {
      std::complex<double> factor = std::pow(iu * double(m), du_order) * std::pow(iu * double(k), dv_order);
      if ((du_order % 2 != 0 && i == n / 2) || (dv_order % 2 != 0 && k == n / 2)) factor = 0.0;
      s[static_cast<std::size_t>(i) * cols + k] *= factor;
    }
  }
  return from_spectrum(f.grid, s);
}

namespace {

// Derivative of a half spectrum in place; `axis` 0 for u, 1 for v.
CSpec derived_spectrum(const CSpec& s, int n, int du_order, int dv_order) {
  CSpec out(s);
  const int cols = n / 2 + 1;
  const std::complex<double> iu(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    const int m = signed_freq(i, n);
    for (int k = 0; k < cols; ++k) {
      std::complex<double> factor =
          std::pow(iu * double(m), du_order) * std::pow(iu * double(k), dv_order);
      if ((du_order % 2 != 0 && i == n / 2) || (dv_order % 2 != 0 && k == n / 2)) factor = 0.0;
      out[static_cast<std::size_t>(i) * cols + k] *= factor;
    }
  }
  return out;
}

}  // namespace

DerivativeJet derivative_jet(const ScalarField& f) {
  const int n = f.grid.n;
  const CSpec s = to_spectrum(f);
  DerivativeJet jet;
  jet.du = from_spectrum(f.grid, derived_spectrum(s, n, 1, 0));
  jet.dv = from_spectrum(f.grid, derived_spectrum(s, n, 0, 1));
  jet.duu = from_spectrum(f.grid, derived_spectrum(s, n, 2, 0));
  jet.duv = from_spectrum(f.grid, derived_spectrum(s, n, 1, 1));
  jet.dvv = from_spectrum(f.grid, derived_spectrum(s, n, 0, 2));
  return jet;
}

GradientPair gradient(const ScalarField& f) {
  const int n = f.grid.n;
  const CSpec s = to_spectrum(f);
  return {from_spectrum(f.grid, derived_spectrum(s, n, 1, 0)),
          from_spectrum(f.grid, derived_spectrum(s, n, 0, 1))};
}

ScalarField laplace_cc(const ScalarField& f) {
  require_finite(f, "laplace_cc");
  return apply_symbol(f, [](int m, int k) { return laplace_symbol(m, k); });
}

ScalarField tcc_apply(const ScalarField& f) {
  require_finite(f, "tcc_apply");
  return apply_symbol(f, [](int m, int k) { return tcc_symbol(m, k); });
}

ScalarField imex_resolvent(const ScalarField& f, double dt) {
  require_finite(f, "imex_resolvent");
  if (!(dt > 0.0)) throw std::invalid_argument("imex_resolvent: dt must be positive");
  return apply_symbol(f, [dt](int m, int k) { return 1.0 / (1.0 + dt * tcc_symbol(m, k)); });
}

ScalarField dealias_two_thirds(const ScalarField& f) {
  const int cut = f.grid.n / 3;
  return apply_symbol(f, [cut](int m, int k) {
    return (std::abs(m) > cut || k > cut) ? 0.0 : 1.0;
  });
}

SpectralOperator SpectralOperator::laplacian(GridSpec g) {
  SpectralOperator op{g, std::vector<double>(g.size())};
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      op.multipliers[static_cast<std::size_t>(i) * g.n + j] =
          laplace_symbol(signed_freq(i, g.n), signed_freq(j, g.n));
  return op;
}

SpectralOperator SpectralOperator::tcc(GridSpec g) {
  SpectralOperator op{g, std::vector<double>(g.size())};
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      op.multipliers[static_cast<std::size_t>(i) * g.n + j] =
          tcc_symbol(signed_freq(i, g.n), signed_freq(j, g.n));
  return op;
}

double SpectralOperator::multiplier(int m, int n) const {
  auto wrap = [this](int f) { return f >= 0 ? f : f + grid.n; };
  return multipliers[static_cast<std::size_t>(wrap(m)) * grid.n + wrap(n)];
}

ScalarField SpectralOperator::apply(const ScalarField& f) const {
  if (!(f.grid == grid)) throw std::invalid_argument("SpectralOperator: grid mismatch");
  return apply_symbol(f, [this](int m, int k) { return multiplier(m, k); });
}

std::vector<SpectrumEntry> tcc_spectrum(int max_freq) {
  if (max_freq < 2) throw std::invalid_argument("tcc_spectrum: max_freq must be >= 2");
  std::vector<SpectrumEntry> out;
  out.reserve(static_cast<std::size_t>(2 * max_freq + 1) * (2 * max_freq + 1));
  for (int m = -max_freq; m <= max_freq; ++m)
    for (int n = -max_freq; n <= max_freq; ++n) out.push_back({m, n, tcc_symbol(m, n)});
  return out;
}

CenterBasis::CenterBasis(GridSpec g) {
  const double s = 1.0 / kPi;  // every kernel monomial has L^2(CC) norm pi
  fields_ = {
      ScalarField::sample(g, [s](double u, double) { return s * std::cos(u); }),
      ScalarField::sample(g, [s](double u, double) { return s * std::sin(u); }),
      ScalarField::sample(g, [s](double, double v) { return s * std::cos(v); }),
      ScalarField::sample(g, [s](double, double v) { return s * std::sin(v); }),
      ScalarField::sample(g, [s](double u, double v) { return s * std::cos(u + v); }),
      ScalarField::sample(g, [s](double u, double v) { return s * std::sin(u + v); }),
      ScalarField::sample(g, [s](double u, double v) { return s * std::cos(u - v); }),
      ScalarField::sample(g, [s](double u, double v) { return s * std::sin(u - v); }),
  };
}

CenterSplit project_center(const ScalarField& f) {
  require_finite(f, "project_center");
  CenterBasis basis(f.grid);
  CenterSplit split{{}, ScalarField(f.grid), f};
  for (int k = 0; k < 8; ++k) {
    const double c = inner_cc(f, basis.field(k));
    split.coeffs[k] = c;
    ScalarField term = basis.field(k);
    term *= c;
    split.center_part += term;
    split.stable_part -= term;
  }
  return split;
}

ScalarField project_center_part(const ScalarField& f) { return project_center(f).center_part; }

ScalarField project_stable_part(const ScalarField& f) { return project_center(f).stable_part; }

FourierEvaluator::FourierEvaluator(const ScalarField& f) {
  const int n = f.grid.n;
  const int cols = n / 2 + 1;
  const CSpec half = to_spectrum(f);
  // Reconstruct the full signed spectrum, normalized so coefficients are
  // function-scale, then keep everything above the roundoff floor.
  std::vector<std::complex<double>> full(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::complex<double> c =
          j < cols ? half[static_cast<std::size_t>(i) * cols + j]
                   : std::conj(half[static_cast<std::size_t>((n - i) % n) * cols + (n - j)]);
      full[static_cast<std::size_t>(i) * n + j] = c / (static_cast<double>(n) * n);
    }
  double peak = 0.0;
  for (const auto& c : full) peak = std::max(peak, std::abs(c));
  const double floor = 1e-17 * peak;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto c = full[static_cast<std::size_t>(i) * n + j];
      if (std::abs(c) <= floor) continue;
      const int m = signed_freq(i, n);
      const int k = signed_freq(j, n);
      terms_.push_back({m, k, c.real(), c.imag()});
      max_m_ = std::max(max_m_, std::abs(m));
      max_k_ = std::max(max_k_, std::abs(k));
    }
}

double FourierEvaluator::operator()(double u, double v) const {
  // e^{i m u}, e^{i k v} tables by recurrence; negative frequencies by
  // conjugation at lookup.
  const std::complex<double> eu(std::cos(u), std::sin(u));
  const std::complex<double> ev(std::cos(v), std::sin(v));
  thread_local std::vector<std::complex<double>> pu, pv;
  pu.assign(static_cast<std::size_t>(max_m_) + 1, {1.0, 0.0});
  pv.assign(static_cast<std::size_t>(max_k_) + 1, {1.0, 0.0});
  for (int m = 1; m <= max_m_; ++m) pu[m] = pu[m - 1] * eu;
  for (int k = 1; k <= max_k_; ++k) pv[k] = pv[k - 1] * ev;
  double acc = 0.0;
  for (const Term& t : terms_) {
    const std::complex<double> em = t.m >= 0 ? pu[t.m] : std::conj(pu[-t.m]);
    const std::complex<double> ek = t.k >= 0 ? pv[t.k] : std::conj(pv[-t.k]);
    const std::complex<double> ph = em * ek;
    acc += t.re * ph.real() - t.im * ph.imag();
  }
  return acc;
}

ScalarField random_band_limited(GridSpec g, std::uint64_t seed, int max_mode, double amplitude) {
  if (max_mode < 0) throw std::invalid_argument("random_band_limited: max_mode must be >= 0");
  // mt19937_64 with an explicit mapping to [-1,1]; avoids the
  // implementation-defined distributions so outputs are reproducible.
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() {
    return 2.0 * (static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0)) - 1.0;
  };
  struct Mode {
    int m, n;
    double a, b;
  };
  std::vector<Mode> modes;
  for (int m = 0; m <= max_mode; ++m)
    for (int n = -max_mode; n <= max_mode; ++n) {
      if (m == 0 && n < 0) continue;  // canonical half plane
      Mode md{m, n, uniform(), (m == 0 && n == 0) ? 0.0 : uniform()};
      modes.push_back(md);
    }
  auto eval = [&modes](double u, double v) {
    double s = 0.0;
    for (const Mode& md : modes) {
      const double ph = md.m * u + md.n * v;
      s += md.a * std::cos(ph) + md.b * std::sin(ph);
    }
    return s;
  };
  // Normalize the sup norm on a fixed dense lattice so the same seed gives
  // samples of one function at every working resolution.
  double sup = 0.0;
  const int ref = 512;
  for (int i = 0; i < ref; ++i)
    for (int j = 0; j < ref; ++j) sup = std::max(sup, std::abs(eval(kTwoPi * i / ref, kTwoPi * j / ref)));
  ScalarField f = ScalarField::sample(g, eval);
  if (sup > 0.0) f *= amplitude / sup;
  return f;
}

}  // namespace wflab

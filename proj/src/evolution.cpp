#include "winter/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "winter/errors.hpp"
#include "winter/format.hpp"
#include "winter/mixing.hpp"
#include "winter/quadrature.hpp"
#include "winter/simd/kernels.hpp"

namespace winter {

namespace {

constexpr cplx kI{0.0, 1.0};
const double kSqrt2OverPi = std::sqrt(2.0 / kPi);
const double kSpectralPrefactor = std::pow(2.0 / kPi, 1.5);
constexpr double kSingularWindow = 1e-4;

double parity(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

void require_mode(int l) {
  if (l < 1) throw DomainError("mode index l must be >= 1");
}

void require_cavity(std::span<const double> x) {
  if (x.empty()) throw DomainError("x-grid is empty");
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(x[j] >= 0.0 && x[j] <= kPi)) throw DomainError("x-grid must lie in [0, pi]");
    if (j > 0 && !(x[j] > x[j - 1])) throw DomainError("x-grid must increase strictly");
  }
}

/// sin(kπ)/(k²−l²) for real k, with the removable point k = l.
double sine_over_gap(int l, double k) {
  const double d = k - l;
  if (std::abs(d) < kSingularWindow) {
    const double z = kPi * d;
    const double z2 = z * z;
    const double sinc = kPi * (1.0 - z2 / 6.0 + z2 * z2 / 120.0 - z2 * z2 * z2 / 5040.0);
    return parity(l) * sinc / (2.0 * l + d);
  }
  return std::sin(kPi * k) / ((k - l) * (k + l));
}

/// (1 − e^{−2πik})/(k² − l²), with the removable point k = l.
cplx one_minus_f_over_gap(int l, cplx k) {
  const cplx d = k - static_cast<double>(l);
  if (std::abs(d) < kSingularWindow) {
    const cplx z = -2.0 * kPi * kI * d;
    const cplx series = 2.0 * kPi * kI * (1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0);
    return series / (2.0 * l + d);
  }
  return -expm1(-2.0 * kPi * kI * k) / (d * (k + static_cast<double>(l)));
}

/// (−1)ˡ l · sin(kπ)e^{ikπ} / ((k²−l²)·4ab) for Im k <= 0.
cplx ray_weight(int l, cplx k, double g) {
  const cplx fm1 = expm1(-2.0 * kPi * kI * k);
  const cplx c = 2.0 * kPi * kI * g * k;
  const cplx den = 2.0 * kI * (c * (1.0 + fm1) - fm1) * (fm1 - c);
  if (std::abs(den) == 0.0) throw DomainError("integrand_p evaluated on a pole of 1/(ab)");
  return parity(l) * l * 4.0 * kPi * kPi * g * g * k * k * one_minus_f_over_gap(l, k) / den;
}

/// sin(kx)·e^{−ikπ}
cplx shifted_sine(cplx k, double x) {
  return (std::exp(kI * k * (x - kPi)) - std::exp(-kI * k * (x + kPi))) / (2.0 * kI);
}

/// Real axis amplitude of the spectral integrand without the sin(kx) factor.
double real_amplitude(int l, double k, double g) { return parity(l) * l * sine_over_gap(l, k) / four_ab_real(k, g); }

std::vector<double> resonance_breakpoints(double g, double k_max) {
  std::vector<double> bp;
  for (int n = 1; n < k_max + 1; ++n) {
    const Pole p = find_pole(n, Coupling(g));
    const double w = std::abs(p.k.imag());
    if (w > 0.5) break;
    for (double m : {-10.0, -3.0, 0.0, 3.0, 10.0}) bp.push_back(p.k.real() + m * w);
  }
  return bp;
}

std::vector<double> merge_breakpoints(std::vector<double> bp, double lo, double hi) {
  bp.push_back(lo);
  bp.push_back(hi);
  std::erase_if(bp, [&](double v) { return v < lo || v > hi; });
  std::sort(bp.begin(), bp.end());
  std::vector<double> out;
  for (double v : bp)
    if (out.empty() || v - out.back() > 1e-9) out.push_back(v);
  if (out.back() < hi) out.back() = hi;
  return out;
}

std::vector<cplx> to_complex(const ComplexVector& v, cplx scale) {
  std::vector<cplx> out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = scale * v[j];
  return out;
}

std::string describe_failure(const char* what, double achieved, double tol) {
  std::ostringstream os;
  os << what << ": achieved error " << achieved << " exceeds tolerance " << tol;
  return os.str();
}

}  // namespace

std::string_view to_string(Part p) {
  switch (p) {
    case Part::total: return "total";
    case Part::exponential: return "exponential";
    case Part::power: return "power";
  }
  return "unknown";
}

std::string_view to_string(Model m) { return m == Model::leading ? "leading" : "exact"; }

void WaveField::validate() const {
  if (x.size() != values.size()) throw DomainError("wave field: grid and values differ in length");
  require_cavity(x);
  if (!(t >= 0.0)) throw DomainError("wave field: t must be >= 0");
  for (const cplx& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw DomainError("wave field has non-finite values");
}

void WaveField::write_csv(std::ostream& os) const {
  os << "x,re,im\n";
  for (std::size_t j = 0; j < x.size(); ++j)
    os << fmt_num(x[j]) << ',' << fmt_num(values[j].real()) << ',' << fmt_num(values[j].imag()) << '\n';
}

void TimeSeries::validate() const {
  if (t.size() != norms.size()) throw DomainError("time series: grid and norms differ in length");
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (j > 0 && !(t[j] > t[j - 1])) throw DomainError("time series grid must increase strictly");
    if (!std::isfinite(norms[j]) || norms[j] < 0.0) throw DomainError("time series norms must be finite and >= 0");
  }
}

void TimeSeries::write_csv(std::ostream& os) const {
  os << "t,norm\n";
  for (std::size_t j = 0; j < t.size(); ++j) os << fmt_num(t[j]) << ',' << fmt_num(norms[j]) << '\n';
}

std::vector<double> cavity_grid(int points) {
  if (points < 2) throw DomainError("cavity grid needs at least two points");
  std::vector<double> x(static_cast<std::size_t>(points));
  for (int j = 0; j < points; ++j) x[static_cast<std::size_t>(j)] = kPi * j / (points - 1);
  x.back() = kPi;
  return x;
}

cplx integrand_p(int l, cplx k, double x, Coupling g) {
  require_mode(l);
  if (!(x >= 0.0 && x <= kPi)) throw DomainError("integrand_p requires x in [0, pi]");
  if (k == cplx{0.0, 0.0}) return {0.0, 0.0};
  if (k.imag() > 0.0) return std::conj(integrand_p(l, std::conj(k), x, g));
  return ray_weight(l, k, g.value()) * shifted_sine(k, x);
}

FieldResult psi_direct_field(int l, std::span<const double> x, double t, Coupling coupling,
                             const DirectOptions& opts) {
  require_mode(l);
  require_cavity(x);
  const double g = coupling.value();
  if (!(g > 0.0)) throw DomainError("psi_direct requires g > 0");
  if (!(t >= 0.0)) throw DomainError("psi_direct requires t >= 0");
  if (t > opts.t_max) {
    std::ostringstream os;
    os << "psi_direct: t = " << t << " exceeds t_max = " << opts.t_max;
    throw DomainError(os.str());
  }
  if (!(opts.tol > 0.0)) throw DomainError("psi_direct tolerance must be positive");

  const auto& kern = simd::active_kernels();
  const std::size_t dim = x.size();
  const double raw_tol = 0.5 * opts.tol / kSpectralPrefactor;
  AdaptiveOptions aopts;
  aopts.abs_tol = raw_tol;

  if (t == 0.0) {
    // Subtract (−1)ˡ l sin(kπ)sin(kx)/(k²+1), whose integral is known, so
    // the remainder decays like 1/k³.
    const double k_max = std::clamp(std::sqrt(l / (2.0 * kPi * g * raw_tol)), 500.0, 20000.0);
    std::vector<double> bp = resonance_breakpoints(g, k_max);
    for (int j = 0; j <= static_cast<int>(k_max); ++j) bp.push_back(j);
    bp = merge_breakpoints(std::move(bp), 0.0, k_max);
    VectorIntegrand f = [&](double k, simd::ComplexSpan out) {
      const double w = real_amplitude(l, k, g) - parity(l) * l * std::sin(kPi * k) / (k * k + 1.0);
      kern.real_sine(k, x, out.re);
      for (std::size_t j = 0; j < dim; ++j) {
        out.re[j] *= w;
        out.im[j] = 0.0;
      }
    };
    VectorQuadResult r = integrate_adaptive(f, dim, bp, aopts);
    const double tail = l / (2.0 * kPi * g * k_max * k_max);
    const double error = kSpectralPrefactor * (r.error + tail);
    if (error > opts.tol) throw QuadratureError(describe_failure("psi_direct at t = 0", error, opts.tol), error);
    FieldResult out{to_complex(r.value, kSpectralPrefactor), error};
    const double ref = parity(l) * l * 0.5 * kPi * std::exp(-kPi);
    for (std::size_t j = 0; j < dim; ++j) out.values[j] += kSpectralPrefactor * ref * std::sinh(x[j]);
    return out;
  }

  // Panels sized to the local phase 2kt + 3π (e^{-ik²t} and the spectral
  // factors), up to k_max; then half-period panels of k²t with acceleration.
  const double k_max = std::max(30.0, 60.0 / t);
  std::vector<double> bp = resonance_breakpoints(g, k_max);
  for (double k = 0.0; k < k_max;) {
    bp.push_back(k);
    k += std::min(1.0, 3.0 / (2.0 * k * t + 3.0 * kPi));
  }
  bp = merge_breakpoints(std::move(bp), 0.0, k_max);

  VectorIntegrand f = [&](double k, simd::ComplexSpan out) {
    const cplx w = real_amplitude(l, k, g) * std::exp(-kI * (k * k * t));
    kern.real_sine(k, x, out.re);
    for (std::size_t j = 0; j < dim; ++j) {
      out.im[j] = w.imag() * out.re[j];
      out.re[j] *= w.real();
    }
  };
  VectorQuadResult body = integrate_adaptive(f, dim, bp, aopts);

  constexpr int kTailPanels = 24;
  std::vector<ComplexVector> terms;
  terms.reserve(kTailPanels);
  ComplexVector gauss(dim);
  ComplexVector scratch(dim);
  double panel_error = 0.0;
  double a = k_max;
  for (int j = 1; j <= kTailPanels; ++j) {
    const double b = std::sqrt(k_max * k_max + j * kPi / t);
    ComplexVector term(dim);
    gauss.fill_zero();
    gk15_panel(f, a, b, term, gauss, scratch);
    double diff = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
      diff = std::max(diff, std::hypot(term.re[i] - gauss.re[i], term.im[i] - gauss.im[i]));
    panel_error += diff;
    terms.push_back(std::move(term));
    a = b;
  }
  SeriesResult tail = accelerate_alternating(terms);
  const double error = kSpectralPrefactor * (body.error + tail.error + panel_error);
  if (error > opts.tol) throw QuadratureError(describe_failure("psi_direct", error, opts.tol), error);

  FieldResult out{to_complex(body.value, kSpectralPrefactor), error};
  for (std::size_t j = 0; j < dim; ++j) out.values[j] += kSpectralPrefactor * tail.value[j];
  return out;
}

cplx psi_direct(int l, double x, double t, Coupling g, const DirectOptions& opts) {
  const double grid[1] = {x};
  return psi_direct_field(l, grid, t, g, opts).values.front();
}

cplx mixing_coefficient(int l, const Pole& pole, double g) {
  require_mode(l);
  if (g == 0.0) return pole.n == l ? 1.0 : 0.0;
  const cplx k = pole.k;
  const double ll = static_cast<double>(l);
  const cplx den = (ll * ll - k * k) * (1.0 + (1.0 - 2.0 * kPi * kI * k) * g);
  if (std::abs(den) == 0.0) throw DomainError("mixing coefficient: degenerate l² = k²");
  return g * parity(l + pole.n) * 2.0 * ll * k * std::sqrt(1.0 - 2.0 * kPi * kI * g * k) / den;
}

ExponentialResult psi_exponential_field(int l, std::span<const double> x, double t, const PoleTable& table,
                                        double tol) {
  require_mode(l);
  require_cavity(x);
  if (!(t >= 0.0)) throw DomainError("psi_exponential requires t >= 0");
  const auto& kern = simd::active_kernels();
  const double g = table.g();
  ComplexVector acc(x.size());
  ComplexVector basis(x.size());
  for (const Pole& p : table.poles()) {
    const cplx c = mixing_coefficient(l, p, g) * kSqrt2OverPi * p.time_factor(t);
    if (c == cplx{0.0, 0.0}) continue;
    kern.complex_sine(p.k, x, basis.span());
    kern.axpy_complex_basis(c, basis.span(), acc.span());
  }
  double tail = 0.0;
  if (g != 0.0) {
    const Pole& last = table.poles().back();
    const double n = last.n;
    tail = std::abs(mixing_coefficient(l, last, g)) * n / (n + 1.0) * std::abs(last.time_factor(t)) * kSqrt2OverPi *
           std::cosh(last.k.imag() * kPi);
  }
  if (tol > 0.0 && tail > tol) {
    std::ostringstream os;
    os << "pole table too short: tail estimate " << tail << " exceeds " << tol << " at t = " << t;
    throw QuadratureError(os.str(), tail);
  }
  return {to_complex(acc, 1.0), tail};
}

cplx psi_exponential(int l, double x, double t, const PoleTable& table) {
  const double grid[1] = {x};
  return psi_exponential_field(l, grid, t, table).values.front();
}

FieldResult psi_power_field(int l, std::span<const double> x, double t, Coupling coupling,
                            const PowerOptions& opts) {
  require_mode(l);
  require_cavity(x);
  const double g = coupling.value();
  if (!(t >= 0.0)) throw DomainError("psi_power requires t >= 0");
  if (!(opts.tol > 0.0)) throw DomainError("psi_power tolerance must be positive");
  const auto& kern = simd::active_kernels();
  const std::size_t dim = x.size();
  const cplx ray = std::exp(-kI * (kPi / 4.0));

  auto weight = [&](double s) { return ray_weight(l, s * ray, g) * std::exp(-s * s * t); };
  VectorIntegrand f = [&](double s, simd::ComplexSpan out) {
    const cplx k = s * ray;
    kern.shifted_sine(k, x, out);
    const cplx w = weight(s);
    for (std::size_t j = 0; j < dim; ++j) {
      const double re = out.re[j];
      const double im = out.im[j];
      out.re[j] = w.real() * re - w.imag() * im;
      out.im[j] = w.real() * im + w.imag() * re;
    }
  };

  // The envelope of ŝ is exp(−s(π−x)/√2), largest at the grid point nearest π.
  const double gap = kPi - x.back();
  auto envelope = [&](double s) { return std::abs(weight(s)) * std::exp(-s * gap / std::sqrt(2.0)); };
  const double raw_tol = opts.tol / kSpectralPrefactor;
  double k_max = t > 0.0 ? std::max(10.0, std::sqrt(36.0 / t)) : 10.0;
  int doublings = 0;
  while (envelope(k_max) * k_max > 1e-2 * raw_tol) {
    if (++doublings > 40) {
      const double achieved = kSpectralPrefactor * envelope(k_max) * k_max;
      throw QuadratureError(describe_failure("psi_power: ray integrand does not decay", achieved, opts.tol),
                            achieved);
    }
    k_max *= 2.0;
  }

  // Geometric breakpoints resolve both the e^{−s²t} scale and the k² onset.
  const double scale = t > 0.0 ? std::min(1.0, 1.0 / std::sqrt(t)) : 1.0;
  std::vector<double> bp;
  for (double s = scale / 64.0; s < k_max; s *= 2.0) bp.push_back(s);
  for (double s = 1.0; s < k_max; s += 1.0) bp.push_back(s);
  bp = merge_breakpoints(std::move(bp), 0.0, k_max);

  AdaptiveOptions aopts;
  aopts.abs_tol = raw_tol;
  aopts.rel_tol = 1e-10;
  VectorQuadResult r = integrate_adaptive(f, dim, bp, aopts);
  const double error = kSpectralPrefactor * (r.error + envelope(k_max) * k_max);
  return {to_complex(r.value, kSpectralPrefactor * ray), error};
}

cplx psi_power_quad(int l, double x, double t, Coupling g, const PowerOptions& opts) {
  const double grid[1] = {x};
  return psi_power_field(l, grid, t, g, opts).values.front();
}

cplx psi_power_asym(int l, double x, double t, Coupling coupling) {
  require_mode(l);
  if (!(t > 0.0)) throw DomainError("psi_power_asym requires t > 0");
  const double g = coupling.value();
  const double r = g / (1.0 + g);
  const double ll = static_cast<double>(l);
  const double bracket = 1.0 / (ll * ll) + kPi * kPi / 6.0 + (2.0 / 3.0) * kPi * kPi * r - kPi * kPi * r * r -
                         x * x / 6.0;
  const cplx lead = std::exp(kI * (kPi / 4.0)) / std::sqrt(2.0) * parity(l) / ll * r * r * x / std::pow(t, 1.5);
  return lead * (1.0 - (1.5 * kI / t) * bracket);
}

cplx pole_wavefunction(int n, double x, double t, const PoleTable& table) {
  const Pole& p = table[n];
  return kSqrt2OverPi * std::sin(p.k * x) * p.time_factor(t);
}

double theta_norm_squared(cplx k) {
  const double alpha = k.real();
  const double beta = k.imag();
  const double hyper = beta == 0.0 ? kPi : std::sinh(2.0 * beta * kPi) / (2.0 * beta);
  // sin(2απ) vanishes exactly at integer α (free modes).
  const double trig = alpha == 0.0             ? kPi
                      : alpha == std::round(alpha) ? 0.0
                                                   : std::sin(2.0 * alpha * kPi) / (2.0 * alpha);
  return (hyper - trig) / kPi;
}

double cavity_norm(const WaveField& field) {
  field.validate();
  if (field.x.size() < 33) throw DomainError("cavity_norm needs at least 33 grid points");
  if (field.x.front() != 0.0 || std::abs(field.x.back() - kPi) > 1e-12)
    throw DomainError("cavity_norm grid must cover [0, pi]");
  std::vector<double> y(field.values.size());
  for (std::size_t j = 0; j < y.size(); ++j) y[j] = std::norm(field.values[j]);
  return simpson(field.x, y);
}

double pole_term_norm(int l, int n, double t, Model model, const PoleTable& table) {
  require_mode(l);
  const double g = table.g();
  if (model == Model::leading) {
    const double c = (n == l) ? 1.0 : g * a_entry(l, n);
    return c * c * std::exp(-width_pert(n, g, 2) * t);
  }
  const Pole& p = table[n];
  return std::norm(mixing_coefficient(l, p, g) * p.time_factor(t)) * theta_norm_squared(p.k);
}

double exponential_norm(int l, double t, Model model, const PoleTable& table, std::span<const double> x) {
  if (model == Model::leading) {
    double sum = 0.0;
    for (int n = 1; n <= table.size(); ++n) sum += pole_term_norm(l, n, t, model, table);
    return sum;
  }
  const std::vector<double> grid(x.begin(), x.end());
  WaveField field{grid, t, psi_exponential_field(l, x, t, table).values, Part::exponential};
  return cavity_norm(field);
}

}  // namespace winter

#pragma once

// Time evolution of the states that start as free box modes sin(l x):
// direct spectral quadrature, exponential (pole) part, power (ray) part and
// the late-time asymptotic form of the power part.

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "winter/poles.hpp"
#include "winter/spectrum.hpp"

namespace winter {

enum class Part { total, exponential, power };
std::string_view to_string(Part p);

/// Complex amplitudes of a state on an x-grid inside the cavity.
struct WaveField {
  std::vector<double> x;
  double t = 0.0;
  std::vector<cplx> values;
  Part part = Part::total;

  /// Throws DomainError on size mismatch, non-increasing grid, x outside
  /// [0, π] or non-finite values.
  void validate() const;
  /// Header "x,re,im".
  void write_csv(std::ostream& os) const;
};

/// Cavity norms on a time grid.
struct TimeSeries {
  std::vector<double> t;
  std::vector<double> norms;

  void validate() const;
  /// Header "t,norm".
  void write_csv(std::ostream& os) const;
};

/// n uniformly spaced points covering [0, π], endpoints included.
std::vector<double> cavity_grid(int points);

/// p⁽ˡ⁾(k;x,g) = (−1)ˡ l · sin(kπ)/(k²−l²) · sin(kx)/(4ab), evaluated in a
/// form that stays bounded in the lower half plane; p(k*) = p(k)* above it.
cplx integrand_p(int l, cplx k, double x, Coupling g);

struct DirectOptions {
  double tol = 1e-7;    ///< absolute accuracy target on ψ
  double t_max = 50.0;  ///< beyond this the phase e^{-ik²t} defeats the panels
};

struct FieldResult {
  std::vector<cplx> values;
  double error = 0.0;  ///< achieved error estimate (max over the grid)
};

/// ψ(x,t) = (2/π)^{3/2} ∫₀^∞ p e^{-ik²t} dk along the real axis.
FieldResult psi_direct_field(int l, std::span<const double> x, double t, Coupling g, const DirectOptions& opts = {});
cplx psi_direct(int l, double x, double t, Coupling g, const DirectOptions& opts = {});

struct ExponentialResult {
  std::vector<cplx> values;
  double tail_estimate = 0.0;  ///< size of the first omitted pole term
};

/// V_{ln} for one pole, principal square root; δ_{ln} when the table is the
/// free limit.
cplx mixing_coefficient(int l, const Pole& pole, double g);

/// Residue sum over the table's poles. With tol > 0 a tail estimate above tol
/// raises QuadratureError (the table is too short).
ExponentialResult psi_exponential_field(int l, std::span<const double> x, double t, const PoleTable& table,
                                        double tol = 0.0);
cplx psi_exponential(int l, double x, double t, const PoleTable& table);

struct PowerOptions {
  double tol = 1e-12;  ///< absolute target; a 1e-10 relative floor also applies
};

/// ψ_pw = e^{-iπ/4}(2/π)^{3/2} ∫₀^∞ p(s e^{-iπ/4}) e^{-s²t} ds.
FieldResult psi_power_field(int l, std::span<const double> x, double t, Coupling g, const PowerOptions& opts = {});
cplx psi_power_quad(int l, double x, double t, Coupling g, const PowerOptions& opts = {});

/// Two-term t^{-3/2} expansion of ψ_pw; meaningful for t ≳ 10.
cplx psi_power_asym(int l, double x, double t, Coupling g);

/// θ⁽ⁿ⁾(x,t) = √(2/π) sin(k⁽ⁿ⁾x) E⁽ⁿ⁾(t).
cplx pole_wavefunction(int n, double x, double t, const PoleTable& table);

/// ∫₀^π |√(2/π) sin(kx)|² dx in closed form; 1 at real integer k.
double theta_norm_squared(cplx k);

/// ∫₀^π |ψ|² dx by composite Simpson. Needs at least 33 points covering [0, π].
double cavity_norm(const WaveField& field);

/// How the per-pole curves of the figures are modelled.
enum class Model {
  leading,  ///< unit-normalized modes, weights g·A_{ln}, widths 4πn³g²
  exact,    ///< exact poles, exact V_{ln} and pole-state norms
};
std::string_view to_string(Model m);

/// Cavity norm of the single pole term n inside ψ⁽ˡ⁾_ex.
double pole_term_norm(int l, int n, double t, Model model, const PoleTable& table);

/// Cavity norm of the whole exponential part. The leading model adds the
/// pole-term norms incoherently; the exact model integrates ψ_ex on `x`.
double exponential_norm(int l, double t, Model model, const PoleTable& table, std::span<const double> x);

}  // namespace winter

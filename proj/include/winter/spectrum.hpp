#pragma once

// Continuum-spectrum coefficients and eigenfunctions of the delta-barrier
// cavity Hamiltonian H = -d²/dx² + δ(x-π)/(πg) on the half line with a hard
// wall at x = 0.

#include <complex>
#include <numbers>

namespace winter {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// Dimensionless coupling (inverse barrier area divided by π).
class Coupling {
 public:
  /// Throws DomainError unless g is finite and nonzero.
  explicit Coupling(double g);
  double value() const noexcept { return g_; }

 private:
  double g_;
};

struct EigenSample {
  double x;
  cplx value;
};

/// e^z - 1 without cancellation for small |z|.
cplx expm1(cplx z);

/// a(k,g) = -i/2 + (e^{-2iπk} - 1)/(4πgk).
cplx coef_a(cplx k, Coupling g);
/// b(k,g) = +i/2 + (e^{+2iπk} - 1)/(4πgk).
cplx coef_b(cplx k, Coupling g);
/// Analytic ∂b/∂k.
cplx coef_b_dk(cplx k, Coupling g);

/// Normalized continuum eigenfunction ψ(x;k,g). Throws DomainError for x < 0
/// or when |a·b| < 1e-10 (k sits on a pole of the normalization).
EigenSample eigenfunction(double x, cplx k, Coupling g);

/// 4·a(k,g)·b(k,g) for real k, computed from the real closed form
/// 1 + sin(2πk)/(πgk) + sin²(πk)/(π²g²k²).
double four_ab_real(double k, double g);

}  // namespace winter

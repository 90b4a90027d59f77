#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "winter/spectrum.hpp"

namespace winter {

/// One resonance: a zero of b(k,g) in the last octant of the k-plane.
struct Pole {
  int n = 0;
  cplx k;
  double residual = 0.0;  ///< |b(k,g)| at the returned k

  cplx energy() const { return k * k; }
  double omega() const { return k.real() * k.real() - k.imag() * k.imag(); }
  double gamma() const { return -4.0 * k.real() * k.imag(); }
  /// E(t) = exp(-i k² t).
  cplx time_factor(double t) const;
};

struct PoleSolverOptions {
  double tol = 1e-12;
  int max_newton = 50;
  /// Continuation step for mode n is at most this value divided by n.
  double continuation_step = 0.05;
};

class PoleTable {
 public:
  /// Validates ordering and the per-pole invariants.
  PoleTable(double g, double tol, std::vector<Pole> poles, int continuation_steps,
            std::vector<std::string> warnings = {});

  /// Free limit g = 0: k⁽ⁿ⁾ = n exactly, zero widths.
  static PoleTable free_limit(int count);

  double g() const noexcept { return g_; }
  double tol() const noexcept { return tol_; }
  int size() const noexcept { return static_cast<int>(poles_.size()); }
  int continuation_steps() const noexcept { return continuation_steps_; }
  const std::vector<Pole>& poles() const noexcept { return poles_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  /// 1-based access by mode index.
  const Pole& operator[](int n) const;

 private:
  double g_;
  double tol_;
  std::vector<Pole> poles_;
  int continuation_steps_;
  std::vector<std::string> warnings_;
};

/// Third-order small-g expansion of k⁽ⁿ⁾(g).
cplx pole_seed(int n, double g);

/// Newton on b(k,g) with analytic derivative, continued in g from a small
/// starting coupling. Throws SolverError on non-convergence or when the root
/// leaves the last octant.
Pole find_pole(int n, Coupling g, const PoleSolverOptions& opts = {}, int* steps_taken = nullptr);

/// Poles n = 1..count. Failures are rethrown with the failing n attached.
PoleTable pole_table(Coupling g, int count, const PoleSolverOptions& opts = {});

/// Γ⁽ⁿ⁾ expansion; order 2 → 4πn³g², order 3 → 4πn³g²(1-4g).
double width_pert(int n, double g, int order);
/// ω⁽ⁿ⁾ expansion; order 1 → n²(1-2g), order 2 → n²(1-2g+3g²).
double freq_pert(int n, double g, int order);

/// {g, tol, poles:[{n, re_k, im_k, omega, gamma, residual}], warnings:[...]}
nlohmann::json to_json(const PoleTable& table);

}  // namespace winter

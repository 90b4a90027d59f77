#pragma once

// Vector-valued quadrature on the real line. Integrands fill one complex
// value per output component (typically one per x-grid point), so a single
// adaptive pass produces a whole field.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "winter/simd/kernels.hpp"

namespace winter {

/// Split-complex vector owning its storage.
struct ComplexVector {
  std::vector<double> re;
  std::vector<double> im;

  ComplexVector() = default;
  explicit ComplexVector(std::size_t n) : re(n, 0.0), im(n, 0.0) {}

  std::size_t size() const noexcept { return re.size(); }
  std::complex<double> operator[](std::size_t j) const { return {re[j], im[j]}; }
  simd::ComplexSpan span() { return {re, im}; }
  simd::ConstComplexSpan span() const { return {re, im}; }
  void fill_zero();
  /// max_j |v_j|
  double max_abs() const;
};

/// f(s, out): write the integrand at s into out (out.size() == dim).
using VectorIntegrand = std::function<void(double, simd::ComplexSpan)>;

struct AdaptiveOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_panels = 200000;
};

struct VectorQuadResult {
  ComplexVector value;
  double error = 0.0;  ///< summed max-norm Kronrod-Gauss differences
  int panels = 0;
};

/// One 15-point Kronrod panel. Adds the Kronrod estimate to `kronrod`, the
/// embedded 7-point Gauss estimate to `gauss`; `scratch` is dim-sized.
void gk15_panel(const VectorIntegrand& f, double a, double b, ComplexVector& kronrod, ComplexVector& gauss,
                ComplexVector& scratch);

/// Globally adaptive G7K15 over consecutive intervals [bp0,bp1], [bp1,bp2], ...
/// The worst panel is bisected until the summed error meets
/// max(abs_tol, rel_tol·max|I|). Throws QuadratureError otherwise.
VectorQuadResult integrate_adaptive(const VectorIntegrand& f, std::size_t dim, std::span<const double> breakpoints,
                                    const AdaptiveOptions& opts);

struct SeriesResult {
  ComplexVector value;
  double error = 0.0;
};

/// Sum of a slowly converging, sign-alternating sequence of vector terms via
/// repeated averaging of the partial sums (Euler / van Wijngaarden). The
/// error is the max-norm change at the last averaging level.
SeriesResult accelerate_alternating(const std::vector<ComplexVector>& terms);

/// Composite Simpson on an arbitrary strictly increasing grid (an odd
/// trailing interval gets the three-point end correction).
double simpson(std::span<const double> x, std::span<const double> y);

}  // namespace winter

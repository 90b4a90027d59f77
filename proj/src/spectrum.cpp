#include "winter/spectrum.hpp"

#include <cmath>
#include <string>

#include "winter/errors.hpp"

namespace winter {

namespace {

constexpr cplx kI{0.0, 1.0};

void require_nonzero(cplx k) {
  if (k == cplx{0.0, 0.0}) throw DomainError("wave number k = 0 is outside the domain");
  if (!std::isfinite(k.real()) || !std::isfinite(k.imag()))
    throw DomainError("wave number must be finite");
}

}  // namespace

Coupling::Coupling(double g) : g_(g) {
  if (!std::isfinite(g)) throw DomainError("coupling must be finite");
  if (g == 0.0) throw DomainError("coupling g = 0 is outside the domain");
}

cplx expm1(cplx z) {
  const double u = z.real();
  const double v = z.imag();
  const double s = std::sin(0.5 * v);
  return {std::expm1(u) * std::cos(v) - 2.0 * s * s, std::exp(u) * std::sin(v)};
}

cplx coef_a(cplx k, Coupling g) {
  require_nonzero(k);
  return -0.5 * kI + expm1(-2.0 * kI * kPi * k) / (4.0 * kPi * g.value() * k);
}

cplx coef_b(cplx k, Coupling g) {
  require_nonzero(k);
  return 0.5 * kI + expm1(2.0 * kI * kPi * k) / (4.0 * kPi * g.value() * k);
}

cplx coef_b_dk(cplx k, Coupling g) {
  require_nonzero(k);
  const cplx denom = 4.0 * kPi * g.value() * k;
  const cplx e = std::exp(2.0 * kI * kPi * k);
  return 2.0 * kPi * kI * e / denom - expm1(2.0 * kI * kPi * k) / (denom * k);
}

EigenSample eigenfunction(double x, cplx k, Coupling g) {
  if (!(x >= 0.0)) throw DomainError("eigenfunction requires x >= 0");
  const cplx a = coef_a(k, g);
  const cplx b = coef_b(k, g);
  const cplx ab = a * b;
  if (std::abs(ab) < 1e-10)
    throw DomainError("a(k,g)·b(k,g) vanishes: k is at a pole of the normalization");
  const cplx root = std::sqrt(ab);
  const double inv = 1.0 / std::sqrt(2.0 * kPi);
  if (x <= kPi) return {x, inv * std::sin(k * x) / root};
  // a/√(ab) and b/√(ab) keep the exterior on the same branch as the interior.
  return {x, inv * (a * std::exp(kI * k * x) + b * std::exp(-kI * k * x)) / root};
}

double four_ab_real(double k, double g) {
  const double s1 = std::sin(kPi * k);
  const double s2 = std::sin(2.0 * kPi * k);
  const double pgk = kPi * g * k;
  return 1.0 + s2 / pgk + (s1 * s1) / (pgk * pgk);
}

}  // namespace winter

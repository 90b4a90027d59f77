#include <cmath>
#include <numbers>

#include "kernels_impl.hpp"

namespace winter::simd::detail {

namespace {

constexpr double kPi = std::numbers::pi;

void real_sine(double k, std::span<const double> x, std::span<double> out) {
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = std::sin(k * x[j]);
}

void complex_sine(std::complex<double> k, std::span<const double> x, ComplexSpan out) {
  const double alpha = k.real();
  const double beta = k.imag();
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double ax = alpha * x[j];
    const double bx = beta * x[j];
    out.re[j] = std::sin(ax) * std::cosh(bx);
    out.im[j] = std::cos(ax) * std::sinh(bx);
  }
}

void shifted_sine(std::complex<double> k, std::span<const double> x, ComplexSpan out) {
  const double alpha = k.real();
  const double beta = k.imag();
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double dm = x[j] - kPi;
    const double dp = x[j] + kPi;
    const double em = std::exp(-beta * dm);
    const double ep = std::exp(beta * dp);
    // (e^{ik(x-π)} - e^{-ik(x+π)}) / 2i
    const double dre = em * std::cos(alpha * dm) - ep * std::cos(alpha * dp);
    const double dim = em * std::sin(alpha * dm) + ep * std::sin(alpha * dp);
    out.re[j] = 0.5 * dim;
    out.im[j] = -0.5 * dre;
  }
}

void axpy_real_basis(std::complex<double> w, std::span<const double> basis, ComplexSpan acc) {
  const double wr = w.real();
  const double wi = w.imag();
  for (std::size_t j = 0; j < basis.size(); ++j) {
    acc.re[j] += wr * basis[j];
    acc.im[j] += wi * basis[j];
  }
}

void axpy_complex_basis(std::complex<double> w, ConstComplexSpan basis, ComplexSpan acc) {
  const double wr = w.real();
  const double wi = w.imag();
  for (std::size_t j = 0; j < basis.size(); ++j) {
    acc.re[j] += wr * basis.re[j] - wi * basis.im[j];
    acc.im[j] += wr * basis.im[j] + wi * basis.re[j];
  }
}

double weighted_abs2_sum(std::span<const double> w, ConstComplexSpan v) {
  double sum = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) sum += w[j] * (v.re[j] * v.re[j] + v.im[j] * v.im[j]);
  return sum;
}

}  // namespace

const KernelTable kScalarTable{
    "scalar", real_sine, complex_sine, shifted_sine, axpy_real_basis, axpy_complex_basis, weighted_abs2_sum,
};

}  // namespace winter::simd::detail

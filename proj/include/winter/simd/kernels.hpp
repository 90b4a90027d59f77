#pragma once

// Data-parallel inner loops of the field evaluators. Every kernel has a
// scalar reference implementation; an AVX2/FMA variant is selected at
// runtime when the CPU supports it. WINTER_SIMD=scalar forces the reference.

#include <complex>
#include <span>
#include <string_view>

namespace winter::simd {

struct ConstComplexSpan {
  std::span<const double> re;
  std::span<const double> im;
  std::size_t size() const noexcept { return re.size(); }
};

/// Split-complex view over two equally sized double arrays.
struct ComplexSpan {
  std::span<double> re;
  std::span<double> im;
  std::size_t size() const noexcept { return re.size(); }
  operator ConstComplexSpan() const noexcept { return {re, im}; }
};

struct KernelTable {
  std::string_view name;

  /// out[j] = sin(k·x[j]) for real k.
  void (*real_sine)(double k, std::span<const double> x, std::span<double> out);

  /// out[j] = sin(k·x[j]) for complex k.
  void (*complex_sine)(std::complex<double> k, std::span<const double> x, ComplexSpan out);

  /// out[j] = sin(k·x[j])·e^{-ikπ}, bounded for Im k <= 0 and x in [0, π].
  void (*shifted_sine)(std::complex<double> k, std::span<const double> x, ComplexSpan out);

  /// acc[j] += w·basis[j] with a real basis.
  void (*axpy_real_basis)(std::complex<double> w, std::span<const double> basis, ComplexSpan acc);

  /// acc[j] += w·basis[j] with a complex basis.
  void (*axpy_complex_basis)(std::complex<double> w, ConstComplexSpan basis, ComplexSpan acc);

  /// Σ_j w[j]·|v[j]|².
  double (*weighted_abs2_sum)(std::span<const double> w, ConstComplexSpan v);
};

const KernelTable& scalar_kernels();

/// nullptr when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();

/// The table used by the library; picked on first use unless selected.
const KernelTable& active_kernels();

/// Force "scalar" or "avx2" (e.g. to replay a recorded run). Returns false
/// when the name is unknown or the variant is unavailable.
bool select_kernels(std::string_view name);

}  // namespace winter::simd

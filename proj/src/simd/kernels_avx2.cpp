// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>
#include <numbers>

#include "kernels_impl.hpp"

namespace winter::simd::detail {

namespace {

constexpr double kPi = std::numbers::pi;

// Cody-Waite split of π/2.
constexpr double kPio2Hi = 1.5707963267948966;
constexpr double kPio2Lo = 6.123233995736766e-17;

// Minimax polynomials on [-π/4, π/4] (Cephes sin.c).
constexpr double kSin[6] = {1.58962301576546568060E-10, -2.50507477628578072866E-8, 2.75573136213857245213E-6,
                            -1.98412698295895385996E-4, 8.33333333332211858878E-3, -1.66666666666666307295E-1};
constexpr double kCos[6] = {-1.13585365213876817300E-11, 2.08757008419747316778E-9, -2.75573141792967388112E-7,
                            2.48015872888517045348E-5,  -1.38888888888730564116E-3, 4.16666666666665929218E-2};

// Padé form of exp on [-ln2/2, ln2/2] (Cephes exp.c).
constexpr double kExpP[3] = {1.26177193074810590878E-4, 3.02994407707441961300E-2, 9.99999999999999999910E-1};
constexpr double kExpQ[4] = {3.00198505138664455042E-6, 2.52448340349684104192E-3, 2.27265548208155028766E-1,
                             2.00000000000000000009E0};
constexpr double kLn2Hi = 6.93145751953125E-1;
constexpr double kLn2Lo = 1.42860682030941723212E-6;

inline __m256d set1(double v) { return _mm256_set1_pd(v); }

inline __m256d horner6(__m256d z, const double (&c)[6]) {
  __m256d p = set1(c[0]);
  for (int i = 1; i < 6; ++i) p = _mm256_fmadd_pd(p, z, set1(c[i]));
  return p;
}

/// sin and cos of every lane, accurate to a few ulp for |x| up to ~1e8.
inline void sincos(__m256d x, __m256d& s, __m256d& c) {
  const __m256d q = _mm256_round_pd(_mm256_mul_pd(x, set1(2.0 / kPi)), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(q, set1(kPio2Hi), x);
  r = _mm256_fnmadd_pd(q, set1(kPio2Lo), r);
  const __m256d z = _mm256_mul_pd(r, r);

  const __m256d sp = _mm256_fmadd_pd(_mm256_mul_pd(r, z), horner6(z, kSin), r);
  const __m256d cp =
      _mm256_fmadd_pd(_mm256_mul_pd(z, z), horner6(z, kCos), _mm256_fnmadd_pd(set1(0.5), z, set1(1.0)));

  // Quadrant q mod 4 in {0,1,2,3}, computed in floating point.
  const __m256d qm = _mm256_sub_pd(q, _mm256_mul_pd(set1(4.0), _mm256_floor_pd(_mm256_mul_pd(q, set1(0.25)))));
  const __m256d odd =
      _mm256_cmp_pd(_mm256_sub_pd(qm, _mm256_mul_pd(set1(2.0), _mm256_floor_pd(_mm256_mul_pd(qm, set1(0.5))))),
                    set1(0.5), _CMP_GT_OQ);
  const __m256d high = _mm256_cmp_pd(qm, set1(1.5), _CMP_GT_OQ);
  const __m256d sign_bit = set1(-0.0);

  const __m256d s0 = _mm256_blendv_pd(sp, cp, odd);
  const __m256d c0 = _mm256_blendv_pd(cp, sp, odd);
  s = _mm256_xor_pd(s0, _mm256_and_pd(high, sign_bit));
  c = _mm256_xor_pd(c0, _mm256_and_pd(_mm256_xor_pd(odd, high), sign_bit));
}

inline __m256d exp(__m256d x) {
  x = _mm256_max_pd(_mm256_min_pd(x, set1(709.0)), set1(-708.0));
  const __m256d n =
      _mm256_round_pd(_mm256_mul_pd(x, set1(std::numbers::log2e)), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, set1(kLn2Hi), x);
  r = _mm256_fnmadd_pd(n, set1(kLn2Lo), r);
  const __m256d rr = _mm256_mul_pd(r, r);
  const __m256d px =
      _mm256_mul_pd(r, _mm256_fmadd_pd(_mm256_fmadd_pd(set1(kExpP[0]), rr, set1(kExpP[1])), rr, set1(kExpP[2])));
  const __m256d qx = _mm256_fmadd_pd(
      _mm256_fmadd_pd(_mm256_fmadd_pd(set1(kExpQ[0]), rr, set1(kExpQ[1])), rr, set1(kExpQ[2])), rr, set1(kExpQ[3]));
  const __m256d e = _mm256_fmadd_pd(set1(2.0), _mm256_div_pd(px, _mm256_sub_pd(qx, px)), set1(1.0));

  // 2^n via the exponent field; n is within [-1022, 1023] after clamping.
  const __m256d magic = set1(6755399441055744.0);
  const __m256i ni = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(n, magic)), _mm256_castpd_si256(magic));
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(ni, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
}

void real_sine(double k, std::span<const double> x, std::span<double> out) {
  const std::size_t n = x.size();
  const __m256d kv = set1(k);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d s, c;
    sincos(_mm256_mul_pd(kv, _mm256_loadu_pd(&x[j])), s, c);
    _mm256_storeu_pd(&out[j], s);
  }
  for (; j < n; ++j) out[j] = std::sin(k * x[j]);
}

void complex_sine(std::complex<double> k, std::span<const double> x, ComplexSpan out) {
  const std::size_t n = x.size();
  const __m256d av = set1(k.real());
  const __m256d bv = set1(k.imag());
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d xv = _mm256_loadu_pd(&x[j]);
    __m256d s, c;
    sincos(_mm256_mul_pd(av, xv), s, c);
    const __m256d bx = _mm256_mul_pd(bv, xv);
    const __m256d ep = exp(bx);
    const __m256d em = exp(_mm256_sub_pd(_mm256_setzero_pd(), bx));
    const __m256d ch = _mm256_mul_pd(set1(0.5), _mm256_add_pd(ep, em));
    const __m256d sh = _mm256_mul_pd(set1(0.5), _mm256_sub_pd(ep, em));
    _mm256_storeu_pd(&out.re[j], _mm256_mul_pd(s, ch));
    _mm256_storeu_pd(&out.im[j], _mm256_mul_pd(c, sh));
  }
  for (; j < n; ++j) {
    const double ax = k.real() * x[j];
    const double bx = k.imag() * x[j];
    out.re[j] = std::sin(ax) * std::cosh(bx);
    out.im[j] = std::cos(ax) * std::sinh(bx);
  }
}

void shifted_sine(std::complex<double> k, std::span<const double> x, ComplexSpan out) {
  const std::size_t n = x.size();
  const double alpha = k.real();
  const double beta = k.imag();
  const __m256d av = set1(alpha);
  const __m256d bv = set1(beta);
  const __m256d pi = set1(kPi);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d xv = _mm256_loadu_pd(&x[j]);
    const __m256d dm = _mm256_sub_pd(xv, pi);
    const __m256d dp = _mm256_add_pd(xv, pi);
    const __m256d em = exp(_mm256_mul_pd(_mm256_sub_pd(_mm256_setzero_pd(), bv), dm));
    const __m256d ep = exp(_mm256_mul_pd(bv, dp));
    __m256d sm, cm, sp, cp;
    sincos(_mm256_mul_pd(av, dm), sm, cm);
    sincos(_mm256_mul_pd(av, dp), sp, cp);
    const __m256d dre = _mm256_fmsub_pd(em, cm, _mm256_mul_pd(ep, cp));
    const __m256d dim = _mm256_fmadd_pd(em, sm, _mm256_mul_pd(ep, sp));
    _mm256_storeu_pd(&out.re[j], _mm256_mul_pd(set1(0.5), dim));
    _mm256_storeu_pd(&out.im[j], _mm256_mul_pd(set1(-0.5), dre));
  }
  for (; j < n; ++j) {
    const double dm = x[j] - kPi;
    const double dp = x[j] + kPi;
    const double em = std::exp(-beta * dm);
    const double ep = std::exp(beta * dp);
    const double dre = em * std::cos(alpha * dm) - ep * std::cos(alpha * dp);
    const double dim = em * std::sin(alpha * dm) + ep * std::sin(alpha * dp);
    out.re[j] = 0.5 * dim;
    out.im[j] = -0.5 * dre;
  }
}

void axpy_real_basis(std::complex<double> w, std::span<const double> basis, ComplexSpan acc) {
  const std::size_t n = basis.size();
  const __m256d wr = set1(w.real());
  const __m256d wi = set1(w.imag());
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d b = _mm256_loadu_pd(&basis[j]);
    _mm256_storeu_pd(&acc.re[j], _mm256_fmadd_pd(wr, b, _mm256_loadu_pd(&acc.re[j])));
    _mm256_storeu_pd(&acc.im[j], _mm256_fmadd_pd(wi, b, _mm256_loadu_pd(&acc.im[j])));
  }
  for (; j < n; ++j) {
    acc.re[j] += w.real() * basis[j];
    acc.im[j] += w.imag() * basis[j];
  }
}

void axpy_complex_basis(std::complex<double> w, ConstComplexSpan basis, ComplexSpan acc) {
  const std::size_t n = basis.size();
  const __m256d wr = set1(w.real());
  const __m256d wi = set1(w.imag());
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d br = _mm256_loadu_pd(&basis.re[j]);
    const __m256d bi = _mm256_loadu_pd(&basis.im[j]);
    const __m256d re = _mm256_fnmadd_pd(wi, bi, _mm256_fmadd_pd(wr, br, _mm256_loadu_pd(&acc.re[j])));
    const __m256d im = _mm256_fmadd_pd(wi, br, _mm256_fmadd_pd(wr, bi, _mm256_loadu_pd(&acc.im[j])));
    _mm256_storeu_pd(&acc.re[j], re);
    _mm256_storeu_pd(&acc.im[j], im);
  }
  for (; j < n; ++j) {
    acc.re[j] += w.real() * basis.re[j] - w.imag() * basis.im[j];
    acc.im[j] += w.real() * basis.im[j] + w.imag() * basis.re[j];
  }
}

double weighted_abs2_sum(std::span<const double> w, ConstComplexSpan v) {
  const std::size_t n = w.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d re = _mm256_loadu_pd(&v.re[j]);
    const __m256d im = _mm256_loadu_pd(&v.im[j]);
    const __m256d a2 = _mm256_fmadd_pd(re, re, _mm256_mul_pd(im, im));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(&w[j]), a2, acc);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; j < n; ++j) sum += w[j] * (v.re[j] * v.re[j] + v.im[j] * v.im[j]);
  return sum;
}

}  // namespace

const KernelTable kAvx2Table{
    "avx2", real_sine, complex_sine, shifted_sine, axpy_real_basis, axpy_complex_basis, weighted_abs2_sum,
};

}  // namespace winter::simd::detail

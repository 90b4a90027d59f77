#include <doctest.h>

#include <cmath>
#include <vector>

#include "winter/errors.hpp"
#include "winter/quadrature.hpp"
#include "winter/spectrum.hpp"

using namespace winter;

TEST_SUITE("quadrature") {
  TEST_CASE("single Kronrod panel is exact for low-degree polynomials") {
    const VectorIntegrand f = [](double s, simd::ComplexSpan out) {
      out.re[0] = std::pow(s, 20);
      out.im[0] = 3 * s * s;
    };
    ComplexVector k(1), g(1), scratch(1);
    gk15_panel(f, 0.0, 1.0, k, g, scratch);
    CHECK(k.re[0] == doctest::Approx(1.0 / 21).epsilon(1e-14));
    CHECK(k.im[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g.im[0] == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("adaptive integration of a vector of oscillatory integrands") {
    const std::vector<double> freq = {1.0, 10.0, 50.0};
    const VectorIntegrand f = [&](double s, simd::ComplexSpan out) {
      for (std::size_t j = 0; j < freq.size(); ++j) {
        out.re[j] = std::cos(freq[j] * s);
        out.im[j] = std::sin(freq[j] * s);
      }
    };
    const std::vector<double> bp = {0.0, 1.0, 2.0};
    AdaptiveOptions opts;
    opts.abs_tol = 1e-12;
    const VectorQuadResult r = integrate_adaptive(f, freq.size(), bp, opts);
    for (std::size_t j = 0; j < freq.size(); ++j) {
      CHECK(r.value.re[j] == doctest::Approx(std::sin(2 * freq[j]) / freq[j]).epsilon(1e-11));
      CHECK(r.value.im[j] == doctest::Approx((1 - std::cos(2 * freq[j])) / freq[j]).epsilon(1e-11));
    }
    CHECK(r.error < 1e-12);
  }

  TEST_CASE("adaptive integration reports failure") {
    const VectorIntegrand f = [](double s, simd::ComplexSpan out) {
      out.re[0] = 1.0 / std::sqrt(std::abs(s - 0.3) + 1e-300);
      out.im[0] = 0.0;
    };
    const std::vector<double> bp = {0.0, 1.0};
    AdaptiveOptions opts;
    opts.abs_tol = 1e-15;
    opts.max_panels = 50;
    CHECK_THROWS_AS(integrate_adaptive(f, 1, bp, opts), QuadratureError);
  }

  TEST_CASE("alternating acceleration sums log 2") {
    std::vector<ComplexVector> terms;
    for (int n = 1; n <= 24; ++n) {
      ComplexVector v(1);
      v.re[0] = (n % 2 ? 1.0 : -1.0) / n;
      v.im[0] = (n % 2 ? 1.0 : -1.0) / (2.0 * n - 1.0);
      terms.push_back(v);
    }
    const SeriesResult r = accelerate_alternating(terms);
    // 24 terms of series converging like 1/n reach 1e-9; the estimate bounds the error.
    CHECK(std::abs(r.value.re[0] - std::log(2.0)) < 1e-9);
    CHECK(std::abs(r.value.im[0] - kPi / 4) < 1e-9);
    CHECK(std::abs(r.value[0] - std::complex<double>(std::log(2.0), kPi / 4)) <= r.error);
  }

  TEST_CASE("simpson on uniform and non-uniform grids") {
    std::vector<double> u, c;
    for (int i = 0; i <= 8; ++i) {
      u.push_back(0.25 * i);
      c.push_back(std::pow(u.back(), 3));
    }
    CHECK(simpson(u, c) == doctest::Approx(4.0).epsilon(1e-14));
    std::vector<double> x, y;
    for (int i = 0; i <= 10; ++i) {
      x.push_back(0.1 * i * i);
      y.push_back(x.back() * x.back());
    }
    CHECK(simpson(x, y) == doctest::Approx(1000.0 / 3).epsilon(1e-12));
    x.push_back(11.0);
    y.push_back(121.0);
    CHECK(simpson(x, y) == doctest::Approx(1331.0 / 3).epsilon(1e-12));
  }
}

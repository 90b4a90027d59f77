#include <doctest.h>

#include <cmath>
#include <random>

#include "winter/errors.hpp"
#include "winter/spectrum.hpp"

using namespace winter;

namespace {
const cplx I(0.0, 1.0);
}

TEST_SUITE("spectrum") {
  TEST_CASE("coefficient values") {
    CHECK(std::abs(coef_a(1.0, Coupling(0.3)) - (-0.5 * I)) < 1e-15);
    CHECK(std::abs(coef_b(1.0, Coupling(0.3)) - (0.5 * I)) < 1e-15);
    CHECK(std::abs(coef_a(0.5, Coupling(0.1)) - cplx(-10.0 / kPi, -0.5)) < 1e-13);
    CHECK(std::abs(coef_b(-0.5, Coupling(0.1)) - cplx(10.0 / kPi, 0.5)) < 1e-13);
    const double mag = std::abs(coef_a(0.9, Coupling(0.1)));
    CHECK(mag > 0.05);
    CHECK(mag < 0.2);
    CHECK(std::abs(coef_b(cplx(0.91596, -0.02117), Coupling(0.1))) < 1e-3);
  }

  TEST_CASE("coupling validation") {
    CHECK_THROWS_AS(Coupling(0.0), DomainError);
    CHECK_THROWS_AS(Coupling(NAN), DomainError);
    CHECK_THROWS_AS(coef_a(0.0, Coupling(0.1)), DomainError);
  }

  TEST_CASE("analytic derivative matches central differences") {
    for (auto [k, g] : {std::pair{cplx(1.0), 0.5}, std::pair{cplx(2.0), 0.1}, std::pair{cplx(0.9, -0.2), 0.3}}) {
      const double h = 1e-6;
      const cplx fd = (coef_b(k + h, Coupling(g)) - coef_b(k - h, Coupling(g))) / (2.0 * h);
      const cplx an = coef_b_dk(k, Coupling(g));
      CHECK(std::abs(an - fd) / std::abs(an) < 1e-8);
    }
  }

  TEST_CASE("derivative conjugation symmetry at real k") {
    const double k = 1.37, g = 0.2, h = 1e-6;
    const cplx da = (coef_a(k + h, Coupling(g)) - coef_a(k - h, Coupling(g))) / (2.0 * h);
    const cplx db = coef_b_dk(k, Coupling(g));
    CHECK(std::abs(db - std::conj(da)) / std::abs(db) < 1e-8);
  }

  TEST_CASE("symmetries over random samples") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> re(-6.0, 6.0), im(-1.5, 1.5), gd(0.01, 1.0);
    for (int i = 0; i < 1000; ++i) {
      const cplx k(re(rng), im(rng));
      const Coupling g(gd(rng));
      const cplx b = coef_b(k, g);
      CHECK(std::abs(coef_a(-k, g) + b) <= 1e-13 * std::abs(b));
      CHECK(std::abs(std::conj(coef_a(k, g)) - coef_b(std::conj(k), g)) <= 1e-13 * std::abs(b));
    }
  }

  TEST_CASE("integer wave numbers give a·b = 1/4") {
    for (int n = 1; n <= 6; ++n) {
      const Coupling g(0.17);
      CHECK(std::abs(coef_a(n, g) * coef_b(n, g) - 0.25) < 1e-14);
      CHECK(four_ab_real(n, 0.17) == doctest::Approx(1.0).epsilon(1e-14));
    }
  }

  TEST_CASE("four_ab_real matches the complex product") {
    for (double k : {0.3, 0.93, 1.5, 2.71, 7.2})
      for (double g : {0.05, 0.2, 0.7}) {
        const cplx p = 4.0 * coef_a(k, Coupling(g)) * coef_b(k, Coupling(g));
        CHECK(four_ab_real(k, g) == doctest::Approx(p.real()).epsilon(1e-12));
        CHECK(std::abs(p.imag()) < 1e-12 * std::abs(p));
      }
  }

  TEST_CASE("expm1 keeps relative accuracy near zero") {
    for (cplx z : {cplx(1e-9, 2e-9), cplx(-3e-7, 1e-8), cplx(0.0, 1e-12)}) {
      const cplx series = z + z * z / 2.0 + z * z * z / 6.0;
      CHECK(std::abs(expm1(z) - series) <= 1e-15 * std::abs(z));
    }
    CHECK(std::abs(expm1(cplx(1.0, 2.0)) - (std::exp(cplx(1.0, 2.0)) - 1.0)) < 1e-14);
  }

  TEST_CASE("eigenfunction boundary and continuity") {
    CHECK(std::abs(eigenfunction(0.0, 1.3, Coupling(0.2)).value) < 1e-15);
    CHECK_THROWS_AS(eigenfunction(-0.1, 1.3, Coupling(0.2)), DomainError);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> kd(0.2, 8.0), gd(0.02, 1.0), imd(-0.3, 0.3);
    int checked = 0;
    while (checked < 100) {
      const cplx k(kd(rng), imd(rng));
      const Coupling g(gd(rng));
      if (std::abs(coef_a(k, g) * coef_b(k, g)) <= 1e-3) continue;
      const cplx left = eigenfunction(kPi, k, g).value;
      const cplx right = eigenfunction(std::nextafter(kPi, 4.0), k, g).value;
      CHECK(std::abs(left - right) < 1e-12 * std::max(1.0, std::abs(left)));
      ++checked;
    }
  }

  TEST_CASE("eigenfunction peaks inside the cavity near k = n(1-g)") {
    const Coupling g(0.1);
    auto ratio = [&](double k) {
      const double inside = std::abs(eigenfunction(kPi / 2, k, g).value);
      double outside = 0.0;
      for (int i = 1; i <= 200; ++i) outside = std::max(outside, std::abs(eigenfunction(kPi + 0.05 * i, k, g).value));
      return inside / outside;
    };
    CHECK(ratio(0.9) > 1.0);
    CHECK(ratio(0.9) > 10.0 * ratio(0.5));
  }
}

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "winter/errors.hpp"
#include "winter/evolution.hpp"
#include "winter/mixing.hpp"

using namespace winter;

namespace {

const double kS = std::sqrt(2.0 / kPi);

double norm_of(Part part, const std::vector<double>& x, double t, std::vector<cplx> v) {
  return cavity_norm(WaveField{x, t, std::move(v), part});
}

}  // namespace

TEST_SUITE("evolution") {
  TEST_CASE("initial condition at single points") {
    CHECK(std::abs(psi_direct(1, kPi / 2, 0.0, Coupling(0.2)) - kS) < 1e-6);
    CHECK(std::abs(psi_direct(2, kPi / 4, 0.0, Coupling(0.1)) - kS) < 1e-6);
  }

  TEST_CASE("t = 0 reconstruction on the grid") {
    const std::vector<double> x = cavity_grid(129);
    for (int l : {1, 2})
      for (double g : {0.1, 0.2}) {
        const FieldResult r = psi_direct_field(l, x, 0.0, Coupling(g));
        double dev = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) dev = std::max(dev, std::abs(r.values[j] - kS * std::sin(l * x[j])));
        CHECK(dev < 1e-5);
        CHECK(norm_of(Part::total, x, 0.0, r.values) == doctest::Approx(1.0).epsilon(1e-5));
      }
  }

  TEST_CASE("integrand conjugation symmetry") {
    for (cplx k : {cplx(1.3, -0.4), cplx(2.2, -1.0), cplx(0.7, -0.01)}) {
      const cplx below = integrand_p(2, k, 1.1, Coupling(0.2));
      const cplx above = integrand_p(2, std::conj(k), 1.1, Coupling(0.2));
      CHECK(std::abs(above - std::conj(below)) < 1e-14 * std::abs(below));
    }
  }

  TEST_CASE("integrand matches its defining formula") {
    const Coupling g(0.2);
    for (cplx k : {cplx(1.3, -0.4), cplx(0.5, -0.2), cplx(2.0 + 1e-6, -1e-7), cplx(3.5, 0.0)}) {
      const cplx f = std::sin(k * kPi) / (k * k - 4.0) * std::sin(k * 0.8) / (4.0 * coef_a(k, g) * coef_b(k, g));
      CHECK(std::abs(integrand_p(2, k, 0.8, g) - 2.0 * f) < 1e-10 * std::max(1.0, std::abs(f)));
    }
  }

  TEST_CASE("decomposition identity") {
    const std::vector<double> x = cavity_grid(65);
    for (double g : {0.1, 0.2}) {
      const PoleTable table = pole_table(Coupling(g), 64);
      for (int l : {1, 2})
        for (double t : {1.0, 5.0, 20.0}) {
          const auto d = psi_direct_field(l, x, t, Coupling(g)).values;
          const auto e = psi_exponential_field(l, x, t, table).values;
          const auto p = psi_power_field(l, x, t, Coupling(g)).values;
          double dev = 0.0;
          for (std::size_t j = 0; j < x.size(); ++j) dev = std::max(dev, std::abs(d[j] - e[j] - p[j]));
          CHECK(dev < 1e-5);
        }
    }
  }

  TEST_CASE("time factors and pole wavefunctions") {
    const PoleTable table = pole_table(Coupling(0.1), 4);
    for (const Pole& p : table.poles()) CHECK(std::abs(p.time_factor(0.0) - 1.0) < 1e-15);
    CHECK(std::abs(pole_wavefunction(1, 0.0, 3.0, table)) == 0.0);
    const PoleTable free = PoleTable::free_limit(3);
    const cplx expect = kS * std::sin(2 * 0.7) * std::exp(cplx(0, -4.0 * 1.3));
    CHECK(std::abs(pole_wavefunction(2, 0.7, 1.3, free) - expect) < 1e-15);
    // Im k < 0: the modulus grows slowly toward x = π.
    const double near0 = std::abs(pole_wavefunction(1, 0.5, 2.0, table)) / std::sin(0.5 * table[1].k.real());
    const double nearpi = std::abs(pole_wavefunction(1, 2.5, 2.0, table)) / std::abs(std::sin(2.5 * table[1].k.real()));
    CHECK(nearpi > near0);
  }

  TEST_CASE("exponential part decays with the smallest width") {
    const std::vector<double> x = cavity_grid(129);
    {
      const PoleTable table = pole_table(Coupling(0.2), 64);
      const double n0 = exponential_norm(1, 0.5, Model::exact, table, x);
      const double n10 = exponential_norm(1, 10.0, Model::exact, table, x);
      const double n20 = exponential_norm(1, 20.0, Model::exact, table, x);
      CHECK(n10 < n0);
      CHECK(-std::log(n20 / n10) / 10.0 == doctest::Approx(table[1].gamma()).epsilon(0.01));
    }
    {
      const PoleTable table = pole_table(Coupling(0.1), 64);
      const double a = exponential_norm(2, 30.0, Model::exact, table, x);
      const double b = exponential_norm(2, 60.0, Model::exact, table, x);
      CHECK(-std::log(b / a) / 30.0 == doctest::Approx(table[1].gamma()).epsilon(0.01));
      // The surviving n = 1 term carries the first-order weight −(4/3)g.
      const cplx v21 = mixing_coefficient(2, table[1], 0.1);
      CHECK(v21.real() == doctest::Approx(-4.0 / 3.0 * 0.1).epsilon(0.2));
    }
  }

  TEST_CASE("exponential tail estimate and validation") {
    const std::vector<double> x = cavity_grid(33);
    const PoleTable small = pole_table(Coupling(0.1), 4);
    CHECK_THROWS_AS(psi_exponential_field(1, x, 0.0, small, 1e-6), QuadratureError);
    CHECK(psi_exponential_field(1, x, 5.0, small, 1e-3).tail_estimate < 1e-3);
    const PoleTable free = PoleTable::free_limit(5);
    const auto v = psi_exponential_field(2, x, 0.0, free).values;
    for (std::size_t j = 0; j < x.size(); ++j) CHECK(std::abs(v[j] - kS * std::sin(2 * x[j])) < 1e-15);
  }

  TEST_CASE("power part: asymptotic form and tail") {
    const Coupling g(0.2);
    for (double t : {1e3, 1e4, 1e5})
      for (double x : {kPi / 4, kPi / 2, 3 * kPi / 4}) {
        const cplx q = psi_power_quad(1, x, t, g);
        const cplx a = psi_power_asym(1, x, t, g);
        CHECK(std::abs(q - a) < 0.01 * std::abs(q));
      }
    CHECK(psi_power_asym(1, 0.0, 50.0, g) == cplx(0.0, 0.0));
    CHECK(std::abs(psi_power_quad(1, kPi, 1e4, g)) == doctest::Approx(6.17e-5 * std::pow(100.0, -1.5)).epsilon(0.02));
    CHECK(std::abs(psi_power_quad(1, kPi, 100.0, g)) == doctest::Approx(6.17e-5).epsilon(0.01));
  }

  TEST_CASE("power tail exponent") {
    const std::vector<double> x = cavity_grid(129);
    std::vector<double> ts, ns;
    for (int i = 0; i <= 8; ++i) {
      const double t = std::pow(10.0, 3.0 + 0.25 * i);
      ts.push_back(t);
      ns.push_back(norm_of(Part::power, x, t, psi_power_field(2, x, t, Coupling(0.1)).values));
    }
    CHECK(oracle::loglog_slope(ts, ns) == doctest::Approx(-3.0).epsilon(0.01));
  }

  TEST_CASE("power part vanishes as g goes to zero") {
    double prev = 1.0;
    for (double g : {0.1, 0.01, 0.001}) {
      const double m = std::abs(psi_power_quad(1, 2.0, 3.0, Coupling(g)));
      CHECK(m < prev);
      prev = m;
    }
    CHECK(prev < 1e-5);
  }

  TEST_CASE("pole state norm closed form") {
    const PoleTable table = pole_table(Coupling(0.2), 3);
    const std::vector<double> x = cavity_grid(2049);
    for (int n = 1; n <= 3; ++n) {
      std::vector<cplx> v;
      for (double xi : x) v.push_back(pole_wavefunction(n, xi, 0.0, table));
      CHECK(norm_of(Part::exponential, x, 0.0, v) == doctest::Approx(theta_norm_squared(table[n].k)).epsilon(1e-10));
    }
    CHECK(theta_norm_squared(cplx(3.0, 0.0)) == 1.0);
  }

  TEST_CASE("leading model per-pole curves") {
    const PoleTable table = pole_table(Coupling(0.1), 4);
    CHECK(pole_term_norm(2, 2, 0.0, Model::leading, table) == 1.0);
    CHECK(pole_term_norm(2, 1, 0.0, Model::leading, table) == doctest::Approx(std::pow(0.1 * 4.0 / 3.0, 2)));
    CHECK(pole_term_norm(2, 1, 10.0, Model::leading, table) ==
          doctest::Approx(std::pow(0.4 / 3.0, 2) * std::exp(-4 * kPi * 0.01 * 10)));
    CHECK(pole_term_norm(2, 2, 0.0, Model::exact, table) == doctest::Approx(1.0).epsilon(0.1));
  }

  TEST_CASE("cavity norm and field validation") {
    const std::vector<double> x = cavity_grid(129);
    std::vector<cplx> zero(x.size()), init;
    for (double xi : x) init.push_back(kS * std::sin(xi));
    CHECK(norm_of(Part::total, x, 0.0, zero) == 0.0);
    CHECK(norm_of(Part::total, x, 0.0, init) == doctest::Approx(1.0).epsilon(1e-6));
    const std::vector<double> coarse = cavity_grid(17);
    CHECK_THROWS_AS(norm_of(Part::total, coarse, 0.0, std::vector<cplx>(17)), DomainError);
    std::vector<double> partial = x;
    partial.pop_back();
    CHECK_THROWS_AS(norm_of(Part::total, partial, 0.0, std::vector<cplx>(partial.size())), DomainError);
    CHECK_THROWS_AS(psi_direct(1, 1.0, -1.0, Coupling(0.1)), DomainError);
    CHECK_THROWS_AS(psi_direct(1, 1.0, 60.0, Coupling(0.1)), DomainError);
    CHECK_THROWS_AS(psi_direct(0, 1.0, 1.0, Coupling(0.1)), DomainError);
  }

  TEST_CASE("CSV serialization") {
    WaveField f{{0.0, 1.0}, 2.0, {cplx(1.0, -0.5), cplx(0.25, 0.0)}, Part::power};
    std::ostringstream os;
    f.write_csv(os);
    CHECK(os.str() == "x,re,im\n0,1,-0.5\n1,0.25,0\n");
    TimeSeries ts{{0.0, 1.5}, {1.0, 0.5}};
    std::ostringstream ot;
    ts.write_csv(ot);
    CHECK(ot.str() == "t,norm\n0,1\n1.5,0.5\n");
  }
}

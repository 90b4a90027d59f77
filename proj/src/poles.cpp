#include "winter/poles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "winter/errors.hpp"

namespace winter {

namespace {

constexpr cplx kI{0.0, 1.0};

bool in_last_octant(cplx k) { return k.imag() < 0.0 && k.real() > std::abs(k.imag()); }

struct NewtonResult {
  cplx k;
  double residual;
  bool converged;
};

NewtonResult newton(cplx k, Coupling g, double tol, int max_iter) {
  // (e^{2πik} − 1)/(4πgk) carries a rounding floor of order ε/(4πg|k|),
  // which exceeds tol only for very small couplings.
  const double floor = 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + 1.0 / (4.0 * kPi * g.value() * std::abs(k)));
  const double accept = std::max(tol, floor);
  double residual = std::abs(coef_b(k, g));
  for (int it = 0; it < max_iter; ++it) {
    const cplx f = coef_b(k, g);
    const cplx step = f / coef_b_dk(k, g);
    k -= step;
    residual = std::abs(coef_b(k, g));
    if (std::abs(step) < tol * std::max(1.0, std::abs(k)) && residual < accept) return {k, residual, true};
  }
  return {k, residual, false};
}

std::string describe(int n, double g) {
  std::ostringstream os;
  os << "pole n=" << n << " at g=" << g;
  return os.str();
}

}  // namespace

cplx Pole::time_factor(double t) const { return std::exp(-kI * k * k * t); }

PoleTable::PoleTable(double g, double tol, std::vector<Pole> poles, int continuation_steps,
                     std::vector<std::string> warnings)
    : g_(g), tol_(tol), poles_(std::move(poles)), continuation_steps_(continuation_steps),
      warnings_(std::move(warnings)) {
  for (std::size_t i = 0; i < poles_.size(); ++i) {
    const Pole& p = poles_[i];
    if (p.n != static_cast<int>(i) + 1) throw DomainError("pole table indices must be 1..N");
    if (i > 0 && !(p.k.real() > poles_[i - 1].k.real()))
      throw DomainError("pole table: Re k must increase strictly with n");
    if (g_ > 0.0 && !in_last_octant(p.k)) throw DomainError(describe(p.n, g_) + " is outside the last octant");
  }
}

PoleTable PoleTable::free_limit(int count) {
  if (count < 1) throw DomainError("pole count must be >= 1");
  std::vector<Pole> poles;
  for (int n = 1; n <= count; ++n) poles.push_back({n, cplx(n, 0.0), 0.0});
  return PoleTable(0.0, 0.0, std::move(poles), 0);
}

const Pole& PoleTable::operator[](int n) const {
  if (n < 1 || n > size()) throw DomainError("mode index outside the pole table");
  return poles_[static_cast<std::size_t>(n - 1)];
}

cplx pole_seed(int n, double g) {
  if (n < 1) throw DomainError("mode index n must be >= 1");
  const double nn = n;
  const cplx c2{nn, -kPi * nn * nn};
  const cplx c3{4.0 * kPi * kPi * nn * nn * nn / 3.0 - nn, 3.0 * kPi * nn * nn};
  return nn - nn * g + c2 * g * g + c3 * g * g * g;
}

Pole find_pole(int n, Coupling coupling, const PoleSolverOptions& opts, int* steps_taken) {
  if (n < 1) throw DomainError("mode index n must be >= 1");
  if (!(opts.tol > 0.0)) throw DomainError("solver tolerance must be positive");
  const double g = coupling.value();
  if (!(g > 0.0)) throw DomainError("find_pole requires g > 0");

  const double max_step = opts.continuation_step / n;
  double g_now = std::min(g, max_step);
  NewtonResult r = newton(pole_seed(n, g_now), Coupling(g_now), opts.tol, opts.max_newton);
  if (!r.converged) throw SolverError("Newton did not converge for " + describe(n, g_now), n);

  double step = max_step;
  int halvings = 0;
  int steps = 0;
  while (g_now < g) {
    const double g_next = std::min(g, g_now + step);
    NewtonResult next = newton(r.k, Coupling(g_next), opts.tol, opts.max_newton);
    if (!next.converged || std::abs(next.k - r.k) > 0.25) {
      if (++halvings > 20) throw SolverError("continuation stalled for " + describe(n, g_next), n);
      step *= 0.5;
      continue;
    }
    r = next;
    g_now = g_next;
    ++steps;
    step = std::min(max_step, 2.0 * step);
  }

  if (!in_last_octant(r.k)) {
    std::ostringstream os;
    os << describe(n, g) << " left the last octant: k = " << r.k;
    throw SolverError(os.str(), n);
  }
  if (steps_taken) *steps_taken = steps;
  return {n, r.k, r.residual};
}

PoleTable pole_table(Coupling g, int count, const PoleSolverOptions& opts) {
  if (count < 1) throw DomainError("pole count must be >= 1");
  std::vector<Pole> poles;
  std::vector<std::string> warnings;
  poles.reserve(static_cast<std::size_t>(count));
  int steps = 0;
  int first_marginal = 0;
  for (int n = 1; n <= count; ++n) {
    try {
      int taken = 0;
      poles.push_back(find_pole(n, g, opts, &taken));
      steps += taken;
    } catch (const SolverError& e) {
      throw SolverError(std::string("pole_table failed at n=") + std::to_string(n) + ": " + e.what(), n);
    }
    if (first_marginal == 0 && width_pert(n, g.value(), 2) > 0.1 * freq_pert(n, g.value(), 1)) first_marginal = n;
  }
  // The ratio Γ/ω grows like n, so once marginal every higher mode is too.
  if (first_marginal > 0) {
    std::ostringstream os;
    os << "n>=" << first_marginal << ": 4πn³g² exceeds 0.1·n²(1-2g); resonance description is marginal";
    warnings.push_back(os.str());
  }
  return PoleTable(g.value(), opts.tol, std::move(poles), steps, std::move(warnings));
}

double width_pert(int n, double g, int order) {
  if (n < 1) throw DomainError("mode index n must be >= 1");
  const double lead = 4.0 * kPi * n * n * n * g * g;
  if (order == 2) return lead;
  if (order == 3) return lead * (1.0 - 4.0 * g);
  throw DomainError("width_pert supports order 2 or 3");
}

double freq_pert(int n, double g, int order) {
  if (n < 1) throw DomainError("mode index n must be >= 1");
  const double nn = static_cast<double>(n) * n;
  if (order == 1) return nn * (1.0 - 2.0 * g);
  if (order == 2) return nn * (1.0 - 2.0 * g + 3.0 * g * g);
  throw DomainError("freq_pert supports order 1 or 2");
}

nlohmann::json to_json(const PoleTable& table) {
  nlohmann::json poles = nlohmann::json::array();
  for (const Pole& p : table.poles()) {
    poles.push_back({{"n", p.n},
                     {"re_k", p.k.real()},
                     {"im_k", p.k.imag()},
                     {"omega", p.omega()},
                     {"gamma", p.gamma()},
                     {"residual", p.residual}});
  }
  return {{"g", table.g()}, {"tol", table.tol()}, {"poles", poles}, {"warnings", table.warnings()}};
}

}  // namespace winter

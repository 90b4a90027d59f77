#include "winter/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <queue>
#include <sstream>

#include "winter/errors.hpp"

namespace winter {

namespace {

// Kronrod abscissae on [0,1] (odd indices are the Gauss nodes) and weights.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  ComplexVector value;
  double error;
};

struct ByError {
  bool operator()(const Panel* x, const Panel* y) const { return x->error < y->error; }
};

double max_abs_diff(const ComplexVector& x, const ComplexVector& y) {
  double m = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) m = std::max(m, std::hypot(x.re[j] - y.re[j], x.im[j] - y.im[j]));
  return m;
}

}  // namespace

void ComplexVector::fill_zero() {
  std::fill(re.begin(), re.end(), 0.0);
  std::fill(im.begin(), im.end(), 0.0);
}

double ComplexVector::max_abs() const {
  double m = 0.0;
  for (std::size_t j = 0; j < size(); ++j) m = std::max(m, std::hypot(re[j], im[j]));
  return m;
}

void gk15_panel(const VectorIntegrand& f, double a, double b, ComplexVector& kronrod, ComplexVector& gauss,
                ComplexVector& scratch) {
  const auto& k = simd::active_kernels();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  for (int i = 0; i < 8; ++i) {
    const int signs = (i == 7) ? 1 : 2;
    for (int s = 0; s < signs; ++s) {
      const double x = (s == 0) ? c - h * kXgk[i] : c + h * kXgk[i];
      f(x, scratch.span());
      k.axpy_complex_basis({h * kWgk[i], 0.0}, scratch.span(), kronrod.span());
      if (i % 2 == 1) k.axpy_complex_basis({h * kWg[i / 2], 0.0}, scratch.span(), gauss.span());
    }
  }
}

VectorQuadResult integrate_adaptive(const VectorIntegrand& f, std::size_t dim, std::span<const double> breakpoints,
                                    const AdaptiveOptions& opts) {
  if (breakpoints.size() < 2) throw DomainError("integrate_adaptive needs at least two breakpoints");
  std::vector<std::unique_ptr<Panel>> store;
  std::priority_queue<Panel*, std::vector<Panel*>, ByError> queue;
  ComplexVector scratch(dim);
  ComplexVector gauss(dim);
  ComplexVector total(dim);
  double error = 0.0;

  auto evaluate = [&](double a, double b) {
    auto p = std::make_unique<Panel>(Panel{a, b, ComplexVector(dim), 0.0});
    gauss.fill_zero();
    gk15_panel(f, a, b, p->value, gauss, scratch);
    p->error = max_abs_diff(p->value, gauss);
    Panel* raw = p.get();
    store.push_back(std::move(p));
    return raw;
  };
  auto add = [&](const Panel* p, double sign) {
    for (std::size_t j = 0; j < dim; ++j) {
      total.re[j] += sign * p->value.re[j];
      total.im[j] += sign * p->value.im[j];
    }
    error += sign * p->error;
  };

  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i + 1] > breakpoints[i])) throw DomainError("quadrature breakpoints must increase strictly");
    Panel* p = evaluate(breakpoints[i], breakpoints[i + 1]);
    add(p, 1.0);
    queue.push(p);
  }

  int panels = static_cast<int>(queue.size());
  auto target = [&] { return std::max(opts.abs_tol, opts.rel_tol * total.max_abs()); };
  while (error > target()) {
    if (panels >= opts.max_panels || queue.empty()) {
      std::ostringstream os;
      os << "adaptive quadrature did not reach tolerance " << target() << " (achieved " << error << " with "
         << panels << " panels)";
      throw QuadratureError(os.str(), error);
    }
    Panel* worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst->a + worst->b);
    if (!(mid > worst->a && mid < worst->b)) {
      // Interval cannot be split further; keep its contribution and move on.
      continue;
    }
    add(worst, -1.0);
    worst->value = ComplexVector();
    Panel* left = evaluate(worst->a, mid);
    Panel* right = evaluate(mid, worst->b);
    add(left, 1.0);
    add(right, 1.0);
    queue.push(left);
    queue.push(right);
    ++panels;
  }
  // Recompute the error sum to drop accumulated rounding from the updates.
  double final_error = 0.0;
  while (!queue.empty()) {
    final_error += queue.top()->error;
    queue.pop();
  }
  return {std::move(total), final_error, panels};
}

SeriesResult accelerate_alternating(const std::vector<ComplexVector>& terms) {
  if (terms.empty()) throw DomainError("accelerate_alternating needs at least one term");
  const std::size_t dim = terms.front().size();
  std::vector<ComplexVector> level;
  level.reserve(terms.size());
  ComplexVector partial(dim);
  for (const ComplexVector& t : terms) {
    for (std::size_t j = 0; j < dim; ++j) {
      partial.re[j] += t.re[j];
      partial.im[j] += t.im[j];
    }
    level.push_back(partial);
  }
  double error = level.size() > 1 ? max_abs_diff(level[level.size() - 1], level[level.size() - 2]) : partial.max_abs();
  while (level.size() > 1) {
    std::vector<ComplexVector> next;
    next.reserve(level.size() - 1);
    for (std::size_t i = 0; i + 1 < level.size(); ++i) {
      ComplexVector avg(dim);
      for (std::size_t j = 0; j < dim; ++j) {
        avg.re[j] = 0.5 * (level[i].re[j] + level[i + 1].re[j]);
        avg.im[j] = 0.5 * (level[i].im[j] + level[i + 1].im[j]);
      }
      next.push_back(std::move(avg));
    }
    if (next.size() == 1) error = max_abs_diff(next[0], level.back());
    level = std::move(next);
  }
  return {std::move(level.front()), error};
}

double simpson(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw DomainError("simpson: grid and values differ in length");
  if (n < 3) throw DomainError("simpson needs at least three points");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x[i] > x[i - 1])) throw DomainError("simpson grid must increase strictly");

  double sum = 0.0;
  const std::size_t pairs_end = ((n - 1) / 2) * 2;  // last index covered by full pairs
  for (std::size_t i = 0; i + 2 <= pairs_end; i += 2) {
    const double h0 = x[i + 1] - x[i];
    const double h1 = x[i + 2] - x[i + 1];
    const double hs = h0 + h1;
    sum += hs / 6.0 * ((2.0 - h1 / h0) * y[i] + hs * hs / (h0 * h1) * y[i + 1] + (2.0 - h0 / h1) * y[i + 2]);
  }
  if (pairs_end != n - 1) {
    const double h0 = x[n - 2] - x[n - 3];
    const double h1 = x[n - 1] - x[n - 2];
    sum += y[n - 1] * (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1)) +
           y[n - 2] * (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0) - y[n - 3] * h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
  }
  return sum;
}

}  // namespace winter

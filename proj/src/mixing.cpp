#include "winter/mixing.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "winter/errors.hpp"
#include "winter/format.hpp"
#include "winter/quadrature.hpp"
#include "winter/simd/kernels.hpp"

namespace winter {

namespace {

constexpr cplx kI{0.0, 1.0};
using Mat = Eigen::MatrixXcd;

double parity(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

void require_dim(int N) {
  if (N < 2) throw DomainError("matrix truncation N must be >= 2");
}

void require_order(int order, int lo, int hi) {
  if (order < lo || order > hi) {
    std::ostringstream os;
    os << "perturbative order must be in " << lo << ".." << hi;
    throw DomainError(os.str());
  }
}

IndexMatrix make(MatrixLabel label, Mat m, int order = 0) { return IndexMatrix{label, order, std::move(m)}; }

/// Max absolute row sum.
double inf_norm(const Mat& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

Mat a_block(int N) {
  Mat m(N, N);
  for (int l = 1; l <= N; ++l)
    for (int n = 1; n <= N; ++n) m(l - 1, n - 1) = a_entry(l, n);
  return m;
}

Mat h_block(int N) {
  Mat m = Mat::Zero(N, N);
  for (int n = 1; n <= N; ++n) m(n - 1, n - 1) = static_cast<double>(n);
  return m;
}

Mat a2_closed_block(int N) {
  Mat m(N, N);
  for (int l = 1; l <= N; ++l)
    for (int n = 1; n <= N; ++n) m(l - 1, n - 1) = a_squared_closed_entry(l, n);
  return m;
}

/// Entry (l,n) of U⁻¹ from the truncated series.
cplx inverse_series_entry(int l, int n, double g, int order) {
  const double a = a_entry(l, n);
  cplx v = (l == n ? 1.0 : 0.0) - g * a;
  if (order == 2) v += g * g * (0.5 * a_squared_closed_entry(l, n) + 0.5 * a - kI * kPi * a * static_cast<double>(n));
  return v;
}

}  // namespace

std::string_view to_string(MatrixLabel label) {
  switch (label) {
    case MatrixLabel::A: return "A";
    case MatrixLabel::H: return "H";
    case MatrixLabel::V_exact: return "V_exact";
    case MatrixLabel::V_order: return "V_order";
    case MatrixLabel::Z_order: return "Z_order";
    case MatrixLabel::U: return "U";
    case MatrixLabel::U_exact: return "U_exact";
    case MatrixLabel::U_inverse: return "U_inverse";
    case MatrixLabel::A_squared_closed: return "A_squared_closed";
    case MatrixLabel::A_squared: return "A_squared";
    case MatrixLabel::AH: return "AH";
  }
  return "unknown";
}

std::string_view to_string(InverseMode mode) {
  switch (mode) {
    case InverseMode::series: return "series";
    case InverseMode::numeric: return "numeric";
    case InverseMode::exact: return "exact";
  }
  return "unknown";
}

InverseMode parse_inverse_mode(std::string_view s) {
  if (s == "series") return InverseMode::series;
  if (s == "numeric") return InverseMode::numeric;
  if (s == "exact") return InverseMode::exact;
  throw DomainError("inverse mode must be series, numeric or exact");
}

cplx IndexMatrix::operator()(int l, int n) const {
  if (l < 1 || n < 1 || l > dim() || n > dim()) throw DomainError("matrix index outside 1..N");
  return m(l - 1, n - 1);
}

void IndexMatrix::validate() const {
  if (m.rows() != m.cols()) throw DomainError("index matrix must be square");
  const int N = dim();
  auto fail = [&](const char* what) {
    throw DomainError(std::string(to_string(label)) + " violates invariant: " + what);
  };
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      const cplx v = m(i, j);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) fail("non-finite entry");
      switch (label) {
        case MatrixLabel::A:
          if (v.imag() != 0.0 || v != -m(j, i)) fail("real antisymmetric");
          if (i == j && v != 0.0) fail("zero diagonal");
          break;
        case MatrixLabel::H:
          if (v.imag() != 0.0) fail("real");
          if (i != j && v != 0.0) fail("diagonal");
          if (i == j && !(v.real() > 0.0)) fail("positive");
          break;
        case MatrixLabel::Z_order:
          if (i != j && v != 0.0) fail("diagonal");
          break;
        case MatrixLabel::A_squared_closed:
          if (v != m(j, i)) fail("symmetric");
          break;
        case MatrixLabel::AH:
          if (i == j && v != 0.0) fail("zero diagonal");
          break;
        default:
          break;
      }
    }
  }
}

void IndexMatrix::write_csv(std::ostream& os) const {
  os << "row,col,re,im\n";
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j)
      os << i + 1 << ',' << j + 1 << ',' << fmt_num(m(i, j).real()) << ',' << fmt_num(m(i, j).imag()) << '\n';
}

nlohmann::json IndexMatrix::to_json() const {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (int i = 0; i < dim(); ++i) {
    nlohmann::json rr = nlohmann::json::array();
    nlohmann::json ri = nlohmann::json::array();
    for (int j = 0; j < dim(); ++j) {
      rr.push_back(m(i, j).real());
      ri.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return {{"label", to_string(label)}, {"order", order}, {"dim", dim()}, {"re", re}, {"im", im}};
}

double a_entry(int l, int n) {
  if (l < 1 || n < 1) throw DomainError("mode indices must be >= 1");
  if (l == n) return 0.0;
  const double ll = l;
  const double nn = n;
  return parity(l + n) * 2.0 * ll * nn / ((ll - nn) * (ll + nn));
}

double a_squared_closed_entry(int l, int n) {
  if (l < 1 || n < 1) throw DomainError("mode indices must be >= 1");
  const double ll = l;
  const double nn = n;
  if (l == n) return -(kPi * kPi * ll * ll / 3.0 + 0.25);
  const double d = (ll - nn) * (ll + nn);
  return 2.0 * parity(l + n + 1) * 2.0 * ll * nn * (ll * ll + nn * nn) / (d * d);
}

IndexMatrix matrix_A(int N) {
  require_dim(N);
  return make(MatrixLabel::A, a_block(N));
}

IndexMatrix matrix_H(int N) {
  require_dim(N);
  return make(MatrixLabel::H, h_block(N));
}

IndexMatrix matrix_AH(int N) {
  require_dim(N);
  return make(MatrixLabel::AH, a_block(N) * h_block(N));
}

IndexMatrix matrix_A_squared_closed(int N) {
  require_dim(N);
  return make(MatrixLabel::A_squared_closed, a2_closed_block(N));
}

IndexMatrix matrix_A_squared(int N) {
  require_dim(N);
  const Eigen::MatrixXd a = a_block(N).real();
  return make(MatrixLabel::A_squared, (a * a).cast<cplx>());
}

SeriesIdentities series_identities_check(int m, long N) {
  if (m < 1) throw DomainError("series identities need m >= 1");
  if (N <= 2L * m) throw DomainError("series identities need N well above m");
  const double mm = m;
  SeriesIdentities r;
  // Smallest terms first.
  for (long k = N; k >= 1; --k) {
    if (k == m) continue;
    const double kk = static_cast<double>(k);
    const double d = (kk - mm) * (kk + mm);
    r.sum1 += 1.0 / d;
    r.sum2 += kk * kk / (d * d);
  }
  const double X = static_cast<double>(N) + 0.5;
  const double log_ratio = std::log1p(2.0 * mm / (X - mm));  // ln((X+m)/(X−m))
  r.tail1 = log_ratio / (2.0 * mm);
  r.tail2 = log_ratio / (4.0 * mm) + 0.25 * (1.0 / (X - mm) + 1.0 / (X + mm));
  r.sum1 += r.tail1;
  r.sum2 += r.tail2;
  r.expected1 = 3.0 / (4.0 * mm * mm);
  r.expected2 = kPi * kPi / 12.0 + 1.0 / (16.0 * mm * mm);
  return r;
}

IndexMatrix mixing_V_exact(const PoleTable& table) {
  const int N = table.size();
  require_dim(N);
  Mat v(N, N);
  for (int l = 1; l <= N; ++l)
    for (int n = 1; n <= N; ++n) v(l - 1, n - 1) = mixing_coefficient(l, table[n], table.g());
  return make(MatrixLabel::V_exact, std::move(v));
}

IndexMatrix V_order(int k, int N) {
  require_dim(N);
  require_order(k, 0, 2);
  const Mat id = Mat::Identity(N, N);
  if (k == 0) return make(MatrixLabel::V_order, id, 0);
  const Mat a = a_block(N);
  if (k == 1) return make(MatrixLabel::V_order, a - 0.5 * id, 1);
  const Mat h = h_block(N);
  Mat v = 0.5 * a2_closed_block(N) - a + 0.375 * id + kI * kPi * (a * h) - 1.5 * kI * kPi * h;
  return make(MatrixLabel::V_order, std::move(v), 2);
}

IndexMatrix V2_entrywise(int N) {
  require_dim(N);
  Mat v(N, N);
  for (int l = 1; l <= N; ++l) {
    for (int n = 1; n <= N; ++n) {
      const double ll = l;
      const double nn = n;
      if (l == n) {
        v(l - 1, n - 1) = cplx(0.25 - kPi * kPi * ll * ll / 6.0, -1.5 * kPi * ll);
        continue;
      }
      const double d = (ll - nn) * (ll + nn);
      const double first = parity(l + n) * 2.0 * ll * nn / d;
      const double second = parity(l + n + 1) * 2.0 * ll * nn * (ll * ll + nn * nn) / (d * d);
      v(l - 1, n - 1) = first * cplx(-1.0, kPi * nn) + second;
    }
  }
  return make(MatrixLabel::V_order, std::move(v), 2);
}

IndexMatrix Z_order(int k, int N) {
  require_dim(N);
  require_order(k, 1, 2);
  const Mat id = Mat::Identity(N, N);
  if (k == 1) return make(MatrixLabel::Z_order, 0.5 * id, 1);
  return make(MatrixLabel::Z_order, -0.125 * id + 1.5 * kI * kPi * h_block(N), 2);
}

double Z_exact(int n, const PoleTable& table) { return std::sqrt(theta_norm_squared(table[n].k)); }

IndexMatrix U_truncated(double g, int N, int order) {
  require_dim(N);
  require_order(order, 1, 2);
  const Mat id = Mat::Identity(N, N);
  const Mat a = a_block(N);
  Mat u = id + g * a;
  if (order == 2) u += g * g * (0.5 * a2_closed_block(N) - 0.5 * a + kI * kPi * (a * h_block(N)));
  return make(MatrixLabel::U, std::move(u), order);
}

IndexMatrix U_exact(const PoleTable& table) {
  IndexMatrix v = mixing_V_exact(table);
  for (int n = 1; n <= table.size(); ++n) v.m.col(n - 1) *= Z_exact(n, table);
  v.label = MatrixLabel::U_exact;
  return v;
}

InverseResult U_inverse(double g, int N, int order, InverseMode mode, const PoleTable* table) {
  require_dim(N);
  require_order(order, 1, 2);
  const Mat id = Mat::Identity(N, N);
  if (mode == InverseMode::series) {
    Mat inv(N, N);
    for (int l = 1; l <= N; ++l)
      for (int n = 1; n <= N; ++n) inv(l - 1, n - 1) = inverse_series_entry(l, n, g, order);
    const double residual = inf_norm(U_truncated(g, N, order).m * inv - id);
    return {make(MatrixLabel::U_inverse, std::move(inv), order), residual, 1.0};
  }

  Mat u;
  if (mode == InverseMode::exact) {
    if (!table) throw DomainError("exact inverse mode needs a pole table");
    if (table->size() != N) throw DomainError("exact inverse mode: N must equal the pole table size");
    if (table->g() != g) throw DomainError("exact inverse mode: pole table computed at a different g");
    u = U_exact(*table).m;
  } else {
    u = U_truncated(g, N, order).m;
  }
  const Eigen::PartialPivLU<Mat> lu(u);
  const double rcond = lu.rcond();
  const double condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(condition <= 1e8)) {
    std::ostringstream os;
    os << "U is ill-conditioned for inversion: condition estimate " << condition;
    throw LinearAlgebraError(os.str(), condition);
  }
  Mat inv = lu.inverse();
  const double residual = inf_norm(u * inv - id);
  return {make(MatrixLabel::U_inverse, std::move(inv), order), residual, condition};
}

Eigen::MatrixXcd matrix_exp(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw DomainError("matrix_exp needs a square matrix");
  static constexpr double b[14] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                   1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                   670442572800.0,      33522128640.0,       1323241920.0,
                                   40840800.0,          960960.0,            16380.0,
                                   182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;
  const Eigen::Index N = m.rows();
  if (N == 0 || m.cwiseAbs().maxCoeff() == 0.0) return Mat::Identity(N, N);
  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > theta13) s = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  const Mat a = m / std::ldexp(1.0, s);
  const Mat id = Mat::Identity(N, N);
  const Mat a2 = a * a;
  const Mat a4 = a2 * a2;
  const Mat a6 = a4 * a2;
  const Mat u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  const Mat v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  Mat r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < s; ++i) r = r * r;
  return r;
}

void RotatedState::write_csv(std::ostream& os) const {
  os << "n,re,im\n";
  for (std::size_t n = 0; n < coefficients.size(); ++n)
    os << n + 1 << ',' << fmt_num(coefficients[n].real()) << ',' << fmt_num(coefficients[n].imag()) << '\n';
}

RotatedState counter_rotate(int l, double g, int N, int order, InverseMode mode, const PoleTable* table) {
  require_dim(N);
  require_order(order, 1, 2);
  if (l < 1 || l > N) throw DomainError("counter_rotate needs 1 <= l <= N");
  RotatedState state{l, order, mode, std::vector<cplx>(static_cast<std::size_t>(N))};
  if (mode == InverseMode::series) {
    for (int n = 1; n <= N; ++n) state.coefficients[static_cast<std::size_t>(n - 1)] = inverse_series_entry(l, n, g, order);
    return state;
  }
  const InverseResult inv = U_inverse(g, N, order, mode, table);
  for (int n = 1; n <= N; ++n) state.coefficients[static_cast<std::size_t>(n - 1)] = inv.inverse.m(l - 1, n - 1);
  return state;
}

std::vector<cplx> synthesize(const RotatedState& state, std::span<const double> x) {
  const auto& kern = simd::active_kernels();
  std::vector<double> re(x.size(), 0.0);
  std::vector<double> im(x.size(), 0.0);
  std::vector<double> basis(x.size());
  const double norm = std::sqrt(2.0 / kPi);
  for (std::size_t n = 0; n < state.coefficients.size(); ++n) {
    kern.real_sine(static_cast<double>(n + 1), x, basis);
    kern.axpy_real_basis(norm * state.coefficients[n], basis, {re, im});
  }
  std::vector<cplx> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = {re[j], im[j]};
  return out;
}

double counter_rotated_closed_form(int l, double g, double x) {
  return std::sqrt(2.0 / kPi) * (1.0 - 0.5 * g) * std::sin(l * (1.0 - g) * x);
}

double exponentiation_gap(double g, int N, bool subtract_ah, ASquared a2) {
  require_dim(N);
  const Mat id = Mat::Identity(N, N);
  const Mat a = a_block(N);
  const Mat ah = a * h_block(N);
  const Mat sq = a2 == ASquared::closed ? a2_closed_block(N) : Mat(a * a);
  const Mat u = id + g * a + g * g * (0.5 * sq - 0.5 * a + kI * kPi * ah);
  Mat gap = u - matrix_exp(g * (1.0 - 0.5 * g) * a);
  if (subtract_ah) gap -= kI * kPi * g * g * ah;
  return inf_norm(gap);
}

TimeSeries diagonal_evolution_check(int l, const PoleTable& table, std::span<const double> t_grid, int order,
                                    InverseMode mode, int x_points) {
  const int N = table.size();
  require_dim(N);
  if (l < 1 || l > N) throw DomainError("diagonal_evolution_check needs l within the pole table");
  const double g = table.g();
  const IndexMatrix v = mixing_V_exact(table);
  const InverseResult inv = U_inverse(g, N, order, mode, &table);
  Eigen::RowVectorXcd w = inv.inverse.m.row(l - 1) * v.m;
  w(l - 1) -= 1.0 / Z_exact(l, table);

  const std::vector<double> x = cavity_grid(x_points);
  const auto& kern = simd::active_kernels();
  ComplexVector basis(x.size());
  TimeSeries out;
  for (double t : t_grid) {
    ComplexVector acc(x.size());
    for (int m = 1; m <= N; ++m) {
      const Pole& p = table[m];
      const cplx c = w(m - 1) * std::sqrt(2.0 / kPi) * p.time_factor(t);
      if (c == cplx{0.0, 0.0}) continue;
      kern.complex_sine(p.k, x, basis.span());
      kern.axpy_complex_basis(c, basis.span(), acc.span());
    }
    WaveField field{x, t, std::vector<cplx>(x.size()), Part::exponential};
    for (std::size_t j = 0; j < x.size(); ++j) field.values[j] = acc[j];
    out.t.push_back(t);
    out.norms.push_back(cavity_norm(field));
  }
  out.validate();
  return out;
}

}  // namespace winter

#pragma once

// Index-space matrices of the resonance mixing problem: A, H, the mixing
// matrix V, the renormalization Z and U = V·Z, with their g-expansions.

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "winter/evolution.hpp"
#include "winter/poles.hpp"

namespace winter {

enum class MatrixLabel { A, H, V_exact, V_order, Z_order, U, U_exact, U_inverse, A_squared_closed, A_squared, AH };
std::string_view to_string(MatrixLabel label);

/// Truncated N×N complex matrix over mode indices 1..N.
struct IndexMatrix {
  MatrixLabel label;
  int order = 0;  ///< perturbative order where it applies
  Eigen::MatrixXcd m;

  int dim() const noexcept { return static_cast<int>(m.rows()); }
  /// 1-based entry.
  cplx operator()(int l, int n) const;
  /// Checks the structural invariant attached to the label.
  void validate() const;
  /// Header "row,col,re,im", 1-based indices.
  void write_csv(std::ostream& os) const;
  /// {label, order, dim, re:[[...]], im:[[...]]}
  nlohmann::json to_json() const;
};

/// A_{ln} = (−1)^{l+n} 2ln/(l²−n²), zero on the diagonal.
double a_entry(int l, int n);
/// Closed form of (A²)_{ln} for the infinite matrix.
double a_squared_closed_entry(int l, int n);

IndexMatrix matrix_A(int N);
IndexMatrix matrix_H(int N);
IndexMatrix matrix_AH(int N);
IndexMatrix matrix_A_squared_closed(int N);
/// The truncated product A_N·A_N.
IndexMatrix matrix_A_squared(int N);

struct SeriesIdentities {
  double sum1 = 0.0;  ///< Σ_{k≠m} 1/(k²−m²) with tail
  double sum2 = 0.0;  ///< Σ_{k≠m} k²/(k²−m²)² with tail
  double expected1 = 0.0;
  double expected2 = 0.0;
  double tail1 = 0.0;  ///< analytic tail beyond k = N
  double tail2 = 0.0;
  double deviation1() const { return sum1 - expected1; }
  double deviation2() const { return sum2 - expected2; }
};

/// Partial sums to k = N plus the midpoint-rule tail ∫_{N+½}^∞.
SeriesIdentities series_identities_check(int m, long N);

/// V_{ln} from the exact poles of the table (N = table size).
IndexMatrix mixing_V_exact(const PoleTable& table);
/// V⁽⁰⁾, V⁽¹⁾ = A − ½I, V⁽²⁾ = ½A² − A + ⅜I + iπAH − (3/2)iπH (closed-form A²).
IndexMatrix V_order(int k, int N);
/// V⁽²⁾ from its explicit entrywise formula.
IndexMatrix V2_entrywise(int N);

/// Z⁽¹⁾ = ½I, Z⁽²⁾ = −⅛I + (3/2)iπH.
IndexMatrix Z_order(int k, int N);
/// Real positive Z⁽ⁿ⁾ normalizing θ⁽ⁿ⁾(x,0) on the cavity.
double Z_exact(int n, const PoleTable& table);

/// I + gA (order 1); I + gA + ½g²A² − ½g²A + iπg²AH (order 2, closed-form A²).
IndexMatrix U_truncated(double g, int N, int order);
/// V_exact·diag(Z_exact).
IndexMatrix U_exact(const PoleTable& table);

enum class InverseMode {
  series,   ///< truncated Neumann-type series in g
  numeric,  ///< dense LU inverse of U_truncated
  exact,    ///< dense LU inverse of U_exact (needs a pole table)
};
std::string_view to_string(InverseMode mode);
InverseMode parse_inverse_mode(std::string_view s);

struct InverseResult {
  IndexMatrix inverse;
  double residual = 0.0;   ///< ‖U·U⁻¹ − I‖∞
  double condition = 1.0;  ///< reciprocal of Eigen's rcond estimate (1 in series mode)
};

/// Throws LinearAlgebraError when the condition estimate exceeds 1e8.
InverseResult U_inverse(double g, int N, int order, InverseMode mode, const PoleTable* table = nullptr);

/// exp(M) by scaling and squaring with a degree-13 Padé approximant.
Eigen::MatrixXcd matrix_exp(const Eigen::MatrixXcd& m);

struct RotatedState {
  int l = 1;
  int order = 1;
  InverseMode mode = InverseMode::series;
  std::vector<cplx> coefficients;  ///< (U⁻¹)_{ln}, n = 1..N

  /// Header "n,re,im".
  void write_csv(std::ostream& os) const;
};

/// Row l of U⁻¹. Series mode builds the row directly, so N can be large.
RotatedState counter_rotate(int l, double g, int N, int order, InverseMode mode = InverseMode::series,
                            const PoleTable* table = nullptr);
/// φ⁽ˡ⁾(x,0) = √(2/π) Σₙ cₙ sin(nx) on the grid.
std::vector<cplx> synthesize(const RotatedState& state, std::span<const double> x);
/// √(2/π)(1 − g/2) sin(l(1−g)x), the resummed first-order counter-rotated state.
double counter_rotated_closed_form(int l, double g, double x);

enum class ASquared { truncated, closed };

/// ‖U_trunc(g,N,2) − exp[g(1−g/2)A] − iπg²AH‖∞. The A² inside U is the
/// truncated product by default; see the README for why.
double exponentiation_gap(double g, int N = 8, bool subtract_ah = true, ASquared a2 = ASquared::truncated);

/// Cavity norm of (evolved φ⁽ˡ⁾ − ξ⁽ˡ⁾) on t_grid, where φ⁽ˡ⁾ evolves as
/// Σₘ (U⁻¹V)_{lm} θ⁽ᵐ⁾ and ξ⁽ˡ⁾ = θ⁽ˡ⁾/Z⁽ˡ⁾. N is the table size.
TimeSeries diagonal_evolution_check(int l, const PoleTable& table, std::span<const double> t_grid, int order,
                                    InverseMode mode = InverseMode::series, int x_points = 129);

}  // namespace winter

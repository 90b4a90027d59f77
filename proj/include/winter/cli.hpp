#pragma once

// Command-line driver. Subcommands: poles, evolve, mixing, crossings, rerun.
// Exit codes: 0 ok, 1 usage/domain, 2 solver, 3 quadrature, 4 linear
// algebra, 5 search.

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace winter::cli {

inline constexpr std::string_view kToolVersion = "winter 0.3.0";

struct Crossing {
  double t = 0.0;
  double lo = 0.0;  ///< bracketing interval
  double hi = 0.0;
  int direction = 0;  ///< −1: first curve drops below the second, +1: rises above
};

/// Sign changes of diff on the sampled grid, each refined by bisection until
/// the bracket is below t_tol.
std::vector<Crossing> find_crossings(const std::function<double(double)>& diff, std::span<const double> t_grid,
                                     double t_tol = 1e-9);

/// Runs one command line (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace winter::cli

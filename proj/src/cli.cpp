#include "winter/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "winter/errors.hpp"
#include "winter/evolution.hpp"
#include "winter/format.hpp"
#include "winter/io.hpp"
#include "winter/mixing.hpp"
#include "winter/poles.hpp"
#include "winter/simd/kernels.hpp"

namespace winter::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Options {
  double g = kNaN;
  int l = 1;
  int n_max = 64;
  double tol = 0.0;
  std::string t_spec;
  std::string x_spec = "0:pi:129";
  std::string out = ".";
  std::string format = "csv";
  // evolve
  std::string method = "all";
  std::string parts = "total";
  std::string model = "leading";
  std::string emit;
  int offdiag = 0;
  // mixing
  int order = 2;
  std::string mode;  ///< empty: numeric for Uinv, series for rotation and contamination
  int rotate = 0;
  // crossings
  std::string curves = "exponential,power";
};

std::string num_or_nan(double v) { return std::isfinite(v) ? fmt_num(v) : std::string("nan"); }

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

Model parse_model(const std::string& s) {
  if (s == "leading") return Model::leading;
  if (s == "exact") return Model::exact;
  throw DomainError("--model must be leading or exact");
}

void require_positive_g(double g) {
  if (!(g > 0.0) || !std::isfinite(g)) throw DomainError("--g must be a finite value > 0");
}

/// A table of named columns over a time grid.
struct Table {
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;

  std::string csv(const std::vector<double>& t) const {
    std::ostringstream os;
    os << 't';
    for (const auto& n : names) os << ',' << n;
    os << '\n';
    for (std::size_t i = 0; i < t.size(); ++i) {
      os << fmt_num(t[i]);
      for (double v : rows[i]) os << ',' << num_or_nan(v);
      os << '\n';
    }
    return os.str();
  }

  std::string json_text(const std::vector<double>& t) const {
    json j;
    j["t"] = t;
    for (std::size_t c = 0; c < names.size(); ++c) {
      json col = json::array();
      for (const auto& r : rows) col.push_back(std::isfinite(r[c]) ? json(r[c]) : json(nullptr));
      j[names[c]] = col;
    }
    return j.dump(2) + "\n";
  }
};

std::string field_csv(const WaveField& f) {
  std::ostringstream os;
  f.write_csv(os);
  return os.str();
}

class Session {
 public:
  Session(std::string command, std::vector<std::string> args, const Options& o, std::ostream& out,
          std::ostream& err)
      : command_(std::move(command)), args_(std::move(args)), o_(o), out_(out), err_(err), dir_(o.out) {}

  void add_output(const std::string& name) { outputs_.push_back(name); }

  /// Writes manifest.json before any computation.
  void write_manifest() {
    fs::create_directories(dir_);
    json m;
    m["tool"] = kToolVersion;
    m["command"] = command_;
    m["args"] = args_;
    m["g"] = o_.g;
    m["l"] = o_.l;
    m["N"] = o_.n_max;
    m["tol"] = o_.tol;
    m["t_grid"] = o_.t_spec;
    m["x_grid"] = o_.x_spec;
    m["kernels"] = simd::active_kernels().name;
    m["outputs"] = outputs_;
    write_atomic(dir_ / "manifest.json", m.dump(2) + "\n");
  }

  void write(const std::string& name, const std::string& content) {
    write_atomic(dir_ / name, content);
    out_ << "wrote " << (dir_ / name).string() << '\n';
  }

  std::ostream& warn() { return err_ << "warning: "; }

 private:
  std::string command_;
  std::vector<std::string> args_;
  const Options& o_;
  std::ostream& out_;
  std::ostream& err_;
  fs::path dir_;
  std::vector<std::string> outputs_;
};

// ---------------------------------------------------------------- poles

void cmd_poles(Session& s, const Options& o) {
  require_positive_g(o.g);
  if (o.n_max < 1) throw DomainError("--n-max must be >= 1");
  s.add_output("poles.json");
  s.add_output("poles.csv");
  s.write_manifest();

  PoleSolverOptions opts;
  opts.tol = o.tol;
  const PoleTable table = pole_table(Coupling(o.g), o.n_max, opts);
  for (const auto& w : table.warnings()) s.warn() << w << '\n';

  json j = to_json(table);
  j["continuation_steps"] = table.continuation_steps();
  s.write("poles.json", j.dump(2) + "\n");

  std::ostringstream os;
  os << "n,re_k,im_k,omega,gamma,residual,seed_re,seed_im,omega_pert1,omega_pert2,gamma_pert2,gamma_pert3\n";
  for (const Pole& p : table.poles()) {
    const cplx seed = pole_seed(p.n, o.g);
    os << p.n << ',' << fmt_num(p.k.real()) << ',' << fmt_num(p.k.imag()) << ',' << fmt_num(p.omega()) << ','
       << fmt_num(p.gamma()) << ',' << fmt_num(p.residual) << ',' << fmt_num(seed.real()) << ','
       << fmt_num(seed.imag()) << ',' << fmt_num(freq_pert(p.n, o.g, 1)) << ',' << fmt_num(freq_pert(p.n, o.g, 2))
       << ',' << fmt_num(width_pert(p.n, o.g, 2)) << ',' << fmt_num(width_pert(p.n, o.g, 3)) << '\n';
  }
  s.write("poles.csv", os.str());
}

// ---------------------------------------------------------------- curves

struct CurveContext {
  int l;
  double g;
  Model model;
  const PoleTable& table;
  std::vector<double> x;
  double tol;
};

int offdiagonal_mode(int l, int requested) {
  if (requested > 0) {
    if (requested == l) throw DomainError("--offdiag must differ from --l");
    return requested;
  }
  return l == 1 ? 2 : 1;
}

WaveField field_of(Part part, std::vector<double> x, double t, std::vector<cplx> v) {
  return WaveField{std::move(x), t, std::move(v), part};
}

double power_norm(const CurveContext& c, double t) {
  PowerOptions po;
  return cavity_norm(field_of(Part::power, c.x, t, psi_power_field(c.l, c.x, t, Coupling(c.g), po).values));
}

double curve_value(const std::string& name, double t, const CurveContext& c, int offdiag) {
  if (name == "power") return power_norm(c, t);
  if (name == "exponential") return exponential_norm(c.l, t, c.model, c.table, c.x);
  if (name == "direct") {
    DirectOptions d;
    d.tol = c.tol;
    return cavity_norm(field_of(Part::total, c.x, t, psi_direct_field(c.l, c.x, t, Coupling(c.g), d).values));
  }
  if (name == "diagonal") return pole_term_norm(c.l, c.l, t, c.model, c.table);
  if (name == "offdiagonal") return pole_term_norm(c.l, offdiag, t, c.model, c.table);
  if (name.rfind("pole:", 0) == 0) {
    const int n = std::stoi(name.substr(5));
    return pole_term_norm(c.l, n, t, c.model, c.table);
  }
  throw DomainError("unknown curve '" + name + "' (power, exponential, direct, diagonal, offdiagonal, pole:<n>)");
}

// ---------------------------------------------------------------- evolve

void cmd_evolve(Session& s, const Options& o) {
  require_positive_g(o.g);
  if (o.l < 1) throw DomainError("--l must be >= 1");
  if (o.t_spec.empty()) throw DomainError("--t is required");
  const std::vector<double> t = parse_grid(o.t_spec);
  const std::vector<double> x = parse_grid(o.x_spec);
  const Model model = parse_model(o.model);
  if (o.format != "csv" && o.format != "json") throw DomainError("--format must be csv or json");

  std::vector<std::string> cols;
  if (o.parts == "total") {
    if (o.method == "all") cols = {"direct", "exponential", "power", "asymptotic"};
    else if (o.method == "direct" || o.method == "exponential" || o.method == "power" || o.method == "asymptotic")
      cols = {o.method};
    else throw DomainError("--method must be direct, exponential, power, asymptotic or all");
  } else if (o.parts == "split") {
    cols = {"exponential", "power"};
  } else if (o.parts == "fig3") {
    cols = {"diagonal_pole", "offdiagonal_pole", "power"};
  } else {
    throw DomainError("--parts must be total, split or fig3");
  }
  const bool fields = o.emit == "fields";
  if (!o.emit.empty() && !fields) throw DomainError("--emit for evolve must be 'fields'");
  if (fields && o.parts != "total") throw DomainError("--emit fields requires --parts total");

  const std::string main_name = o.format == "json" ? "evolve.json" : "evolve.csv";
  s.add_output(main_name);
  auto field_name = [](const std::string& col, std::size_t i) { return "field_" + col + "_" + std::to_string(i) + ".csv"; };
  if (fields)
    for (const auto& c : cols)
      for (std::size_t i = 0; i < t.size(); ++i) s.add_output(field_name(c, i));
  s.write_manifest();

  if (o.parts == "total" && (o.method == "exponential" || o.method == "all") && t.front() == 0.0)
    s.warn() << "the exponential part alone does not reproduce the t = 0 state (its mode sum converges like 1/n)\n";

  const bool power_at_zero = t.front() == 0.0 && x.back() == kPi &&
                             std::find(cols.begin(), cols.end(), "power") != cols.end();
  if (power_at_zero)
    s.warn() << "the power part diverges logarithmically at x = pi for t = 0; reported as nan\n";

  const PoleTable table = pole_table(Coupling(o.g), o.n_max);
  for (const auto& w : table.warnings()) s.warn() << w << '\n';
  const CurveContext ctx{o.l, o.g, model, table, x, o.tol};
  const int offdiag = offdiagonal_mode(o.l, o.offdiag);

  Table out;
  out.names = cols;
  out.rows.assign(t.size(), std::vector<double>(cols.size(), kNaN));
  std::vector<std::vector<WaveField>> saved(fields ? t.size() : 0);

  DirectOptions dopts;
  dopts.tol = o.tol;
  parallel_for(t.size(), [&](std::size_t i) {
    const double ti = t[i];
    auto& row = out.rows[i];
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const std::string& col = cols[c];
      if (o.parts == "total") {
        std::optional<WaveField> f;
        if (col == "direct") {
          if (ti > dopts.t_max) continue;
          f = field_of(Part::total, x, ti, psi_direct_field(o.l, x, ti, Coupling(o.g), dopts).values);
        } else if (col == "exponential") {
          f = field_of(Part::exponential, x, ti, psi_exponential_field(o.l, x, ti, table).values);
        } else if (col == "power") {
          if (ti == 0.0 && power_at_zero) continue;
          f = field_of(Part::power, x, ti, psi_power_field(o.l, x, ti, Coupling(o.g)).values);
        } else {
          if (!(ti > 0.0)) continue;
          std::vector<cplx> v(x.size());
          for (std::size_t j = 0; j < x.size(); ++j) v[j] = psi_power_asym(o.l, x[j], ti, Coupling(o.g));
          f = field_of(Part::power, x, ti, std::move(v));
        }
        row[c] = cavity_norm(*f);
        if (fields) saved[i].push_back(*f);
      } else if (col == "exponential") {
        row[c] = exponential_norm(o.l, ti, model, ctx.table, x);
      } else if (col == "power") {
        if (ti == 0.0 && power_at_zero) continue;
        row[c] = power_norm(ctx, ti);
      } else if (col == "diagonal_pole") {
        row[c] = pole_term_norm(o.l, o.l, ti, model, ctx.table);
      } else {
        row[c] = pole_term_norm(o.l, offdiag, ti, model, ctx.table);
      }
    }
  });

  s.write(main_name, o.format == "json" ? out.json_text(t) : out.csv(t));
  if (fields) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      std::size_t k = 0;
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const bool have = std::isfinite(out.rows[i][c]) && k < saved[i].size();
        s.write(field_name(cols[c], i), have ? field_csv(saved[i][k++]) : std::string("x,re,im\n"));
      }
    }
  }
}

// ---------------------------------------------------------------- mixing

std::string matrix_csv(const IndexMatrix& m) {
  std::ostringstream os;
  m.write_csv(os);
  return os.str();
}

void cmd_mixing(Session& s, const Options& o) {
  const double g = o.g;
  if (!std::isfinite(g) || g < 0.0) throw DomainError("--g must be a finite value >= 0");
  const int N = o.n_max;
  if (N < 2) throw DomainError("--n must be >= 2");
  const InverseMode mode = parse_inverse_mode(o.mode.empty() ? "numeric" : o.mode);
  const InverseMode rotation_mode = o.mode.empty() ? InverseMode::series : mode;
  if (o.format != "csv" && o.format != "json") throw DomainError("--format must be csv or json");

  std::vector<std::string> emit = split_list(o.emit);
  if (emit.empty() && o.rotate == 0) emit = {"U", "Uinv"};
  static const std::vector<std::string> known = {"A",  "H",  "AH", "A2", "A2closed", "V",    "V0",  "V1",
                                                 "V2", "Z1", "Z2", "U",  "Uexact",   "Uinv", "gap", "contamination"};
  for (const auto& e : emit)
    if (std::find(known.begin(), known.end(), e) == known.end()) throw DomainError("unknown --emit entry '" + e + "'");
  auto has = [&](const char* name) { return std::find(emit.begin(), emit.end(), name) != emit.end(); };
  const bool json_out = o.format == "json";

  std::vector<std::string> matrices;
  for (const auto& e : emit)
    if (e != "gap" && e != "contamination") matrices.push_back(e);
  if (!json_out)
    for (const auto& m : matrices) s.add_output(m + ".csv");
  if (o.rotate > 0) s.add_output("rotated_l" + std::to_string(o.rotate) + ".csv");
  if (has("contamination")) s.add_output("contamination.csv");
  s.add_output("mixing.json");
  s.write_manifest();

  const bool table_needed = has("V") || has("Uexact") || has("contamination") || mode == InverseMode::exact ||
                            (o.rotate > 0 && rotation_mode == InverseMode::exact);
  std::optional<PoleTable> table;
  if (table_needed) table = g > 0.0 ? pole_table(Coupling(g), N) : PoleTable::free_limit(N);

  json summary;
  summary["g"] = g;
  summary["N"] = N;
  summary["order"] = o.order;
  summary["mode"] = to_string(mode);
  summary["rotation_mode"] = to_string(rotation_mode);
  json blocks = json::object();

  auto emit_matrix = [&](const std::string& name, const IndexMatrix& m) {
    if (json_out) blocks[name] = m.to_json();
    else s.write(name + ".csv", matrix_csv(m));
  };

  for (const auto& name : matrices) {
    if (name == "A") emit_matrix(name, matrix_A(N));
    else if (name == "H") emit_matrix(name, matrix_H(N));
    else if (name == "AH") emit_matrix(name, matrix_AH(N));
    else if (name == "A2") emit_matrix(name, matrix_A_squared(N));
    else if (name == "A2closed") emit_matrix(name, matrix_A_squared_closed(N));
    else if (name == "V") emit_matrix(name, mixing_V_exact(*table));
    else if (name == "V0") emit_matrix(name, V_order(0, N));
    else if (name == "V1") emit_matrix(name, V_order(1, N));
    else if (name == "V2") emit_matrix(name, V_order(2, N));
    else if (name == "Z1") emit_matrix(name, Z_order(1, N));
    else if (name == "Z2") emit_matrix(name, Z_order(2, N));
    else if (name == "U") emit_matrix(name, U_truncated(g, N, o.order));
    else if (name == "Uexact") emit_matrix(name, U_exact(*table));
    else if (name == "Uinv") {
      const InverseResult inv = U_inverse(g, N, o.order, mode, table ? &*table : nullptr);
      summary["inverse"] = {{"residual", inv.residual}, {"condition", inv.condition}};
      emit_matrix(name, inv.inverse);
    }
  }

  if (has("gap")) {
    summary["exponentiation_gap"] = {{"N", 8},
                                     {"with_ah_subtracted", exponentiation_gap(g, 8, true)},
                                     {"without_ah_subtracted", exponentiation_gap(g, 8, false)}};
  }

  if (o.rotate > 0) {
    const RotatedState st = counter_rotate(o.rotate, g, N, o.order, rotation_mode, table ? &*table : nullptr);
    std::ostringstream os;
    st.write_csv(os);
    s.write("rotated_l" + std::to_string(o.rotate) + ".csv", os.str());
    // Closed-form check away from the Gibbs region near x = π.
    const std::vector<double> x = parse_grid("0:0.9*pi:91");
    const std::vector<cplx> phi = synthesize(st, x);
    double dev = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j)
      dev = std::max(dev, std::abs(phi[j] - counter_rotated_closed_form(o.rotate, g, x[j])));
    summary["rotate"] = {{"l", o.rotate}, {"closed_form_max_deviation", dev}, {"interval", {0.0, 0.9 * kPi}}};
  }

  if (has("contamination")) {
    if (o.t_spec.empty()) throw DomainError("--t is required for contamination");
    const std::vector<double> t = parse_grid(o.t_spec);
    const TimeSeries ts = diagonal_evolution_check(o.l, *table, t, o.order, rotation_mode);
    std::ostringstream os;
    ts.write_csv(os);
    s.write("contamination.csv", os.str());
  }

  if (json_out) summary["matrices"] = blocks;
  s.write("mixing.json", summary.dump(2) + "\n");
}

// ---------------------------------------------------------------- crossings

void cmd_crossings(Session& s, const Options& o) {
  require_positive_g(o.g);
  if (o.t_spec.empty()) throw DomainError("--t is required");
  const std::vector<double> t = parse_grid(o.t_spec);
  const std::vector<double> x = parse_grid(o.x_spec);
  const Model model = parse_model(o.model);
  const std::vector<std::string> curves = split_list(o.curves);
  if (curves.size() != 2) throw DomainError("--curves needs exactly two curve names");
  if (o.format != "csv" && o.format != "json") throw DomainError("--format must be csv or json");
  const std::string name = o.format == "json" ? "crossings.json" : "crossings.csv";
  s.add_output(name);
  s.write_manifest();

  if (!(t.front() > 0.0)) throw DomainError("crossing search grid must start at t > 0");

  const PoleTable table = pole_table(Coupling(o.g), o.n_max);
  for (const auto& w : table.warnings()) s.warn() << w << '\n';
  const CurveContext ctx{o.l, o.g, model, table, x, o.tol};
  const int offdiag = offdiagonal_mode(o.l, o.offdiag);
  auto diff = [&](double ti) {
    const double a = curve_value(curves[0], ti, ctx, offdiag);
    const double b = curve_value(curves[1], ti, ctx, offdiag);
    return std::log(std::max(a, 1e-300)) - std::log(std::max(b, 1e-300));
  };
  const std::vector<Crossing> found = find_crossings(diff, t, 1e-9);
  if (found.empty()) {
    std::ostringstream os;
    os << "no crossing of " << curves[0] << " and " << curves[1] << " on [" << t.front() << ", " << t.back() << "]";
    throw SearchError(os.str());
  }

  if (o.format == "json") {
    json list = json::array();
    for (const auto& c : found)
      list.push_back({{"t", c.t},
                      {"bracket", {c.lo, c.hi}},
                      {"direction", c.direction < 0 ? "first_drops_below" : "first_rises_above"}});
    json j{{"g", o.g}, {"l", o.l}, {"model", to_string(model)}, {"curves", curves}, {"crossings", list}};
    s.write(name, j.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << "t,t_lo,t_hi,direction\n";
    for (const auto& c : found) os << fmt_num(c.t) << ',' << fmt_num(c.lo) << ',' << fmt_num(c.hi) << ',' << c.direction << '\n';
    s.write(name, os.str());
  }
}

/// args without any --out / --out=DIR, as recorded in the manifest.
std::vector<std::string> strip_out(const std::vector<std::string>& args) {
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--out") {
      ++i;
      continue;
    }
    if (args[i].rfind("--out=", 0) == 0) continue;
    kept.push_back(args[i]);
  }
  return kept;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--g", o.g, "coupling g")->required();
  sub->add_option("--out", o.out, "output directory");
}

}  // namespace

std::vector<Crossing> find_crossings(const std::function<double(double)>& diff, std::span<const double> t_grid,
                                     double t_tol) {
  std::vector<Crossing> found;
  // Exact zeros carry no sign; brackets span from the last nonzero sample.
  double prev_t = 0.0;
  double prev = 0.0;
  for (const double cur_t : t_grid) {
    const double cur = diff(cur_t);
    if (!std::isfinite(cur) || cur == 0.0) continue;
    if (prev != 0.0 && (prev < 0.0) != (cur < 0.0)) {
      double lo = prev_t;
      double hi = cur_t;
      while (hi - lo > t_tol * std::max(1.0, std::abs(lo))) {
        const double mid = 0.5 * (lo + hi);
        const double fm = diff(mid);
        if (fm == 0.0) {
          lo = hi = mid;
        } else if ((fm < 0.0) == (prev < 0.0)) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      found.push_back({0.5 * (lo + hi), lo, hi, prev > 0.0 ? -1 : 1});
    }
    prev_t = cur_t;
    prev = cur;
  }
  return found;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Resonance dynamics of the delta-barrier cavity", "winter"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  // CLI11 writes default values at registration, so each subcommand binds its own Options.
  Options po, eo, mo, co, ro;
  std::string manifest_path;

  auto* poles = app.add_subcommand("poles", "complex poles k(n) of the resonances");
  add_common(poles, po);
  poles->add_option("--n-max,--n", po.n_max, "number of poles")->default_val(10);
  poles->add_option("--tol", po.tol, "Newton tolerance")->default_val(1e-12);

  auto* evolve = app.add_subcommand("evolve", "cavity norms of the evolving state");
  add_common(evolve, eo);
  evolve->add_option("--l", eo.l, "initial box mode")->default_val(1);
  evolve->add_option("--n-max,--n", eo.n_max, "poles in the residue sum")->default_val(64);
  evolve->add_option("--tol", eo.tol, "direct quadrature tolerance")->default_val(1e-7);
  evolve->add_option("--t", eo.t_spec, "time grid spec")->required();
  evolve->add_option("--x", eo.x_spec, "x grid spec inside [0, pi]")->default_val("0:pi:129");
  evolve->add_option("--method", eo.method, "direct|exponential|power|asymptotic|all")->default_val("all");
  evolve->add_option("--parts", eo.parts, "total|split|fig3")->default_val("total");
  evolve->add_option("--model", eo.model, "per-pole model for split/fig3: leading|exact")->default_val("leading");
  evolve->add_option("--emit", eo.emit, "'fields' to also write x,re,im per time");
  evolve->add_option("--offdiag", eo.offdiag, "pole index of the off-diagonal curve (default 1, or 2 when l=1)");
  evolve->add_option("--format", eo.format, "csv|json")->default_val("csv");

  auto* mixing = app.add_subcommand("mixing", "index-space matrices, counter-rotation, contamination");
  add_common(mixing, mo);
  mixing->add_option("--n-max,--n", mo.n_max, "truncation N")->default_val(64);
  mixing->add_option("--order", mo.order, "perturbative order 1|2")->default_val(2);
  mixing->add_option("--mode", mo.mode,
                     "U inverse: series|numeric|exact (default numeric for Uinv, series for --rotate and contamination)");
  mixing->add_option("--emit", mo.emit, "comma list: A,H,AH,A2,A2closed,V,V0,V1,V2,Z1,Z2,U,Uexact,Uinv,gap,contamination");
  mixing->add_option("--rotate", mo.rotate, "counter-rotate initial mode l");
  mixing->add_option("--l", mo.l, "mode for the contamination series")->default_val(1);
  mixing->add_option("--t", mo.t_spec, "time grid for the contamination series");
  mixing->add_option("--format", mo.format, "csv|json")->default_val("csv");

  auto* crossings = app.add_subcommand("crossings", "crossing times of two norm curves");
  add_common(crossings, co);
  crossings->add_option("--l", co.l, "initial box mode")->default_val(1);
  crossings->add_option("--n-max,--n", co.n_max, "poles / truncation")->default_val(64);
  crossings->add_option("--tol", co.tol, "direct quadrature tolerance")->default_val(1e-7);
  crossings->add_option("--t", co.t_spec, "search grid spec")->required();
  crossings->add_option("--x", co.x_spec, "x grid spec")->default_val("0:pi:129");
  crossings->add_option("--model", co.model, "leading|exact")->default_val("leading");
  crossings->add_option("--curves", co.curves, "two of power, exponential, direct, diagonal, offdiagonal, pole:<n>")
      ->default_val("exponential,power");
  crossings->add_option("--offdiag", co.offdiag, "pole index of the off-diagonal curve");
  crossings->add_option("--format", co.format, "json|csv")->default_val("json");

  auto* rerun = app.add_subcommand("rerun", "replay a run from its manifest.json");
  rerun->add_option("manifest", manifest_path, "path to manifest.json")->required();
  rerun->add_option("--out", ro.out, "output directory (default: the manifest's directory)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; every other parse failure is a usage error.
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    if (rerun->parsed()) {
      std::ifstream is(manifest_path);
      if (!is) throw DomainError("cannot read manifest " + manifest_path);
      const json m = json::parse(is);
      const std::string kernels = m.at("kernels").get<std::string>();
      if (!simd::select_kernels(kernels)) throw DomainError("manifest kernels '" + kernels + "' unavailable here");
      std::vector<std::string> replay = m.at("args").get<std::vector<std::string>>();
      const std::string dir = rerun->count("--out") ? ro.out : fs::path(manifest_path).parent_path().string();
      replay.push_back("--out");
      replay.push_back(dir.empty() ? "." : dir);
      return run(replay, out, err);
    }
    const std::vector<std::string> recorded = strip_out(args);
    for (auto* sub : {poles, evolve, mixing, crossings}) {
      if (!sub->parsed()) continue;
      const Options& o = sub == poles ? po : sub == evolve ? eo : sub == mixing ? mo : co;
      Session s(sub->get_name(), recorded, o, out, err);
      if (sub == poles) cmd_poles(s, o);
      else if (sub == evolve) cmd_evolve(s, o);
      else if (sub == mixing) cmd_mixing(s, o);
      else cmd_crossings(s, o);
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace winter::cli

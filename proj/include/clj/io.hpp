#pragma once

// JSON configuration and CSV/JSON artefacts.

#include "clj/cell.hpp"
#include "clj/chain.hpp"
#include "clj/continuum.hpp"
#include "clj/potentials.hpp"
#include "clj/solver.hpp"

#include "json.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace clj {

using json = nlohmann::json;

/// Malformed or inconsistent user input.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Parsing

namespace detail {
template <class T>
T get_or(const json &j, const char *key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception &e) {
    throw InputError(std::string("field '") + key + "': " + e.what());
  }
}
template <class T> T require(const json &j, const char *key) {
  if (!j.is_object() || !j.contains(key))
    throw InputError(std::string("missing field '") + key + "'");
  return get_or<T>(j, key, T{});
}
} // namespace detail

/// `{"builtin":"default"}` or
/// `{"family":"poly-log-sqrt","kappa":..,"kappa2":..,"beta1":..}`.
inline PotentialSet parse_model(const json &j) {
  if (!j.is_object()) throw InputError("model must be a JSON object");
  if (j.contains("builtin")) {
    const auto name = detail::require<std::string>(j, "builtin");
    if (name == "default") return default_model();
    throw InputError("unknown builtin model '" + name + "'");
  }
  const auto family = detail::require<std::string>(j, "family");
  if (family != "poly-log-sqrt")
    throw InputError("unknown model family '" + family + "'");
  const double kappa = detail::require<double>(j, "kappa");
  const double kappa2 = detail::require<double>(j, "kappa2");
  const double beta1 = detail::require<double>(j, "beta1");
  if (!(beta1 > 0.0)) throw InputError("beta1 must be positive");
  return poly_log_sqrt(kappa, kappa2, beta1);
}

inline ForceField parse_force(const json &j) {
  if (j.is_null()) return ForceField::zero();
  if (!j.is_object()) throw InputError("force must be a JSON object");
  const auto kind = detail::get_or<std::string>(j, "kind", "zero");
  const double a = detail::get_or<double>(j, "amplitude", 0.0);
  if (!std::isfinite(a)) throw InputError("force amplitude must be finite");
  if (kind == "zero") return ForceField::zero();
  if (kind == "sin") return ForceField::sine(a);
  if (kind == "const") return ForceField::constant(a);
  throw InputError("unknown force kind '" + kind + "'");
}

struct ExperimentSpec {
  PotentialSet model;
  int N = 64;
  double L = 1.0;
  ForceField force;
  std::vector<int> sweep;
  int R = 64;
  double tol = 1e-11;
  StrainGrid grid;
  double mismatch_scale = 0.01;

  [[nodiscard]] ChainConfig chain(int n) const {
    return ChainConfig(model, n, L, force);
  }
  [[nodiscard]] ChainConfig chain() const { return chain(N); }
};

inline ExperimentSpec parse_spec(const json &j) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  ExperimentSpec s;
  s.model = parse_model(j.contains("model") ? j.at("model")
                                            : json{{"builtin", "default"}});
  const json chain = j.value("chain", json::object());
  s.N = detail::get_or<int>(chain, "N", s.N);
  s.L = detail::get_or<double>(chain, "L", s.L);
  s.force = parse_force(chain.value("force", json()));
  if (s.N < 2) throw InputError("chain.N must be >= 2");
  if (!(s.L > 0.0)) throw InputError("chain.L must be positive");
  s.sweep = detail::get_or<std::vector<int>>(j, "sweep", {});
  for (std::size_t k = 0; k < s.sweep.size(); ++k) {
    if (s.sweep[k] < 2) throw InputError("sweep entries must be >= 2");
    if (k > 0 && s.sweep[k] <= s.sweep[k - 1])
      throw InputError("sweep N values must be strictly increasing");
  }
  const json cell = j.value("cell", json::object());
  s.R = detail::get_or<int>(cell, "R", s.R);
  if (s.R < 8) throw InputError("cell.R must be >= 8");
  s.tol = detail::get_or<double>(j, "tol", s.tol);
  if (!(s.tol > 0.0)) throw InputError("tol must be positive");
  const json grid = j.value("grid", json::object());
  s.grid.t_min = detail::get_or<double>(grid, "t_min", s.grid.t_min);
  s.grid.t_max = detail::get_or<double>(grid, "t_max", s.grid.t_max);
  s.grid.points = detail::get_or<std::size_t>(grid, "points", s.grid.points);
  s.grid.log_spaced = detail::get_or<bool>(grid, "log_spaced", s.grid.log_spaced);
  if (!(s.grid.t_min > 0.0) || !(s.grid.t_max > s.grid.t_min) ||
      s.grid.points < 3)
    throw InputError("grid needs 0 < t_min < t_max and points >= 3");
  const json decay = j.value("decay", json::object());
  s.mismatch_scale =
      detail::get_or<double>(decay, "mismatch_scale", s.mismatch_scale);
  return s;
}

inline ExperimentSpec load_spec(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error &e) {
    throw InputError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_spec(j);
}

// ---------------------------------------------------------------------------
// JSON summaries

inline json to_json(const CertifiedConstants &c) {
  return {{"l", c.l_convexity},   {"alpha", c.alpha},
          {"C", c.C},             {"kappa", c.kappa},
          {"l_coercivity", c.l_coercivity},
          {"C_coercivity", c.C_coercivity}};
}

inline json to_json(const ValidationReport &r) {
  json checks = json::array();
  std::optional<double> first_witness;
  std::string failed;
  for (const auto &c : r.checks) {
    checks.push_back({{"assumption", c.assumption},
                      {"pass", c.pass},
                      {"witness_t", c.witness_t ? json(*c.witness_t) : json()},
                      {"detail", c.detail}});
    if (!c.pass && failed.empty()) {
      failed = c.assumption;
      first_witness = c.witness_t;
    }
  }
  return {{"assumption", failed.empty() ? "all" : failed},
          {"pass", r.all_pass()},
          {"witness_t", first_witness ? json(*first_witness) : json()},
          {"constants", to_json(r.constants)},
          {"checks", checks}};
}

inline json to_json(const ContinuumSolution &c) {
  return {{"Sigma", c.Sigma()},
          {"F0_value", c.F0_value()},
          {"F0_strain", c.F0_strain()},
          {"residual", c.residual()}};
}

inline json to_json(const SolveResult &r, double F1) {
  return {{"converged", r.converged}, {"iterations", r.iterations},
          {"residual", r.residual},   {"multiplier", r.multiplier},
          {"energy", r.energy},       {"F1", F1}};
}

inline json to_json(const CellSolution &s) {
  return {{"R", s.R},
          {"energy", s.energy},
          {"el_residual", s.el_residual},
          {"lambda_bound", s.lambda_bound},
          {"lambda_linear", s.lambda_linear},
          {"tail_ratio", s.tail_ratio},
          {"lambda_linearized", s.lambda_linearized},
          {"F0_strain", s.F0},
          {"boundary_residual", s.boundary_residual},
          {"grow_window", s.grow_window},
          {"positive_definite", s.positive_definite},
          {"iterations", s.iterations}};
}

inline json to_json(const TailReport &t) {
  return {{"anchor_index", t.anchor_index},
          {"anchor", t.anchor},
          {"C", t.C},
          {"lambda", t.lambda},
          {"monotone", t.monotone},
          {"monotone_violation",
           t.monotone_violation ? json(*t.monotone_violation) : json()},
          {"bound", t.bound},
          {"bound_violation",
           t.bound_violation ? json(*t.bound_violation) : json()},
          {"tail_ratio", t.tail_ratio},
          {"pass", t.pass()}};
}

inline void write_json(const std::string &path, const json &j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << std::setprecision(17) << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// CSV

/// Writes rows of numbers at 17 significant digits.
class CsvWriter {
public:
  CsvWriter(const std::string &path, const std::vector<std::string> &header)
      : out_(path), columns_(header.size()) {
    if (!out_) throw std::runtime_error("cannot write '" + path + "'");
    out_ << std::setprecision(17);
    for (std::size_t k = 0; k < header.size(); ++k)
      out_ << (k ? "," : "") << header[k];
    out_ << '\n';
  }
  void row(const std::vector<double> &values) {
    if (values.size() != columns_)
      throw std::logic_error("CSV row width does not match header");
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (k) out_ << ',';
      format(values[k]);
    }
    out_ << '\n';
  }

private:
  void format(double v) {
    if (std::isnan(v)) out_ << "nan";
    else if (std::isinf(v)) out_ << (v > 0 ? "inf" : "-inf");
    else if (v == std::floor(v) && std::abs(v) < 1e15)
      out_ << static_cast<long long>(v);
    else out_ << v;
  }
  std::ofstream out_;
  std::size_t columns_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  [[nodiscard]] std::size_t column(const std::string &name) const {
    for (std::size_t k = 0; k < header.size(); ++k)
      if (header[k] == name) return k;
    throw std::out_of_range("no CSV column '" + name + "'");
  }
};

inline double parse_number(const std::string &s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InputError("bad CSV number '" + s + "'");
  return v;
}

inline CsvTable read_csv(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open CSV '" + path + "'");
  CsvTable t;
  std::string line, cell;
  if (!std::getline(in, line)) throw InputError("empty CSV '" + path + "'");
  std::stringstream hs(line);
  while (std::getline(hs, cell, ',')) t.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(parse_number(cell));
    if (row.size() != t.header.size())
      throw InputError("ragged CSV row in '" + path + "'");
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline void write_deformation_csv(const std::string &path,
                                  const ChainConfig &cfg,
                                  const Deformation &y) {
  CsvWriter w(path, {"i", "x_i", "gap", "y", "u"});
  for (int i = -cfg.N; i < cfg.N; ++i)
    w.row({double(i), cfg.x(i), y.gap(i), y.y(i), y.u(i)});
}

/// Rebuilds a deformation from the gap column of a deformation CSV.
inline Deformation read_deformation_csv(const std::string &path,
                                        const ChainConfig &cfg) {
  const CsvTable t = read_csv(path);
  const std::size_t c = t.column("gap");
  if (t.rows.size() != static_cast<std::size_t>(2 * cfg.N))
    throw InputError("deformation CSV has wrong number of rows");
  std::vector<double> g;
  g.reserve(t.rows.size());
  for (const auto &r : t.rows) g.push_back(r[c]);
  return Deformation(cfg.N, cfg.L, std::move(g));
}

inline void write_continuum_csv(const std::string &path,
                                const ContinuumSolution &c) {
  CsvWriter w(path, {"x", "sigma", "Dybar", "ybar"});
  const auto x = c.sample_x(), s = c.sample_sigma(), d = c.sample_strain(),
             y = c.sample_ybar();
  for (std::size_t k = 0; k < x.size(); ++k) w.row({x[k], s[k], d[k], y[k]});
}

inline void write_cell_csv(const std::string &path, const CellSolution &sol,
                           const PotentialSet &p) {
  const ShiftedSet s = shifted_potentials(p, sol.F0);
  const auto el = el_residuals(s, sol.r);
  CsvWriter w(path, {"i", "r_i", "el_residual_i"});
  for (int i = -sol.R; i <= sol.R; ++i)
    w.row({double(i), sol.at(i), el[i + sol.R]});
}

/// Reads r_{-R..R} back from a cell CSV.
inline std::vector<double> read_cell_csv(const std::string &path) {
  const CsvTable t = read_csv(path);
  const std::size_t c = t.column("r_i");
  std::vector<double> r;
  for (const auto &row : t.rows) r.push_back(row[c]);
  return r;
}

} // namespace clj

#pragma once

// Batch experiments behind the command-line front end. Each cmd_* writes its
// artefacts into an output directory and returns a process exit code.

#include "clj/cell.hpp"
#include "clj/continuum.hpp"
#include "clj/discrete.hpp"
#include "clj/io.hpp"
#include "clj/potentials.hpp"
#include "clj/solver.hpp"

#include <cmath>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace clj {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,     // assumption or criterion failure
  kExitInput = 2,       // malformed input
  kExitNoConverge = 3,  // solver non-convergence
};

// ---------------------------------------------------------------------------
// Gamma-expansion sweep

struct GammaRow {
  int N = 0;
  double eps = 0.0;
  double F_eps_min = 0.0;
  double F0 = 0.0;
  double first_order_est = 0.0;
  double cell_energy = 0.0;
  double gap0 = 0.0;
  double gap1 = 0.0;
  // Recovery deformation and strain error at the same N.
  double F_eps_recovery = 0.0;
  double F1_recovery = 0.0;
  double recovery_gap = 0.0; // F1(recovery) - min E~inf
  double recovery_length_defect = 0.0;
  double strain_error_sq = 0.0; // ||Dy_min - Dybar||^2
  int iterations = 0;
  double residual = 0.0;
};

struct GammaScan {
  std::vector<GammaRow> rows;
  CellSolution cell;
};

/// Runs continuum, cell, discrete and recovery computations for every N.
/// Throws ConvergenceError (with the failing N) if a solve does not converge.
inline GammaScan gamma_scan(const ExperimentSpec &spec) {
  std::vector<int> Ns = spec.sweep.empty() ? std::vector<int>{spec.N} : spec.sweep;
  GammaScan scan;
  bool have_cell = false;
  for (int N : Ns) {
    const ChainConfig cfg = spec.chain(N);
    const ContinuumSolution cont = solve_continuum(cfg);
    if (!have_cell) {
      CellOptions co;
      co.tol = spec.tol;
      scan.cell = minimize_cell(spec.model, cont.F0_strain(), spec.R, co);
      have_cell = true;
    }
    SolveOptions so;
    so.tol = spec.tol;
    so.continuum = &cont;
    const SolveResult res = minimize_discrete(cfg, so);
    if (!res.converged)
      throw ConvergenceError("discrete solve did not converge at N = " +
                             std::to_string(N) + " (residual " +
                             std::to_string(res.residual) + ")");
    GammaRow row;
    row.N = N;
    row.eps = cfg.epsilon();
    row.F_eps_min = res.energy;
    row.F0 = cont.F0_value();
    row.first_order_est = (res.energy - cont.F0_value()) / cfg.epsilon();
    row.cell_energy = scan.cell.energy;
    row.gap0 = std::abs(res.energy - cont.F0_value());
    row.gap1 = std::abs(row.first_order_est - scan.cell.energy);
    const Deformation rec = build_recovery(cfg, cont, scan.cell);
    row.F_eps_recovery = F_eps(cfg, rec);
    row.F1_recovery = F1_eps(cfg, rec, cont);
    row.recovery_gap = row.F1_recovery - scan.cell.energy;
    row.recovery_length_defect = rec.length_defect();
    row.strain_error_sq = strain_error_sq(cfg, res.y, cont);
    row.iterations = res.iterations;
    row.residual = res.residual;
    scan.rows.push_back(row);
  }
  return scan;
}

/// True when v is non-increasing along the sweep up to `floor`.
inline bool decreasing(const std::vector<double> &v, double floor = 1e-9) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] > v[k - 1] + floor) return false;
  return true;
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double> &x,
                           const std::vector<double> &y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("slope needs >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = std::log(x[k]), b = std::log(y[k]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------
// Decay experiment

struct DecayExperiment {
  CellSolution cell;
  DecayReport report;
  CellSolution scaled_cell; // defect mismatch scaled by spec.mismatch_scale
  DecayReport scaled_report;
  LinearRate printed;    // roots of the stated quadratic ansatz
  LinearRate linearized; // roots of the linearised bulk recurrence
};

inline DecayExperiment decay_experiment(const ExperimentSpec &spec) {
  const ContinuumSolution cont = solve_continuum(spec.chain());
  const double F0 = cont.F0_strain();
  CellOptions co;
  co.tol = spec.tol;
  DecayExperiment d;
  d.cell = minimize_cell(spec.model, F0, spec.R, co);
  d.report = decay_check(d.cell, spec.model);
  const PotentialSet weak = scale_defect(spec.model, spec.mismatch_scale);
  d.scaled_cell = minimize_cell(weak, F0, spec.R, co);
  d.scaled_report = decay_check(d.scaled_cell, weak);
  d.printed = linear_rate(spec.model, F0);
  d.linearized = linearized_decay_rate(spec.model, F0);
  return d;
}

// ---------------------------------------------------------------------------
// Commands

namespace detail {
inline std::string out_path(const std::string &dir, const std::string &name) {
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}
} // namespace detail

inline int cmd_validate(const ExperimentSpec &spec, const std::string &out,
                        std::ostream &log) {
  const ValidationReport rep = validate_assumptions(spec.model, spec.grid);
  write_json(detail::out_path(out, "validation.json"), to_json(rep));
  for (const auto &c : rep.checks) {
    log << (c.pass ? "pass " : "FAIL ") << c.assumption;
    if (!c.pass && c.witness_t) log << " witness_t=" << *c.witness_t;
    if (!c.pass && !c.detail.empty()) log << " (" << c.detail << ")";
    log << '\n';
  }
  return rep.all_pass() ? kExitOk : kExitFailure;
}

inline int cmd_continuum(const ExperimentSpec &spec, const std::string &out,
                         std::ostream &log) {
  const ContinuumSolution c = solve_continuum(spec.chain());
  write_continuum_csv(detail::out_path(out, "continuum.csv"), c);
  write_json(detail::out_path(out, "continuum.json"), to_json(c));
  log << "Sigma=" << c.Sigma() << " F0=" << c.F0_value()
      << " F0_strain=" << c.F0_strain() << '\n';
  return kExitOk;
}

inline int cmd_discrete(const ExperimentSpec &spec, const std::string &out,
                        std::ostream &log) {
  const ChainConfig cfg = spec.chain();
  const ContinuumSolution cont = solve_continuum(cfg);
  SolveOptions so;
  so.tol = spec.tol;
  so.continuum = &cont;
  const SolveResult res = minimize_discrete(cfg, so);
  const double F1 = F1_eps(cfg, res.y, cont);
  write_deformation_csv(detail::out_path(out, "deformation.csv"), cfg, res.y);
  write_json(detail::out_path(out, "solve.json"), to_json(res, F1));
  log << "converged=" << res.converged << " iterations=" << res.iterations
      << " residual=" << res.residual << " F1=" << F1 << '\n';
  return res.converged ? kExitOk : kExitNoConverge;
}

inline int cmd_cell(const ExperimentSpec &spec, const std::string &out,
                    std::ostream &log) {
  const ContinuumSolution cont = solve_continuum(spec.chain());
  CellOptions co;
  co.tol = spec.tol;
  const CellSolution sol = minimize_cell(spec.model, cont.F0_strain(), spec.R, co);
  write_cell_csv(detail::out_path(out, "cell.csv"), sol, spec.model);
  write_json(detail::out_path(out, "cell.json"), to_json(sol));
  log << "energy=" << sol.energy << " el_residual=" << sol.el_residual << '\n';
  if (sol.grow_window)
    log << "warning: boundary residual " << sol.boundary_residual
        << " exceeds 10*tol; increase cell.R\n";
  return kExitOk;
}

inline int cmd_gamma_scan(const ExperimentSpec &spec, const std::string &out,
                          std::ostream &log) {
  const GammaScan scan = gamma_scan(spec);
  CsvWriter w(detail::out_path(out, "gamma_scan.csv"),
              {"N", "eps", "F_eps_min", "F0", "first_order_est", "cell_energy",
               "gap0", "gap1"});
  CsvWriter r(detail::out_path(out, "recovery_scan.csv"),
              {"N", "eps", "F_eps_recovery", "F1_recovery", "cell_energy",
               "recovery_gap", "length_defect", "strain_error_sq"});
  std::vector<double> g0, g1;
  for (const auto &row : scan.rows) {
    w.row({double(row.N), row.eps, row.F_eps_min, row.F0, row.first_order_est,
           row.cell_energy, row.gap0, row.gap1});
    r.row({double(row.N), row.eps, row.F_eps_recovery, row.F1_recovery,
           row.cell_energy, row.recovery_gap, row.recovery_length_defect,
           row.strain_error_sq});
    g0.push_back(row.gap0);
    g1.push_back(row.gap1);
  }
  const bool ok = decreasing(g0) && decreasing(g1);
  log << "gap columns " << (ok ? "decrease" : "do NOT decrease")
      << " along the sweep\n";
  return ok ? kExitOk : kExitFailure;
}

inline int cmd_decay(const ExperimentSpec &spec, const std::string &out,
                     std::ostream &log) {
  const DecayExperiment d = decay_experiment(spec);
  CsvWriter w(detail::out_path(out, "decay_profile.csv"),
              {"i", "r_i", "r_i_scaled"});
  for (int i = -spec.R; i <= spec.R; ++i)
    w.row({double(i), d.cell.at(i), d.scaled_cell.at(i)});
  json j = {
      {"tail_ratio", d.report.right.tail_ratio},
      {"lambda_bound", d.report.right.lambda},
      {"lambda_linear", d.printed.lambda_minus},
      {"lambda_linear_plus", d.printed.lambda_plus},
      {"lambda_linearized", d.linearized.lambda_minus},
      {"right", to_json(d.report.right)},
      {"left", to_json(d.report.left)},
      {"scaled",
       {{"mismatch_scale", spec.mismatch_scale},
        {"tail_ratio", d.scaled_report.right.tail_ratio},
        {"relative_to_lambda_linear",
         d.scaled_report.right.tail_ratio / d.printed.lambda_minus - 1.0},
        {"relative_to_lambda_linearized",
         d.scaled_report.right.tail_ratio / d.linearized.lambda_minus - 1.0}}},
      {"pass", d.report.pass()}};
  write_json(detail::out_path(out, "decay.json"), j);
  log << "tail_ratio=" << d.report.right.tail_ratio
      << " lambda_bound=" << d.report.right.lambda
      << " lambda_linear=" << d.printed.lambda_minus
      << " lambda_linearized=" << d.linearized.lambda_minus << '\n';
  return d.report.pass() ? kExitOk : kExitFailure;
}

} // namespace clj

#pragma once

// Length-constrained Newton minimiser for F^eps in gap coordinates.
// Each step solves the bordered system
//   [ H      eps 1 ] [ d  ]   [ -(grad - mu eps 1) ]
//   [ eps 1^T  0   ] [-dmu] = [ L - eps sum g      ]
// through two cyclic tridiagonal solves.

#include "clj/cell.hpp"
#include "clj/chain.hpp"
#include "clj/continuum.hpp"
#include "clj/discrete.hpp"
#include "clj/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace clj {

struct SolveOptions {
  enum class Init { uniform, continuum, recovery };

  double tol = 1e-11;
  int max_iter = 200;
  Init init = Init::continuum;
  /// Reused when set; otherwise solved on demand for the chosen init.
  const ContinuumSolution *continuum = nullptr;
  const CellSolution *cell = nullptr;
  int cell_window = 64;
};

struct SolveResult {
  Deformation y;
  double multiplier = 0.0;
  double residual = kInf;
  double energy = kInf; // F^eps(y)
  int iterations = 0;
  bool converged = false;
};

/// max_j |dF/dg_j - mu eps| + |eps sum g - L|.
inline double kkt_residual(const ChainConfig &cfg, const Deformation &y,
                           double multiplier) {
  const auto g = gradient(cfg, y);
  const double eps = cfg.epsilon();
  double m = 0.0;
  for (double v : g) m = std::max(m, std::abs(v - multiplier * eps));
  return m + std::abs(y.length_defect());
}

/// Least-squares multiplier for the gradient: sum(grad) / (2N eps).
inline double least_squares_multiplier(const ChainConfig &cfg,
                                       std::span<const double> grad) {
  return compensated_sum(grad) / (2.0 * cfg.N * cfg.epsilon());
}

namespace detail {

/// Shifts all gaps uniformly so that eps sum g = L.
inline std::vector<double> project_length(const ChainConfig &cfg,
                                          std::vector<double> g) {
  const double c = (cfg.L / cfg.epsilon() - compensated_sum(g)) / (2.0 * cfg.N);
  for (double &v : g) v += c;
  return g;
}

inline std::vector<double> initial_gaps(const ChainConfig &cfg,
                                        const SolveOptions &opts) {
  using Init = SolveOptions::Init;
  if (opts.init == Init::uniform) return std::vector<double>(2 * cfg.N, cfg.L);
  std::optional<ContinuumSolution> own;
  const ContinuumSolution *cont = opts.continuum;
  if (cont == nullptr) cont = &own.emplace(solve_continuum(cfg));
  if (opts.init == Init::continuum) {
    std::vector<double> g(2 * cfg.N);
    for (int i = -cfg.N; i < cfg.N; ++i) g[i + cfg.N] = cont->cell_average(i);
    return g;
  }
  std::optional<CellSolution> own_cell;
  const CellSolution *cell = opts.cell;
  if (cell == nullptr)
    cell = &own_cell.emplace(
        minimize_cell(cfg.model, cont->F0_strain(), opts.cell_window));
  const Deformation rec = build_recovery(cfg, *cont, *cell);
  return {rec.gaps().begin(), rec.gaps().end()};
}

} // namespace detail

/// Minimises F^eps subject to eps sum g = L. Deterministic given inputs;
/// non-convergence is reported in the result, not thrown.
inline SolveResult minimize_discrete(const ChainConfig &cfg,
                                     const SolveOptions &opts = {}) {
  if (!(opts.tol > 0.0) || opts.max_iter < 1)
    throw std::invalid_argument("solve options need tol > 0 and max_iter >= 1");
  const int n = 2 * cfg.N;
  const double eps = cfg.epsilon();
  std::vector<double> g = detail::project_length(cfg, detail::initial_gaps(cfg, opts));
  if (!Deformation(cfg.N, cfg.L, g).admissible())
    g = std::vector<double>(n, cfg.L);

  SolveResult res;
  Deformation y(cfg.N, cfg.L, g);
  double F = F_eps_assembled(cfg, y);
  std::vector<double> grad = gradient(cfg, y);
  double mu = least_squares_multiplier(cfg, grad);
  double kkt = kkt_residual(cfg, y, mu);
  int iter = 0;
  while (kkt > opts.tol && iter < opts.max_iter) {
    ++iter;
    const CyclicTridiagonal H = hessian(cfg, y);
    std::vector<double> rneg(n), ones(n, eps);
    for (int k = 0; k < n; ++k) rneg[k] = -(grad[k] - mu * eps);
    const std::vector<double> a = H.solve(rneg);
    const std::vector<double> b = H.solve(ones);
    const double c = -y.length_defect();
    const double dmu = (c - eps * compensated_sum(a)) / (eps * compensated_sum(b));
    std::vector<double> d(n);
    for (int k = 0; k < n; ++k) d[k] = a[k] + dmu * b[k];
    double slope = detail::dot(grad, d);
    if (!(slope < 0.0) || !std::isfinite(slope)) {
      // Projected steepest descent on the constraint tangent space.
      const double mean = compensated_sum(grad) / n;
      for (int k = 0; k < n; ++k) d[k] = -(grad[k] - mean) / eps;
      slope = detail::dot(grad, d);
    }
    double step = detail::fraction_to_boundary(g, d, 0.0);
    std::vector<double> trial(n);
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt, step *= 0.5) {
      for (int k = 0; k < n; ++k) trial[k] = g[k] + step * d[k];
      trial = detail::project_length(cfg, std::move(trial));
      const Deformation yt(cfg.N, cfg.L, trial);
      const double Ft = F_eps_assembled(cfg, yt);
      if (!std::isfinite(Ft)) continue;
      const bool armijo = Ft <= F + 1e-4 * step * slope;
      bool flat = false;
      if (!armijo &&
          std::abs(Ft - F) <= 1e-14 * std::max(1.0, std::abs(F))) {
        const auto gt = gradient(cfg, yt);
        flat = kkt_residual(cfg, yt, least_squares_multiplier(cfg, gt)) < kkt;
      }
      if (armijo || flat) {
        accepted = true;
        F = Ft;
        break;
      }
    }
    if (!accepted) break;
    g = trial;
    y = Deformation(cfg.N, cfg.L, g);
    grad = gradient(cfg, y);
    mu = least_squares_multiplier(cfg, grad);
    kkt = kkt_residual(cfg, y, mu);
  }
  res.y = y;
  res.multiplier = mu;
  res.residual = kkt;
  res.energy = F_eps(cfg, y);
  res.iterations = iter;
  res.converged = kkt <= opts.tol && y.admissible();
  return res;
}

} // namespace clj

#pragma once

// Discrete chain energies in gap coordinates: pure, defect and force parts,
// the scaled energy F^eps = eps E^eps, its derivatives, and the first-order
// functional F1^eps with its cell decomposition.

#include "clj/chain.hpp"
#include "clj/continuum.hpp"
#include "clj/numerics.hpp"
#include "clj/potentials.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace clj {

// Bond k (second neighbour) joins gaps k and k+1. The defect atom 0 changes
// the nearest bonds on gaps -1, 0 and the second bonds k = -2, 0.
inline bool is_defect_gap(int j) { return j == -1 || j == 0; }
inline bool is_defect_bond(int k) { return k == -2 || k == 0; }

inline const PairPotential &near_potential(const PotentialSet &p, int j) {
  return is_defect_gap(j) ? p.psi1 : p.phi1;
}
inline const PairPotential &bond_potential(const PotentialSet &p, int k) {
  return is_defect_bond(k) ? p.psi2 : p.phi2;
}

namespace detail {
inline void require_match(const ChainConfig &cfg, const Deformation &y) {
  if (cfg.N != y.N() || cfg.L != y.L())
    throw std::invalid_argument("deformation does not match chain config");
}
} // namespace detail

/// E_p = sum_i phi1(D1 y_i) + phi2(D2 y_i), periodic.
inline double energy_pure(const ChainConfig &cfg, const Deformation &y) {
  detail::require_match(cfg, y);
  if (!y.admissible()) return kInf;
  CompensatedSum s;
  for (int i = -cfg.N; i < cfg.N; ++i) {
    s.add(cfg.model.phi1(y.gap(i)));
    s.add(cfg.model.phi2(y.second_difference(i)));
  }
  return s.value();
}

/// E_d: psi - phi corrections on the four bonds incident to atom 0.
inline double energy_defect(const ChainConfig &cfg, const Deformation &y) {
  detail::require_match(cfg, y);
  if (!y.admissible()) return kInf;
  const PotentialSet &p = cfg.model;
  const double a = y.second_difference(-2), b = y.gap(-1), c = y.gap(0),
               d = y.second_difference(0);
  CompensatedSum s;
  s += p.psi2(a) - p.phi2(a);
  s += p.psi1(b) - p.phi1(b);
  s += p.psi1(c) - p.phi1(c);
  s += p.psi2(d) - p.phi2(d);
  return s.value();
}

/// E_f = sum_i f_i u_i.
inline double energy_force(const ChainConfig &cfg, const Deformation &y) {
  detail::require_match(cfg, y);
  if (!y.admissible()) return kInf;
  CompensatedSum s;
  for (int i = -cfg.N; i < cfg.N; ++i) s += cfg.f(i) * y.u(i);
  return s.value();
}

inline double energy_total(const ChainConfig &cfg, const Deformation &y) {
  if (!y.admissible()) return kInf;
  return energy_pure(cfg, y) + energy_defect(cfg, y) + energy_force(cfg, y);
}

/// F^eps = eps E^eps, +inf for non-admissible y.
inline double F_eps(const ChainConfig &cfg, const Deformation &y) {
  const double e = energy_total(cfg, y);
  return std::isfinite(e) ? cfg.epsilon() * e : kInf;
}

/// F^eps assembled bond by bond (defect bonds evaluated with psi directly).
/// Equal to F_eps up to rounding; used by the solver's line search.
inline double F_eps_assembled(const ChainConfig &cfg, const Deformation &y) {
  detail::require_match(cfg, y);
  if (!y.admissible()) return kInf;
  const SigmaField sig(cfg);
  CompensatedSum s;
  for (int j = -cfg.N; j < cfg.N; ++j) {
    s += near_potential(cfg.model, j)(y.gap(j));
    s += bond_potential(cfg.model, j)(y.second_difference(j));
    s += -sig.on_cell(j) * y.du(j);
  }
  return cfg.epsilon() * s.value();
}

/// dF^eps / dg_j for j = -N..N-1 (slot j + N).
///
/// The force part uses dE_f/dg_j = sigma_N - sigma_{j+1}.
inline std::vector<double> gradient(const ChainConfig &cfg,
                                    const Deformation &y) {
  detail::require_match(cfg, y);
  if (!y.admissible())
    throw std::domain_error("gradient requested at a non-admissible state");
  const PotentialSet &p = cfg.model;
  const SigmaField sig(cfg);
  const double eps = cfg.epsilon(), sN = sig.at(cfg.N);
  std::vector<double> g(2 * cfg.N);
  for (int j = -cfg.N; j < cfg.N; ++j) {
    const double v = near_potential(p, j).d1(y.gap(j)) +
                     0.5 * bond_potential(p, cfg.wrap(j - 1))
                               .d1(y.second_difference(j - 1)) +
                     0.5 * bond_potential(p, j).d1(y.second_difference(j)) +
                     sN - sig.at(j + 1);
    g[j + cfg.N] = eps * v;
  }
  return g;
}

/// Hessian of F^eps in gap coordinates: cyclic tridiagonal.
inline CyclicTridiagonal hessian(const ChainConfig &cfg, const Deformation &y) {
  detail::require_match(cfg, y);
  if (!y.admissible())
    throw std::domain_error("hessian requested at a non-admissible state");
  const PotentialSet &p = cfg.model;
  const double eps = cfg.epsilon();
  const int n = 2 * cfg.N;
  std::vector<double> bond2(n);
  for (int k = -cfg.N; k < cfg.N; ++k)
    bond2[k + cfg.N] = bond_potential(p, k).d2(y.second_difference(k));
  CyclicTridiagonal H;
  H.diag.resize(n);
  H.off.resize(n);
  for (int j = -cfg.N; j < cfg.N; ++j) {
    const int s = j + cfg.N, sm = (s + n - 1) % n;
    H.diag[s] = eps * (near_potential(p, j).d2(y.gap(j)) +
                       0.25 * bond2[sm] + 0.25 * bond2[s]);
    H.off[s] = eps * 0.25 * bond2[s];
  }
  return H;
}

/// Shifted defect energy E~_d(r) with r_i = D1 y_i - F0 on indices -2..1.
inline double defect_energy_shifted(const PotentialSet &p, double F0,
                                    double rm2, double rm1, double r0,
                                    double r1) {
  const double a = F0 + 0.5 * (rm2 + rm1), b = F0 + rm1, c = F0 + r0,
               d = F0 + 0.5 * (r0 + r1);
  if (!(a > 0.0 && b > 0.0 && c > 0.0 && d > 0.0)) return kInf;
  CompensatedSum s;
  s += p.psi2(a) - p.phi2(a);
  s += p.psi1(b) - p.phi1(b);
  s += p.psi1(c) - p.phi1(c);
  s += p.psi2(d) - p.phi2(d);
  return s.value();
}

/// F1^eps(y) = (F^eps(y) - F0(ybar)) / eps.
inline double F1_eps(const ChainConfig &cfg, const Deformation &y,
                     const ContinuumSolution &cont) {
  if (cont.N() != cfg.N || cont.L() != cfg.L)
    throw std::invalid_argument("continuum solution does not match config");
  return (F_eps(cfg, y) - cont.F0_value()) / cfg.epsilon();
}

/// Per-cell average over (x_j, x_{j+1}) of W(Dybar) - sigma Dubar plus
/// Sigma (g_j - D1 ybar_j), j periodic.
namespace detail {
inline std::vector<double> cell_continuum_terms(const ChainConfig &cfg,
                                                const Deformation &y,
                                                const ContinuumSolution &c) {
  const double eps = cfg.epsilon();
  const int n = 2 * cfg.N;
  const auto xs = c.sample_x();
  const auto st = c.sample_strain();
  std::vector<double> A(n);
  for (int j = -cfg.N; j < cfg.N; ++j) {
    const std::size_t k = 2 * static_cast<std::size_t>(j + cfg.N);
    double guess = st[k];
    auto integrand = [&](double x) {
      guess = c.strain(x, guess);
      return W(cfg.model, guess) - c.sigma(x) * (guess - cfg.L);
    };
    const double I =
        integrate(integrand, xs[k], xs[k + 2], 1e-14, 12, 1e-15 * eps);
    A[j + cfg.N] = I / eps + c.Sigma() * (y.gap(j) - c.cell_average(j));
  }
  return A;
}
} // namespace detail

/// s_i^eps for i = -N..N-1, bonds wrapped periodically at i = N-1.
inline std::vector<double> s_terms(const ChainConfig &cfg, const Deformation &y,
                                   const ContinuumSolution &cont) {
  detail::require_match(cfg, y);
  if (cont.N() != cfg.N || cont.L() != cfg.L)
    throw std::invalid_argument("continuum solution does not match config");
  const PotentialSet &p = cfg.model;
  const SigmaField sig(cfg);
  const auto A = detail::cell_continuum_terms(cfg, y, cont);
  const int n = 2 * cfg.N;
  std::vector<double> s(n);
  for (int i = -cfg.N; i < cfg.N; ++i) {
    const int ip = cfg.wrap(i + 1);
    CompensatedSum v;
    v += p.phi2(y.second_difference(i));
    v += 0.5 * p.phi1(y.gap(i));
    v += 0.5 * p.phi1(y.gap(ip));
    v += -0.5 * sig.on_cell(i) * y.du(i);
    v += -0.5 * sig.on_cell(ip) * y.du(ip);
    v += -0.5 * (A[i + cfg.N] + A[ip + cfg.N]);
    s[i + cfg.N] = v.value();
  }
  return s;
}

/// ||Dy - Dybar||_{L2}^2 with Dy the piecewise-constant gap field.
inline double strain_error_sq(const ChainConfig &cfg, const Deformation &y,
                              const ContinuumSolution &cont) {
  const auto xs = cont.sample_x();
  const auto st = cont.sample_strain();
  CompensatedSum s;
  for (int j = -cfg.N; j < cfg.N; ++j) {
    const std::size_t k = 2 * static_cast<std::size_t>(j + cfg.N);
    const double g = y.gap(j);
    double guess = st[k];
    s += integrate(
        [&](double x) {
          guess = cont.strain(x, guess);
          return (g - guess) * (g - guess);
        },
        xs[k], xs[k + 2], 1e-14, 12, 1e-15 * (xs[k + 2] - xs[k]));
  }
  return s.value();
}

} // namespace clj

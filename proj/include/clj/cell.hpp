#pragma once

// First-order cell problem: minimise E~inf(r) = sum Phi1(r_i) +
// Phi2((r_i + r_{i+1})/2) + E~d(r) over strain perturbations r about the
// continuum strain F0 at the defect, truncated to a window r_{-R..R} with
// r = 0 outside. Also: Euler-Lagrange rows, tail decay diagnostics, the
// linearised decay rate and the recovery deformation.

#include "clj/chain.hpp"
#include "clj/continuum.hpp"
#include "clj/discrete.hpp"
#include "clj/numerics.hpp"
#include "clj/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace clj {

namespace detail {

/// Window view with r_i = 0 outside -R..R.
struct Window {
  std::span<const double> r;
  int R;
  explicit Window(std::span<const double> v)
      : r(v), R(static_cast<int>(v.size() / 2)) {
    if (v.size() % 2 != 1)
      throw std::invalid_argument("cell window must have odd length 2R+1");
  }
  double operator()(int i) const { return (i < -R || i > R) ? 0.0 : r[i + R]; }
  double mid(int k) const { return 0.5 * ((*this)(k) + (*this)(k + 1)); }
};

inline const ShiftedPotential &cell_near(const ShiftedSet &s, int i) {
  return is_defect_gap(i) ? s.Psi1 : s.Phi1;
}
inline const ShiftedPotential &cell_bond(const ShiftedSet &s, int k) {
  return is_defect_bond(k) ? s.Psi2 : s.Phi2;
}

inline bool window_admissible(const ShiftedSet &s, std::span<const double> r) {
  for (double v : r)
    if (!(s.F0 + v > 0.0)) return false;
  return true;
}

} // namespace detail

/// E~d(r): psi - phi on the four defect bonds, evaluated from the raw
/// potentials at F0 + r.
inline double cell_defect_energy(const PotentialSet &p, double F0,
                                 std::span<const double> r) {
  const detail::Window w(r);
  return defect_energy_shifted(p, F0, w(-2), w(-1), w(0), w(1));
}

/// E~inf on the window: sum_{i=-R}^{R} Phi1(r_i)
/// + sum_{i=-R-1}^{R} Phi2((r_i + r_{i+1})/2) + E~d(r).
inline double cell_energy(const ShiftedSet &s, const PotentialSet &p,
                          std::span<const double> r) {
  const detail::Window w(r);
  if (!detail::window_admissible(s, r)) return kInf;
  CompensatedSum e;
  for (int i = -w.R; i <= w.R; ++i) e += s.Phi1(w(i));
  for (int k = -w.R - 1; k <= w.R; ++k) e += s.Phi2(w.mid(k));
  e += cell_defect_energy(p, s.F0, r);
  return e.value();
}

/// Same energy assembled per bond with Psi on defect bonds.
inline double cell_energy_assembled(const ShiftedSet &s,
                                    std::span<const double> r) {
  const detail::Window w(r);
  if (!detail::window_admissible(s, r)) return kInf;
  CompensatedSum e;
  for (int i = -w.R; i <= w.R; ++i) e += detail::cell_near(s, i)(w(i));
  for (int k = -w.R - 1; k <= w.R; ++k) e += detail::cell_bond(s, k)(w.mid(k));
  return e.value();
}

/// Exact gradient of the window energy, by bond assembly.
inline std::vector<double> cell_gradient(const ShiftedSet &s,
                                         std::span<const double> r) {
  const detail::Window w(r);
  std::vector<double> g(r.size());
  for (int i = -w.R; i <= w.R; ++i)
    g[i + w.R] = detail::cell_near(s, i).d1(w(i)) +
                 0.5 * detail::cell_bond(s, i - 1).d1(w.mid(i - 1)) +
                 0.5 * detail::cell_bond(s, i).d1(w.mid(i));
  return g;
}

inline SymTridiagonal cell_hessian(const ShiftedSet &s,
                                   std::span<const double> r) {
  const detail::Window w(r);
  const std::size_t n = r.size();
  SymTridiagonal H;
  H.diag.resize(n);
  H.off.resize(n - 1);
  for (int i = -w.R; i <= w.R; ++i) {
    H.diag[i + w.R] = detail::cell_near(s, i).d2(w(i)) +
                      0.25 * detail::cell_bond(s, i - 1).d2(w.mid(i - 1)) +
                      0.25 * detail::cell_bond(s, i).d2(w.mid(i));
    if (i < w.R) H.off[i + w.R] = 0.25 * detail::cell_bond(s, i).d2(w.mid(i));
  }
  return H;
}

/// Euler-Lagrange rows at i = -R..R, evaluated row by row: the bulk equation
/// away from the defect and the four written-out defect equations at
/// i = -2, -1, 0, 1.
inline std::vector<double> el_residuals(const ShiftedSet &s,
                                        std::span<const double> r) {
  const detail::Window w(r);
  std::vector<double> out(r.size());
  for (int i = -w.R; i <= w.R; ++i) {
    double v = 0.0;
    switch (i) {
    case -2:
      v = 0.5 * s.Phi2.d1(w.mid(-3)) + s.Phi1.d1(w(-2)) +
          0.5 * s.Psi2.d1(w.mid(-2));
      break;
    case -1:
      v = 0.5 * s.Psi2.d1(w.mid(-2)) + s.Psi1.d1(w(-1)) +
          0.5 * s.Phi2.d1(w.mid(-1));
      break;
    case 0:
      v = 0.5 * s.Phi2.d1(w.mid(-1)) + s.Psi1.d1(w(0)) +
          0.5 * s.Psi2.d1(w.mid(0));
      break;
    case 1:
      v = 0.5 * s.Psi2.d1(w.mid(0)) + s.Phi1.d1(w(1)) +
          0.5 * s.Phi2.d1(w.mid(1));
      break;
    default:
      v = 0.5 * s.Phi2.d1(w.mid(i - 1)) + s.Phi1.d1(w(i)) +
          0.5 * s.Phi2.d1(w.mid(i));
    }
    out[i + w.R] = v;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Linearised decay rates

struct LinearRate {
  double lambda_minus = 0.0;
  double lambda_plus = kInf;
  bool degenerate = false;
};

namespace detail {
/// Roots of c lambda^2 + b lambda + c = 0 for c < 0 < b, smaller first.
inline LinearRate reciprocal_roots(double b, double c) {
  if (c == 0.0) return {0.0, kInf, true};
  if (c > 0.0)
    throw std::invalid_argument("decay ansatz needs a concave second neighbour");
  const double disc = b * b - 4.0 * c * c;
  if (disc < 0.0 || !(b > 0.0))
    throw std::domain_error("decay ansatz has no real positive roots");
  const double root = std::sqrt(disc);
  const double minus = (-2.0 * c) / (b + root);
  return {minus, 1.0 / minus, false};
}
} // namespace detail

/// Roots of 1/2 phi2''(F0) + W''(F0) lambda + 1/2 phi2''(F0) lambda^2 = 0.
/// The roots are reciprocal; phi2''(F0) = 0 gives (0, inf) and the flag.
inline LinearRate linear_rate(const PotentialSet &p, double F0) {
  const double a = p.phi2.d2(F0);
  const LinearRate lr = detail::reciprocal_roots(W_second(p, F0), 0.5 * a);
  return lr;
}

/// Decay rate of the linearised bulk equation
/// 1/4 a r_{i-1} + (phi1'' + a/2) r_i + 1/4 a r_{i+1} = 0, a = phi2''(F0).
inline LinearRate linearized_decay_rate(const PotentialSet &p, double F0) {
  const double a = p.phi2.d2(F0);
  return detail::reciprocal_roots(p.phi1.d2(F0) + 0.5 * a, 0.25 * a);
}

// ---------------------------------------------------------------------------
// Cell solution and decay diagnostics

struct CellSolution {
  int R = 0;
  double F0 = 0.0;
  std::vector<double> r; // r_{-R..R} at slot i + R
  double energy = 0.0;
  double el_residual = 0.0;       // sup of window EL rows
  double boundary_residual = 0.0; // EL rows just outside the window
  bool grow_window = false;
  bool positive_definite = false;
  bool converged = false;
  int iterations = 0;
  double lambda_bound = 0.0;
  double lambda_linear = 0.0;
  double lambda_linearized = 0.0;
  double tail_ratio = 0.0;

  [[nodiscard]] double at(int i) const {
    return (i < -R || i > R) ? 0.0 : r[static_cast<std::size_t>(i + R)];
  }
  [[nodiscard]] double norm_sq() const {
    CompensatedSum s;
    for (double v : r) s += v * v;
    return s.value();
  }
};

struct TailReport {
  int anchor_index = 1; // r_1 on the right, r_{-2} on the left
  double anchor = 0.0;
  double C = 0.0;      // sup |phi2''(F0 + t)| on the padded anchor interval
  double lambda = 0.0; // C / (l + C)
  bool monotone = true;
  std::optional<int> monotone_violation;
  bool bound = true;
  std::optional<int> bound_violation;
  double tail_ratio = 0.0;

  [[nodiscard]] bool pass() const {
    return monotone && bound && tail_ratio <= lambda;
  }
};

struct DecayReport {
  TailReport right;
  TailReport left; // mirrored via i -> -1 - i; reported, not asserted
  [[nodiscard]] bool pass() const { return right.pass(); }
};

struct DecayOptions {
  double slack = 1e-12;
  double ratio_floor = 1e-11;
  double grid_step = 1e-3;
  double padding = 0.1;
};

namespace detail {

/// Checks the tail t_1, t_2, ... (t_j = r at index(j)).
template <class Index>
TailReport check_tail(const CellSolution &sol, const PotentialSet &p,
                      int length, Index index, const DecayOptions &o) {
  TailReport rep;
  rep.anchor_index = index(1);
  auto t = [&](int j) { return sol.at(index(j)); };
  const double a = t(1);
  rep.anchor = a;
  const double half = (1.0 + o.padding) * std::abs(a);
  const int n = std::max(2, static_cast<int>(std::ceil(2.0 * half / o.grid_step)) + 1);
  double C = 0.0;
  for (int k = 0; k < n; ++k) {
    const double s = sol.F0 - half + 2.0 * half * k / (n - 1);
    if (s > 0.0) C = std::max(C, std::abs(p.phi2.d2(s)));
  }
  rep.C = C;
  const double l = p.constants.l_convexity;
  rep.lambda = C / (l + C);

  const bool up = a >= 0.0;
  for (int j = 2; j <= length; ++j) {
    const double prev = t(j - 1), cur = t(j);
    const bool ok = up ? (cur <= prev + o.slack && cur >= -o.slack)
                       : (cur >= prev - o.slack && cur <= o.slack);
    if (!ok) {
      rep.monotone = false;
      rep.monotone_violation = index(j);
      break;
    }
  }
  for (int j = 1; j <= length; ++j) {
    if (std::abs(t(j)) > std::pow(rep.lambda, j - 1) * std::abs(a) + o.slack) {
      rep.bound = false;
      rep.bound_violation = index(j);
      break;
    }
  }
  for (int j = 2; j < length; ++j) {
    const double cur = t(j), next = t(j + 1);
    if (std::abs(next) < o.ratio_floor || cur == 0.0) continue;
    rep.tail_ratio = std::max(rep.tail_ratio, std::abs(next / cur));
  }
  return rep;
}

} // namespace detail

inline DecayReport decay_check(const CellSolution &sol, const PotentialSet &p,
                               const DecayOptions &opts = {}) {
  DecayReport rep;
  rep.right = detail::check_tail(sol, p, sol.R, [](int j) { return j; }, opts);
  rep.left = detail::check_tail(sol, p, sol.R - 1,
                                [](int j) { return -1 - j; }, opts);
  return rep;
}

/// Lower-bound certificate E~inf(r) >= (l/2) ||r||^2 + C on the strain grid.
///
/// Concavity of the second-neighbour terms gives E~inf(r) >= sum_i h_i(r_i)
/// with h_i = N_i + (B_{i-1} + B_i)/2; bulk h_i = Phi1 + Phi2 >= (l/2) t^2,
/// so C collects the grid infima of h_i - (l/2) t^2 over i = -2..1.
struct CellLowerBound {
  double l = 0.0;
  double C = 0.0;
};

inline CellLowerBound cell_lower_bound(const PotentialSet &p, double F0,
                                       const StrainGrid &grid = {}) {
  const ShiftedSet s = shifted_potentials(p, F0);
  const double l = p.constants.l_convexity;
  const auto nodes = grid.nodes();
  double C = 0.0;
  for (int i = -2; i <= 1; ++i) {
    double inf = kInf;
    for (double t : nodes) {
      const double d = t - F0;
      const double h = detail::cell_near(s, i)(d) +
                       0.5 * detail::cell_bond(s, i - 1)(d) +
                       0.5 * detail::cell_bond(s, i)(d);
      inf = std::min(inf, h - 0.5 * l * d * d);
    }
    C += inf;
  }
  return {l, C - 1e-9 * (1.0 + std::abs(C))};
}

// ---------------------------------------------------------------------------
// Newton solver on the window

struct CellOptions {
  double tol = 1e-12;
  int max_iter = 100;
  enum class Seed { zero, linear } seed = Seed::linear;
};

namespace detail {

inline double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  CompensatedSum s;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s.value();
}

/// Largest step in (0, 1] keeping base + alpha * dir above 5% of its slack.
inline double fraction_to_boundary(std::span<const double> base,
                                   std::span<const double> dir, double shift,
                                   double factor = 0.95) {
  double a = 1.0;
  for (std::size_t k = 0; k < base.size(); ++k)
    if (dir[k] < 0.0) a = std::min(a, factor * (shift + base[k]) / -dir[k]);
  return a;
}

/// Adds a diagonal shift until the LDL^T pivots are positive.
inline SymTridiagonal make_positive(SymTridiagonal H) {
  if (H.positive_definite()) return H;
  double scale = 0.0;
  for (double d : H.diag) scale = std::max(scale, std::abs(d));
  double tau = 1e-8 * std::max(scale, 1.0);
  for (int k = 0; k < 80; ++k, tau *= 4.0) {
    SymTridiagonal T = H;
    for (double &d : T.diag) d += tau;
    if (T.positive_definite()) return T;
  }
  throw ConvergenceError("cell Hessian could not be regularised");
}

} // namespace detail

inline std::vector<double> linear_seed(const ShiftedSet &s,
                                       const PotentialSet &p, int R) {
  const std::size_t n = 2 * static_cast<std::size_t>(R) + 1;
  std::vector<double> zero(n, 0.0), v(n);
  const double lam = linearized_decay_rate(p, s.F0).lambda_minus;
  for (int i = -R; i <= R; ++i) {
    const int d = i >= 1 ? i - 1 : (i <= -2 ? -2 - i : 0);
    v[i + R] = std::pow(lam, d);
  }
  const auto g = cell_gradient(s, zero);
  const auto Hv = cell_hessian(s, zero).multiply(v);
  const double curv = detail::dot(v, Hv);
  double c = curv > 0.0 ? -detail::dot(g, v) / curv : 0.0;
  c = std::max(c, -0.5 * s.F0);
  for (double &x : v) x *= c;
  return v;
}

/// Solves the truncated cell problem by damped Newton with Armijo
/// backtracking on the energy. Throws ConvergenceError when the budget is
/// exhausted; the grow_window flag signals an under-sized window.
inline CellSolution minimize_cell(const PotentialSet &p, double F0, int R,
                                  const CellOptions &opts = {}) {
  if (R < 8) throw std::invalid_argument("cell window needs R >= 8");
  if (!(opts.tol > 0.0) || opts.max_iter < 1)
    throw std::invalid_argument("cell options need tol > 0 and max_iter >= 1");
  const ShiftedSet s = shifted_potentials(p, F0);
  const std::size_t n = 2 * static_cast<std::size_t>(R) + 1;

  std::vector<double> r(n, 0.0);
  if (opts.seed == CellOptions::Seed::linear) {
    auto seed = linear_seed(s, p, R);
    if (cell_energy_assembled(s, seed) < cell_energy_assembled(s, r)) r = seed;
  }

  std::vector<double> g = cell_gradient(s, r);
  double E = cell_energy_assembled(s, r);
  double gnorm = detail::sup_norm(g);
  int iter = 0, polish = 0;
  while (iter < opts.max_iter) {
    if (gnorm <= opts.tol) {
      // A few extra steps push the iterate to rounding level; tail ratios
      // far down the profile depend on it.
      if (gnorm == 0.0 || polish >= 3) break;
      ++polish;
    }
    ++iter;
    const SymTridiagonal H = detail::make_positive(cell_hessian(s, r));
    std::vector<double> rhs(n);
    for (std::size_t k = 0; k < n; ++k) rhs[k] = -g[k];
    const std::vector<double> d = H.solve(rhs);
    const double slope = detail::dot(g, d);
    double a = detail::fraction_to_boundary(r, d, F0);
    std::vector<double> trial(n);
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt, a *= 0.5) {
      for (std::size_t k = 0; k < n; ++k) trial[k] = r[k] + a * d[k];
      const double Et = cell_energy_assembled(s, trial);
      if (!std::isfinite(Et)) continue;
      const bool armijo = Et <= E + 1e-4 * a * slope;
      const bool flat = std::abs(Et - E) <= 1e-13 * std::max(1.0, std::abs(E));
      if (armijo ||
          (flat && detail::sup_norm(cell_gradient(s, trial)) < gnorm)) {
        accepted = true;
        E = Et;
        break;
      }
    }
    if (!accepted) break;
    const double prev = gnorm;
    r = trial;
    g = cell_gradient(s, r);
    gnorm = detail::sup_norm(g);
    if (polish > 0 && gnorm >= prev) break;
  }

  CellSolution sol;
  sol.R = R;
  sol.F0 = F0;
  sol.r = r;
  sol.iterations = iter;
  sol.energy = cell_energy(s, p, r);
  sol.el_residual = detail::sup_norm(el_residuals(s, r));
  sol.converged = sol.el_residual <= opts.tol;
  const double lb = std::abs(0.5 * s.Phi2.d1(0.5 * r.back()));
  const double rb = std::abs(0.5 * s.Phi2.d1(0.5 * r.front()));
  sol.boundary_residual = std::max(lb, rb);
  sol.grow_window = sol.boundary_residual > 10.0 * opts.tol;
  sol.positive_definite = cell_hessian(s, r).positive_definite();
  sol.lambda_linear = linear_rate(p, F0).lambda_minus;
  sol.lambda_linearized = linearized_decay_rate(p, F0).lambda_minus;
  const DecayReport dr = decay_check(sol, p);
  sol.lambda_bound = dr.right.lambda;
  sol.tail_ratio = dr.right.tail_ratio;
  if (!sol.converged)
    throw ConvergenceError("cell Newton stopped at EL residual " +
                           std::to_string(sol.el_residual));
  return sol;
}

// ---------------------------------------------------------------------------
// Recovery deformation

/// Gaps D1 ybar_i + r_i - rbar for i in -K..K-1 (K = floor(sqrt N)) and
/// D1 ybar_i elsewhere, with rbar the mean of r over -K..K-1 so that the
/// length constraint is preserved.
inline Deformation build_recovery(const ChainConfig &cfg,
                                  const ContinuumSolution &cont,
                                  const CellSolution &sol) {
  if (cont.N() != cfg.N || cont.L() != cfg.L)
    throw std::invalid_argument("continuum solution does not match config");
  const int K = static_cast<int>(std::floor(std::sqrt(static_cast<double>(cfg.N))));
  if (K > cfg.N || K < 1) throw std::invalid_argument("recovery needs 1 <= K <= N");
  const double delta = 1.0 / (2.0 * K);
  CompensatedSum rs;
  for (int i = -K; i < K; ++i) rs += sol.at(i);
  const double rbar = delta * rs.value();
  std::vector<double> g(2 * cfg.N);
  for (int i = -cfg.N; i < cfg.N; ++i) {
    double v = cont.cell_average(i);
    if (i >= -K && i < K) v += sol.at(i) - rbar;
    if (!(v > 0.0))
      throw std::domain_error("recovery gap is non-positive at i = " +
                              std::to_string(i));
    g[i + cfg.N] = v;
  }
  return Deformation(cfg.N, cfg.L, std::move(g));
}

} // namespace clj

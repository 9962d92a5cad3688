#pragma once

// Shared fixtures for the unit tests: frozen reference values, seeded random
// admissible deformations and finite-difference helpers.

#include "clj/clj.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace clj::testing {

/// Reference values stored as decimal strings in oracles/reference.json.
inline const json &oracles() {
  static const json j = [] {
    std::ifstream in(std::string(CLJ_ORACLE_DIR) + "/reference.json");
    return json::parse(in);
  }();
  return j;
}

inline double oracle(const json &node) { return std::stod(node.get<std::string>()); }

inline std::vector<double> oracle_vector(const json &node) {
  std::vector<double> v;
  for (const auto &e : node) v.push_back(oracle(e));
  return v;
}

inline ChainConfig make_config(PotentialSet p, int N, double L,
                               ForceField f = ForceField::zero()) {
  ChainConfig c;
  c.model = std::move(p);
  c.N = N;
  c.L = L;
  c.force = f;
  return c;
}

/// phi and psi coincide: no defect.
inline PotentialSet no_defect_model() { return poly_log_sqrt(0.8, 0.8, 1.0); }

/// Random positive gaps L * (1 + spread * U(-1, 1)), rescaled so that
/// eps * sum g = L.
inline Deformation random_deformation(std::mt19937_64 &rng, int N, double L,
                                      double spread = 0.3) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> g(2 * N);
  for (double &v : g) v = L * (1.0 + spread * u(rng));
  const double scale = L / (compensated_sum(g) * 0.5 / N);
  for (double &v : g) v *= scale;
  return Deformation(N, L, std::move(g));
}

inline Deformation with_gaps(const Deformation &y, std::vector<double> g) {
  return Deformation(y.N(), y.L(), std::move(g));
}

/// Central difference of F_eps in every gap (no length projection).
inline std::vector<double> fd_gradient(const ChainConfig &cfg,
                                       const Deformation &y, double h = 1e-6) {
  const auto g0 = y.gaps();
  std::vector<double> out(g0.size());
  for (std::size_t k = 0; k < g0.size(); ++k) {
    std::vector<double> p(g0.begin(), g0.end()), m = p;
    p[k] += h;
    m[k] -= h;
    out[k] = (F_eps(cfg, with_gaps(y, p)) - F_eps(cfg, with_gaps(y, m))) / (2 * h);
  }
  return out;
}

inline double sup_diff(const std::vector<double> &a, const std::vector<double> &b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

inline double sup_abs(const std::vector<double> &a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

/// Smallest eigenvalue sign test of a dense symmetric matrix by Cholesky.
inline bool dense_positive_definite(std::vector<std::vector<double>> A) {
  const std::size_t n = A.size();
  for (std::size_t j = 0; j < n; ++j) {
    double d = A[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= A[j][k] * A[j][k];
    if (!(d > 0.0)) return false;
    d = std::sqrt(d);
    A[j][j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = A[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= A[i][k] * A[j][k];
      A[i][j] = s / d;
    }
  }
  return true;
}

} // namespace clj::testing

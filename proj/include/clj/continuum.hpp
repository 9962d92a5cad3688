#pragma once

// Zeroth-order limit: the continuum problem min int W(Dy) + f u over
// y(-1/2) = 0, y(1/2) = L. Its minimiser has W'(Dy) = sigma(x) + Sigma with
// the multiplier Sigma fixed by the length constraint.

#include "clj/chain.hpp"
#include "clj/numerics.hpp"
#include "clj/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace clj {

/// Solves W'(t) = s for t > 0 by bracketing and safeguarded Newton.
///
/// Throws std::range_error when s lies outside the sampled range of W'.
inline double W_prime_inverse(const PotentialSet &p, double s,
                              double guess = 1.0) {
  if (!(guess > 0.0) || !std::isfinite(guess)) guess = 1.0;
  const double tol = 1e-12 * std::max(1.0, std::abs(s));
  double lo = guess, hi = guess;
  if (W_prime(p, guess) > s) {
    while (W_prime(p, lo) > s) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-300)
        throw std::range_error("W' does not reach " + std::to_string(s));
    }
  } else {
    while (W_prime(p, hi) < s) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300)
        throw std::range_error("W' does not reach " + std::to_string(s));
    }
  }
  // Newton runs to rounding level so that quadratures of the inverse are
  // smooth; the tolerance only decides acceptance.
  double t = std::clamp(guess, lo, hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double g = W_prime(p, t) - s;
    if (g == 0.0) return t;
    (g > 0.0 ? hi : lo) = t;
    double next = t - g / W_second(p, t);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool done = std::abs(next - t) <= 4e-16 * t ||
                      (hi - lo) <= 4e-16 * t;
    t = next;
    if (done) break;
  }
  if (std::abs(W_prime(p, t) - s) <= 4.0 * tol) return t;
  throw std::runtime_error("W' inversion did not converge at s = " +
                           std::to_string(s));
}

struct ContinuumOptions {
  /// Added to sigma(x); the minimiser must not depend on it.
  double sigma_offset = 0.0;
  double root_tol = 1e-12;
  int max_bracket_expansions = 60;
};

class ContinuumSolution {
public:
  [[nodiscard]] int N() const { return N_; }
  [[nodiscard]] double L() const { return L_; }
  [[nodiscard]] double Sigma() const { return Sigma_; }
  [[nodiscard]] double F0_value() const { return F0_value_; }
  [[nodiscard]] double F0_strain() const { return F0_strain_; }
  [[nodiscard]] double residual() const { return residual_; }
  [[nodiscard]] const PotentialSet &model() const { return model_; }
  [[nodiscard]] const ForceField &force() const { return force_; }

  /// sigma(x) = int_{-1/2}^x f (+ configured offset).
  [[nodiscard]] double sigma(double x) const {
    return force_.primitive(x) + sigma_offset_;
  }
  /// D ybar(x) = (W')^{-1}(sigma(x) + Sigma).
  [[nodiscard]] double strain(double x, double guess = 0.0) const {
    return W_prime_inverse(model_, sigma(x) + Sigma_,
                           guess > 0.0 ? guess : F0_strain_);
  }
  /// D^2 ybar = f / W''(D ybar), from differentiating the stress relation.
  [[nodiscard]] double strain_derivative(double x) const {
    return force_.value(x) / W_second(model_, strain(x));
  }
  [[nodiscard]] double ybar(double x) const {
    const int M = static_cast<int>(x_.size()) - 1;
    const int k = std::clamp(static_cast<int>(std::floor((x + 0.5) * M)), 0,
                             M - 1);
    const double g = strain_[k];
    return ybar_[k] + integrate([&](double s) { return strain(s, g); }, x_[k], x);
  }
  /// D1 ybar_i = cell average of D ybar over (x_i, x_{i+1}), periodic in i.
  [[nodiscard]] double cell_average(int i) const {
    const int n = 2 * N_;
    const int w = ((i + N_) % n + n) % n - N_;
    const std::size_t a = 2 * static_cast<std::size_t>(w + N_);
    return (ybar_[a + 2] - ybar_[a]) * 2.0 * N_;
  }

  /// Cached samples at M = 4N + 1 uniform points x = -1/2 .. 1/2.
  [[nodiscard]] std::span<const double> sample_x() const { return x_; }
  [[nodiscard]] std::span<const double> sample_sigma() const { return sigma_; }
  [[nodiscard]] std::span<const double> sample_strain() const { return strain_; }
  [[nodiscard]] std::span<const double> sample_ybar() const { return ybar_; }

private:
  friend ContinuumSolution solve_continuum(const ChainConfig &,
                                           const ContinuumOptions &);
  PotentialSet model_;
  ForceField force_;
  int N_ = 0;
  double L_ = 0.0;
  double sigma_offset_ = 0.0;
  double Sigma_ = 0.0;
  double F0_value_ = 0.0;
  double F0_strain_ = 0.0;
  double residual_ = 0.0;
  std::vector<double> x_, sigma_, strain_, ybar_;
};

/// Solves int_Omega (W')^{-1}(sigma + Sigma) = L for Sigma and tabulates the
/// minimiser. The left side is strictly increasing in Sigma, so the bracketed
/// root is unique.
inline ContinuumSolution solve_continuum(const ChainConfig &cfg,
                                         const ContinuumOptions &opts = {}) {
  const PotentialSet &p = cfg.model;
  const ForceField &f = cfg.force;
  const double L = cfg.L;
  auto sigma = [&](double x) { return f.primitive(x) + opts.sigma_offset; };

  auto mass = [&](double Sig) {
    double guess = L;
    return integrate(
               [&](double x) {
                 guess = W_prime_inverse(p, sigma(x) + Sig, guess);
                 return guess;
               },
               -0.5, 0.5) -
           L;
  };
  auto dmass = [&](double Sig) {
    double guess = L;
    return integrate(
        [&](double x) {
          guess = W_prime_inverse(p, sigma(x) + Sig, guess);
          return 1.0 / W_second(p, guess);
        },
        -0.5, 0.5);
  };

  const double spread = f.sup_abs_primitive() + std::abs(opts.sigma_offset);
  double lo = W_prime(p, L) - spread - 1.0;
  double hi = W_prime(p, L) + spread + 1.0;
  double m_lo = mass(lo), m_hi = mass(hi);
  for (int k = 0; k < opts.max_bracket_expansions && m_lo > 0.0; ++k) {
    lo -= (hi - lo);
    m_lo = mass(lo);
  }
  for (int k = 0; k < opts.max_bracket_expansions && m_hi < 0.0; ++k) {
    hi += (hi - lo);
    m_hi = mass(hi);
  }
  if (m_lo > 0.0 || m_hi < 0.0)
    throw std::runtime_error("continuum multiplier could not be bracketed");

  double Sig = std::clamp(W_prime(p, L), lo, hi);
  double m = mass(Sig);
  for (int iter = 0; iter < 200 && std::abs(m) > opts.root_tol; ++iter) {
    (m > 0.0 ? hi : lo) = Sig;
    double next = Sig - m / dmass(Sig);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == Sig) break;
    Sig = next;
    m = mass(Sig);
  }
  if (std::abs(m) > opts.root_tol)
    throw std::runtime_error("continuum multiplier did not converge");

  ContinuumSolution sol;
  sol.model_ = p;
  sol.force_ = f;
  sol.N_ = cfg.N;
  sol.L_ = L;
  sol.sigma_offset_ = opts.sigma_offset;
  sol.Sigma_ = Sig;
  sol.residual_ = std::abs(m);
  sol.F0_strain_ = W_prime_inverse(p, sigma(0.0) + Sig, L);

  const int M = 4 * cfg.N;
  sol.x_.resize(M + 1);
  sol.sigma_.resize(M + 1);
  sol.strain_.resize(M + 1);
  sol.ybar_.resize(M + 1);
  double guess = sol.F0_strain_;
  for (int k = 0; k <= M; ++k) {
    const double x = k == M ? 0.5 : -0.5 + static_cast<double>(k) / M;
    sol.x_[k] = x;
    sol.sigma_[k] = sigma(x);
    guess = W_prime_inverse(p, sol.sigma_[k] + Sig, guess);
    sol.strain_[k] = guess;
  }
  CompensatedSum y, energy;
  sol.ybar_[0] = 0.0;
  for (int k = 0; k < M; ++k) {
    double g = sol.strain_[k];
    auto Dy = [&](double x) {
      g = W_prime_inverse(p, sigma(x) + Sig, g);
      return g;
    };
    y.add(integrate(Dy, sol.x_[k], sol.x_[k + 1]));
    sol.ybar_[k + 1] = y.value();
    g = sol.strain_[k];
    // Integrated-by-parts force work using sigma(-1/2) = 0 and u(1/2) = 0.
    energy.add(integrate(
        [&](double x) {
          const double d = Dy(x);
          return W(p, d) - sigma(x) * (d - L);
        },
        sol.x_[k], sol.x_[k + 1]));
  }
  sol.F0_value_ = energy.value();
  return sol;
}

/// F0(y) = int W(Dy) + f (y - L(x + 1/2)) for a strain profile sampled at
/// M + 1 uniform nodes (M even), by composite Simpson.
///
/// The force work is evaluated in integrated-by-parts form -int sigma (Dy - L),
/// which requires the boundary data y(1/2) = L; samples violating it are
/// rejected. Non-positive samples give +inf.
inline double F0(const ChainConfig &cfg, std::span<const double> strain) {
  const std::size_t n = strain.size();
  if (n < 3 || (n - 1) % 2 != 0)
    throw std::invalid_argument("F0 needs an odd number (>= 3) of samples");
  for (double d : strain)
    if (!(d > 0.0)) return kInf;
  const auto M = static_cast<double>(n - 1);
  const double h = 1.0 / M;
  CompensatedSum e, len;
  for (std::size_t k = 0; k < n; ++k) {
    const double w = (k == 0 || k + 1 == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    const double x = k + 1 == n ? 0.5 : -0.5 + static_cast<double>(k) * h;
    const double d = strain[k];
    e.add(w * (W(cfg.model, d) - cfg.force.primitive(x) * (d - cfg.L)));
    len.add(w * d);
  }
  if (std::abs(len.value() * h / 3.0 - cfg.L) > 1e-8 * std::max(1.0, cfg.L))
    throw std::invalid_argument("strain samples violate y(1/2) = L");
  return e.value() * h / 3.0;
}

/// Samples `strain` at M + 1 nodes and evaluates F0.
inline double F0(const ChainConfig &cfg,
                 const std::function<double(double)> &strain, int M) {
  if (M < 2 || M % 2 != 0) throw std::invalid_argument("F0 needs even M >= 2");
  std::vector<double> s(M + 1);
  for (int k = 0; k <= M; ++k)
    s[k] = strain(k == M ? 0.5 : -0.5 + static_cast<double>(k) / M);
  return F0(cfg, s);
}

} // namespace clj

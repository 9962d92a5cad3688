#pragma once

// Small numerical kernels shared by the chain, continuum and cell solvers:
// compensated summation, adaptive quadrature and banded linear solves.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace clj {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Raised when an iterative solver exhausts its iteration budget.
class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Neumaier compensated summation. Callers must not feed infinities.
class CompensatedSum {
public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  CompensatedSum &operator+=(double v) {
    add(v);
    return *this;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> v) {
  CompensatedSum s;
  for (double x : v) s.add(x);
  return s.value();
}

/// Adaptive 15-point Gauss-Kronrod quadrature on [a, b].
///
/// A panel is accepted when its Kronrod-Gauss error estimate is below
/// max(abs_tol, rel_tol * L1) with L1 the panel's L1 norm; otherwise it is
/// bisected (the absolute budget is halved) up to `max_depth` levels.
template <class F>
double integrate(F &&f, double a, double b, double rel_tol = 1e-14,
                 unsigned max_depth = 12, double abs_tol = 0.0) {
  if (a == b) return 0.0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  double error = 0.0, L1 = 0.0;
  const double v = GK::integrate(f, a, b, 0, rel_tol, &error, &L1);
  // Boost 1.74 reports the error estimate on the reference panel [-1, 1].
  error *= 0.5 * std::abs(b - a);
  if (max_depth == 0 || error <= std::max(abs_tol, rel_tol * L1)) return v;
  const double m = 0.5 * (a + b);
  return integrate(f, a, m, rel_tol, max_depth - 1, 0.5 * abs_tol) +
         integrate(f, m, b, rel_tol, max_depth - 1, 0.5 * abs_tol);
}

/// Symmetric tridiagonal matrix: diag[k] and off[k] = A(k, k+1).
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> off; // size n - 1

  [[nodiscard]] std::size_t size() const { return diag.size(); }

  [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const {
    const std::size_t n = size();
    std::vector<double> y(n);
    for (std::size_t k = 0; k < n; ++k) {
      double v = diag[k] * x[k];
      if (k > 0) v += off[k - 1] * x[k - 1];
      if (k + 1 < n) v += off[k] * x[k + 1];
      y[k] = v;
    }
    return y;
  }

  /// Pivots of the LDL^T factorisation; all positive iff the matrix is SPD.
  [[nodiscard]] std::vector<double> ldl_pivots() const {
    const std::size_t n = size();
    std::vector<double> d(n);
    for (std::size_t k = 0; k < n; ++k) {
      d[k] = diag[k];
      if (k > 0) d[k] -= off[k - 1] * off[k - 1] / d[k - 1];
    }
    return d;
  }

  [[nodiscard]] bool positive_definite() const {
    for (double p : ldl_pivots())
      if (!(p > 0.0)) return false;
    return true;
  }

  /// Thomas algorithm; no pivoting, intended for SPD systems.
  [[nodiscard]] std::vector<double> solve(std::span<const double> rhs) const {
    const std::size_t n = size();
    std::vector<double> c(n), x(rhs.begin(), rhs.end());
    double denom = diag[0];
    if (denom == 0.0) throw std::runtime_error("tridiagonal solve: zero pivot");
    c[0] = n > 1 ? off[0] / denom : 0.0;
    x[0] /= denom;
    for (std::size_t k = 1; k < n; ++k) {
      denom = diag[k] - off[k - 1] * c[k - 1];
      if (denom == 0.0)
        throw std::runtime_error("tridiagonal solve: zero pivot");
      c[k] = k + 1 < n ? off[k] / denom : 0.0;
      x[k] = (x[k] - off[k - 1] * x[k - 1]) / denom;
    }
    for (std::size_t k = n - 1; k-- > 0;) x[k] -= c[k] * x[k + 1];
    return x;
  }
};

/// Symmetric tridiagonal matrix with one periodic corner entry:
/// off[k] = A(k, k+1) for k < n-1 and off[n-1] = A(n-1, 0).
struct CyclicTridiagonal {
  std::vector<double> diag;
  std::vector<double> off; // size n

  [[nodiscard]] std::size_t size() const { return diag.size(); }

  [[nodiscard]] double at(std::size_t r, std::size_t c) const {
    const std::size_t n = size();
    if (r == c) return diag[r];
    if ((r + 1) % n == c) return off[r];
    if ((c + 1) % n == r) return off[c];
    return 0.0;
  }

  [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const {
    const std::size_t n = size();
    std::vector<double> y(n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t kp = (k + 1) % n, km = (k + n - 1) % n;
      y[k] = diag[k] * x[k] + off[k] * x[kp] + off[km] * x[km];
    }
    return y;
  }

  /// Sherman-Morrison reduction to a plain tridiagonal solve (n >= 3).
  [[nodiscard]] std::vector<double> solve(std::span<const double> rhs) const {
    const std::size_t n = size();
    if (n < 3) throw std::invalid_argument("cyclic solve needs n >= 3");
    const double corner = off[n - 1];
    const double gamma = -diag[0];
    SymTridiagonal t;
    t.diag = diag;
    t.off.assign(off.begin(), off.end() - 1);
    t.diag[0] -= gamma;
    t.diag[n - 1] -= corner * corner / gamma;
    std::vector<double> x = t.solve(rhs);
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = corner;
    const std::vector<double> z = t.solve(u);
    const double fact = (x[0] + corner * x[n - 1] / gamma) /
                        (1.0 + z[0] + corner * z[n - 1] / gamma);
    for (std::size_t k = 0; k < n; ++k) x[k] -= fact * z[k];
    return x;
  }
};

} // namespace clj

#pragma once

// Periodic chain of 2N atoms: reference sites x_i = i*eps (eps = 1/2N), the
// dead-load field, and deformations stored as gap (strain) vectors.

#include "clj/numerics.hpp"
#include "clj/potentials.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace clj {

enum class ForceKind { zero, sine, constant };

/// Closed-form dead load on [-1/2, 1/2] with two derivatives and the
/// primitive sigma(x) = int_{-1/2}^x f.
struct ForceField {
  ForceKind kind = ForceKind::zero;
  double amplitude = 0.0;

  static ForceField zero() { return {ForceKind::zero, 0.0}; }
  static ForceField sine(double a) { return {ForceKind::sine, a}; }
  static ForceField constant(double c) { return {ForceKind::constant, c}; }

  [[nodiscard]] double value(double x) const {
    switch (kind) {
    case ForceKind::sine: return amplitude * std::sin(2 * std::numbers::pi * x);
    case ForceKind::constant: return amplitude;
    default: return 0.0;
    }
  }
  [[nodiscard]] double d1(double x) const {
    constexpr double w = 2 * std::numbers::pi;
    return kind == ForceKind::sine ? amplitude * w * std::cos(w * x) : 0.0;
  }
  [[nodiscard]] double d2(double x) const {
    constexpr double w = 2 * std::numbers::pi;
    return kind == ForceKind::sine ? -amplitude * w * w * std::sin(w * x) : 0.0;
  }
  [[nodiscard]] double primitive(double x) const {
    constexpr double w = 2 * std::numbers::pi;
    switch (kind) {
    case ForceKind::sine: return -amplitude * (std::cos(w * x) + 1.0) / w;
    case ForceKind::constant: return amplitude * (x + 0.5);
    default: return 0.0;
    }
  }
  [[nodiscard]] double sup_d1() const {
    return kind == ForceKind::sine ? std::abs(amplitude) * 2 * std::numbers::pi
                                   : 0.0;
  }
  [[nodiscard]] double sup_d2() const {
    constexpr double w = 2 * std::numbers::pi;
    return kind == ForceKind::sine ? std::abs(amplitude) * w * w : 0.0;
  }
  [[nodiscard]] double sup_abs_primitive() const {
    switch (kind) {
    case ForceKind::sine: return std::abs(amplitude) / std::numbers::pi;
    case ForceKind::constant: return std::abs(amplitude);
    default: return 0.0;
    }
  }
  [[nodiscard]] std::string name() const {
    switch (kind) {
    case ForceKind::sine: return "sin";
    case ForceKind::constant: return "const";
    default: return "zero";
    }
  }
};

struct ChainConfig {
  PotentialSet model;
  int N = 0;      // atoms -N..N-1
  double L = 1.0; // deformed length
  ForceField force;

  ChainConfig() = default;
  ChainConfig(PotentialSet p, int n, double length, ForceField f = {})
      : model(std::move(p)), N(n), L(length), force(f) {
    if (N < 2) throw std::invalid_argument("chain needs N >= 2");
    if (!(L > 0.0)) throw std::invalid_argument("chain needs L > 0");
  }

  [[nodiscard]] double epsilon() const { return 0.5 / N; }
  [[nodiscard]] int atoms() const { return 2 * N; }
  [[nodiscard]] double x(int i) const { return i * epsilon(); }
  /// Periodic index into -N..N-1.
  [[nodiscard]] int wrap(int i) const {
    const int n = 2 * N;
    return ((i + N) % n + n) % n - N;
  }
  /// f_i = f(x_i), extended 2N-periodically.
  [[nodiscard]] double f(int i) const { return force.value(x(wrap(i))); }
};

/// Chain state as 2N gaps g_i = D1 y_i, i = -N..N-1, with y_{-N} = 0.
///
/// Positions are reconstructed by compensated prefix sums. The length
/// constraint eps * sum(g) = L is not enforced here; see length_defect().
class Deformation {
public:
  Deformation() = default;
  Deformation(int N, double L, std::vector<double> gaps)
      : N_(N), L_(L), gaps_(std::move(gaps)) {
    if (N_ < 2 || gaps_.size() != static_cast<std::size_t>(2 * N_))
      throw std::invalid_argument("deformation needs 2N gaps with N >= 2");
    const double eps = 0.5 / N_;
    y_.resize(gaps_.size() + 1);
    y_[0] = 0.0;
    CompensatedSum s;
    for (std::size_t k = 0; k < gaps_.size(); ++k) {
      s.add(eps * gaps_[k]);
      y_[k + 1] = s.value();
    }
  }

  static Deformation uniform(int N, double L) {
    return Deformation(N, L, std::vector<double>(2 * N, L));
  }

  [[nodiscard]] int N() const { return N_; }
  [[nodiscard]] double L() const { return L_; }
  [[nodiscard]] double epsilon() const { return 0.5 / N_; }
  [[nodiscard]] std::span<const double> gaps() const { return gaps_; }

  /// D1 y_i with periodic wrap.
  [[nodiscard]] double gap(int i) const { return gaps_[slot(i)]; }
  /// D2 y_i = (g_i + g_{i+1}) / 2 with periodic wrap.
  [[nodiscard]] double second_difference(int i) const {
    return 0.5 * (gap(i) + gap(i + 1));
  }
  /// y_i for i = -N..N.
  [[nodiscard]] double y(int i) const { return y_.at(i + N_); }
  /// u_i = y_i - L (x_i + 1/2) for i = -N..N.
  [[nodiscard]] double u(int i) const {
    return y(i) - L_ * (i * epsilon() + 0.5);
  }
  /// D1 u_i = g_i - L, periodic.
  [[nodiscard]] double du(int i) const { return gap(i) - L_; }

  [[nodiscard]] bool admissible() const {
    for (double g : gaps_)
      if (!(g > 0.0)) return false;
    return true;
  }
  [[nodiscard]] double length() const { return y_.back(); }
  [[nodiscard]] double length_defect() const { return y_.back() - L_; }

private:
  [[nodiscard]] std::size_t slot(int i) const {
    const int n = 2 * N_;
    return static_cast<std::size_t>(((i + N_) % n + n) % n);
  }

  int N_ = 0;
  double L_ = 0.0;
  std::vector<double> gaps_;
  std::vector<double> y_;
};

/// sigma^eps_i for i = -N..N: sigma_{-N} = -eps f_{-N} / 2,
/// sigma_i = sigma_{i-1} + eps f_{i-1}.
class SigmaField {
public:
  explicit SigmaField(const ChainConfig &cfg) : N_(cfg.N) {
    const double eps = cfg.epsilon();
    values_.resize(2 * N_ + 1);
    values_[0] = -0.5 * eps * cfg.f(-N_);
    for (int i = -N_ + 1; i <= N_; ++i)
      values_[i + N_] = values_[i - 1 + N_] + eps * cfg.f(i - 1);
  }
  [[nodiscard]] double at(int i) const { return values_.at(i + N_); }
  /// Value attached to the cell (x_i, x_{i+1}), i.e. sigma^eps_{i+1}, with
  /// the cell index wrapped periodically.
  [[nodiscard]] double on_cell(int i) const {
    const int n = 2 * N_;
    const int w = ((i + N_) % n + n) % n - N_;
    return at(w + 1);
  }
  [[nodiscard]] std::span<const double> values() const { return values_; }

private:
  int N_;
  std::vector<double> values_;
};

inline SigmaField sigma_field(const ChainConfig &cfg) { return SigmaField(cfg); }

} // namespace clj

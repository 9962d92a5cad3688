#pragma once

// Pair potentials of the confined Lennard-Jones chain: the pure-species
// nearest/second neighbour potentials phi1, phi2, the defect potentials
// psi1, psi2, the continuum density W = phi1 + phi2, and grid-based
// certification of the model assumptions.

#include "clj/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace clj {

/// A C^2 potential on (0, inf), extended by +inf for t <= 0.
///
/// Evaluating the value at t <= 0 yields +inf; asking for a derivative there
/// throws std::domain_error.
class PairPotential {
public:
  using Fn = std::function<double(double)>;

  PairPotential() = default;
  PairPotential(Fn value, Fn first, Fn second)
      : value_(std::move(value)), first_(std::move(first)),
        second_(std::move(second)) {}

  double operator()(double t) const { return t > 0.0 ? value_(t) : kInf; }
  double d1(double t) const {
    require_positive(t);
    return first_(t);
  }
  double d2(double t) const {
    require_positive(t);
    return second_(t);
  }

private:
  static void require_positive(double t) {
    if (!(t > 0.0))
      throw std::domain_error("potential derivative requested at t <= 0");
  }

  Fn value_, first_, second_;
};

struct CertifiedConstants {
  double l_convexity = 0.0;  // lower bound on phi1'', psi1'', W''
  double l_coercivity = 0.0; // (1 - alpha) * l_convexity / 2
  double alpha = 1.0;        // domination constant
  double C = -kInf;          // domination offset paired with alpha
  double kappa = 0.0;        // sup |phi2''| on the grid
  double C_coercivity = -kInf;
};

struct PotentialSet {
  PairPotential phi1, phi2, psi1, psi2;
  std::string label;
  CertifiedConstants constants;
};

inline double W(const PotentialSet &p, double t) {
  return t > 0.0 ? p.phi1(t) + p.phi2(t) : kInf;
}
inline double W_prime(const PotentialSet &p, double t) {
  return p.phi1.d1(t) + p.phi2.d1(t);
}
inline double W_second(const PotentialSet &p, double t) {
  return p.phi1.d2(t) + p.phi2.d2(t);
}

// ---------------------------------------------------------------------------
// Assumption certification

struct StrainGrid {
  double t_min = 1e-3;
  double t_max = 1e2;
  std::size_t points = 1000;
  bool log_spaced = true;

  [[nodiscard]] std::vector<double> nodes() const {
    if (!(t_min > 0.0) || !(t_max > t_min) || points < 3)
      throw std::invalid_argument(
          "strain grid must satisfy 0 < t_min < t_max with >= 3 points");
    std::vector<double> t(points);
    for (std::size_t k = 0; k < points; ++k) {
      const double s = static_cast<double>(k) / static_cast<double>(points - 1);
      t[k] = log_spaced ? t_min * std::pow(t_max / t_min, s)
                        : t_min + s * (t_max - t_min);
    }
    t.back() = t_max;
    return t;
  }
};

struct AssumptionCheck {
  std::string assumption;
  bool pass = false;
  std::optional<double> witness_t; // worst-violation (or extremal) location
  std::string detail;
};

struct ValidationReport {
  std::vector<AssumptionCheck> checks;
  CertifiedConstants constants;

  [[nodiscard]] bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const AssumptionCheck &c) { return c.pass; });
  }
  [[nodiscard]] const AssumptionCheck &check(const std::string &name) const {
    for (const auto &c : checks)
      if (c.assumption == name) return c;
    throw std::out_of_range("no assumption named " + name);
  }
};

namespace detail {

struct Extremum {
  double value;
  std::size_t index;
};

template <class F>
Extremum grid_min(const std::vector<double> &t, F &&f) {
  Extremum e{kInf, 0};
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double v = f(t[k]);
    if (v < e.value || (std::isnan(v) && !std::isnan(e.value))) e = {v, k};
  }
  return e;
}

// Blow-up of a nearest neighbour potential at 0: +inf on t <= 0, strictly
// increasing along t = 10^-1, ..., 10^-12 with non-vanishing increments.
inline AssumptionCheck check_blowup(const PairPotential &p,
                                    const std::string &name) {
  AssumptionCheck c{"1-blowup", true, std::nullopt, ""};
  if (!(std::isinf(p(0.0)) && p(0.0) > 0 && std::isinf(p(-1.0)))) {
    c.pass = false;
    c.witness_t = 0.0;
    c.detail = name + " is finite for t <= 0";
    return c;
  }
  double prev = p(1e-1);
  double increment = 0.0;
  for (int k = 2; k <= 12; ++k) {
    const double t = std::pow(10.0, -k);
    const double v = p(t);
    increment = v - prev;
    if (!(increment > 0.0)) {
      c.pass = false;
      c.witness_t = t;
      c.detail = name + " does not increase toward 0";
      return c;
    }
    prev = v;
  }
  if (increment < 1e-2) {
    c.pass = false;
    c.witness_t = 1e-12;
    c.detail = name + " levels off toward 0";
  }
  return c;
}

} // namespace detail

/// Certifies the six model assumptions on `grid`.
///
/// The force-regularity assumption is certified separately (see
/// ForceField); closed-form force kinds are C^infinity, so the report records
/// it as passing.
inline ValidationReport validate_assumptions(const PotentialSet &p,
                                             const StrainGrid &grid = {}) {
  const std::vector<double> t = grid.nodes();
  ValidationReport rep;

  // (1) blow-up of nearest neighbour potentials
  {
    auto a = detail::check_blowup(p.phi1, "phi1");
    if (a.pass) a = detail::check_blowup(p.psi1, "psi1");
    rep.checks.push_back(a);
  }

  // (2) l-convexity of phi1, psi1
  const auto conv1 = detail::grid_min(
      t, [&](double s) { return std::min(p.phi1.d2(s), p.psi1.d2(s)); });
  rep.checks.push_back({"2-nn-convexity", conv1.value > 0.0, t[conv1.index],
                        "inf min(phi1'', psi1'') = " +
                            std::to_string(conv1.value)});

  // (3) concavity of phi2, psi2
  const auto conc = detail::grid_min(
      t, [&](double s) { return -std::max(p.phi2.d2(s), p.psi2.d2(s)); });
  rep.checks.push_back({"3-snn-concavity", conc.value >= 0.0, t[conc.index],
                        "sup max(phi2'', psi2'') = " +
                            std::to_string(-conc.value)});

  // (4) domination: smallest alpha on a coarse scan for which every
  // second-neighbour + alpha * nearest-neighbour combination attains an
  // interior grid minimum (bounded below, not escaping through an end).
  {
    const std::pair<const PairPotential *, const PairPotential *> pairs[] = {
        {&p.phi2, &p.phi1}, {&p.phi2, &p.psi1},
        {&p.psi2, &p.phi1}, {&p.psi2, &p.psi1}};
    AssumptionCheck dom{"4-domination", false, std::nullopt, ""};
    for (int step = 1; step <= 19 && !dom.pass; ++step) {
      const double alpha = 0.05 * step;
      double C = kInf;
      bool feasible = true;
      for (const auto &[second, nearest] : pairs) {
        const auto m = detail::grid_min(
            t, [&](double s) { return (*second)(s) + alpha * (*nearest)(s); });
        if (m.index == 0 || m.index + 1 == t.size() || !std::isfinite(m.value)) {
          feasible = false;
          dom.witness_t = t[m.index];
          break;
        }
        C = std::min(C, m.value);
      }
      if (feasible) {
        dom.pass = true;
        dom.witness_t.reset();
        rep.constants.alpha = alpha;
        rep.constants.C = C;
        dom.detail = "alpha = " + std::to_string(alpha);
      }
    }
    if (!dom.pass) dom.detail = "unbounded below for every alpha < 1 on grid";
    rep.checks.push_back(dom);
  }

  // (5) l-convexity of W
  const auto convW =
      detail::grid_min(t, [&](double s) { return W_second(p, s); });
  rep.checks.push_back({"5-W-convexity", convW.value > 0.0, t[convW.index],
                        "inf W'' = " + std::to_string(convW.value)});

  // (6) force regularity
  rep.checks.push_back({"6-force-C2", true, std::nullopt,
                        "closed-form force fields are smooth"});

  auto &k = rep.constants;
  const double l_raw = std::min(conv1.value, convW.value);
  k.l_convexity = l_raw > 0.0 ? 0.99 * l_raw : l_raw;
  k.kappa = 0.0;
  for (double s : t) k.kappa = std::max(k.kappa, std::abs(p.phi2.d2(s)));
  if (rep.check("4-domination").pass) {
    k.l_coercivity = (1.0 - k.alpha) * k.l_convexity / 2.0;
    // Gap-local lower bounds: after splitting each second-neighbour bond by
    // concavity, every gap carries one of three one-variable densities.
    const std::function<double(double)> densities[] = {
        [&](double s) { return W(p, s); },
        [&](double s) { return p.phi1(s) + 0.5 * (p.phi2(s) + p.psi2(s)); },
        [&](double s) { return p.psi1(s) + 0.5 * (p.phi2(s) + p.psi2(s)); }};
    double C = kInf;
    for (const auto &h : densities) {
      const auto m = detail::grid_min(
          t, [&](double s) { return h(s) - k.l_coercivity * s * s; });
      if (m.index == 0 || m.index + 1 == t.size()) {
        C = -kInf;
        break;
      }
      C = std::min(C, m.value);
    }
    k.C_coercivity = std::isfinite(C) ? C - 1e-3 * (1.0 + std::abs(C)) : C;
  }
  return rep;
}

/// Assembles a potential set and attaches constants certified on the
/// default grid.
inline PotentialSet make_potential_set(PairPotential phi1, PairPotential phi2,
                                       PairPotential psi1, PairPotential psi2,
                                       std::string label) {
  PotentialSet p{std::move(phi1), std::move(phi2), std::move(psi1),
                 std::move(psi2), std::move(label), {}};
  p.constants = validate_assumptions(p).constants;
  return p;
}

// ---------------------------------------------------------------------------
// Concrete families

/// beta * (t^2 - 2 ln t): l-convex with phi'' = beta (2 + 2/t^2).
inline PairPotential poly_log(double beta) {
  return {[beta](double t) { return beta * (t * t - 2.0 * std::log(t)); },
          [beta](double t) { return beta * (2.0 * t - 2.0 / t); },
          [beta](double t) { return beta * (2.0 + 2.0 / (t * t)); }};
}

/// -kappa * sqrt(1 + t^2): concave for kappa >= 0.
inline PairPotential neg_sqrt(double kappa) {
  return {[kappa](double t) { return -kappa * std::sqrt(1.0 + t * t); },
          [kappa](double t) { return -kappa * t / std::sqrt(1.0 + t * t); },
          [kappa](double t) {
            const double s = 1.0 + t * t;
            return -kappa / (s * std::sqrt(s));
          }};
}

/// phi1 = t^2 - 2 ln t, phi2 = -kappa sqrt(1+t^2),
/// psi1 = beta1 (t^2 - 2 ln t), psi2 = -kappa2 sqrt(1+t^2).
inline PotentialSet poly_log_sqrt(double kappa, double kappa2, double beta1) {
  return make_potential_set(poly_log(1.0), neg_sqrt(kappa), poly_log(beta1),
                            neg_sqrt(kappa2), "poly-log-sqrt");
}

inline PotentialSet default_model() {
  auto p = poly_log_sqrt(0.8, 0.4, 1.5);
  p.label = "default";
  return p;
}

/// Defect potentials pulled toward the pure ones:
/// psi_k <- phi_k + scale * (psi_k - phi_k).
inline PotentialSet scale_defect(const PotentialSet &p, double scale) {
  auto blend = [scale](const PairPotential &phi, const PairPotential &psi) {
    return PairPotential{
        [=](double t) { return phi(t) + scale * (psi(t) - phi(t)); },
        [=](double t) { return phi.d1(t) + scale * (psi.d1(t) - phi.d1(t)); },
        [=](double t) { return phi.d2(t) + scale * (psi.d2(t) - phi.d2(t)); }};
  };
  return make_potential_set(p.phi1, p.phi2, blend(p.phi1, p.psi1),
                            blend(p.phi2, p.psi2),
                            p.label + "*defect" + std::to_string(scale));
}

// ---------------------------------------------------------------------------
// Potentials shifted about a reference strain

/// t -> base(F0 + t) - ref(F0) - ref'(F0) t.
class ShiftedPotential {
public:
  ShiftedPotential(PairPotential base, const PairPotential &reference,
                   double F0)
      : base_(std::move(base)), F0_(F0), ref_value_(reference(F0)),
        ref_slope_(reference.d1(F0)) {}

  double operator()(double t) const {
    const double s = F0_ + t;
    return s > 0.0 ? base_(s) - ref_value_ - ref_slope_ * t : kInf;
  }
  double d1(double t) const { return base_.d1(F0_ + t) - ref_slope_; }
  double d2(double t) const { return base_.d2(F0_ + t); }
  [[nodiscard]] double reference_strain() const { return F0_; }

private:
  PairPotential base_;
  double F0_, ref_value_, ref_slope_;
};

/// Phi_k shift phi_k about F0; Psi_k shift psi_k by the *phi_k* affine part.
struct ShiftedSet {
  ShiftedPotential Phi1, Psi1, Phi2, Psi2;
  double F0;
};

inline ShiftedSet shifted_potentials(const PotentialSet &p, double F0) {
  if (!(F0 > 0.0))
    throw std::invalid_argument("shifted potentials need F0 > 0");
  return {ShiftedPotential(p.phi1, p.phi1, F0),
          ShiftedPotential(p.psi1, p.phi1, F0),
          ShiftedPotential(p.phi2, p.phi2, F0),
          ShiftedPotential(p.psi2, p.phi2, F0), F0};
}

} // namespace clj

#pragma once

// ψ_α exponential Orlicz quasi-norms ‖X‖ = inf{c : E exp(|X|^α / c^α) ≤ 2}
// and the constants of the associated lemmas.

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "regen/common.hpp"

namespace regen {

struct OrliczEstimate {
  double alpha = 1.0;
  double value = 0.0;
  double lo = 0.0;  // final bracket
  double hi = 0.0;
  std::size_t count = 0;
};

namespace detail {

/// Σ w_i exp((|x_i|/c)^α), accumulated in long double. Returns +inf on overflow.
inline long double orlicz_mean(const std::vector<double>& x, const std::vector<double>* w, double exponent,
                               double c) {
  long double acc = 0.0L;
  const long double inv_n = 1.0L / static_cast<long double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double r = static_cast<long double>(std::abs(x[i])) / c;
    const long double z = exponent == 1.0 ? r : std::pow(r, static_cast<long double>(exponent));
    const long double weight = w ? static_cast<long double>((*w)[i]) : inv_n;
    if (weight == 0.0L) continue;
    if (z > 11000.0L) return std::numeric_limits<long double>::infinity();
    acc += weight * std::exp(z);
  }
  return acc;
}

/// Bisection for the Orlicz norm with respect to a weighted point law. Any
/// exponent > 0 is accepted here; the public entry points restrict α to (0, 1].
inline OrliczEstimate orlicz_solve(const std::vector<double>& x, const std::vector<double>* w, double exponent,
                                   double tol) {
  require(!x.empty(), "samples must be nonempty");
  require(tol > 0.0, "tolerance must be positive");
  OrliczEstimate out;
  out.alpha = exponent;
  out.count = x.size();
  double xmax = 0.0, w_at_max = 0.0, xmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(std::isfinite(x[i]), "non-finite sample rejected");
    const double wi = w ? (*w)[i] : 1.0 / static_cast<double>(x.size());
    if (wi <= 0.0) continue;
    const double ax = std::abs(x[i]);
    xmin = std::min(xmin, ax);
    if (ax > xmax) {
      xmax = ax;
      w_at_max = wi;
    } else if (ax == xmax) {
      w_at_max += wi;
    }
  }
  if (xmax == 0.0) return out;  // all mass at zero: norm 0

  double hi = xmax / std::pow(std::log(2.0), 1.0 / exponent);
  if (xmin == xmax) {  // one atom: exact solution
    out.lo = out.hi = out.value = hi;
    return out;
  }
  double lo = w_at_max >= 1.0 ? hi : xmax / std::pow(std::log(2.0 / w_at_max), 1.0 / exponent);
  // The analytic bracket always holds; the expansion guards rounding at the ends.
  while (orlicz_mean(x, w, exponent, lo) < 2.0L) lo *= 0.5;
  while (orlicz_mean(x, w, exponent, hi) > 2.0L) hi *= 2.0;
  while (hi - lo > tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (orlicz_mean(x, w, exponent, mid) > 2.0L)
      lo = mid;
    else
      hi = mid;
  }
  out.lo = lo;
  out.hi = hi;
  out.value = 0.5 * (lo + hi);
  return out;
}

}  // namespace detail

/// Empirical ψ_α norm of a sample.
inline OrliczEstimate psi_norm_empirical(const std::vector<double>& samples, double alpha, double tol = 1e-9) {
  require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
  return detail::orlicz_solve(samples, nullptr, alpha, tol);
}

/// ψ_α norm of a finitely supported law given by atoms and probabilities.
inline OrliczEstimate psi_norm_weighted(const std::vector<double>& atoms, const std::vector<double>& probs,
                                        double alpha, double tol = 1e-12) {
  require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
  require(atoms.size() == probs.size(), "one probability per atom required");
  for (double p : probs) require(std::isfinite(p) && p >= 0.0, "probabilities must be nonnegative");
  return detail::orlicz_solve(atoms, &probs, alpha, tol);
}

/// ‖X‖_{ψ_α} ≤ (1/ln 2)^{(1−α)/α} ‖X‖_{ψ_1}.
inline double lemma_bp_bridge(double norm_psi1, double alpha) {
  require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
  return std::pow(1.0 / std::log(2.0), (1.0 - alpha) / alpha) * norm_psi1;
}

/// (a^α + b^α)^{1/α}.
inline double quasi_triangle(double norm_a, double norm_b, double alpha) {
  require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
  require(norm_a >= 0.0 && norm_b >= 0.0, "norms must be nonnegative");
  return std::pow(std::pow(norm_a, alpha) + std::pow(norm_b, alpha), 1.0 / alpha);
}

struct ConditionalMeanFactor {
  double tight = 1.0;
  double loose = 1.0;
};

/// ‖E(X|F)‖_{ψ_α} ≤ factor·‖X‖_{ψ_α}.
inline ConditionalMeanFactor conditional_mean_norm_factor(double alpha) {
  require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
  ConditionalMeanFactor out;
  out.tight = std::pow(1.0 + std::log(alpha * std::exp((1.0 - alpha) / alpha)) / std::log(2.0), 1.0 / alpha);
  out.loose = std::pow(2.0 / alpha, 1.0 / alpha);
  return out;
}

/// E|X|^β ≤ bound·‖X‖_{ψ1}^β: Γ(β+1) for integer β, 2Γ(β+1) otherwise.
inline double moment_bound(double beta) {
  require(beta > 0.0, "beta must be positive");
  const double g = boost::math::tgamma(beta + 1.0);
  return beta == std::floor(beta) ? g : 2.0 * g;
}

/// P(|X| > t) ≤ 2 exp(−t^α/‖X‖^α).
inline BoundValue tail_from_norm(double norm, double alpha, double t) {
  require(norm > 0.0 && t >= 0.0, "need norm > 0 and t >= 0");
  require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
  return make_bound(2.0L * std::exp(-std::pow(static_cast<long double>(t / norm), static_cast<long double>(alpha))));
}

/// P(|E(X|F)| > t) ≤ 6 exp(−t^α/(2‖X‖^α)), valid for t ≥ (2/α)^{1/α}‖X‖.
inline BoundValue tail_conditional(double norm, double alpha, double t) {
  require(norm > 0.0 && t >= 0.0, "need norm > 0 and t >= 0");
  require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
  if (t < std::pow(2.0 / alpha, 1.0 / alpha) * norm) return make_bound(1.0L, {"below_validity_threshold"});
  return make_bound(6.0L *
                    std::exp(-std::pow(static_cast<long double>(t / norm), static_cast<long double>(alpha)) / 2.0L));
}

}  // namespace regen

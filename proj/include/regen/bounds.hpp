#pragma once

// Evaluators for the Bernstein-like tail bounds. Every evaluator returns a
// BoundValue capped at 1 with the uncapped value and regime flags. Internal
// arithmetic is long double.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "regen/common.hpp"

namespace regen {

using real = long double;

namespace detail {

inline real pw(real x, real a) { return std::pow(x, a); }
inline real ln_floor_e(real x) { return std::log(std::max(x, std::numbers::e_v<real>)); }
inline const real kE8 = std::exp(8.0L);
inline const real kE10 = std::exp(10.0L);

inline void check_alpha(double alpha) { require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]"); }

inline void check_divides(double n, std::size_t m) {
  require(n >= 1.0, "n must be at least 1");
  if (m > 1) {
    require(n == std::floor(n) && std::fmod(n, static_cast<double>(m)) == 0.0, "theorem needs m | n");
  }
}

inline real sum_terms(const std::vector<real>& terms, std::vector<double>& out) {
  real acc = 0.0L;
  for (real t : terms) {
    acc += t;
    out.push_back(static_cast<double>(t));
  }
  return acc;
}

}  // namespace detail

/// The parameter vector of the main theorems. a, b, c are ψ_α norms of the
/// head sum (point start and stationary start) and of an excursion; d is the
/// ψ₁ norm of a regeneration gap.
struct BernsteinParams {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  double d = 1.0;
  double alpha = 1.0;
  double sigma2_mrv = 0.0;
  double delta = 1.0;
  double pi_C = 1.0;
  std::size_t m = 1;
  std::optional<double> D;
  std::optional<double> f_sup;

  double mean_gap() const { return static_cast<double>(m) / (delta * pi_C); }
};

/// Consistency warnings c ≤ D·f_sup and a, b ≤ 2D·f_sup for bounded f.
inline std::vector<std::string> consistency_warnings(const BernsteinParams& p) {
  std::vector<std::string> out;
  if (p.D && p.f_sup) {
    const double cap = *p.D * *p.f_sup;
    if (p.c > cap) out.push_back("c_exceeds_D_fsup");
    if (p.a > 2.0 * cap || p.b > 2.0 * cap) out.push_back("ab_exceeds_2D_fsup");
  }
  return out;
}

inline void validate(const BernsteinParams& p) {
  detail::check_alpha(p.alpha);
  for (double v : {p.a, p.b, p.c, p.d, p.sigma2_mrv})
    require(std::isfinite(v) && v >= 0.0, "parameters must be finite and nonnegative");
  require(p.delta > 0.0 && p.delta <= 1.0, "delta must lie in (0, 1]");
  require(p.pi_C > 0.0 && p.pi_C <= 1.0, "pi(C) must lie in (0, 1]");
  require(p.m >= 1, "m must be positive");
  if (p.D) require(*p.D >= 0.0, "D must be nonnegative");
  if (p.f_sup) require(*p.f_sup >= 0.0, "f_sup must be nonnegative");
}

enum class CutoffVariant { main, iid };

/// Truncation level c(24α⁻³ log n)^{1/α} (main) or c(3α⁻² log n)^{1/α} (iid),
/// with log n = ln(n ∨ e).
inline double m_cutoff(double c, double alpha, double n, CutoffVariant variant = CutoffVariant::main) {
  detail::check_alpha(alpha);
  require(c > 0.0 && n >= 1.0, "need c > 0 and n >= 1");
  const real a = alpha;
  const real k = variant == CutoffVariant::main ? 24.0L / (a * a * a) : 3.0L / (a * a);
  return static_cast<double>(c * detail::pw(k * detail::ln_floor_e(n), 1.0L / a));
}

/// exp(−t²/(2nσ² + (2/3)Mt)), doubled for the supremum version.
inline BoundValue classical_bernstein(double n, double sigma2, double M_sup, double t, bool sup_version = false) {
  require(n >= 1.0 && sigma2 >= 0.0 && M_sup >= 0.0 && t >= 0.0, "invalid classical Bernstein inputs");
  const real tt = t;
  const real raw = (sup_version ? 2.0L : 1.0L) *
                   exp_neg_ratio(tt * tt, 2.0L * n * sigma2 + (2.0L / 3.0L) * static_cast<real>(M_sup) * tt);
  return make_bound(raw);
}

/// exp(−t²/(4nτ² + 2τt)).
inline BoundValue psi1_bernstein(double n, double tau, double t) {
  require(tau > 0.0 && n >= 1.0 && t >= 0.0, "need tau > 0, n >= 1, t >= 0");
  const real tt = t, ta = tau;
  return make_bound(exp_neg_ratio(tt * tt, 4.0L * n * ta * ta + 2.0L * ta * tt));
}

/// e⁸exp(−t^α/(2(6c)^α)) + 2exp(−t²/((72/25)nσ² + (8/5)tM)), M the iid cutoff.
inline BoundValue iid_unbounded(double n, double c, double alpha, double sigma2, double t) {
  detail::check_alpha(alpha);
  require(c > 0.0 && sigma2 >= 0.0 && t >= 0.0, "invalid iid bound inputs");
  const real a = alpha, tt = t;
  const real M = m_cutoff(c, alpha, n, CutoffVariant::iid);
  std::vector<double> parts;
  const real raw = detail::sum_terms(
      {detail::kE8 * std::exp(-detail::pw(tt, a) / (2.0L * detail::pw(6.0L * c, a))),
       2.0L * exp_neg_ratio(tt * tt, (72.0L / 25.0L) * n * sigma2 + (8.0L / 5.0L) * tt * M)},
      parts);
  return make_bound(raw, {}, parts);
}

/// e⁸exp(−t^α/(2(2+√2)^α v^α)) + 2^{3/2}exp(−t²/(8aσ² + 2√2μt)) with
/// B = v(3α⁻² log l)^{1/α} and μ = max(8B/3, 2σ√psi1_excess).
inline BoundValue random_sum_bound(double l, double v, double alpha, double sigma2, double a, double psi1_excess,
                                   double t) {
  detail::check_alpha(alpha);
  require(l >= 1.0 && v > 0.0 && a > 0.0 && sigma2 >= 0.0 && psi1_excess >= 0.0 && t >= 0.0,
          "invalid random-sum bound inputs");
  const real al = alpha, tt = t;
  const real B = static_cast<real>(v) * detail::pw(3.0L / (al * al) * detail::ln_floor_e(l), 1.0L / al);
  const real mu = std::max(8.0L * B / 3.0L, 2.0L * std::sqrt(static_cast<real>(sigma2)) *
                                                std::sqrt(static_cast<real>(psi1_excess)));
  const real r2 = std::sqrt(2.0L);
  std::vector<double> parts;
  const real raw = detail::sum_terms(
      {detail::kE8 * std::exp(-detail::pw(tt, al) / (2.0L * detail::pw(2.0L + r2, al) * detail::pw(v, al))),
       2.0L * r2 * exp_neg_ratio(tt * tt, 8.0L * a * sigma2 + 2.0L * r2 * mu * tt)},
      parts);
  return make_bound(raw, {}, parts);
}

/// 2(m+1)exp(−t²/(c_m(n+1+m)σ²_∞ + d_m t M)), c = (8, 15), d = (6, 10).
inline BoundValue one_dep_bounded(double n, int m_dep, double sigma_inf2, double M_sup, double t) {
  require(m_dep == 1 || m_dep == 2, "m_dep must be 1 or 2");
  require(n >= 1.0 && sigma_inf2 >= 0.0 && M_sup >= 0.0 && t >= 0.0, "invalid one-dependent bound inputs");
  const real cm = m_dep == 1 ? 8.0L : 15.0L;
  const real dm = m_dep == 1 ? 6.0L : 10.0L;
  const real tt = t;
  return make_bound(2.0L * (m_dep + 1) *
                    exp_neg_ratio(tt * tt, cm * (n + 1.0L + m_dep) * sigma_inf2 + dm * tt * M_sup));
}

/// Supremum bound for 1-dependent sums with ψ_α-bounded summands.
inline BoundValue one_dep_sup(double n, int m_dep, double c, double alpha, double sigma_inf2, double t) {
  require(m_dep == 1 || m_dep == 2, "m_dep must be 1 or 2");
  detail::check_alpha(alpha);
  require(c > 0.0 && sigma_inf2 >= 0.0 && t >= 0.0, "invalid one-dependent bound inputs");
  const real al = alpha, tt = t, k = m_dep + 1;
  const real am = 8.0L * k, bm = 5.0L * k, cm = 2.0L * k;
  const real M = m_cutoff(c, alpha, n, CutoffVariant::main);
  std::vector<double> parts;
  const real raw = detail::sum_terms(
      {2.0L * k * detail::kE8 * std::exp(-detail::pw(tt, al) / ((16.0L / al) * detail::pw(am * c, al))),
       2.0L * k * exp_neg_ratio(tt * tt, bm * (n + k) * sigma_inf2 + cm * tt * M)},
      parts);
  return make_bound(raw, {}, parts);
}

/// b = max(2, √‖(⌈N/3⌉ − a + 1)₊‖_{ψ₁}).
inline double stopped_b_factor(double psi1_excess) {
  require(psi1_excess >= 0.0, "psi1 excess must be nonnegative");
  return std::max(2.0, std::sqrt(psi1_excess));
}

/// Random-sum bound for 1-dependent sums stopped at a bounded time.
inline BoundValue one_dep_stopped(double n, double c, double alpha, double sigma_inf2, double a, double b_factor,
                                  double t) {
  detail::check_alpha(alpha);
  require(c > 0.0 && a > 0.0 && sigma_inf2 >= 0.0 && t >= 0.0, "invalid stopped bound inputs");
  require(b_factor >= 2.0, "b_factor must be at least 2");
  std::vector<std::string> flags;
  if (c < 1.0) flags.push_back("below_lemma_regime");
  const real al = alpha, tt = t;
  const real M = m_cutoff(c, alpha, n, CutoffVariant::main);
  std::vector<double> parts;
  const real raw = detail::sum_terms(
      {4.0L * detail::kE8 * std::exp(-detail::pw(tt, al) / ((16.0L / al) * detail::pw(26.0L * c, al))),
       9.0L * exp_neg_ratio(tt * tt, 102.0L * a * sigma_inf2 + 14.0L * M * tt * b_factor)},
      parts);
  return make_bound(raw, std::move(flags), parts);
}

struct KpConstant {
  double L = 0.0;
  double K = 0.0;
};

/// L_p = 16/p + 20, K_p = L_p + 16/L_p. p = +inf gives K = 104/5.
inline KpConstant kp_constant(double p) {
  require(p > 0.0, "p must be positive");
  const real L = std::isinf(p) ? 20.0L : 16.0L / static_cast<real>(p) + 20.0L;
  return {static_cast<double>(L), static_cast<double>(L + 16.0L / L)};
}

/// e·exp(−p n mean_gap/(K_p d²)) bounding P(N > ⌈(1+p)n/mean_gap⌉).
inline BoundValue regen_count_tail(double n, double p, double d, double mean_gap) {
  require(mean_gap > 0.0, "mean gap must be positive");
  require(p > 0.0 && n >= 0.0, "need p > 0 and n >= 0");
  require(d >= mean_gap, "d must dominate the mean gap");
  const real K = kp_constant(p).K;
  return make_bound(std::numbers::e_v<real> *
                    std::exp(-static_cast<real>(p) * n * mean_gap / (K * static_cast<real>(d) * d)));
}

struct RegenCountPsi1 {
  double bound = 0.0;   // 4K_p d²/mean_gap²
  double coarse = 0.0;  // 4K_p d²/m²
};

inline RegenCountPsi1 regen_count_psi1(double p, double d, double mean_gap, double m = 1.0) {
  require(mean_gap > 0.0, "mean gap must be positive");
  require(d >= mean_gap, "d must dominate the mean gap");
  require(m >= 1.0, "m must be at least 1");
  const real K = kp_constant(p).K;
  const real dd = static_cast<real>(d) * d;
  return {static_cast<double>(4.0L * K * dd / (static_cast<real>(mean_gap) * mean_gap)),
          static_cast<double>(4.0L * K * dd / (static_cast<real>(m) * m))};
}

/// Five-term bound with M the main cutoff and mean gap m/(δπ(C)). The last
/// term does not depend on t.
inline BoundValue thm_bi(const BernsteinParams& p, double n, double t) {
  validate(p);
  detail::check_divides(n, p.m);
  require(t >= 0.0, "t must be nonnegative");
  require(p.a > 0.0 && p.b > 0.0 && p.c > 0.0 && p.d > 0.0, "a, b, c, d must be positive");
  auto flags = consistency_warnings(p);
  const real al = p.alpha, tt = t, dpc = static_cast<real>(p.delta) * p.pi_C;
  const real M = m_cutoff(p.c, p.alpha, n, CutoffVariant::main);
  if (tt < 8.0L * std::log(6.0L) * M) flags.push_back("below_proof_threshold");
  std::vector<double> parts;
  const real raw = detail::sum_terms(
      {2.0L * std::exp(-detail::pw(tt, al) / detail::pw(23.0L * p.a, al)),
       2.0L / dpc * std::exp(-detail::pw(tt, al) / detail::pw(23.0L * p.b, al)),
       6.0L * detail::kE8 * std::exp(-detail::pw(tt, al) / ((16.0L / al) * detail::pw(27.0L * p.c, al))),
       6.0L * exp_neg_ratio(tt * tt, 30.0L * n * p.sigma2_mrv + 8.0L * tt * M),
       std::numbers::e_v<real> * std::exp(-static_cast<real>(n) * p.m / (67.0L * dpc * p.d * p.d))},
      parts);
  return make_bound(raw, std::move(flags), parts);
}

/// Four-term bound; every term vanishes as t → ∞.
inline BoundValue thm_bi2(const BernsteinParams& p, double n, double p_split, double t) {
  validate(p);
  detail::check_divides(n, p.m);
  require(p_split > 0.0, "p must be positive");
  require(t >= 0.0, "t must be nonnegative");
  require(p.a > 0.0 && p.b > 0.0 && p.c > 0.0 && p.d > 0.0, "a, b, c, d must be positive");
  auto flags = consistency_warnings(p);
  const real al = p.alpha, tt = t, dpc = static_cast<real>(p.delta) * p.pi_C;
  const real M = m_cutoff(p.c, p.alpha, n, CutoffVariant::main);
  const real K = kp_constant(p_split).K;
  std::vector<double> parts;
  const real raw = detail::sum_terms(
      {2.0L * std::exp(-detail::pw(tt, al) / detail::pw(54.0L * p.a, al)),
       2.0L / dpc * std::exp(-detail::pw(tt, al) / detail::pw(54.0L * p.b, al)),
       4.0L * detail::kE8 * std::exp(-detail::pw(tt, al) / ((16.0L / al) * detail::pw(27.0L * p.c, al))),
       6.0L * exp_neg_ratio(tt * tt, 37.0L * (1.0L + p_split) * n * p.sigma2_mrv +
                                         18.0L * M * p.d * tt * std::sqrt(K))},
      parts);
  return make_bound(raw, std::move(flags), parts);
}

struct BbiConstants {
  double K = 0.0;
  double tau = 0.0;
};

/// K = e¹⁰ + 2/(δπ(C)), τ = 433δπ(C)D².
inline BbiConstants bbi_constants(double delta, double pi_C, double D) {
  require(delta > 0.0 && pi_C > 0.0 && D >= 0.0, "need delta, pi(C) > 0 and D >= 0");
  const real dpc = static_cast<real>(delta) * pi_C;
  return {static_cast<double>(detail::kE10 + 2.0L / dpc), static_cast<double>(433.0L * dpc * D * D)};
}

/// K·exp(−t²/(32nσ² + τ t f_sup log n)), no divisibility requirement on n.
inline BoundValue thm_sbi(double n, double t, double sigma2_mrv, double f_sup, double D, double delta,
                          double pi_C) {
  require(n >= 1.0 && t >= 0.0 && sigma2_mrv >= 0.0 && f_sup >= 0.0 && D >= 0.0, "invalid bounded-f inputs");
  require(delta > 0.0 && delta <= 1.0 && pi_C > 0.0 && pi_C <= 1.0, "delta and pi(C) must lie in (0, 1]");
  const real dpc = static_cast<real>(delta) * pi_C, tt = t;
  const real K = detail::kE10 + 2.0L / dpc;
  return make_bound(K * exp_neg_ratio(tt * tt, 32.0L * n * sigma2_mrv +
                                                   433.0L * tt * dpc * f_sup * D * D * detail::ln_floor_e(n)));
}

enum class DriftScenario { multiplicative, additive, bounded };

/// Scalars of the three drift-like scenarios. Only the fields used by the
/// chosen scenario are read.
struct DriftData {
  DriftScenario scenario = DriftScenario::bounded;
  double l = 1.0;
  double k = 0.0;
  double K = 0.0;
  double V = 0.0;
  double pi_exp_V_half = 1.0;  // π(exp(V)/2), scenario i
  double pi_V = 0.0;           // π(V), scenario ii
  double delta = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  double sup_tau = 0.0;  // sup_{x∈C} ‖τ_C‖_{ψβ, P_x}
  double pi_tau = 0.0;   // ‖τ_C‖_{ψβ, P_π}
  double D = 0.0;
  double f_sup = 0.0;
};

struct DriftBounds {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

inline DriftBounds param_bounds_from_drift(const DriftData& d) {
  if (d.scenario == DriftScenario::bounded) {
    require(d.D >= 0.0 && d.f_sup >= 0.0, "D and f_sup must be nonnegative");
    const double c = d.D * d.f_sup;
    return {2.0 * c, 2.0 * c, c};
  }
  detail::check_alpha(d.alpha);
  require(d.delta > 0.0 && d.delta <= 1.0, "delta must lie in (0, 1]");
  require(d.l > 0.0, "l must be positive");
  const real ratio = std::log(6.0L / (2.0L - d.delta)) / std::log(2.0L / (2.0L - d.delta));
  const real ln2 = std::log(2.0L);
  if (d.scenario == DriftScenario::multiplicative) {
    require(d.pi_exp_V_half > 0.0, "pi(exp(V)/2) must be positive");
    const real top = std::max(2.0L * d.k + d.V + 2.0L * d.K + 2.0L * std::log(static_cast<real>(d.pi_exp_V_half)),
                              2.0L * ln2);
    const real v = detail::pw(2.0L * ratio * top / (2.0L * ln2) * d.l, 1.0L / d.alpha);
    return {static_cast<double>(v), static_cast<double>(v), static_cast<double>(v)};
  }
  require(d.beta > d.alpha, "scenario ii needs beta > alpha");
  require(d.pi_V + d.k > 0.0, "pi(V) + k must be positive");
  const real gamma = static_cast<real>(d.alpha) * d.beta / (static_cast<real>(d.beta) - d.alpha);
  const real top = std::max(d.k + d.V + d.K + std::log(static_cast<real>(d.pi_V) + d.k), ln2);
  const real v = detail::pw(2.0L * ratio, 1.0L / d.alpha) * d.l * (static_cast<real>(d.sup_tau) + d.pi_tau) *
                 detail::pw(top / ln2, 1.0L / gamma);
  return {static_cast<double>(v), static_cast<double>(v), static_cast<double>(v)};
}

}  // namespace regen

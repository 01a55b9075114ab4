#pragma once

// Asymptotic variances: exact σ²_Mrv on finite chains, the excursion
// variance σ²_∞, and regenerative and batch-means estimators of σ²_Mrv.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "regen/chain_models.hpp"
#include "regen/common.hpp"

namespace regen {

struct VarianceEstimate {
  std::string kind;
  double value = 0.0;
  std::optional<double> se;
  std::size_t count = 0;
};

/// σ²_Mrv = 2π(f̄·Zf̄) − π(f̄²) with Z = (I − P + 1π)⁻¹ and f̄ = f − π(f).
inline double sigma_mrv_exact(const FiniteChain& chain, const Vector& f) {
  require(static_cast<std::size_t>(f.size()) == chain.size(), "f must be given on every state");
  const Vector& pi = chain.stationary();
  const auto n = f.size();
  const Vector fc = f.array() - pi.dot(f);
  Matrix A = Matrix::Identity(n, n) - chain.kernel().matrix() + Vector::Ones(n) * pi.transpose();
  const Vector g = A.fullPivLu().solve(fc);
  const double value = 2.0 * pi.dot(fc.cwiseProduct(g)) - pi.dot(fc.cwiseProduct(fc));
  return std::max(value, 0.0);
}

/// Var_π(f) + 2Σ_{k=1}^{lags} Cov_π(f(Υ₀), f(Υ_k)).
inline double sigma_mrv_covariance_sum(const FiniteChain& chain, const Vector& f, std::size_t lags) {
  const Vector& pi = chain.stationary();
  const Vector fc = f.array() - pi.dot(f);
  double acc = pi.dot(fc.cwiseProduct(fc));
  Vector pkf = fc;
  for (std::size_t k = 1; k <= lags; ++k) {
    pkf = chain.kernel().matrix() * pkf;
    acc += 2.0 * pi.dot(fc.cwiseProduct(pkf));
  }
  return acc;
}

namespace detail {

/// γ₀ + 2γ₁ + … + 2γ_L of a series, centered at its mean.
inline double long_run_variance(const std::vector<double>& z, std::size_t lags) {
  const std::size_t n = z.size();
  long double mean = 0.0L;
  for (double v : z) mean += v;
  mean /= static_cast<long double>(n);
  long double out = 0.0L;
  for (std::size_t h = 0; h <= lags && h < n; ++h) {
    long double g = 0.0L;
    for (std::size_t i = 0; i + h < n; ++i) g += (z[i] - mean) * (z[i + h] - mean);
    g /= static_cast<long double>(n);
    out += (h == 0 ? 1.0L : 2.0L) * g;
  }
  return static_cast<double>(out);
}

inline double mean_of(const std::vector<double>& z) {
  long double acc = 0.0L;
  for (double v : z) acc += v;
  return static_cast<double>(acc / static_cast<long double>(z.size()));
}

}  // namespace detail

/// Plug-in mean of χ_i² + 2χ_iχ_{i+1} over adjacent pairs. The pair series is
/// 2-dependent, so its standard error uses the lag-2 long-run variance.
inline VarianceEstimate sigma_inf_from_excursions(const std::vector<double>& chi) {
  require(chi.size() >= 2, "need at least two excursions");
  std::vector<double> z(chi.size() - 1);
  for (std::size_t i = 0; i + 1 < chi.size(); ++i) z[i] = chi[i] * chi[i] + 2.0 * chi[i] * chi[i + 1];
  VarianceEstimate out{"inf_excursion", detail::mean_of(z), std::nullopt, chi.size()};
  out.se = std::sqrt(std::max(detail::long_run_variance(z, 2), 0.0) / static_cast<double>(z.size()));
  return out;
}

/// σ̂²_∞ / mean gap with a delta-method standard error.
inline VarianceEstimate sigma_mrv_regenerative(const std::vector<double>& chi, const std::vector<double>& gaps) {
  require(chi.size() == gaps.size(), "excursion and gap samples must match");
  require(chi.size() >= 2, "need at least two excursions");
  const std::size_t n = chi.size() - 1;
  std::vector<double> z(n), g(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(n));
  for (std::size_t i = 0; i < n; ++i) z[i] = chi[i] * chi[i] + 2.0 * chi[i] * chi[i + 1];
  const double mean_gap = detail::mean_of(g);
  require(mean_gap > 0.0, "mean gap must be positive");
  const double ratio = detail::mean_of(z) / mean_gap;
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = z[i] - ratio * g[i];
  VarianceEstimate out{"mrv_regenerative", ratio, std::nullopt, chi.size()};
  out.se = std::sqrt(std::max(detail::long_run_variance(w, 2), 0.0) / static_cast<double>(n)) / mean_gap;
  return out;
}

/// b · Var(batch means) over non-overlapping batches of length b.
inline VarianceEstimate sigma_mrv_batch(const std::vector<double>& values, std::size_t batch) {
  require(batch >= 1, "batch length must be positive");
  const std::size_t k = values.size() / batch;
  require(k >= 20, "batch means need n / b >= 20");
  std::vector<double> means(k);
  for (std::size_t j = 0; j < k; ++j) {
    long double acc = 0.0L;
    for (std::size_t i = j * batch; i < (j + 1) * batch; ++i) acc += values[i];
    means[j] = static_cast<double>(acc / static_cast<long double>(batch));
  }
  const double mu = detail::mean_of(means);
  long double ss = 0.0L;
  for (double v : means) ss += (v - mu) * (v - mu);
  const double value = static_cast<double>(batch) * static_cast<double>(ss / static_cast<long double>(k - 1));
  VarianceEstimate out{"mrv_batch", value, std::nullopt, values.size()};
  out.se = value * std::sqrt(2.0 / static_cast<double>(k - 1));
  return out;
}

/// E χ_i(f) = δ⁻¹π(C)⁻¹·m·∫f dπ.
inline double mean_excursion_value(double f_bar, double delta, double pi_C, double m) {
  require(delta > 0.0 && pi_C > 0.0 && m >= 1.0, "need delta, pi(C) > 0 and m >= 1");
  return m * f_bar / (delta * pi_C);
}

}  // namespace regen

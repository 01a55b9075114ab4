#pragma once

// Sample statistics used by the structural checks: autocorrelations,
// Kolmogorov–Smirnov tests and chi-square goodness of fit.

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "regen/common.hpp"

namespace regen::stats {

inline double mean(const std::vector<double>& x) {
  long double acc = 0.0L;
  for (double v : x) acc += v;
  return static_cast<double>(acc / static_cast<long double>(x.size()));
}

inline double variance(const std::vector<double>& x) {
  const double mu = mean(x);
  long double acc = 0.0L;
  for (double v : x) acc += (v - mu) * (v - mu);
  return static_cast<double>(acc / static_cast<long double>(x.size() - 1));
}

/// Standard error of the sample mean of independent draws.
inline double standard_error(const std::vector<double>& x) {
  return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

/// Sample autocorrelation at `lag`.
inline double autocorrelation(const std::vector<double>& x, std::size_t lag) {
  require(lag < x.size(), "lag exceeds sample length");
  const double mu = mean(x);
  long double num = 0.0L, den = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) den += (x[i] - mu) * (x[i] - mu);
  for (std::size_t i = 0; i + lag < x.size(); ++i) num += (x[i] - mu) * (x[i + lag] - mu);
  if (den == 0.0L) return 0.0;
  return static_cast<double>(num / den);
}

/// Two-sided standard normal critical value at level `level`, split over `tests`.
inline double bonferroni_z(double level, std::size_t tests) {
  const boost::math::normal_distribution<double> n01;
  return boost::math::quantile(boost::math::complement(n01, level / (2.0 * static_cast<double>(tests))));
}

inline double normal_quantile(double p) {
  const boost::math::normal_distribution<double> n01;
  return boost::math::quantile(n01, p);
}

/// Kolmogorov distribution tail Q(λ) = 2Σ(−1)^{j−1}exp(−2j²λ²).
inline double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double acc = 0.0, sign = 1.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    acc += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * acc, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

inline double ks_p_value(double d, double n_eff) {
  const double s = std::sqrt(n_eff);
  return kolmogorov_q((s + 0.12 + 0.11 / s) * d);
}

/// One-sample KS test against a continuous cdf.
inline KsResult ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf) {
  require(!x.empty(), "KS test needs samples");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  return {d, ks_p_value(d, n)};
}

/// Two-sample KS test; ties are handled by advancing both samples together.
inline KsResult ks_two_sample(std::vector<double> x, std::vector<double> y) {
  require(!x.empty() && !y.empty(), "KS test needs samples");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return {d, ks_p_value(d, nx * ny / (nx + ny))};
}

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t df = 0;
  double p_value = 1.0;
};

/// Pearson goodness of fit; cells with expected count below 5 are merged into
/// their right neighbour (the last cell absorbs the remainder).
inline ChiSquareResult chi_square_gof(const std::vector<double>& observed, const std::vector<double>& probs) {
  require(observed.size() == probs.size() && observed.size() >= 2, "need matching cells");
  double total = 0.0;
  for (double o : observed) total += o;
  std::vector<double> obs, expct;
  double o_acc = 0.0, e_acc = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    o_acc += observed[k];
    e_acc += probs[k] * total;
    if (e_acc >= 5.0) {
      obs.push_back(o_acc);
      expct.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (!obs.empty()) {
    obs.back() += o_acc;
    expct.back() += e_acc;
  }
  require(obs.size() >= 2, "too few cells after merging");
  ChiSquareResult out;
  for (std::size_t k = 0; k < obs.size(); ++k) out.statistic += (obs[k] - expct[k]) * (obs[k] - expct[k]) / expct[k];
  out.df = obs.size() - 1;
  const boost::math::chi_squared_distribution<double> dist(static_cast<double>(out.df));
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

}  // namespace regen::stats

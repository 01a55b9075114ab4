#pragma once

// Verification harness: Monte Carlo and exact tails, domination verdicts,
// structural tests of the regeneration scheme, and parameter fitting.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "regen/bounds.hpp"
#include "regen/chain_models.hpp"
#include "regen/common.hpp"
#include "regen/orlicz.hpp"
#include "regen/parallel.hpp"
#include "regen/rng.hpp"
#include "regen/split_regen.hpp"
#include "regen/stats.hpp"

namespace regen {

enum class Provenance { monte_carlo, enumeration };

inline std::string to_string(Provenance p) { return p == Provenance::monte_carlo ? "monte_carlo" : "enumeration"; }

struct TailCurve {
  std::vector<double> t;
  std::vector<double> estimate;
  std::vector<double> se;  // empty for exact curves
  Provenance provenance = Provenance::monte_carlo;
  std::size_t replicas = 0;

  double se_at(std::size_t i) const { return se.empty() ? 0.0 : se[i]; }
};

/// Evenly spaced grid of `points` values on [lo, hi].
inline std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  require(points >= 1, "grid needs at least one point");
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i)
    out[i] = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  return out;
}

namespace detail {

/// P(|S| > t) from sorted |S| samples, with binomial standard errors.
inline TailCurve tail_from_samples(std::vector<double> abs_sums, const std::vector<double>& t_grid) {
  std::sort(abs_sums.begin(), abs_sums.end());
  TailCurve out;
  out.t = t_grid;
  out.replicas = abs_sums.size();
  const double R = static_cast<double>(abs_sums.size());
  for (double t : t_grid) {
    const auto above = abs_sums.end() - std::upper_bound(abs_sums.begin(), abs_sums.end(), t);
    const double p = static_cast<double>(above) / R;
    out.estimate.push_back(p);
    out.se.push_back(std::sqrt(p * (1.0 - p) / R));
  }
  return out;
}

}  // namespace detail

/// Empirical P(|Σ_{i<n} f(Υ_i)| > t). Replica r uses substream (seed, r).
template <class Chain, class F>
TailCurve mc_tail(const Chain& chain, const F& f, const InitialLaw<typename Chain::state_type>& law, std::size_t n,
                  const std::vector<double>& t_grid, std::size_t replicas, std::uint64_t seed, unsigned threads = 1) {
  require(!t_grid.empty(), "empty t grid");
  require(replicas >= 1000, "Monte Carlo tails need at least 1000 replicas");
  require(n >= 1, "n must be at least 1");
  std::vector<double> sums(replicas);
  parallel_for(replicas, threads, [&](std::size_t r) {
    Stream s = Stream::substream(seed, r);
    auto x = detail::initial_state(chain, law, s);
    long double acc = f(x);
    for (std::size_t i = 1; i < n; ++i) {
      x = chain.step(x, s);
      acc += f(x);
    }
    sums[r] = std::abs(static_cast<double>(acc));
  });
  return detail::tail_from_samples(std::move(sums), t_grid);
}

/// Total number of length-n paths, as a double; used by the enumeration guard.
inline double path_count(std::size_t states, std::size_t n) {
  return std::pow(static_cast<double>(states), static_cast<double>(n));
}

inline void enumeration_guard(std::size_t states, std::size_t n) {
  require_guard(path_count(states, n) <= 1e8, "enumeration guard exceeded: |states|^n > 1e8");
}

namespace detail {

/// Smallest integer scale s ≤ 1000 with s·f on the integer lattice.
inline std::optional<long> lattice_scale(const Vector& f) {
  for (long s = 1; s <= 1000; ++s) {
    bool ok = true;
    for (Eigen::Index i = 0; i < f.size() && ok; ++i) {
      const double v = f(i) * static_cast<double>(s);
      ok = std::abs(v - std::round(v)) <= 1e-9 * std::max(1.0, std::abs(v));
    }
    if (ok) return s;
  }
  return std::nullopt;
}

inline bool exceeds(double abs_sum, double t) { return abs_sum > t + 1e-12 * std::max(1.0, std::abs(t)); }

}  // namespace detail

/// Exact P_μ(|Σ_{i<n} f(Υ_i)| > t). Lattice-valued f uses a DP over
/// (state, integer sum); otherwise every path is enumerated.
inline TailCurve exact_tail(const FiniteChain& chain, const Vector& f, const Vector& mu, std::size_t n,
                            const std::vector<double>& t_grid) {
  require(!t_grid.empty(), "empty t grid");
  require(n >= 1, "n must be at least 1");
  require(static_cast<std::size_t>(f.size()) == chain.size() && static_cast<std::size_t>(mu.size()) == chain.size(),
          "f and the initial law must cover every state");
  const std::size_t S = chain.size();
  enumeration_guard(S, n);
  const Matrix& P = chain.kernel().matrix();
  std::vector<std::pair<double, double>> atoms;  // (|sum|, probability)

  if (const auto scale = detail::lattice_scale(f)) {
    std::vector<long> k(S);
    long lo = 0, hi = 0;
    for (std::size_t x = 0; x < S; ++x) {
      k[x] = std::lround(f(static_cast<Eigen::Index>(x)) * static_cast<double>(*scale));
      lo = std::min(lo, k[x]);
      hi = std::max(hi, k[x]);
    }
    const long offset = -lo * static_cast<long>(n);
    const std::size_t width = static_cast<std::size_t>((hi - lo) * static_cast<long>(n) + 1);
    std::vector<long double> cur(S * width, 0.0L), next(S * width);
    for (std::size_t x = 0; x < S; ++x)
      cur[x * width + static_cast<std::size_t>(k[x] + offset)] = mu(static_cast<Eigen::Index>(x));
    for (std::size_t step = 1; step < n; ++step) {
      std::fill(next.begin(), next.end(), 0.0L);
      for (std::size_t x = 0; x < S; ++x)
        for (std::size_t v = 0; v < width; ++v) {
          const long double w = cur[x * width + v];
          if (w == 0.0L) continue;
          for (std::size_t y = 0; y < S; ++y) {
            const double p = P(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
            if (p == 0.0) continue;
            next[y * width + static_cast<std::size_t>(static_cast<long>(v) + k[y])] += w * p;
          }
        }
      std::swap(cur, next);
    }
    std::vector<long double> by_sum(width, 0.0L);
    for (std::size_t x = 0; x < S; ++x)
      for (std::size_t v = 0; v < width; ++v) by_sum[v] += cur[x * width + v];
    for (std::size_t v = 0; v < width; ++v)
      if (by_sum[v] > 0.0L)
        atoms.emplace_back(std::abs(static_cast<double>(static_cast<long>(v) - offset) / static_cast<double>(*scale)),
                           static_cast<double>(by_sum[v]));
  } else {
    std::vector<std::size_t> path(n, 0);
    std::function<void(std::size_t, long double, long double)> walk = [&](std::size_t depth, long double prob,
                                                                           long double sum) {
      if (prob == 0.0L) return;
      if (depth == n) {
        atoms.emplace_back(std::abs(static_cast<double>(sum)), static_cast<double>(prob));
        return;
      }
      for (std::size_t y = 0; y < S; ++y) {
        const long double p = depth == 0 ? mu(static_cast<Eigen::Index>(y))
                                         : P(static_cast<Eigen::Index>(path[depth - 1]), static_cast<Eigen::Index>(y));
        path[depth] = y;
        walk(depth + 1, prob * p, sum + f(static_cast<Eigen::Index>(y)));
      }
    };
    walk(0, 1.0L, 0.0L);
  }

  TailCurve out;
  out.t = t_grid;
  out.provenance = Provenance::enumeration;
  for (double t : t_grid) {
    long double acc = 0.0L;
    for (const auto& [v, p] : atoms)
      if (detail::exceeds(v, t)) acc += p;
    out.estimate.push_back(std::min(1.0, static_cast<double>(acc)));
  }
  return out;
}

inline TailCurve exact_tail(const FiniteChain& chain, const Vector& f, std::size_t x0, std::size_t n,
                            const std::vector<double>& t_grid) {
  require(x0 < chain.size(), "initial state out of range");
  Vector mu = Vector::Zero(static_cast<Eigen::Index>(chain.size()));
  mu(static_cast<Eigen::Index>(x0)) = 1.0;
  return exact_tail(chain, f, mu, n, t_grid);
}

struct DominationVerdict {
  std::string formula;
  bool pass = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_t = 0.0;
};

/// Pass iff bound(t) ≥ estimate(t) − z·se(t) on every grid point.
inline DominationVerdict check_domination(const TailCurve& tail, const std::vector<double>& bound, double z = 3.0,
                                          std::string formula = "") {
  require(bound.size() == tail.t.size() && tail.estimate.size() == tail.t.size(), "grid mismatch");
  DominationVerdict out;
  out.formula = std::move(formula);
  for (std::size_t i = 0; i < bound.size(); ++i) {
    const double margin = bound[i] - (tail.estimate[i] - z * tail.se_at(i));
    if (margin < out.worst_margin) {
      out.worst_margin = margin;
      out.worst_t = tail.t[i];
    }
  }
  out.pass = out.worst_margin >= 0.0;
  return out;
}

struct StructureReport {
  std::vector<double> gap_acf;  // lags 1..L
  std::vector<double> chi_acf;  // lags 1..L; lag 1 reported only
  double band = 0.0;            // z/√N
  double ks_p_value = 1.0;
  double level = 0.01;
  std::size_t blocks = 0;
  bool gap_acf_pass = true;
  bool chi_acf_pass = true;
  bool ks_pass = true;

  bool pass() const { return gap_acf_pass && chi_acf_pass && ks_pass; }
};

/// Autocorrelation bands (Bonferroni over all tested lags) and a two-sample KS
/// test on the halves of the gap sample.
inline StructureReport check_block_structure(const std::vector<double>& gaps, const std::vector<double>& chi,
                                             std::size_t lags, double level = 0.01) {
  require(gaps.size() >= 1000 && chi.size() >= 1000, "structural tests need at least 1000 blocks");
  require(lags >= 2, "need at least two lags");
  StructureReport out;
  out.level = level;
  out.blocks = std::min(gaps.size(), chi.size());
  const std::size_t tests = lags + (lags - 1);
  const double z = stats::bonferroni_z(level, tests);
  out.band = z / std::sqrt(static_cast<double>(out.blocks));
  for (std::size_t h = 1; h <= lags; ++h) {
    out.gap_acf.push_back(stats::autocorrelation(gaps, h));
    out.chi_acf.push_back(stats::autocorrelation(chi, h));
    if (std::abs(out.gap_acf.back()) > out.band) out.gap_acf_pass = false;
    if (h >= 2 && std::abs(out.chi_acf.back()) > out.band) out.chi_acf_pass = false;
  }
  const auto half = gaps.size() / 2;
  const auto ks = stats::ks_two_sample(std::vector<double>(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(half)),
                                       std::vector<double>(gaps.begin() + static_cast<std::ptrdiff_t>(half), gaps.end()));
  out.ks_p_value = ks.p_value;
  out.ks_pass = ks.p_value >= level;
  return out;
}

struct PitmanReport {
  double lhs = 0.0;  // E_ν Σ_{i=0}^{σ₀/m} G(Υ_{mi}, Y_{mi})
  double se = 0.0;
  double rhs = 0.0;  // δ⁻¹π(C)⁻¹ E_{π*} G
  std::size_t replicas = 0;
  bool pass = false;
};

/// Both sides of the occupation formula on a finite chain.
inline PitmanReport check_pitman(const FiniteChain& chain, const std::function<double(std::size_t, int)>& G,
                                 std::size_t replicas, std::uint64_t seed, unsigned threads = 1) {
  require(replicas >= 2, "need replicas");
  const auto star = split_measure(chain.stationary(), chain.minorization());
  long double eg = 0.0L;
  for (std::size_t x = 0; x < chain.size(); ++x) {
    eg += star.level0(static_cast<Eigen::Index>(x)) * G(x, 0);
    eg += star.level1(static_cast<Eigen::Index>(x)) * G(x, 1);
  }
  PitmanReport out;
  out.replicas = replicas;
  out.rhs = static_cast<double>(eg / (static_cast<long double>(chain.delta()) * chain.pi_small_set()));
  std::vector<double> sums(replicas);
  parallel_for(replicas, threads, [&](std::size_t r) {
    Stream s = Stream::substream(seed, r);
    std::vector<std::size_t> path;
    std::size_t x = chain.sample_nu(s);
    long double acc = 0.0L;
    for (std::size_t k = 0;; ++k) {
      require_guard(k < 100000000, "no regeneration observed within the simulation cap");
      const bool level = chain.sample_block(x, s, path);
      acc += G(x, level ? 1 : 0);
      if (level) break;
      x = path.back();
    }
    sums[r] = static_cast<double>(acc);
  });
  out.lhs = stats::mean(sums);
  out.se = stats::standard_error(sums);
  out.pass = std::abs(out.lhs - out.rhs) <= 4.0 * out.se + 1e-12;
  return out;
}

struct BlockMarkovReport {
  std::size_t histories = 0;  // distinct (Ξ_0..Ξ_i) histories compared
  std::size_t groups = 0;     // distinct Ξ_i values
  double max_abs_diff = 0.0;
  bool pass = false;
};

/// Exact check that E(g(Ξ_{i+1}) | Ξ_0..Ξ_i) depends on Ξ_i only, with
/// g(Ξ_{i+1}) = χ_i(f)·1{σ_{i+1} − σ_i ≤ window}. Split paths Υ_0..Υ_n with
/// levels are enumerated from the initial law μ. `corrupt_shift` is added to
/// the first full conditional (harness self-test).
inline BlockMarkovReport check_block_markov(const FiniteChain& chain, const Vector& mu, std::size_t n,
                                            const Vector& f, std::size_t window, double corrupt_shift = 0.0) {
  const std::size_t m = chain.order();
  const std::size_t S = chain.size();
  require(window >= m && window % m == 0, "window must be a positive multiple of m");
  require(n >= 2 * m, "horizon too short");
  const std::size_t blocks = n / m;  // level-carrying block starts 0, m, .., (blocks−1)m with km + m ≤ n
  require_guard(path_count(S, n + 1) * std::pow(2.0, static_cast<double>(blocks)) <= 1e8,
                "enumeration guard exceeded");
  const Matrix& P = chain.kernel().matrix();

  using Key = std::vector<long>;
  std::map<Key, std::pair<long double, long double>> full, last;  // (Σ p·g, Σ p)
  std::map<Key, Key> full_to_last;

  std::vector<std::size_t> states(n + 1);
  std::vector<int> levels(blocks);
  auto leaf = [&](long double prob) {
    std::vector<std::size_t> sig;
    for (std::size_t k = 0; k < blocks; ++k)
      if (levels[k]) sig.push_back(k * m);
    for (std::size_t i = 1; i < sig.size(); ++i) {
      // levels at block starts up to σ_i + window must be known: σ_i + window + m ≤ n
      if (sig[i] + window + m > n) break;
      Key hist, tailkey;
      hist.push_back(static_cast<long>(i));
      std::size_t begin = 0;
      for (std::size_t j = 0; j <= i; ++j) {
        const std::size_t end = sig[j] + m;
        hist.push_back(-1);  // block separator
        for (std::size_t q = begin; q < end; ++q) hist.push_back(static_cast<long>(states[q]));
        if (j == i)
          for (std::size_t q = begin; q < end; ++q) tailkey.push_back(static_cast<long>(states[q]));
        begin = end;
      }
      tailkey.insert(tailkey.begin(), static_cast<long>(i));
      long double g = 0.0L;
      if (i + 1 < sig.size() && sig[i + 1] - sig[i] <= window) {
        for (std::size_t q = sig[i] + m; q < sig[i + 1] + m; ++q) g += f(static_cast<Eigen::Index>(states[q]));
      }
      auto& fe = full[hist];
      fe.first += prob * g;
      fe.second += prob;
      auto& le = last[tailkey];
      le.first += prob * g;
      le.second += prob;
      full_to_last[hist] = tailkey;
    }
  };

  // depth counts states placed; a level is drawn once the endpoint of its block is placed.
  std::function<void(std::size_t, long double)> walk = [&](std::size_t depth, long double prob) {
    if (prob == 0.0L) return;
    if (depth == n + 1) {
      leaf(prob);
      return;
    }
    for (std::size_t y = 0; y < S; ++y) {
      const long double p = depth == 0 ? mu(static_cast<Eigen::Index>(y))
                                       : P(static_cast<Eigen::Index>(states[depth - 1]), static_cast<Eigen::Index>(y));
      if (p == 0.0L) continue;
      states[depth] = y;
      if (depth >= m && depth % m == 0) {
        const std::size_t k = depth / m - 1;
        const std::size_t x = states[k * m];
        const long double r = chain.in_small_set(x) ? chain.rn_derivative(x, y) : 0.0L;
        levels[k] = 1;
        walk(depth + 1, prob * p * r);
        levels[k] = 0;
        walk(depth + 1, prob * p * (1.0L - r));
      } else {
        walk(depth + 1, prob * p);
      }
    }
  };
  walk(0, 1.0L);

  BlockMarkovReport out;
  out.histories = full.size();
  out.groups = last.size();
  bool first = true;
  for (const auto& [hist, v] : full) {
    if (v.second <= 0.0L) continue;
    double cond_full = static_cast<double>(v.first / v.second);
    if (first) {
      cond_full += corrupt_shift;
      first = false;
    }
    const auto& lv = last.at(full_to_last.at(hist));
    const double cond_last = static_cast<double>(lv.first / lv.second);
    out.max_abs_diff = std::max(out.max_abs_diff, std::abs(cond_full - cond_last));
  }
  out.pass = out.max_abs_diff <= 1e-10;
  return out;
}

/// X_i = h(ξ_i, ξ_{i+1}) for i.i.d. ξ, i = 0..length−1.
inline std::vector<double> two_block_factor(const std::function<double(double, double)>& h,
                                            const std::function<double(Stream&)>& xi, std::size_t length, Stream& s) {
  std::vector<double> out(length);
  double prev = xi(s);
  for (std::size_t i = 0; i < length; ++i) {
    const double next = xi(s);
    out[i] = h(prev, next);
    prev = next;
  }
  return out;
}

/// Empirical P(sup_{k≤n} |Σ_{i≤k} X_i| > t) over independent two-block-factor runs.
inline TailCurve two_block_factor_sup_tail(const std::function<double(double, double)>& h,
                                           const std::function<double(Stream&)>& xi, std::size_t n,
                                           const std::vector<double>& t_grid, std::size_t replicas,
                                           std::uint64_t seed, unsigned threads = 1) {
  require(!t_grid.empty(), "empty t grid");
  std::vector<double> sups(replicas);
  parallel_for(replicas, threads, [&](std::size_t r) {
    Stream s = Stream::substream(seed, r);
    double prev = xi(s), acc = 0.0, sup = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double next = xi(s);
      acc += h(prev, next);
      sup = std::max(sup, std::abs(acc));
      prev = next;
    }
    sups[r] = sup;
  });
  return detail::tail_from_samples(std::move(sups), t_grid);
}

/// Law of σ₀ (in steps) from initial law μ on a finite chain, truncated once
/// the remaining mass drops below `tail_mass`.
struct SigmaPmf {
  std::vector<double> values;
  std::vector<double> probs;
  double truncated_mass = 0.0;
};

inline SigmaPmf sigma0_pmf(const FiniteChain& chain, const Vector& mu, double tail_mass = 1e-15,
                           std::size_t max_blocks = 1000000) {
  const auto& mz = chain.minorization();
  const Matrix& pm = chain.m_step();
  Vector q = mu;
  SigmaPmf out;
  for (std::size_t k = 0; k < max_blocks; ++k) {
    double c_mass = 0.0;
    Vector next = q.transpose() * pm;
    for (std::size_t x = 0; x < chain.size(); ++x)
      if (mz.small_set[x]) c_mass += q(static_cast<Eigen::Index>(x));
    next -= chain.delta() * c_mass * mz.nu;
    out.values.push_back(static_cast<double>(k * chain.order()));
    out.probs.push_back(chain.delta() * c_mass);
    q = next.cwiseMax(0.0);
    out.truncated_mass = q.sum();
    if (out.truncated_mass < tail_mass) return out;
  }
  return out;
}

/// Law of the gap σ_{i+1} − σ_i: m plus σ₀ under a ν start.
inline SigmaPmf gap_pmf(const FiniteChain& chain, double tail_mass = 1e-15) {
  auto out = sigma0_pmf(chain, chain.minorization().nu, tail_mass);
  for (auto& v : out.values) v += static_cast<double>(chain.order());
  return out;
}

inline double pmf_mean(const SigmaPmf& pmf) {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < pmf.values.size(); ++i) acc += static_cast<long double>(pmf.values[i]) * pmf.probs[i];
  return static_cast<double>(acc);
}

/// Exact P(N > K) at horizon n, with N = inf{i : σ_i ≥ n − m}: the
/// probability of at least K+1 regenerations at block starts below n − m.
inline double exact_regen_count_tail(const FiniteChain& chain, const Vector& mu, std::size_t n, std::size_t K) {
  const std::size_t m = chain.order();
  const auto& mz = chain.minorization();
  const Matrix& pm = chain.m_step();
  const std::size_t S = chain.size();
  require(n >= m, "n must be at least m");
  const std::size_t starts = (n - m + m - 1) / m;  // block starts km < n − m
  // dist[c][x]: probability of c regenerations so far with block-start state x
  std::vector<Vector> dist(starts + 2, Vector::Zero(static_cast<Eigen::Index>(S)));
  dist[0] = mu;
  for (std::size_t k = 0; k < starts; ++k) {
    std::vector<Vector> next(starts + 2, Vector::Zero(static_cast<Eigen::Index>(S)));
    for (std::size_t c = 0; c <= k; ++c) {
      const Vector& q = dist[c];
      double c_mass = 0.0;
      for (std::size_t x = 0; x < S; ++x)
        if (mz.small_set[x]) c_mass += q(static_cast<Eigen::Index>(x));
      Vector stay = q.transpose() * pm;
      stay -= chain.delta() * c_mass * mz.nu;
      next[c] += stay.cwiseMax(0.0);
      next[c + 1] += chain.delta() * c_mass * mz.nu;
    }
    dist = std::move(next);
  }
  double acc = 0.0;
  for (std::size_t c = K + 1; c < dist.size(); ++c) acc += dist[c].sum();
  return acc;
}

/// Bound parameters fitted from simulated cycles.
struct FittedParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double D = 0.0;
  double sigma0_point = 0.0;       // ‖σ₀‖_{ψ₁} under the point start
  double sigma0_stationary = 0.0;  // ‖σ₀‖_{ψ₁} under the stationary start
  double mean_gap = 0.0;
  double safety = 1.2;
  double alpha = 1.0;
  std::size_t cycles = 0;
};

/// a, b: ψ_α norms of Σ_{k≤σ₀/m}|Θ_k| from the point start x0 and the
/// stationary start; c: ψ_α norm of excursions; d: ψ₁ norm of gaps;
/// D = max(d, ‖σ₀‖ under both starts). All are inflated by `safety`.
template <class Chain, class F>
FittedParams fit_parameters(const Chain& chain, const F& f, typename Chain::state_type x0, double alpha,
                            std::size_t cycles, std::uint64_t seed, double safety = 1.2) {
  require(safety >= 1.0, "safety factor must be at least 1");
  require(cycles >= 10, "need cycles to fit");
  std::vector<double> head_x(cycles), head_pi(cycles), s0_x(cycles), s0_pi(cycles);
  for (std::size_t r = 0; r < cycles; ++r) {
    Stream s = Stream::substream(seed, 2 * r);
    auto cx = first_cycle(chain, InitialLaw<typename Chain::state_type>::point(x0), f, s);
    Stream t = Stream::substream(seed, 2 * r + 1);
    auto cp = first_cycle(chain, InitialLaw<typename Chain::state_type>::stationary(), f, t);
    head_x[r] = cx.head_abs;
    head_pi[r] = cp.head_abs;
    s0_x[r] = static_cast<double>(cx.sigma0);
    s0_pi[r] = static_cast<double>(cp.sigma0);
  }
  Stream s = Stream::substream(seed, 2 * cycles);
  const auto ex = collect_excursions(chain, InitialLaw<typename Chain::state_type>::point(x0), f, cycles, s);
  std::vector<double> chi, gaps;
  for (const auto& e : ex) {
    chi.push_back(e.value);
    gaps.push_back(static_cast<double>(e.gap));
  }
  FittedParams out;
  out.safety = safety;
  out.alpha = alpha;
  out.cycles = cycles;
  out.a = safety * psi_norm_empirical(head_x, alpha).value;
  out.b = safety * psi_norm_empirical(head_pi, alpha).value;
  out.c = safety * psi_norm_empirical(chi, alpha).value;
  out.d = safety * psi_norm_empirical(gaps, 1.0).value;
  out.sigma0_point = safety * psi_norm_empirical(s0_x, 1.0).value;
  out.sigma0_stationary = safety * psi_norm_empirical(s0_pi, 1.0).value;
  out.D = std::max({out.d, out.sigma0_point, out.sigma0_stationary});
  out.mean_gap = stats::mean(gaps);
  return out;
}

/// Domination report for one configuration.
struct VerificationReport {
  std::string chain;
  std::string functional;
  std::size_t n = 0;
  double z = 3.0;
  std::uint64_t seed = 0;
  TailCurve tail;
  std::map<std::string, std::vector<double>> bounds;
  std::vector<DominationVerdict> verdicts;
  std::map<std::string, double> parameters;

  bool pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.pass; });
  }
};

}  // namespace regen

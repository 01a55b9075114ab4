#pragma once

// Split-chain simulation, regeneration times, blocks, excursions and the
// head/middle/tail decomposition of an additive functional.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "regen/chain_models.hpp"
#include "regen/common.hpp"
#include "regen/rng.hpp"

namespace regen {

enum class InitKind { point, nu, stationary };

template <class State>
struct InitialLaw {
  InitKind kind = InitKind::point;
  State x{};

  static InitialLaw point(State x0) { return {InitKind::point, x0}; }
  static InitialLaw nu() { return {InitKind::nu, State{}}; }
  static InitialLaw stationary() { return {InitKind::stationary, State{}}; }
};

template <class Chain>
std::string init_tag(const Chain&, InitKind kind) {
  switch (kind) {
    case InitKind::point: return "point";
    case InitKind::nu: return "nu";
    case InitKind::stationary: return Chain::exact_stationary ? "stationary" : "approximate-stationary";
  }
  return "unknown";
}

template <class State>
struct SplitTrajectory {
  std::vector<State> states;
  std::vector<std::uint8_t> levels;
  std::vector<std::size_t> regenerations;  // σ₀ < σ₁ < …
  std::size_t m = 1;
  std::string init;

  std::size_t size() const { return states.size(); }
};

namespace detail {

template <class Chain>
typename Chain::state_type initial_state(const Chain& chain, const InitialLaw<typename Chain::state_type>& law,
                                         Stream& s) {
  switch (law.kind) {
    case InitKind::point: return law.x;
    case InitKind::nu: return chain.sample_nu(s);
    case InitKind::stationary: return chain.sample_stationary(s);
  }
  return law.x;
}

/// Appends one m-block starting at traj.states.back().
template <class Chain>
void append_block(const Chain& chain, SplitTrajectory<typename Chain::state_type>& traj,
                  std::vector<typename Chain::state_type>& buffer, Stream& s) {
  const std::size_t start = traj.states.size() - 1;
  const bool level = chain.sample_block(traj.states.back(), s, buffer);
  traj.levels.resize(start + traj.m, level ? 1 : 0);
  if (level) traj.regenerations.push_back(start);
  traj.states.insert(traj.states.end(), buffer.begin(), buffer.end());
}

}  // namespace detail

/// Runs the split chain for n states Υ₀..Υ_{n−1} with levels. Each m-block is
/// drawn from the kernel first and its level is then drawn from r(x, x_m).
template <class Chain>
SplitTrajectory<typename Chain::state_type> simulate_split(const Chain& chain,
                                                           const InitialLaw<typename Chain::state_type>& law,
                                                           std::size_t n, Stream& s) {
  const std::size_t m = chain.order();
  require(n >= m, "path length n must satisfy n >= m");
  SplitTrajectory<typename Chain::state_type> traj;
  traj.m = m;
  traj.init = init_tag(chain, law.kind);
  traj.states.reserve(n + m);
  traj.levels.reserve(n + m);
  traj.states.push_back(detail::initial_state(chain, law, s));
  std::vector<typename Chain::state_type> buffer;
  while (traj.levels.size() < n) detail::append_block(chain, traj, buffer, s);
  traj.states.resize(n);
  traj.levels.resize(n);
  while (!traj.regenerations.empty() && traj.regenerations.back() >= n) traj.regenerations.pop_back();
  return traj;
}

/// Like simulate_split, but keeps running until some regeneration σ ≥ n − m has
/// occurred and its block is complete, so the decomposition at horizon n is
/// defined. `max_length` caps the run (guard error when exceeded).
template <class Chain>
SplitTrajectory<typename Chain::state_type> simulate_split_covering(
    const Chain& chain, const InitialLaw<typename Chain::state_type>& law, std::size_t n, Stream& s,
    std::size_t max_length = 0) {
  const std::size_t m = chain.order();
  require(n >= m, "path length n must satisfy n >= m");
  if (max_length == 0) max_length = 1000 * n + 100000;
  SplitTrajectory<typename Chain::state_type> traj;
  traj.m = m;
  traj.init = init_tag(chain, law.kind);
  traj.states.push_back(detail::initial_state(chain, law, s));
  std::vector<typename Chain::state_type> buffer;
  while (traj.levels.size() < n || traj.regenerations.empty() || traj.regenerations.back() + m < n) {
    require_guard(traj.levels.size() < max_length, "no regeneration observed within the simulation cap");
    detail::append_block(chain, traj, buffer, s);
  }
  traj.states.resize(traj.levels.size());
  return traj;
}

/// Split measure μ*: level-1 mass δμ(C∩A), level-0 mass (1−δ)μ(C∩A) + μ(A∖C).
struct SplitMeasure {
  Vector level0;
  Vector level1;
};

inline SplitMeasure split_measure(const Vector& mu, const FiniteMinorization& mz) {
  require(static_cast<std::size_t>(mu.size()) == mz.small_set.size(), "measure must cover every state");
  require((mu.array() >= 0.0).all() && std::abs(mu.sum() - 1.0) <= 1e-12, "mu must be a probability vector");
  SplitMeasure out{mu, Vector::Zero(mu.size())};
  for (Eigen::Index x = 0; x < mu.size(); ++x) {
    if (!mz.small_set[static_cast<std::size_t>(x)]) continue;
    out.level1(x) = mz.delta * mu(x);
    out.level0(x) = (1.0 - mz.delta) * mu(x);
  }
  return out;
}

template <class State>
const std::vector<std::size_t>& regeneration_times(const SplitTrajectory<State>& traj) {
  return traj.regenerations;
}

/// Half-open index range [begin, end) of one random block Ξ_i.
struct Block {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t length() const { return end - begin; }
};

/// Ξ_i spans Υ_{σ_{i−1}+m}..Υ_{σ_i+m−1} with σ_{−1} = −m. Only complete
/// blocks are returned.
template <class State>
std::vector<Block> extract_blocks(const SplitTrajectory<State>& traj) {
  std::vector<Block> out;
  std::size_t begin = 0;
  for (auto sigma : traj.regenerations) {
    const std::size_t end = sigma + traj.m;
    if (end > traj.size()) break;
    out.push_back({begin, end});
    begin = end;
  }
  return out;
}

struct Excursion {
  double value = 0.0;    // χ_i(f)
  std::size_t gap = 0;   // σ_{i+1} − σ_i
};

/// χ_i(f) = Σ f(Υ_k) over σ_i+m ≤ k ≤ σ_{i+1}+m−1, for every complete cycle.
template <class State, class F>
std::vector<Excursion> excursions(const SplitTrajectory<State>& traj, const F& f) {
  std::vector<Excursion> out;
  const auto& sig = traj.regenerations;
  for (std::size_t i = 0; i + 1 < sig.size(); ++i) {
    const std::size_t hi = sig[i + 1] + traj.m;
    if (hi > traj.size()) break;
    long double acc = 0.0L;
    for (std::size_t k = sig[i] + traj.m; k < hi; ++k) acc += f(traj.states[k]);
    out.push_back({static_cast<double>(acc), sig[i + 1] - sig[i]});
  }
  return out;
}

struct RegenerationCount {
  std::size_t N = 0;
  bool no_regeneration_observed = false;
};

/// N = inf{i ≥ 0 : σ_i + (m−1) ≥ n−1}. A run with no regeneration before
/// n − m has N = 0; an empty σ list is flagged.
template <class State>
RegenerationCount count_regenerations(const SplitTrajectory<State>& traj, std::size_t n) {
  require(n >= traj.m, "horizon n must satisfy n >= m");
  require(n <= traj.size(), "horizon n exceeds trajectory length");
  RegenerationCount out;
  const auto& sig = traj.regenerations;
  if (sig.empty()) {
    out.no_regeneration_observed = true;
    return out;
  }
  for (std::size_t i = 0; i < sig.size(); ++i) {
    if (sig[i] + traj.m >= n) {
      out.N = i;
      return out;
    }
  }
  throw Error(Error::Kind::validation, "horizon n exceeds trajectory length: sigma_N not observed");
}

struct BlockDecomposition {
  double head = 0.0;    // signed first bracket
  double middle = 0.0;  // Σ_{i=1}^N χ_{i−1}
  double tail = 0.0;    // signed overshoot Σ_{k=n}^{σ_N+m−1} f(Υ_k)
  std::size_t N = 0;
  bool no_regeneration_observed = false;
  double direct = 0.0;  // Σ_{i<n} f(Υ_i)

  double H() const { return std::abs(head); }
  double M() const { return std::abs(middle); }
  double T() const { return std::abs(tail); }
  double reconstructed() const { return head + middle - tail; }
};

template <class State, class F>
BlockDecomposition block_decompose(const SplitTrajectory<State>& traj, const F& f, std::size_t n) {
  const std::size_t m = traj.m;
  require(n % m == 0, "block decomposition needs m | n");
  const auto count = count_regenerations(traj, n);
  BlockDecomposition out;
  out.N = count.N;
  out.no_regeneration_observed = count.no_regeneration_observed;
  long double direct = 0.0L;
  for (std::size_t i = 0; i < n; ++i) direct += f(traj.states[i]);
  out.direct = static_cast<double>(direct);

  const auto& sig = traj.regenerations;
  long double head = 0.0L, middle = 0.0L, tail = 0.0L;
  if (out.N == 0) {
    for (std::size_t i = 0; i < n; ++i) head += f(traj.states[i]);
  } else {
    // Θ_0..Θ_{σ₀/m} covers Υ_0..Υ_{σ₀+m−1}
    for (std::size_t k = 0; k < sig[0] + m; ++k) head += f(traj.states[k]);
    for (std::size_t k = sig[0] + m; k < sig[out.N] + m; ++k) middle += f(traj.states[k]);
    require(sig[out.N] + m <= traj.size(), "trajectory does not cover sigma_N + m - 1");
    for (std::size_t k = n; k < sig[out.N] + m; ++k) tail += f(traj.states[k]);
  }
  out.head = static_cast<double>(head);
  out.middle = static_cast<double>(middle);
  out.tail = static_cast<double>(tail);
  return out;
}

struct CycleSummary {
  double head_abs = 0.0;  // Σ_{k=0}^{σ₀/m} |Θ_k|
  std::size_t sigma0 = 0;
};

/// Runs from the initial law until the first regeneration, without storing
/// the path. Θ_k is the sum of f over the m-block starting at km.
template <class Chain, class F>
CycleSummary first_cycle(const Chain& chain, const InitialLaw<typename Chain::state_type>& law, const F& f,
                         Stream& s, std::size_t max_blocks = 100000000) {
  const std::size_t m = chain.order();
  std::vector<typename Chain::state_type> path;
  auto x = detail::initial_state(chain, law, s);
  CycleSummary out;
  long double acc = 0.0L;
  for (std::size_t k = 0;; ++k) {
    require_guard(k < max_blocks, "no regeneration observed within the simulation cap");
    const bool level = chain.sample_block(x, s, path);
    long double theta = f(x);
    for (std::size_t j = 0; j + 1 < m; ++j) theta += f(path[j]);
    acc += std::abs(theta);
    if (level) {
      out.head_abs = static_cast<double>(acc);
      out.sigma0 = k * m;
      return out;
    }
    x = path.back();
  }
}

/// Streams the split chain until `count` complete excursions χ_0.. are
/// collected. No trajectory is stored.
template <class Chain, class F>
std::vector<Excursion> collect_excursions(const Chain& chain, const InitialLaw<typename Chain::state_type>& law,
                                          const F& f, std::size_t count, Stream& s) {
  const std::size_t m = chain.order();
  std::vector<Excursion> out;
  out.reserve(count);
  std::vector<typename Chain::state_type> path;
  auto x = detail::initial_state(chain, law, s);
  bool started = false;
  std::size_t last = 0;
  long double acc = 0.0L;
  for (std::size_t k = 0; out.size() < count; ++k) {
    const bool level = chain.sample_block(x, s, path);
    if (started) {
      acc += f(x);
      for (std::size_t j = 0; j + 1 < m; ++j) acc += f(path[j]);
    }
    if (level) {
      if (started) out.push_back({static_cast<double>(acc), k * m - last});
      started = true;
      last = k * m;
      acc = 0.0L;
    }
    x = path.back();
  }
  return out;
}

}  // namespace regen

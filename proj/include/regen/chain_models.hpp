#pragma once

// State spaces, transition kernels and minorization data. Finite chains carry
// every exact reference quantity; the singular mod-1 chain and generic
// sampler-backed chains support simulation only.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "regen/common.hpp"
#include "regen/rng.hpp"

namespace regen {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace detail {

inline bool reaches_all(const Matrix& adj, bool transpose) {
  const auto n = static_cast<std::size_t>(adj.rows());
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> todo;
  todo.push(0);
  seen[0] = true;
  while (!todo.empty()) {
    const auto x = todo.front();
    todo.pop();
    for (std::size_t y = 0; y < n; ++y) {
      const double w = transpose ? adj(y, x) : adj(x, y);
      if (w > 0.0 && !seen[y]) {
        seen[y] = true;
        todo.push(y);
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

inline std::vector<double> cumulative(const Eigen::Ref<const Vector>& probs) {
  std::vector<double> cum(static_cast<std::size_t>(probs.size()));
  double acc = 0.0;
  for (Eigen::Index j = 0; j < probs.size(); ++j) {
    acc += probs(j);
    cum[static_cast<std::size_t>(j)] = acc;
  }
  // Zero-probability trailing states must never be selected.
  for (auto j = cum.size(); j-- > 0;) {
    if (probs(static_cast<Eigen::Index>(j)) > 0.0) {
      std::fill(cum.begin() + static_cast<std::ptrdiff_t>(j), cum.end(), 1.0);
      break;
    }
  }
  return cum;
}

inline std::size_t draw(const std::vector<double>& cum, double u) {
  if (cum.size() <= 8) {
    std::size_t j = 0;
    while (u >= cum[j]) ++j;
    return j;
  }
  return static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
}

}  // namespace detail

/// Row-stochastic transition matrix over a labeled finite state set.
class FiniteKernel {
 public:
  explicit FiniteKernel(Matrix transition, std::vector<std::string> labels = {})
      : p_(std::move(transition)), labels_(std::move(labels)) {
    require(p_.rows() > 0 && p_.rows() == p_.cols(), "transition matrix must be square and nonempty");
    for (Eigen::Index i = 0; i < p_.rows(); ++i) {
      for (Eigen::Index j = 0; j < p_.cols(); ++j) {
        require(std::isfinite(p_(i, j)) && p_(i, j) >= 0.0,
                "non-stochastic matrix: negative or non-finite entry in row " + std::to_string(i));
      }
      require(std::abs(p_.row(i).sum() - 1.0) <= 1e-12,
              "non-stochastic matrix: row " + std::to_string(i) + " does not sum to 1");
      rows_.push_back(detail::cumulative(p_.row(i).transpose()));
    }
    if (labels_.empty()) {
      for (Eigen::Index i = 0; i < p_.rows(); ++i) labels_.push_back(std::to_string(i));
    }
    require(labels_.size() == static_cast<std::size_t>(p_.rows()), "one label per state required");
  }

  std::size_t size() const { return static_cast<std::size_t>(p_.rows()); }
  const Matrix& matrix() const { return p_; }
  double operator()(std::size_t x, std::size_t y) const {
    return p_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
  }
  const std::vector<std::string>& labels() const { return labels_; }

  Matrix power(std::size_t k) const {
    Matrix out = Matrix::Identity(p_.rows(), p_.cols());
    for (std::size_t i = 0; i < k; ++i) out = out * p_;
    return out;
  }

  std::size_t sample_next(std::size_t x, Stream& s) const { return detail::draw(rows_[x], s.uniform()); }

  bool irreducible() const { return detail::reaches_all(p_, false) && detail::reaches_all(p_, true); }

 private:
  Matrix p_;
  std::vector<std::string> labels_;
  std::vector<std::vector<double>> rows_;
};

/// Solves πP = π, Σπ = 1 for an irreducible finite kernel.
inline Vector stationary_distribution(const FiniteKernel& kernel) {
  require(kernel.irreducible(), "reducible chain: no unique stationary distribution");
  const auto n = static_cast<Eigen::Index>(kernel.size());
  Matrix system = kernel.matrix().transpose() - Matrix::Identity(n, n);
  system.row(n - 1).setOnes();
  Vector rhs = Vector::Zero(n);
  rhs(n - 1) = 1.0;
  Vector pi = system.fullPivLu().solve(rhs);
  for (Eigen::Index i = 0; i < n; ++i) pi(i) = std::max(pi(i), 0.0);
  pi /= pi.sum();
  const double residual = (pi.transpose() * kernel.matrix() - pi.transpose()).cwiseAbs().maxCoeff();
  require(residual <= 1e-10, "stationary solve did not converge (residual " + std::to_string(residual) + ")");
  return pi;
}

struct FiniteMinorization {
  std::vector<bool> small_set;
  std::size_t m = 1;
  double delta = 1.0;
  Vector nu;
};

/// Optional geometric-ergodicity data, ‖Pⁿ(x,·) − π‖ ≤ G ρⁿ. Never inferred.
struct Ergodicity {
  double G = 1.0;
  double rho = 0.5;
};

struct MinorizationReport {
  bool pass = false;
  bool sampled = false;
  /// exact mode: min over x∈C, y of Pᵐ(x,y) − δν(y); sampled mode: min ratio − δ.
  double worst_margin = 0.0;
  double empirical_min_ratio = 0.0;
  std::size_t samples = 0;
  std::size_t worst_x = 0;
  std::size_t worst_y = 0;
  double nu_small_set = 1.0;
  std::vector<std::string> notes;
};

/// A finite chain together with its minorization data and exact π.
class FiniteChain {
 public:
  using state_type = std::size_t;
  static constexpr bool exact_stationary = true;

  FiniteChain(FiniteKernel kernel, FiniteMinorization minorization,
              std::optional<Ergodicity> ergodicity = std::nullopt, std::string name = "finite")
      : kernel_(std::move(kernel)),
        minorization_(std::move(minorization)),
        ergodicity_(ergodicity),
        name_(std::move(name)) {
    const auto n = kernel_.size();
    require(minorization_.small_set.size() == n, "small set indicator must cover every state");
    require(static_cast<std::size_t>(minorization_.nu.size()) == n, "small measure must cover every state");
    require(minorization_.m >= 1, "minorization order m must be positive");
    require(minorization_.delta > 0.0 && minorization_.delta <= 1.0, "delta must lie in (0, 1]");
    require((minorization_.nu.array() >= 0.0).all() && std::abs(minorization_.nu.sum() - 1.0) <= 1e-12,
            "small measure must be a probability vector");
    pi_ = stationary_distribution(kernel_);
    pi_c_ = 0.0;
    for (std::size_t x = 0; x < n; ++x)
      if (minorization_.small_set[x]) pi_c_ += pi_(static_cast<Eigen::Index>(x));
    require(pi_c_ > 0.0, "small set has zero stationary mass");
    pm_ = kernel_.power(minorization_.m);
    r_ = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index x = 0; x < r_.rows(); ++x) {
      if (!minorization_.small_set[static_cast<std::size_t>(x)]) continue;
      for (Eigen::Index y = 0; y < r_.cols(); ++y) {
        if (pm_(x, y) > 0.0) r_(x, y) = minorization_.delta * minorization_.nu(y) / pm_(x, y);
      }
    }
    nu_cum_ = detail::cumulative(minorization_.nu);
    pi_cum_ = detail::cumulative(pi_);
  }

  const std::string& name() const { return name_; }
  const FiniteKernel& kernel() const { return kernel_; }
  const FiniteMinorization& minorization() const { return minorization_; }
  const std::optional<Ergodicity>& ergodicity() const { return ergodicity_; }
  const Vector& stationary() const { return pi_; }
  double pi_small_set() const { return pi_c_; }
  double delta() const { return minorization_.delta; }
  std::size_t order() const { return minorization_.m; }
  std::size_t size() const { return kernel_.size(); }
  const Matrix& m_step() const { return pm_; }
  bool in_small_set(state_type x) const { return minorization_.small_set[x]; }

  /// r(x, y) = δν(y) / Pᵐ(x, y) for x ∈ C; zero off C.
  double rn_derivative(state_type x, state_type y) const {
    return r_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
  }

  state_type step(state_type x, Stream& s) const { return kernel_.sample_next(x, s); }

  /// Path-first splitting: draw Υ₁..Υₘ from the kernel, then the level with
  /// probability 1_C(x)·r(x, Υₘ). `path` receives the m new states.
  bool sample_block(state_type x, Stream& s, std::vector<state_type>& path) const {
    path.clear();
    state_type y = x;
    for (std::size_t j = 0; j < minorization_.m; ++j) {
      y = kernel_.sample_next(y, s);
      path.push_back(y);
    }
    if (!minorization_.small_set[x]) return false;
    return s.uniform() < rn_derivative(x, y);
  }

  state_type sample_nu(Stream& s) const { return detail::draw(nu_cum_, s.uniform()); }
  state_type sample_stationary(Stream& s) const { return detail::draw(pi_cum_, s.uniform()); }

  double coordinate(state_type x) const { return static_cast<double>(x); }

 private:
  FiniteKernel kernel_;
  FiniteMinorization minorization_;
  std::optional<Ergodicity> ergodicity_;
  std::string name_;
  Vector pi_;
  double pi_c_ = 0.0;
  Matrix pm_;
  Matrix r_;
  std::vector<double> nu_cum_;
  std::vector<double> pi_cum_;
};

/// Exact check of Pᵐ(x, y) ≥ δν(y) for x ∈ C, plus the ν(C) = 1 and r ≤ 1 diagnostics.
inline MinorizationReport validate_minorization(const FiniteChain& chain) {
  MinorizationReport report;
  const auto& mz = chain.minorization();
  const auto& pm = chain.m_step();
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < chain.size(); ++x) {
    if (!mz.small_set[x]) continue;
    for (std::size_t y = 0; y < chain.size(); ++y) {
      const auto xi = static_cast<Eigen::Index>(x), yi = static_cast<Eigen::Index>(y);
      const double margin = pm(xi, yi) - mz.delta * mz.nu(yi);
      if (margin < report.worst_margin) {
        report.worst_margin = margin;
        report.worst_x = x;
        report.worst_y = y;
      }
    }
  }
  report.pass = report.worst_margin >= -1e-12;
  report.nu_small_set = 0.0;
  for (std::size_t y = 0; y < chain.size(); ++y)
    if (mz.small_set[y]) report.nu_small_set += mz.nu(static_cast<Eigen::Index>(y));
  if (std::abs(report.nu_small_set - 1.0) > 1e-12) report.notes.push_back("nu(C) != 1");
  if (!report.pass) report.notes.push_back("minorization violated");
  return report;
}

/// x_{n+1} = x_n + Θ^{ε_n} mod 1, with Θ⁰ on the even binary digits and Θ¹ on
/// the odd ones. States are B-bit fixed-point fractions stored in the top bits
/// of a uint64. The minorization (C = [0,1), m = 2, δ = 1/2, ν = λ) is split
/// through the latent coin pair: Y = 1 exactly when ε_n + ε_{n+1} = 1. At
/// finite B the Θ laws are discrete rather than singular; the mixed-pair
/// increment is exactly uniform on the B-bit grid.
class SingularMod1Chain {
 public:
  using state_type = std::uint64_t;
  static constexpr bool exact_stationary = true;
  static constexpr std::uint64_t kEvenDigits = 0x5555555555555555ULL;  // 2^-2, 2^-4, ...
  static constexpr std::uint64_t kOddDigits = 0xAAAAAAAAAAAAAAAAULL;   // 2^-1, 2^-3, ...

  explicit SingularMod1Chain(int precision = 64) : precision_(precision) {
    require(precision >= 16 && precision <= 64, "precision must lie in [16, 64] bits");
    mask_ = precision == 64 ? ~0ULL : ~((1ULL << (64 - precision)) - 1ULL);
  }

  struct TwoStep {
    state_type x1 = 0;
    state_type x2 = 0;
    int eps0 = 0;
    int eps1 = 0;
    std::uint64_t theta0 = 0;
    std::uint64_t theta1 = 0;
  };

  int precision() const { return precision_; }
  std::size_t order() const { return m_; }
  double delta() const { return delta_; }
  double pi_small_set() const { return 1.0; }
  std::string name() const { return "singular-mod1"; }

  /// A copy that claims a different minorization (m, δ). Only (2, 1/2) can be
  /// split; other claims exist for validation experiments.
  SingularMod1Chain with_claimed_minorization(std::size_t m, double delta) const {
    SingularMod1Chain out = *this;
    out.m_ = m;
    out.delta_ = delta;
    return out;
  }

  static double coordinate(state_type x) { return static_cast<double>(x) * 0x1.0p-64; }

  state_type from_coordinate(double u) const {
    require(u >= 0.0 && u < 1.0, "mod-1 state must lie in [0, 1)");
    return static_cast<state_type>(std::ldexp(u, 64)) & mask_;
  }

  std::uint64_t sample_theta(int eps, Stream& s) const {
    return s.bits() & (eps == 0 ? kEvenDigits : kOddDigits) & mask_;
  }

  state_type step(state_type x, Stream& s) const {
    const int eps = static_cast<int>(s.bits() >> 63);
    return x + sample_theta(eps, s);  // wraps modulo 2^64, i.e. modulo 1
  }

  TwoStep sample_two_step(state_type x, Stream& s) const {
    TwoStep out;
    out.eps0 = static_cast<int>(s.bits() >> 63);
    out.theta0 = sample_theta(out.eps0, s);
    out.x1 = x + out.theta0;
    out.eps1 = static_cast<int>(s.bits() >> 63);
    out.theta1 = sample_theta(out.eps1, s);
    out.x2 = out.x1 + out.theta1;
    return out;
  }

  bool sample_block(state_type x, Stream& s, std::vector<state_type>& path) const {
    require(m_ == 2 && delta_ == 0.5, "latent splitting exists only for the (m=2, delta=1/2) minorization");
    const auto two = sample_two_step(x, s);
    path.assign({two.x1, two.x2});
    return two.eps0 != two.eps1;
  }

  state_type sample_nu(Stream& s) const { return s.bits() & mask_; }
  state_type sample_stationary(Stream& s) const { return s.bits() & mask_; }

 private:
  int precision_ = 64;
  std::uint64_t mask_ = ~0ULL;
  std::size_t m_ = 2;
  double delta_ = 0.5;
};

/// A chain known only through samplers. Splitting needs the r evaluator;
/// the minorization spot check needs the m-step density and ν density.
template <class State>
struct GenericChain {
  using state_type = State;
  static constexpr bool exact_stationary = false;

  std::function<State(const State&, Stream&)> sampler;
  std::function<bool(const State&)> small_set;
  std::size_t m = 1;
  double delta = 1.0;
  std::function<State(Stream&)> nu_sampler;
  std::function<double(const State&, const State&)> rn_derivative;
  std::function<double(const State&, const State&)> m_step_density;
  std::function<double(const State&)> nu_density;
  std::function<double(const State&)> coordinate_fn;
  State reference_state{};
  std::size_t burn_in = 0;  // 0 selects 1000·m

  std::size_t order() const { return m; }
  std::string name() const { return "generic"; }

  State step(const State& x, Stream& s) const { return sampler(x, s); }

  bool sample_block(const State& x, Stream& s, std::vector<State>& path) const {
    require(static_cast<bool>(rn_derivative),
            "missing r evaluator: generic chain has no latent-variable splitting");
    path.clear();
    State y = x;
    for (std::size_t j = 0; j < m; ++j) {
      y = sampler(y, s);
      path.push_back(y);
    }
    if (!small_set(x)) return false;
    return s.uniform() < rn_derivative(x, y);
  }

  State sample_nu(Stream& s) const { return nu_sampler(s); }

  /// Approximate: burn-in from the reference state.
  State sample_stationary(Stream& s) const {
    State x = reference_state;
    const std::size_t steps = burn_in == 0 ? 1000 * m : burn_in;
    for (std::size_t i = 0; i < steps; ++i) x = sampler(x, s);
    return x;
  }

  double coordinate(const State& x) const { return coordinate_fn ? coordinate_fn(x) : 0.0; }
};

/// Density spot check for generic chains over a grid of states in C and test points.
template <class State>
MinorizationReport validate_minorization(const GenericChain<State>& chain, const std::vector<State>& test_states,
                                         const std::vector<State>& test_points) {
  require(static_cast<bool>(chain.m_step_density) && static_cast<bool>(chain.nu_density),
          "missing density evaluator: exact minorization check needs m-step and nu densities");
  MinorizationReport report;
  report.sampled = true;
  report.empirical_min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < test_states.size(); ++i) {
    if (!chain.small_set(test_states[i])) continue;
    for (std::size_t j = 0; j < test_points.size(); ++j) {
      const double nu = chain.nu_density(test_points[j]);
      if (nu <= 0.0) continue;
      const double ratio = chain.m_step_density(test_states[i], test_points[j]) / nu;
      if (ratio < report.empirical_min_ratio) {
        report.empirical_min_ratio = ratio;
        report.worst_x = i;
        report.worst_y = j;
      }
      ++report.samples;
    }
  }
  report.worst_margin = report.empirical_min_ratio - chain.delta;
  report.pass = report.worst_margin >= -1e-12;
  return report;
}

/// Sampled check for the mod-1 chain: histogram Pᵐ(x, ·) over `bins` equal
/// cells and compare each cell's mass with δλ(cell). Passes when the smallest
/// cell ratio is within four standard errors of δ or above it.
inline MinorizationReport validate_minorization_sampled(const SingularMod1Chain& chain,
                                                        const std::vector<double>& test_states, std::size_t bins,
                                                        std::size_t samples, Stream& s) {
  require(bins >= 2, "need at least two bins");
  require(samples >= bins, "need at least one sample per bin");
  MinorizationReport report;
  report.sampled = true;
  report.samples = samples * test_states.size();
  report.empirical_min_ratio = std::numeric_limits<double>::infinity();
  const double delta = chain.delta();
  double se_at_min = 0.0;
  for (std::size_t i = 0; i < test_states.size(); ++i) {
    const auto x0 = chain.from_coordinate(test_states[i]);
    std::vector<std::size_t> counts(bins, 0);
    for (std::size_t k = 0; k < samples; ++k) {
      auto x = x0;
      for (std::size_t j = 0; j < chain.order(); ++j) x = chain.step(x, s);
      const auto b = std::min(bins - 1, static_cast<std::size_t>(SingularMod1Chain::coordinate(x) * bins));
      ++counts[b];
    }
    for (std::size_t b = 0; b < bins; ++b) {
      const double p = static_cast<double>(counts[b]) / static_cast<double>(samples);
      const double ratio = p * static_cast<double>(bins);
      if (ratio < report.empirical_min_ratio) {
        report.empirical_min_ratio = ratio;
        report.worst_x = i;
        report.worst_y = b;
        // standard error of the ratio at the hypothesised boundary p = δ/bins
        const double p0 = delta / static_cast<double>(bins);
        se_at_min = std::sqrt(p0 * (1.0 - p0) / static_cast<double>(samples)) * static_cast<double>(bins);
      }
    }
  }
  report.worst_margin = report.empirical_min_ratio - delta;
  report.pass = report.worst_margin >= -4.0 * se_at_min;
  if (!report.pass) report.notes.push_back("minorization violated on a histogram cell");
  return report;
}

/// Exact ‖Pⁿ(x,·) − π‖_TV (half the L1 distance) for n = 0..n_max.
inline std::vector<double> tv_decay_curve(const FiniteChain& chain, std::size_t x, std::size_t n_max) {
  require(x < chain.size(), "state out of range");
  std::vector<double> out;
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(chain.size()));
  row(static_cast<Eigen::Index>(x)) = 1.0;
  const Eigen::RowVectorXd pi = chain.stationary().transpose();
  for (std::size_t n = 0; n <= n_max; ++n) {
    out.push_back(0.5 * (row - pi).cwiseAbs().sum());
    row = row * chain.kernel().matrix();
  }
  return out;
}

struct BinnedTv {
  std::size_t n = 0;
  double tv = 0.0;
  double se = 0.0;  // conservative: ½·sqrt(bins / samples) bounds the estimator's sd
};

/// Histogram TV of Pⁿ(x,·) against λ for the mod-1 chain. The histogram TV of
/// the true law never exceeds the true TV distance.
inline std::vector<BinnedTv> tv_decay_curve(const SingularMod1Chain& chain, double x, std::size_t n_max,
                                            std::size_t bins, std::size_t samples, Stream& s) {
  require(bins >= 2, "binned TV needs at least two bins");
  require(samples >= 1, "need samples");
  std::vector<std::vector<std::size_t>> counts(n_max + 1, std::vector<std::size_t>(bins, 0));
  const auto x0 = chain.from_coordinate(x);
  for (std::size_t k = 0; k < samples; ++k) {
    auto y = x0;
    for (std::size_t n = 0; n <= n_max; ++n) {
      if (n > 0) y = chain.step(y, s);
      ++counts[n][std::min(bins - 1, static_cast<std::size_t>(SingularMod1Chain::coordinate(y) * bins))];
    }
  }
  std::vector<BinnedTv> out;
  const double uniform = 1.0 / static_cast<double>(bins);
  for (std::size_t n = 0; n <= n_max; ++n) {
    double l1 = 0.0;
    for (auto c : counts[n]) l1 += std::abs(static_cast<double>(c) / static_cast<double>(samples) - uniform);
    out.push_back({n, 0.5 * l1, 0.5 * std::sqrt(static_cast<double>(bins) / static_cast<double>(samples))});
  }
  return out;
}

/// Two-state chain P = [[1−a, a], [b, 1−b]] with the atom C = {0}, m = 1,
/// ν = P(0, ·) and the given δ.
inline FiniteChain make_two_state(double a, double b, double delta = 1.0) {
  require(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0, "two-state parameters a, b must lie in (0, 1)");
  Matrix p(2, 2);
  p << 1.0 - a, a, b, 1.0 - b;
  FiniteKernel kernel(p, {"0", "1"});
  FiniteMinorization mz;
  mz.small_set = {true, false};
  mz.m = 1;
  mz.delta = delta;
  mz.nu = p.row(0).transpose();
  std::optional<Ergodicity> erg;
  const double rho = std::abs(1.0 - a - b);
  if (rho > 0.0) erg = Ergodicity{std::max(a, b) / (a + b), rho};
  return FiniteChain(std::move(kernel), std::move(mz), erg, "two-state");
}

inline SingularMod1Chain make_singular_mod1(int precision = 64) { return SingularMod1Chain(precision); }

/// Υ₀..Υ_{n−1} from x0.
template <class Chain>
std::vector<typename Chain::state_type> sample_path(const Chain& chain, typename Chain::state_type x0,
                                                    std::size_t n, Stream& s) {
  require(n >= 1, "path length n must satisfy n >= 1");
  std::vector<typename Chain::state_type> out;
  out.reserve(n);
  out.push_back(x0);
  for (std::size_t i = 1; i < n; ++i) out.push_back(chain.step(out.back(), s));
  return out;
}

}  // namespace regen

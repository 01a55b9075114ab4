#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "regen/chain_models.hpp"
#include "regen/stats.hpp"
#include "regen/verify.hpp"

using namespace regen;

namespace {

Matrix two_by_two(double a, double b) {
  Matrix p(2, 2);
  p << 1.0 - a, a, b, 1.0 - b;
  return p;
}

}  // namespace

TEST(Stationary, SymmetricTwoState) {
  const Vector pi = stationary_distribution(FiniteKernel(two_by_two(0.5, 0.5)));
  EXPECT_NEAR(pi(0), 0.5, 1e-14);
  EXPECT_NEAR(pi(1), 0.5, 1e-14);
}

TEST(Stationary, AsymmetricTwoState) {
  const Vector pi = stationary_distribution(FiniteKernel(two_by_two(0.25, 0.75)));
  EXPECT_NEAR(pi(0), 0.75, 1e-14);
  EXPECT_NEAR(pi(1), 0.25, 1e-14);
}

TEST(Stationary, SatisfiesBalanceOnThreeStates) {
  Matrix p(3, 3);
  p << 0.1, 0.6, 0.3, 0.5, 0.25, 0.25, 0.2, 0.2, 0.6;
  const FiniteKernel k(p);
  const Vector pi = stationary_distribution(k);
  const Vector residual = (pi.transpose() * p).transpose() - pi;
  EXPECT_LE(residual.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(pi.sum(), 1.0, 1e-12);
}

TEST(Stationary, IdentityIsReducible) {
  const FiniteKernel k(Matrix::Identity(2, 2));
  try {
    stationary_distribution(k);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("reducible"), std::string::npos);
  }
}

TEST(Kernel, RejectsNonStochasticRows) {
  Matrix p(2, 2);
  p << 0.5, 0.6, 0.5, 0.5;
  EXPECT_THROW(FiniteKernel{p}, Error);
  p << 1.2, -0.2, 0.5, 0.5;
  EXPECT_THROW(FiniteKernel{p}, Error);
}

TEST(Minorization, AtomPasses) {
  const auto chain = make_two_state(0.5, 0.5);
  const auto r = validate_minorization(chain);
  EXPECT_TRUE(r.pass);
  EXPECT_DOUBLE_EQ(chain.rn_derivative(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(chain.rn_derivative(0, 1), 1.0);
}

TEST(Minorization, WholeSpaceWithColumnMinima) {
  const Matrix p = two_by_two(0.3, 0.6);
  // column minima: min(0.7, 0.6) = 0.6, min(0.3, 0.4) = 0.3 → δ = 0.9
  FiniteMinorization mz;
  mz.small_set = {true, true};
  mz.m = 1;
  mz.delta = 0.9;
  mz.nu = Vector(2);
  mz.nu << 0.6 / 0.9, 0.3 / 0.9;
  const FiniteChain chain(FiniteKernel(p), mz);
  const auto r = validate_minorization(chain);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.worst_margin, 0.0, 1e-12);
  EXPECT_TRUE(r.notes.empty());
}

TEST(Minorization, ViolationReportsMargin) {
  const Matrix p = two_by_two(0.3, 0.6);
  FiniteMinorization mz;
  mz.small_set = {true, true};
  mz.m = 1;
  mz.delta = 1.0;
  mz.nu = Vector(2);
  mz.nu << 0.5, 0.5;
  const FiniteChain chain(FiniteKernel(p), mz);
  const auto r = validate_minorization(chain);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.worst_margin, 0.3 - 0.5, 1e-12);
}

TEST(Minorization, SmallMeasureOffTheSmallSetIsNoted) {
  const auto chain = make_two_state(0.5, 0.5);  // ν = (1/2, 1/2), C = {0}
  const auto r = validate_minorization(chain);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.nu_small_set, 0.5, 1e-15);
  ASSERT_EQ(r.notes.size(), 1u);
}

TEST(Minorization, ModOneFailsAtOrderOne) {
  const auto chain = make_singular_mod1(64).with_claimed_minorization(1, 0.1);
  Stream s(7);
  const auto r = validate_minorization_sampled(chain, {0.0, 0.3, 0.77}, 64, 20000, s);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.empirical_min_ratio, 0.0);
}

TEST(Minorization, ModOnePassesAtOrderTwo) {
  const auto chain = make_singular_mod1(64);
  Stream s(8);
  const auto r = validate_minorization_sampled(chain, {0.0, 0.3, 0.77}, 64, 64000, s);
  EXPECT_TRUE(r.pass);
  EXPECT_GE(r.empirical_min_ratio, 0.4);
}

TEST(Minorization, GenericChainWithoutDensityIsAnError) {
  GenericChain<double> g;
  g.sampler = [](const double&, Stream& s) { return s.uniform(); };
  g.small_set = [](const double&) { return true; };
  try {
    validate_minorization(g, {0.5}, {0.5});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("missing density evaluator"), std::string::npos);
  }
}

TEST(Minorization, GenericChainSpotCheck) {
  // x' = (x + U)/2: density 2 on [x/2, x/2 + 1/2]; with C = [0,1], m = 1 no
  // positive δ works against λ, so the minimum ratio is 0.
  GenericChain<double> g;
  g.sampler = [](const double& x, Stream& s) { return 0.5 * (x + s.uniform()); };
  g.small_set = [](const double&) { return true; };
  g.delta = 0.1;
  g.m_step_density = [](const double& x, const double& y) { return (y >= x / 2 && y < x / 2 + 0.5) ? 2.0 : 0.0; };
  g.nu_density = [](const double& y) { return (y >= 0 && y < 1) ? 1.0 : 0.0; };
  const auto r = validate_minorization(g, {0.0, 0.5, 0.9}, {0.1, 0.3, 0.6, 0.9});
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.empirical_min_ratio, 0.0);
}

TEST(TvDecay, SymmetricChainMixesInOneStep) {
  const auto tv = tv_decay_curve(make_two_state(0.5, 0.5), 1, 5);
  EXPECT_NEAR(tv[0], 0.5, 1e-15);
  for (std::size_t n = 1; n < tv.size(); ++n) EXPECT_NEAR(tv[n], 0.0, 1e-15);
}

TEST(TvDecay, RowsEqualPiWhenAPlusBIsOne) {
  const auto tv = tv_decay_curve(make_two_state(0.25, 0.75), 0, 3);
  EXPECT_NEAR(tv[1], 0.0, 1e-15);
}

TEST(TvDecay, EigenvalueRate) {
  const double a = 0.2, b = 0.3;
  const auto tv = tv_decay_curve(make_two_state(a, b), 0, 12);
  const double pi0 = b / (a + b);
  for (std::size_t n = 0; n < tv.size(); ++n) {
    EXPECT_NEAR(tv[n], std::pow(1.0 - a - b, static_cast<double>(n)) * (1.0 - pi0), 1e-14);
    if (n >= 1) {
      EXPECT_LE(tv[n], tv[n - 1] + 1e-15);
    }
  }
}

TEST(TvDecay, ModOneBinnedLowerBound) {
  const auto chain = make_singular_mod1(64);
  Stream s(11);
  const auto tv = tv_decay_curve(chain, 0.2, 10, 256, 200000, s);
  EXPECT_LE(tv[10].tv, std::pow(0.5, 5) + 3.0 * tv[10].se);
  EXPECT_GT(tv[0].tv, 0.99);
}

TEST(TvDecay, BinnedNeedsTwoBins) {
  Stream s(1);
  EXPECT_THROW(tv_decay_curve(make_singular_mod1(64), 0.2, 3, 1, 10, s), Error);
}

TEST(TwoState, StationaryLawAndReturnTime) {
  const auto chain = make_two_state(0.5, 0.5);
  EXPECT_NEAR(chain.stationary()(0), 0.5, 1e-15);
  EXPECT_NEAR(1.0 / chain.stationary()(0), 2.0, 1e-14);
  // first-step analysis: return time to 0 is 1 w.p. 1/2, else 1 + Geom(1/2)
  EXPECT_NEAR(pmf_mean(gap_pmf(chain)), 2.0, 1e-12);
}

TEST(TwoState, RejectsParametersOutsideUnitInterval) {
  EXPECT_THROW(make_two_state(0.0, 0.5), Error);
  EXPECT_THROW(make_two_state(0.5, 1.0), Error);
}

TEST(TwoState, ErgodicityData) {
  const auto chain = make_two_state(0.25, 0.25);
  ASSERT_TRUE(chain.ergodicity().has_value());
  EXPECT_NEAR(chain.ergodicity()->rho, 0.5, 1e-15);
}

TEST(SamplePath, RejectsEmptyPath) {
  Stream s(1);
  EXPECT_THROW(sample_path(make_two_state(0.5, 0.5), 0, 0, s), Error);
}

TEST(SamplePath, Reproducible) {
  const auto chain = make_two_state(0.3, 0.4);
  Stream a(99), b(99);
  EXPECT_EQ(sample_path(chain, 0, 500, a), sample_path(chain, 0, 500, b));
}

TEST(ModOne, PrecisionBounds) {
  EXPECT_THROW(make_singular_mod1(15), Error);
  EXPECT_THROW(make_singular_mod1(65), Error);
  const auto c = make_singular_mod1(16);
  Stream s(3);
  auto x = c.from_coordinate(0.123);
  for (int i = 0; i < 100; ++i) {
    x = c.step(x, s);
    EXPECT_EQ(x & 0xFFFFFFFFFFFFULL, 0u);
    EXPECT_LT(SingularMod1Chain::coordinate(x), 1.0);
  }
}

TEST(ModOne, MixedIncrementIsUniform) {
  const auto chain = make_singular_mod1(64);
  Stream s(2024);
  std::vector<double> u;
  std::size_t mixed = 0, total = 0;
  while (u.size() < 100000) {
    const auto two = chain.sample_two_step(0, s);
    ++total;
    if (two.eps0 + two.eps1 == 1) {
      ++mixed;
      u.push_back(SingularMod1Chain::coordinate(two.theta0 + two.theta1));
    }
  }
  const auto ks = stats::ks_one_sample(u, [](double x) { return x; });
  EXPECT_GE(ks.p_value, 0.01);
  const double freq = static_cast<double>(mixed) / static_cast<double>(total);
  EXPECT_NEAR(freq, 0.5, 4.0 * std::sqrt(0.25 / static_cast<double>(total)));
}

TEST(ModOne, SingleIncrementIsNotUniform) {
  const auto chain = make_singular_mod1(64);
  Stream s(5);
  std::vector<double> u;
  for (int i = 0; i < 20000; ++i) u.push_back(SingularMod1Chain::coordinate(chain.step(0, s)));
  EXPECT_LT(stats::ks_one_sample(u, [](double x) { return x; }).p_value, 1e-6);
}

TEST(ModOne, OnlyTheLatentMinorizationSplits) {
  const auto chain = make_singular_mod1(64).with_claimed_minorization(1, 0.5);
  Stream s(1);
  std::vector<std::uint64_t> path;
  EXPECT_THROW(chain.sample_block(0, s, path), Error);
}

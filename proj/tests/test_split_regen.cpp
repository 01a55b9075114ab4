#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "regen/chain_models.hpp"
#include "regen/split_regen.hpp"
#include "regen/stats.hpp"
#include "regen/variance.hpp"

using namespace regen;

namespace {

double indicator_one(std::size_t x) { return x == 1 ? 0.5 : -0.5; }

SplitTrajectory<std::size_t> hand_trajectory() {
  SplitTrajectory<std::size_t> t;
  t.states = {1, 1, 0, 1, 0};
  t.levels = {0, 0, 1, 0, 1};
  t.regenerations = {2, 4};
  t.m = 1;
  t.init = "point";
  return t;
}

FiniteChain half_split_two_state() { return make_two_state(0.5, 0.5, 0.5); }

}  // namespace

TEST(SimulateSplit, AtomLevelsMarkVisitsToZero) {
  const auto chain = make_two_state(0.3, 0.6);
  Stream s(1);
  const auto traj = simulate_split(chain, InitialLaw<std::size_t>::point(1), 5000, s);
  ASSERT_EQ(traj.size(), 5000u);
  for (std::size_t k = 0; k < traj.size(); ++k) EXPECT_EQ(traj.levels[k] == 1, traj.states[k] == 0) << k;
}

TEST(SimulateSplit, LevelFrequencyUnderStationaryStart) {
  const auto chain = half_split_two_state();
  Stream s(2);
  const std::size_t n = 100000;
  const auto traj = simulate_split(chain, InitialLaw<std::size_t>::stationary(), n, s);
  const double freq = static_cast<double>(traj.regenerations.size()) / static_cast<double>(n);
  const double target = chain.delta() * chain.pi_small_set();
  EXPECT_NEAR(target, 0.25, 1e-15);
  // the level indicators are dependent; batch means give the standard error
  const std::vector<double> ind(traj.levels.begin(), traj.levels.end());
  const double se = std::sqrt(sigma_mrv_batch(ind, 316).value / static_cast<double>(n));
  EXPECT_NEAR(freq, target, 4.0 * se);
}

TEST(SimulateSplit, ModOneLevelFrequency) {
  const auto chain = make_singular_mod1(64);
  Stream s(3);
  const std::size_t blocks = 100000;
  const auto traj = simulate_split(chain, InitialLaw<std::uint64_t>::stationary(), 2 * blocks, s);
  const double freq = static_cast<double>(traj.regenerations.size()) / static_cast<double>(blocks);
  EXPECT_NEAR(freq, 0.5, 4.0 * std::sqrt(0.25 / static_cast<double>(blocks)));
}

TEST(SimulateSplit, StructuralInvariants) {
  const auto chain = make_singular_mod1(64);
  Stream s(4);
  const auto traj = simulate_split(chain, InitialLaw<std::uint64_t>::point(0), 2001, s);
  ASSERT_EQ(traj.size(), 2001u);
  for (std::size_t k = 0; k + 1 < traj.size(); k += 2) EXPECT_EQ(traj.levels[k], traj.levels[k + 1]);
  std::vector<std::size_t> expected;
  for (std::size_t k = 0; k < traj.size(); k += 2)
    if (traj.levels[k] == 1) expected.push_back(k);
  EXPECT_EQ(regeneration_times(traj), expected);
  for (std::size_t i = 1; i < expected.size(); ++i) EXPECT_LT(expected[i - 1], expected[i]);
}

TEST(SimulateSplit, RegenerationsSitInTheSmallSet) {
  FiniteMinorization mz;
  Matrix p(3, 3);
  p << 0.2, 0.5, 0.3, 0.4, 0.4, 0.2, 0.3, 0.3, 0.4;
  mz.small_set = {true, true, false};
  mz.m = 1;
  mz.delta = 0.6;  // column minima over rows 0,1: 0.2, 0.4, 0.2 → mass 0.8
  mz.nu = Vector(3);
  mz.nu << 0.25, 0.5, 0.25;
  const FiniteChain chain(FiniteKernel(p), mz);
  Stream s(5);
  const auto traj = simulate_split(chain, InitialLaw<std::size_t>::point(2), 5000, s);
  ASSERT_FALSE(traj.regenerations.empty());
  for (auto sigma : traj.regenerations) EXPECT_TRUE(chain.in_small_set(traj.states[sigma]));
}

TEST(SimulateSplit, HorizonShorterThanBlockIsAnError) {
  Stream s(1);
  EXPECT_THROW(simulate_split(make_singular_mod1(64), InitialLaw<std::uint64_t>::point(0), 1, s), Error);
}

TEST(SimulateSplit, Reproducible) {
  const auto chain = make_two_state(0.2, 0.7);
  Stream a(42), b(42);
  const auto t1 = simulate_split(chain, InitialLaw<std::size_t>::nu(), 1000, a);
  const auto t2 = simulate_split(chain, InitialLaw<std::size_t>::nu(), 1000, b);
  EXPECT_EQ(t1.states, t2.states);
  EXPECT_EQ(t1.levels, t2.levels);
}

TEST(SimulateSplit, GenericChainNeedsRnDerivative) {
  GenericChain<double> g;
  g.sampler = [](const double& x, Stream& s) { return 0.5 * x + 0.5 * s.uniform(); };
  g.small_set = [](const double&) { return true; };
  g.nu_sampler = [](Stream& s) { return s.uniform(); };
  Stream s(1);
  EXPECT_THROW(simulate_split(g, InitialLaw<double>::point(0.0), 10, s), Error);
  g.rn_derivative = [](const double&, const double&) { return 0.5; };
  const auto traj = simulate_split(g, InitialLaw<double>::stationary(), 10, s);
  EXPECT_EQ(traj.init, "approximate-stationary");
  EXPECT_EQ(traj.size(), 10u);
}

TEST(SplitMeasure, WholeSpaceAtomWithDeltaOne) {
  FiniteMinorization mz;
  mz.small_set = {true, true};
  mz.delta = 1.0;
  mz.nu = Vector::Constant(2, 0.5);
  Vector mu(2);
  mu << 0.3, 0.7;
  const auto star = split_measure(mu, mz);
  EXPECT_NEAR((star.level1 - mu).cwiseAbs().maxCoeff(), 0.0, 1e-15);
  EXPECT_NEAR(star.level0.sum(), 0.0, 1e-15);
}

TEST(SplitMeasure, HalfDeltaOnAtom) {
  const auto chain = half_split_two_state();
  const auto star = split_measure(chain.stationary(), chain.minorization());
  EXPECT_NEAR(star.level1(0), 0.25, 1e-15);
  EXPECT_NEAR(star.level0.sum() + star.level1.sum(), 1.0, 1e-15);
}

TEST(SplitMeasure, NoMassOnSmallSet) {
  const auto chain = make_two_state(0.5, 0.5);
  Vector mu(2);
  mu << 0.0, 1.0;
  const auto star = split_measure(mu, chain.minorization());
  EXPECT_EQ(star.level1.sum(), 0.0);
  EXPECT_NEAR(star.level0(1), 1.0, 1e-15);
}

TEST(Regenerations, NoneObservedIsFlagged) {
  SplitTrajectory<std::size_t> t;
  t.states = {1, 1, 1, 1};
  t.levels = {0, 0, 0, 0};
  t.m = 1;
  const auto c = count_regenerations(t, 4);
  EXPECT_TRUE(c.no_regeneration_observed);
  EXPECT_EQ(c.N, 0u);
  EXPECT_TRUE(regeneration_times(t).empty());
}

TEST(Regenerations, HorizonBeyondTrajectory) {
  EXPECT_THROW(count_regenerations(hand_trajectory(), 6), Error);
}

TEST(Regenerations, HandTrajectoryCount) {
  const auto t = hand_trajectory();
  EXPECT_EQ(count_regenerations(t, 4).N, 1u);
  EXPECT_EQ(count_regenerations(t, 2).N, 0u);
}

TEST(Blocks, PartitionWithMinusMConvention) {
  const auto t = hand_trajectory();
  const auto blocks = extract_blocks(t);
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(blocks[0].begin, 0u);
  EXPECT_EQ(blocks[0].end, 3u);
  EXPECT_EQ(blocks[1].begin, 3u);
  EXPECT_EQ(blocks[1].end, 5u);
}

TEST(Blocks, LengthsAreMultiplesOfM) {
  const auto chain = make_singular_mod1(64);
  Stream s(6);
  const auto traj = simulate_split(chain, InitialLaw<std::uint64_t>::point(0), 4000, s);
  const auto blocks = extract_blocks(traj);
  ASSERT_GT(blocks.size(), 100u);
  std::size_t begin = 0;
  for (const auto& b : blocks) {
    EXPECT_EQ(b.begin, begin);
    EXPECT_GT(b.length(), 0u);
    EXPECT_EQ(b.length() % 2, 0u);
    begin = b.end;
  }
}

TEST(Excursions, ConstantFunctionalGivesGaps) {
  const auto chain = make_two_state(0.5, 0.5);
  Stream s(7);
  const auto traj = simulate_split(chain, InitialLaw<std::size_t>::point(0), 200000, s);
  const auto ex = excursions(traj, [](std::size_t) { return 1.0; });
  ASSERT_GT(ex.size(), 10000u);
  std::vector<double> values;
  for (const auto& e : ex) {
    EXPECT_DOUBLE_EQ(e.value, static_cast<double>(e.gap));
    values.push_back(e.value);
  }
  EXPECT_NEAR(stats::mean(values), 2.0, 4.0 * stats::standard_error(values));
}

TEST(Excursions, CenteredFunctionalHasMeanZero) {
  const auto chain = make_two_state(0.25, 0.25);
  Stream s(8);
  const auto ex = collect_excursions(chain, InitialLaw<std::size_t>::point(0), indicator_one, 100000, s);
  std::vector<double> values;
  for (const auto& e : ex) values.push_back(e.value);
  EXPECT_NEAR(stats::mean(values), 0.0, 4.0 * stats::standard_error(values));
}

TEST(Excursions, StreamingMatchesStoredTrajectory) {
  const auto chain = make_singular_mod1(64);
  const auto f = [](std::uint64_t x) { return std::cos(2.0 * std::numbers::pi * SingularMod1Chain::coordinate(x)); };
  Stream a(9), c(9);
  const auto streamed = collect_excursions(chain, InitialLaw<std::uint64_t>::point(0), f, 50, a);
  auto longer = simulate_split(chain, InitialLaw<std::uint64_t>::point(0), 4000, c);
  const auto stored = excursions(longer, f);
  ASSERT_GE(stored.size(), 50u);
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_NEAR(streamed[i].value, stored[i].value, 1e-12);
    EXPECT_EQ(streamed[i].gap, stored[i].gap);
  }
}

TEST(Excursions, GeometricGapLaw) {
  const auto chain = make_two_state(0.5, 0.5);
  Stream s(10);
  const auto ex = collect_excursions(chain, InitialLaw<std::size_t>::point(0), indicator_one, 100000, s);
  std::vector<double> observed(40, 0.0), probs(40, 0.0);
  for (const auto& e : ex) observed[std::min<std::size_t>(e.gap, 40) - 1] += 1.0;
  for (std::size_t k = 1; k <= 40; ++k) probs[k - 1] = std::pow(0.5, static_cast<double>(k));
  probs[39] += std::pow(0.5, 40.0);
  EXPECT_GE(stats::chi_square_gof(observed, probs).p_value, 0.01);
}

TEST(Decomposition, HandTrajectory) {
  const auto d = block_decompose(hand_trajectory(), indicator_one, 4);
  EXPECT_EQ(d.N, 1u);
  EXPECT_DOUBLE_EQ(d.head, 0.5);
  EXPECT_DOUBLE_EQ(d.middle, 0.0);
  EXPECT_DOUBLE_EQ(d.tail, -0.5);
  EXPECT_DOUBLE_EQ(d.reconstructed(), 1.0);
  EXPECT_DOUBLE_EQ(d.direct, 1.0);
  EXPECT_DOUBLE_EQ(d.T(), 0.5);
}

TEST(Decomposition, NoRegenerationBeforeHorizon) {
  SplitTrajectory<std::size_t> t;
  t.states = {1, 1, 1, 0, 1};
  t.levels = {0, 0, 0, 1, 0};
  t.regenerations = {3};
  t.m = 1;
  const auto d = block_decompose(t, indicator_one, 4);
  EXPECT_EQ(d.N, 0u);
  EXPECT_EQ(d.M(), 0.0);
  EXPECT_EQ(d.T(), 0.0);
  EXPECT_DOUBLE_EQ(d.H(), 1.0);
}

TEST(Decomposition, RequiresDivisibility) {
  const auto chain = make_singular_mod1(64);
  Stream s(11);
  const auto traj = simulate_split_covering(chain, InitialLaw<std::uint64_t>::point(0), 10, s);
  EXPECT_THROW(block_decompose(traj, [](std::uint64_t) { return 1.0; }, 11), Error);
  EXPECT_NO_THROW(block_decompose(traj, [](std::uint64_t) { return 1.0; }, 10));
}

TEST(Decomposition, ReconstructsRandomRuns) {
  const auto chain = make_two_state(0.25, 0.25, 0.5);
  for (std::uint64_t r = 0; r < 2000; ++r) {
    Stream s = Stream::substream(12, r);
    const std::size_t n = 1 + r % 40;
    const auto traj = simulate_split_covering(chain, InitialLaw<std::size_t>::point(r % 2), n, s);
    const auto d = block_decompose(traj, indicator_one, n);
    EXPECT_NEAR(d.reconstructed(), d.direct, 1e-10 * std::max(1.0, std::abs(d.direct)));
  }
}

TEST(FirstCycle, AtomStartFromSmallSet) {
  const auto chain = make_two_state(0.5, 0.5);
  Stream s(13);
  const auto c = first_cycle(chain, InitialLaw<std::size_t>::point(0), indicator_one, s);
  EXPECT_EQ(c.sigma0, 0u);
  EXPECT_DOUBLE_EQ(c.head_abs, 0.5);
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "slipt/dc_solver.hpp"
#include "slipt/reference_oracle.hpp"

using namespace slipt;

namespace {

double surrogate(const RateCoefficients& rc, const std::vector<double>& y, const std::vector<double>& x) {
  double v = part_value(rc, Part::u, x);
  for (std::size_t i = 0; i < x.size(); ++i) v -= y[i] * x[i];
  return v;
}

}  // namespace

TEST(InitialAllocation, Examples) {
  const auto a = initial_allocation(FeasibleSet({10.0}, 5.0));
  EXPECT_NEAR(a.tau_dl[0], 0.5, 2e-6);
  EXPECT_GE(a.tau_dl[0] * 10.0, 5.0);
  EXPECT_EQ(a.tau_ul[0], 1.0);

  const auto b = initial_allocation(FeasibleSet({3.0, 8.0, 8.0}, 0.0));
  EXPECT_EQ(b.tau_dl, (std::vector<double>{0.0, 1e-6, 0.0}));
  for (double t : b.tau_ul) EXPECT_DOUBLE_EQ(t, 1.0 / 3.0);

  const auto c = initial_allocation(FeasibleSet({10.0}, 10.0));
  EXPECT_EQ(c.tau_dl[0], 1.0);
  EXPECT_THROW(initial_allocation(FeasibleSet({10.0}, 11.0)), std::invalid_argument);
}

TEST(Subproblem, UserAloneMaximizesHarvestAndUplink) {
  const RateCoefficients rc({5.0}, {0.0});
  const FeasibleSet fs({4.0}, 0.0);
  const std::vector<double> y(2, 0.0);
  const auto r = solve_subproblem(rc, fs, y, std::vector<double>{0.5, 0.5}, 1e-9, 20000);
  EXPECT_LE(r.x[0], 1e-6);
  EXPECT_NEAR(r.x[1], 1.0, 1e-8);
  EXPECT_LE(r.residual, 1e-9);
}

TEST(Subproblem, OptimalWarmStartIsFixed) {
  const RateCoefficients rc({5.0}, {0.0});
  const FeasibleSet fs({4.0}, 2.0);
  const std::vector<double> y(2, 0.0);
  const std::vector<double> opt{0.5, 1.0};
  const auto r = solve_subproblem(rc, fs, y, opt, 1e-9, 20000);
  EXPECT_LE(std::abs(r.x[0] - opt[0]) + std::abs(r.x[1] - opt[1]), 1e-9);
}

TEST(Subproblem, FeasibleAndNotWorseThanWarmStart) {
  std::mt19937_64 gen(31);
  for (int i = 0; i < 200; ++i) {
    const std::size_t k = 1 + i % 8;
    const auto syn = fixtures::random_synthetic(gen, k);
    const auto rc = syn.rates();
    const auto fs = syn.feasible();
    RandomStream rng(i);
    const auto warm = random_feasible_point(fs, rng);
    std::vector<double> y(2 * k);
    part_gradient(rc, Part::v, warm, y);
    const auto r = solve_subproblem(rc, fs, y, warm, 1e-9, 20000);
    EXPECT_LE(fs.violation(r.x), 1e-8);
    EXPECT_GE(surrogate(rc, y, r.x), surrogate(rc, y, warm) - 1e-12);
  }
}

TEST(Subproblem, IterationCapThrowsWithBestIterate) {
  const RateCoefficients rc({5.0, 80.0}, {1.0, 2.0});
  const FeasibleSet fs({4.0, 6.0}, 1.0);
  const std::vector<double> warm{0.1, 0.1, 0.3, 0.3};
  std::vector<double> y(4);
  part_gradient(rc, Part::v, warm, y);
  try {
    solve_subproblem(rc, fs, y, warm, 1e-15, 1);
    FAIL() << "expected the cap to trip";
  } catch (const SubproblemError& e) {
    EXPECT_EQ(e.best_iterate().size(), 4u);
    EXPECT_LE(fs.violation(e.best_iterate()), 1e-12);
  }
}

TEST(Dca, NoEavesdropperMatchesClosedForm) {
  // With a_E = 0 and K = 1 the optimum spends exactly r_min / c on DL and the
  // whole UL frame: log2(1 + a (1 - r_min / c)).
  for (double r : {0.0, 1.0, 2.5, 3.9}) {
    const auto s = fixtures::channels({7.0}, {0.0}, {4.0});
    const FeasibleSet fs({4.0}, r);
    const auto res = dca_solve(s, fs);
    ASSERT_EQ(res.status, DcaStatus::converged);
    EXPECT_NEAR(res.objective, oracle::log2_naive(1.0 + 7.0 * (1.0 - r / 4.0)), 1e-4);
    const auto grid = grid_search(s, fs, GridSpec{});
    EXPECT_NEAR(res.objective, grid.objective, 1e-4);
  }
}

TEST(Dca, EveMatchingUserConvergesImmediately) {
  const auto s = fixtures::channels({3.0, 40.0}, {3.0, 40.0}, {5.0, 7.0});
  const FeasibleSet fs({5.0, 7.0}, 2.0);
  const auto res = dca_solve(s, fs);
  EXPECT_EQ(res.status, DcaStatus::converged);
  EXPECT_LE(res.iterations, 2);
  EXPECT_EQ(res.objective, 0.0);
}

TEST(Dca, InfeasibleShortCircuits) {
  const auto s = fixtures::channels({3.0}, {1.0}, {5.0});
  const auto res = dca_solve(s, FeasibleSet({5.0}, 6.0));
  EXPECT_EQ(res.status, DcaStatus::infeasible);
  EXPECT_EQ(res.iterations, 0);
}

TEST(Dca, IterationCapReported) {
  const auto s = fixtures::channels({30.0, 2.0}, {1.0, 9.0}, {5.0, 7.0});
  DcaSettings cfg;
  cfg.max_iterations = 1;
  const auto res = dca_solve(s, FeasibleSet({5.0, 7.0}, 1.0), cfg);
  EXPECT_EQ(res.status, DcaStatus::max_iterations);
  EXPECT_EQ(res.iterations, 1);
}

TEST(Dca, AscentAndFeasibility) {
  std::mt19937_64 gen(32);
  for (int i = 0; i < 60; ++i) {
    const std::size_t k = std::size_t{1} << (i % 4);
    const auto syn = fixtures::random_synthetic(gen, k);
    const auto fs = syn.feasible();
    const auto ms = dca_solve_multistart(syn.rates(), fs, DcaSettings{});
    for (const auto& run : ms.runs) {
      for (std::size_t t = 1; t < run.trace.size(); ++t)
        EXPECT_GE(run.trace[t].objective - run.trace[t - 1].objective, -1e-9) << "case " << i;
      EXPECT_LE(fs.violation(run.allocation.flatten()), 1e-8);
      EXPECT_EQ(run.status, DcaStatus::converged);
    }
    EXPECT_GE(ms.best.objective, ms.runs.front().objective);
  }
}

TEST(Dca, NonIncreasingInMinimumRate) {
  std::mt19937_64 gen(33);
  for (int i = 0; i < 10; ++i) {
    auto syn = fixtures::random_synthetic(gen, 1);
    syn.a_e[0] = syn.a[0] / 10.0;
    double prev = INFINITY;
    for (int j = 0; j <= 10; ++j) {
      const FeasibleSet fs(syn.c, 0.095 * j * syn.c[0]);
      const double obj = dca_solve_multistart(syn.rates(), fs, DcaSettings{}).best.objective;
      EXPECT_LE(obj, prev + 1e-6);
      prev = obj;
    }
  }
}

TEST(Dca, RestartFromSolutionIsFixedPoint) {
  std::mt19937_64 gen(34);
  int checked = 0;
  for (int i = 0; i < 20; ++i) {
    const auto syn = fixtures::random_synthetic(gen, 1 + i % 4);
    const auto fs = syn.feasible();
    const auto first = dca_solve(syn.rates(), fs, DcaSettings{}, initial_allocation(fs).flatten());
    if (first.status != DcaStatus::converged) continue;
    ++checked;
    const auto again = dca_solve(syn.rates(), fs, DcaSettings{}, first.allocation.flatten());
    EXPECT_LE(again.iterations, 2);
    EXPECT_NEAR(again.objective, first.objective, 1e-8);
  }
  EXPECT_GE(checked, 15);
}

TEST(Dca, MultistartDeterministic) {
  std::mt19937_64 gen(35);
  const auto syn = fixtures::random_synthetic(gen, 4);
  DcaSettings cfg;
  cfg.seed = 77;
  const auto a = dca_solve_multistart(syn.rates(), syn.feasible(), cfg);
  const auto b = dca_solve_multistart(syn.rates(), syn.feasible(), cfg);
  EXPECT_EQ(a.best.allocation.flatten(), b.best.allocation.flatten());
  EXPECT_EQ(a.runs.size(), 5u);
}

TEST(KktResidual, SmallAtOracleOptimum) {
  const auto s = fixtures::channels({7.0}, {0.0}, {4.0});
  const FeasibleSet fs({4.0}, 2.0);
  EXPECT_LT(kkt_residual(s, fs, Allocation{{0.5}, {1.0}}), 1e-4);
  const auto res = dca_solve(s, fs);
  EXPECT_LT(res.kkt_residual, 1e-4);
}

TEST(KktResidual, LargeAtInitialAllocation) {
  const auto s = fixtures::channels({30.0, 5.0, 12.0}, {2.0, 1.0, 0.5}, {5.0, 7.0, 6.0});
  const FeasibleSet fs({5.0, 7.0, 6.0}, 3.0);
  EXPECT_GT(kkt_residual(s, fs, initial_allocation(fs)), 1e-2);
}

TEST(KktResidual, InteriorEqualsGradientNorm) {
  const auto s = fixtures::channels({30.0, 5.0}, {2.0, 1.0}, {5.0, 7.0});
  const FeasibleSet fs({5.0, 7.0}, 0.5);
  const Allocation x{{0.2, 0.3}, {0.25, 0.35}};
  const auto vg = objective_and_gradient(s, x);
  double norm = 0.0;
  for (double g : vg.gradient) norm += g * g;
  EXPECT_NEAR(kkt_residual(s, fs, x), std::sqrt(norm), 1e-6 * std::sqrt(norm));
}

TEST(DcaSettings, Validation) {
  DcaSettings cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.epsilon = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.restarts = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

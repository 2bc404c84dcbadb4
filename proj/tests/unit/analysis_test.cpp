#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "gcf/analysis.hpp"

namespace {

using gcf::Grid;
using gcf::InitialProfile;
using gcf::SolverConfig;
using gcf::Stepper;
using gcf::Trajectory;

// Trajectory assembled by hand from a field u(x, t) on the given times.
Trajectory hand_built(const InitialProfile& profile, const Grid& grid,
                      const std::vector<double>& times, auto&& field) {
  Trajectory traj{SolverConfig(profile, grid, times.back() > 0 ? times.back() : 1.0),
                  times,
                  {},
                  gcf::TrajectoryMetadata::from(profile),
                  {}};
  for (double t : times) {
    std::vector<double> u(grid.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = field(grid.x(i), t);
    traj.samples.push_back(u);
  }
  return traj;
}

std::vector<double> uniform_times(double t_end, int count) {
  std::vector<double> ts;
  for (int k = 0; k < count; ++k) ts.push_back(t_end * k / (count - 1));
  return ts;
}

Trajectory run(const InitialProfile& p, double L, std::size_t n, double t_end,
               Stepper stepper = Stepper::Explicit, double sigma = 1.0, std::size_t every = 10) {
  SolverConfig cfg(p, Grid(L, n), t_end);
  cfg.stepper = stepper;
  cfg.sigma = sigma;
  cfg.snapshot_every = every;
  return gcf::evolve(cfg);
}

// --- parabolic distance ------------------------------------------------------

TEST(ParabolicDistance, Values) {
  EXPECT_EQ(gcf::parabolic_distance({3, 0}, {0, 4}), 3.0);
  EXPECT_EQ(gcf::parabolic_distance({1.5, 2.0}, {1.5, 2.0}), 0.0);
  EXPECT_EQ(gcf::parabolic_distance({0, 0}, {0.1, 4}), 2.0);
}

TEST(ParabolicDistance, SymmetricAndTriangleInequality) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> x(-5, 5), t(0, 3);
  for (int trial = 0; trial < 10000; ++trial) {
    const gcf::SpaceTimePoint a{x(rng), t(rng)}, b{x(rng), t(rng)}, c{x(rng), t(rng)};
    EXPECT_EQ(gcf::parabolic_distance(a, b), gcf::parabolic_distance(b, a));
    EXPECT_LE(gcf::parabolic_distance(a, c),
              gcf::parabolic_distance(a, b) + gcf::parabolic_distance(b, c) + 1e-12);
  }
}

// --- Hölder seminorms ---------------------------------------------------------

TEST(Holder, ConstantDerivativesHaveZeroSeminorm) {
  const Grid g(2.0, 41);
  const auto p = InitialProfile::constant(1.0);
  const auto affine = hand_built(p, g, uniform_times(1.0, 11), [](double x, double) { return 3.0 + x; });
  EXPECT_NEAR(gcf::holder_seminorm(affine, gcf::HolderTarget::Ux, 0.5).value, 0.0, 1e-12);
  const auto linear_t = hand_built(p, g, uniform_times(1.0, 11), [](double, double t) { return 1.0 + t; });
  EXPECT_NEAR(gcf::holder_seminorm(linear_t, gcf::HolderTarget::Ut, 0.5).value, 0.0, 1e-12);
}

TEST(Holder, SquareRootTimeProfileApproachesOne) {
  // u = 1 + x sqrt(t): stencil u_x = sqrt(t) exactly; [u_x]_{1/2} = 1.
  const Grid g(1.0, 21);
  const auto traj = hand_built(InitialProfile::constant(1.0), g, uniform_times(1.0, 41),
                               [](double x, double t) { return 2.0 + x * std::sqrt(t); });
  // Brute force over every lattice pair.
  double brute = 0.0;
  const auto& ts = traj.times;
  for (std::size_t a = 0; a < ts.size(); ++a) {
    for (std::size_t b = 0; b < ts.size(); ++b) {
      for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        for (std::size_t j = 1; j + 1 < g.size(); ++j) {
          const double d = gcf::parabolic_distance({g.x(i), ts[a]}, {g.x(j), ts[b]});
          if (d == 0) continue;
          brute = std::max(brute, std::abs(std::sqrt(ts[a]) - std::sqrt(ts[b])) / std::sqrt(d));
        }
      }
    }
  }
  EXPECT_NEAR(brute, 1.0, 1e-12);
  const auto est = gcf::holder_seminorm(traj, gcf::HolderTarget::Ux, 0.5, 200000);
  EXPECT_LE(est.value, brute + 1e-12);
  EXPECT_GT(est.value, 0.99);
}

TEST(Holder, MonotoneInPairCount) {
  const auto traj = run(InitialProfile::bump_on_constant(1, 1, 1), 4.0, 81, 0.1);
  for (auto target : {gcf::HolderTarget::Ux, gcf::HolderTarget::Uxx, gcf::HolderTarget::Ut}) {
    double prev = 0.0;
    for (std::size_t pairs : {0u, 10u, 1000u, 100000u}) {
      const auto est = gcf::holder_seminorm(traj, target, 0.5, pairs, 42);
      EXPECT_GE(est.value, prev);
      EXPECT_TRUE(std::isfinite(est.value));
      prev = est.value;
    }
  }
}

TEST(Holder, Rejections) {
  const auto traj = run(InitialProfile::constant(1.0), 1.0, 11, 0.01);
  EXPECT_THROW(gcf::holder_seminorm(traj, gcf::HolderTarget::Ux, 1.0), gcf::ValidationError);
  auto single = traj;
  single.times.resize(1);
  single.samples.resize(1);
  EXPECT_THROW(gcf::holder_seminorm(single, gcf::HolderTarget::Ux, 0.5), gcf::PreconditionViolation);
}

// --- bounds -------------------------------------------------------------------

TEST(CheckBounds, ConstantHasZeroMargin) {
  const auto r = gcf::check_bounds(run(InitialProfile::constant(2.0), 5.0, 51, 0.1));
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.worst_violation, 0.0, 1e-15);
}

TEST(CheckBounds, BumpStaysAboveInfimum) {
  const auto traj = run(InitialProfile::bump_on_constant(1, 1, 1), 6.0, 301, 0.3);
  const auto r = gcf::check_bounds(traj);
  EXPECT_TRUE(r.pass);
  EXPECT_GE(gcf::trajectory_min(traj), 1.0 - r.tolerance_used);
  EXPECT_TRUE(gcf::check_no_cutoff(traj).pass);
  EXPECT_EQ(traj.stats.cutoff_hits, 0u);
}

TEST(CheckBounds, DetectsInjectedOvershoot) {
  const auto p = InitialProfile::bump_on_constant(1, 1, 1);
  auto traj = run(p, 4.0, 81, 0.05);
  traj.samples.back()[40] = p.sup_f() + 1.0;
  const auto r = gcf::check_bounds(traj);
  EXPECT_FALSE(r.pass);
  EXPECT_DOUBLE_EQ(r.worst_violation, 1.0);
  EXPECT_EQ(r.location.x, traj.grid().x(40));
  EXPECT_EQ(r.location.t, traj.times.back());
}

TEST(CheckBounds, AllPresetsSigmasSteppersHorizons) {
  const std::vector<InitialProfile> presets{
      InitialProfile::constant(2.0), InitialProfile::bump_on_constant(1, 1, 1),
      InitialProfile::smoothed_step(1, 1, 1), InitialProfile::decaying_sinusoid(2, 1)};
  for (const auto& p : presets) {
    for (double sigma : {0.0, 0.5, 1.0}) {
      for (auto stepper : {Stepper::Explicit, Stepper::ImplicitEuler}) {
        for (double t_end : {0.1, 0.5}) {
          const auto r = gcf::check_bounds(run(p, 5.0, 101, t_end, stepper, sigma));
          EXPECT_TRUE(r.pass) << gcf::preset_name(p.preset()) << " sigma=" << sigma
                              << " t_end=" << t_end << " worst=" << r.worst_violation;
        }
      }
    }
  }
}

TEST(CheckNoCutoff, FlagsCounterHits) {
  auto traj = run(InitialProfile::bump_on_constant(1, 1, 1), 4.0, 81, 0.05);
  EXPECT_TRUE(gcf::check_no_cutoff(traj).pass);
  traj.stats.cutoff_hits = 3;
  EXPECT_FALSE(gcf::check_no_cutoff(traj).pass);
}

// --- gradient range -----------------------------------------------------------

TEST(CheckGradientRange, ConstantAndBump) {
  const auto flat = gcf::check_gradient_range(run(InitialProfile::constant(2.0), 5.0, 51, 0.1));
  EXPECT_TRUE(flat.pass);
  EXPECT_LE(flat.worst_violation, 0.0);
  EXPECT_TRUE(gcf::check_gradient_range(run(InitialProfile::bump_on_constant(1, 1, 1), 6.0, 301, 0.3)).pass);
}

TEST(CheckGradientRange, DetectsSpike) {
  auto traj = run(InitialProfile::bump_on_constant(1, 1, 1), 6.0, 301, 0.1);
  ASSERT_TRUE(gcf::check_gradient_range(traj).pass);
  traj.samples.back()[200] += 0.5;
  EXPECT_FALSE(gcf::check_gradient_range(traj).pass);
}

TEST(CheckGradientRange, RequiresCompactPerturbation) {
  const auto traj = run(InitialProfile::smoothed_step(1, 1, 1), 4.0, 81, 0.05);
  EXPECT_THROW(gcf::check_gradient_range(traj), gcf::PreconditionViolation);
}

// --- Bernstein ----------------------------------------------------------------

TEST(CheckBernstein, ConstantHasSlack) {
  const auto traj = run(InitialProfile::constant(1.0), 5.0, 51, 0.5);
  const auto r = gcf::check_bernstein(traj);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.worst_violation, 0.0);  // equality at t = 0
}

TEST(CheckBernstein, SmoothedStepAndSinusoid) {
  EXPECT_TRUE(gcf::check_bernstein(run(InitialProfile::smoothed_step(1, 1, 1), 8.0, 401, 0.5)).pass);
  EXPECT_TRUE(gcf::check_bernstein(run(InitialProfile::decaying_sinusoid(2, 1), 8.0, 401, 0.5)).pass);
  EXPECT_TRUE(gcf::check_bernstein(run(InitialProfile::smoothed_step(1, 1, 1), 8.0, 401, 0.5),
                                   {gcf::BernsteinConstant::SupF, std::nullopt})
                  .pass);
}

TEST(CheckBernstein, DetectsGradientGrowth) {
  // Slope grows like 1 + 3t, far faster than the e^{t/2} envelope allows.
  const auto p = InitialProfile::smoothed_step(1.0, 1.0, 1.0);
  const Grid g(1.0, 41);
  const auto bad = hand_built(p, g, uniform_times(0.5, 11),
                              [](double x, double t) { return 3.0 + (0.5 + 3.0 * t) * x; });
  EXPECT_FALSE(gcf::check_bernstein(bad).pass);
  const auto good = hand_built(p, g, uniform_times(0.5, 11),
                               [](double x, double t) { return 3.0 + 0.5 * std::exp(-t) * x; });
  EXPECT_TRUE(gcf::check_bernstein(good).pass);
}

TEST(CheckBernstein, RequiresPhysicalRange) {
  const auto traj = run(InitialProfile::smoothed_step(1, 1, 1), 4.0, 81, 0.05, Stepper::Explicit, 0.3);
  EXPECT_THROW(gcf::check_bernstein(traj), gcf::PreconditionViolation);
}

// --- decay and comparison -----------------------------------------------------

TEST(CheckDecay, Constant) {
  const auto traj = run(InitialProfile::constant(1.0, 0.5), 30.0, 301, 0.2);
  const auto d = gcf::check_decay(traj, 0.5);
  ASSERT_LT(d.K, 30.0);
  EXPECT_FALSE(d.report.inconclusive);
  EXPECT_TRUE(d.report.pass);
  EXPECT_NEAR(d.report.worst_violation, -1.5, 1e-12);
}

TEST(CheckDecay, BumpBeyondDecayRadius) {
  const auto traj = run(InitialProfile::bump_on_constant(1, 1, 1), 60.0, 1201, 0.5);
  const auto d = gcf::check_decay(traj, 0.25);
  EXPECT_LT(d.K, 60.0);
  EXPECT_FALSE(d.report.inconclusive);
  EXPECT_TRUE(d.report.pass);
}

TEST(CheckDecay, InconclusiveWhenRadiusExceedsDomain) {
  const auto traj = run(InitialProfile::bump_on_constant(1, 1, 1), 5.0, 101, 0.1);
  const auto d = gcf::check_decay(traj, 0.1);
  EXPECT_GE(d.K, 5.0);
  EXPECT_TRUE(d.report.inconclusive);
  EXPECT_TRUE(d.report.pass);
}

TEST(CheckDecay, DetectsFarFieldDrift) {
  auto traj = run(InitialProfile::constant(1.0, 0.5), 30.0, 301, 0.2);
  const auto clean = gcf::check_decay(traj, 0.5);
  traj.samples.back().front() += 2.0;
  const auto d = gcf::check_decay(traj, 0.5);
  EXPECT_TRUE(clean.report.pass);
  EXPECT_FALSE(d.report.pass);
  EXPECT_THROW(gcf::check_decay(run(InitialProfile::smoothed_step(1, 1, 1), 4, 41, 0.01), 0.1),
               gcf::PreconditionViolation);
}

TEST(ComparisonCheck, ConstantHasMarginEpsilon) {
  const auto traj = run(InitialProfile::constant(1.0), 5.0, 51, 0.2);
  const auto d = gcf::check_decay(traj, 0.1);
  const auto r = gcf::comparison_check(traj, d.barrier);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.worst_violation, -0.1);
}

TEST(ComparisonCheck, BumpBelowDecayBarrierAndAboveReflection) {
  const auto traj = run(InitialProfile::bump_on_constant(1, 1, 1), 10.0, 401, 0.5);
  const auto d = gcf::check_decay(traj, 0.25);
  EXPECT_TRUE(gcf::comparison_check(traj, d.barrier, gcf::BarrierSide::Upper).pass);
  EXPECT_TRUE(gcf::comparison_check(traj, d.barrier, gcf::BarrierSide::Lower).pass);
  auto with_tail = d.barrier;
  with_tail.tail = gcf::CoshTail{2.0, 20.0, gcf::choose_lambda(1.0, 0.25)};
  EXPECT_TRUE(gcf::comparison_check(traj, with_tail).pass);
}

TEST(ComparisonCheck, CoshBarrierCapsEveryTrajectory) {
  for (const auto& p : {InitialProfile::bump_on_constant(1, 1, 1), InitialProfile::smoothed_step(1, 1, 1),
                        InitialProfile::decaying_sinusoid(2, 1)}) {
    const auto traj = run(p, 5.0, 201, 0.3);
    double sup_abs = 0.0;
    for (const auto& s : traj.samples)
      for (double v : s) sup_abs = std::max(sup_abs, std::abs(v));
    const gcf::CoshBarrier b{p.sup_f(), sup_abs, 6.0, gcf::choose_lambda(p.m(), 0.25)};
    EXPECT_TRUE(gcf::comparison_check(traj, b).pass);
    const gcf::CoshBarrier lower{p.m(), sup_abs, 6.0, gcf::choose_lambda(p.m(), 0.25)};
    EXPECT_TRUE(gcf::comparison_check(traj, lower, gcf::BarrierSide::Lower).pass);
  }
}

TEST(ComparisonCheck, RejectsMismatchedConstants) {
  const auto traj = run(InitialProfile::bump_on_constant(1, 1, 1), 5.0, 101, 0.1);
  gcf::DecayBarrier wrong_c{3.0, 0.1, 10.0, 0.01, std::nullopt};
  EXPECT_THROW(gcf::comparison_check(traj, wrong_c), gcf::ValidationError);
  gcf::CoshBarrier low_cap{1.5, 1.0, 10.0, 5.0};
  EXPECT_THROW(gcf::comparison_check(traj, low_cap), gcf::ValidationError);
}

TEST(ComparisonCheck, DetectsCrossing) {
  auto traj = run(InitialProfile::bump_on_constant(1, 1, 1), 10.0, 401, 0.2);
  const auto d = gcf::check_decay(traj, 0.25);
  const double x = traj.grid().x(10);
  const double t = traj.times.back();
  traj.samples.back()[10] = gcf::decay_barrier_value(d.barrier, x, t) + 0.1;
  EXPECT_FALSE(gcf::comparison_check(traj, d.barrier).pass);
}

// --- mixed derivative identity ------------------------------------------------

Trajectory implicit_run(std::size_t n, double dt) {
  SolverConfig cfg(InitialProfile::bump_on_constant(1, 1, 1), Grid(4.0, n), 0.1);
  cfg.stepper = Stepper::ImplicitEuler;
  cfg.fixed_dt = dt;
  cfg.snapshot_every = 1;
  cfg.newton.tol = 1e-13;
  return gcf::evolve(cfg);
}

TEST(MixedDerivative, ConstantHasNoDiscrepancy) {
  const auto traj = run(InitialProfile::constant(2.0), 3.0, 31, 0.05, Stepper::Explicit, 1.0, 1);
  EXPECT_EQ(gcf::mixed_derivative_discrepancy(traj).value, 0.0);
  EXPECT_TRUE(gcf::mixed_derivative_check(traj, 1.0).pass);
}

TEST(MixedDerivative, ShrinksUnderRefinementAndDetectsSabotage) {
  std::vector<Trajectory> levels{implicit_run(201, 0.002), implicit_run(401, 0.001),
                                 implicit_run(801, 0.0005)};
  const double t_min = 0.025;
  const auto ok = gcf::mixed_derivative_refinement(levels, gcf::mixed_derivative_rhs, t_min);
  EXPECT_TRUE(ok.pass) << "1 - order = " << ok.worst_violation;

  const gcf::MixedDerivativeFormula flipped = [](double u, double ux, double uxx, double uxxx) {
    const double s = 1.0 + ux * ux;
    const double numer = -ux * uxx * s + 3.0 * u * ux * uxx * uxx + u * s * uxxx;
    return numer / (u * u * s * s * std::sqrt(s));
  };
  const auto bad = gcf::mixed_derivative_refinement(levels, flipped, t_min);
  EXPECT_FALSE(bad.pass);
  EXPECT_GT(gcf::mixed_derivative_discrepancy(levels.back(), flipped, t_min).value,
            10.0 * gcf::mixed_derivative_discrepancy(levels.back(), gcf::mixed_derivative_rhs, t_min).value);
}

TEST(MixedDerivative, InitialLayerIsExcludedByWindow) {
  const auto traj = implicit_run(201, 0.002);
  const auto all = gcf::mixed_derivative_discrepancy(traj);
  const auto late = gcf::mixed_derivative_discrepancy(traj, gcf::mixed_derivative_rhs, 0.025);
  EXPECT_LT(all.location.t, 0.025);
  EXPECT_GE(late.location.t, 0.025);
  EXPECT_LT(late.value, all.value);
}

TEST(MixedDerivative, Preconditions) {
  const auto two = run(InitialProfile::constant(2.0), 3.0, 31, 0.001, Stepper::Explicit, 1.0, 1000);
  EXPECT_THROW(gcf::mixed_derivative_discrepancy(two), gcf::PreconditionViolation);
  const auto low = run(InitialProfile::constant(2.0), 3.0, 31, 0.05, Stepper::Explicit, 0.2, 1);
  EXPECT_THROW(gcf::mixed_derivative_discrepancy(low), gcf::PreconditionViolation);
}

// --- convergence studies ------------------------------------------------------

TEST(ConvergenceOrder, ConstantIsNotApplicable) {
  SolverConfig cfg(InitialProfile::constant(2.0), Grid(4.0, 41), 0.05);
  const auto study = gcf::convergence_order(cfg, 3);
  EXPECT_FALSE(study.order.has_value());
  for (double d : study.differences) EXPECT_LT(d, 1e-13);
}

TEST(ConvergenceOrder, SpatialOrderTwoForExplicit) {
  for (const auto& p : {InitialProfile::bump_on_constant(1, 1, 1), InitialProfile::smoothed_step(1, 1, 1)}) {
    SolverConfig cfg(p, Grid(4.0, 81), 0.1);
    const auto study = gcf::convergence_order(cfg, 3);
    ASSERT_TRUE(study.order.has_value());
    EXPECT_NEAR(*study.order, 2.0, 0.3) << gcf::preset_name(p.preset());
  }
}

TEST(ConvergenceOrder, TemporalOrderOneForEuler) {
  for (auto stepper : {Stepper::Explicit, Stepper::ImplicitEuler}) {
    SolverConfig cfg(InitialProfile::bump_on_constant(1, 1, 1), Grid(4.0, 81), 0.1);
    cfg.stepper = stepper;
    const auto study = gcf::convergence_order(cfg, 4, gcf::Refinement::Time);
    ASSERT_TRUE(study.order.has_value());
    EXPECT_NEAR(*study.order, 1.0, 0.15);
  }
}

TEST(ConvergenceOrder, NeedsThreeLevels) {
  SolverConfig cfg(InitialProfile::constant(2.0), Grid(4.0, 41), 0.05);
  EXPECT_THROW(gcf::convergence_order(cfg, 2), gcf::ValidationError);
}

}  // namespace

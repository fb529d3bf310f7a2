#include <gtest/gtest.h>

#include <cmath>

#include "cavcoord/errors.hpp"
#include "cavcoord/exit_window.hpp"
#include "cavcoord/trajectory.hpp"
#include "support/oracles.hpp"

using namespace cavcoord;

namespace {

const VehicleLimits kLimits{-3.0, 3.0, 1.0, 20.0};

struct RandomPlan {
  double t0, p0, v0, tf, pf;
  CubicTrajectory traj;
};

// Feasible trajectory with an exit time drawn inside its window.
RandomPlan random_feasible(oracle::Gen& gen) {
  for (;;) {
    const double t0 = gen.uniform(0.0, 300.0);
    const double p0 = gen.uniform(0.0, 100.0);
    const double v0 = gen.uniform(kLimits.v_min + 0.5, kLimits.v_max);
    const double pf = p0 + gen.uniform(5.0, 215.0);
    try {
      const auto w = exit_time_window(t0, p0, v0, pf, kLimits);
      const double tf = gen.uniform(w.lower, w.upper);
      if (tf <= t0) continue;
      return {t0, p0, v0, tf, pf, solve_cubic(t0, p0, v0, tf, pf)};
    } catch (const InfeasibleError&) {
    }
  }
}

}  // namespace

TEST(SolveCubic, ConstantSpeedWhenDistanceMatches) {
  const auto tr = solve_cubic(0, 0, 15, 10, 150);
  EXPECT_EQ(tr.a(), 0.0);
  EXPECT_EQ(tr.b(), 0.0);
  EXPECT_EQ(tr.c(), 15.0);
  EXPECT_EQ(tr.d(), 0.0);
}

TEST(SolveCubic, DeceleratingExampleMatchesLinearSolve) {
  const auto tr = solve_cubic(0, 0, 15, 12, 150);
  const auto ref = oracle::cubic_by_linear_solve(0, 0, 15, 12, 150);
  EXPECT_NEAR(tr.a(), ref[0], 1e-15);
  EXPECT_NEAR(tr.b(), ref[1], 1e-13);
  EXPECT_NEAR(tr.c(), ref[2], 1e-12);
  EXPECT_NEAR(tr.d(), ref[3], 1e-12);
  // closed form for t0 = p0 = 0
  const double a = (15.0 * 12 - 150) / (2.0 * 12 * 12 * 12);
  EXPECT_DOUBLE_EQ(tr.a(), a);
  EXPECT_DOUBLE_EQ(tr.b(), -3 * a * 12);
  EXPECT_NEAR(tr.eval(0).u, -0.625, 1e-12);
  EXPECT_NEAR(tr.eval(12).v, 11.25, 1e-12);
}

TEST(SolveCubic, TimeShiftedConstantSpeed) {
  const auto tr = solve_cubic(2, 30, 15, 12, 180);
  EXPECT_NEAR(tr.a(), 0.0, 1e-15);
  EXPECT_NEAR(tr.b(), 0.0, 1e-14);
  EXPECT_NEAR(tr.c(), 15.0, 1e-12);
  EXPECT_NEAR(tr.d(), 0.0, 1e-12);
}

TEST(SolveCubic, RejectsBadBoundaryData) {
  EXPECT_THROW(solve_cubic(5, 0, 15, 5, 150), std::invalid_argument);
  EXPECT_THROW(solve_cubic(0, 150, 15, 10, 100), std::invalid_argument);
  EXPECT_THROW(solve_cubic(0, 0, 0, 10, 100), std::invalid_argument);
}

TEST(Eval, RowsAndDomain) {
  const auto flat = solve_cubic(0, 0, 15, 10, 150);
  const auto s = flat.eval(4);
  EXPECT_DOUBLE_EQ(s.p, 60);
  EXPECT_DOUBLE_EQ(s.v, 15);
  EXPECT_DOUBLE_EQ(s.u, 0);

  const auto tr = solve_cubic(0, 0, 15, 12, 150);
  const auto end = tr.eval(12);
  EXPECT_NEAR(end.p, 150, 1e-12);
  EXPECT_NEAR(end.v, 3 * tr.a() * 144 + 2 * tr.b() * 12 + tr.c(), 1e-12);
  EXPECT_NEAR(end.u, 0, 1e-12);

  const auto shifted = solve_cubic(3, 10, 14, 15, 200);
  const auto start = shifted.eval(3);
  EXPECT_DOUBLE_EQ(start.p, 10);
  EXPECT_DOUBLE_EQ(start.v, 14);
  EXPECT_NEAR(start.u, 6 * shifted.a() * 3 + 2 * shifted.b(), 1e-12);

  EXPECT_THROW(tr.eval(-0.1), std::out_of_range);
  EXPECT_THROW(tr.eval(12.1), std::out_of_range);
}

TEST(TimeAtPosition, Examples) {
  EXPECT_DOUBLE_EQ(time_at_position(solve_cubic(0, 0, 15, 10, 150), 150), 10);
  const auto tr = solve_cubic(0, 0, 15, 12, 150);
  const double t = time_at_position(tr, 75);
  EXPECT_NEAR(t, oracle::bisect_time(tr, 75), 1e-9);
  EXPECT_NEAR(t, 5.541, 5e-4);
  EXPECT_EQ(time_at_position(tr, 0), 0.0);
}

TEST(TimeAtPosition, Errors) {
  const auto tr = solve_cubic(0, 0, 15, 12, 150);
  EXPECT_THROW(time_at_position(tr, 151), std::out_of_range);
  EXPECT_THROW(time_at_position(tr, -1), std::out_of_range);
  // overshoots then comes back: v0 far too high for the distance and time
  const auto back = solve_cubic(0, 0, 40, 20, 100);
  EXPECT_THROW(time_at_position(back, 50), std::domain_error);
}

TEST(Extremum, Examples) {
  const auto c = poly_extremum_on_interval(Cubic{{5, 0, 0, 0}}, 0, 1);
  EXPECT_EQ(c.t, 0.0);
  EXPECT_EQ(c.value, 5.0);
  const auto par = poly_extremum_on_interval(Cubic{{0, 2, -1, 0}}, 0, 3);
  EXPECT_DOUBLE_EQ(par.t, 1.0);
  EXPECT_DOUBLE_EQ(par.value, 1.0);
  const auto cub = poly_extremum_on_interval(Cubic{{0, -3, 0, 1}}, -2, 2);
  EXPECT_DOUBLE_EQ(cub.t, -1.0);
  EXPECT_DOUBLE_EQ(cub.value, 2.0);
  const auto point = poly_extremum_on_interval(Cubic{{1, 1, 1, 1}}, 2, 2);
  EXPECT_EQ(point.t, 2.0);
  EXPECT_EQ(point.value, 15.0);
}

TEST(Feasibility, Examples) {
  const VehicleLimits tight{-3, 3, 1, 14};
  EXPECT_TRUE(feasibility_check(solve_cubic(0, 0, 15, 10, 150), kLimits));
  EXPECT_FALSE(feasibility_check(solve_cubic(0, 0, 15, 10, 150), tight));
  EXPECT_TRUE(feasibility_check(solve_cubic(0, 0, 15, 12, 150), kLimits));
  // hard braking breaks the control bound
  EXPECT_FALSE(feasibility_check(solve_cubic(0, 0, 15, 4, 20), kLimits));
}

TEST(Feasibility, SpeedIsMonotoneOnTheInterval) {
  // u(tf) = 0 puts the vertex of the speed parabola at tf itself.
  const auto tr = solve_cubic(0, 0, 12, 30, 212);
  EXPECT_NEAR(-tr.b() / (3 * tr.a()), 30.0, 1e-9);
  double prev = tr.speed(0);
  for (double t = 0.5; t <= 30; t += 0.5) {
    EXPECT_LE(tr.speed(t), prev + 1e-12);
    prev = tr.speed(t);
  }
}

TEST(ExitWindow, FastestAtTopSpeedIsConstantSpeed) {
  const auto w = exit_time_window(3.0, 0, 20, 212, kLimits);
  EXPECT_NEAR(w.lower, 3.0 + 10.6, 1e-6);
  EXPECT_TRUE(oracle::analytic_feasible(3.0, 0, 20, w.lower, 212, kLimits));
  EXPECT_FALSE(oracle::analytic_feasible(3.0, 0, 20, w.lower - 1e-3, 212, kLimits));
}

TEST(ExitWindow, MatchesDenseOracle) {
  const auto w = exit_time_window(0, 0, 15, 212, kLimits);
  const auto ref = oracle::dense_window(0, 0, 15, 212, kLimits);
  ASSERT_TRUE(ref.any);
  EXPECT_NEAR(w.lower, ref.lower, 2e-3);
  EXPECT_NEAR(w.upper, ref.upper, 2e-3);
}

TEST(ExitWindow, Errors) {
  EXPECT_THROW(exit_time_window(0, 10, 15, 10, kLimits), std::invalid_argument);
  // holding speed is always feasible, so only an out-of-range start speed
  // with weak braking and 1 m to go leaves nothing
  const VehicleLimits weak{-0.01, 0.01, 1.0, 20.0};
  EXPECT_THROW(exit_time_window(0, 0, 25, 1, weak), InfeasibleError);
}

TEST(ReviseWindow, Examples) {
  const auto a = revise_window({10, 20}, {9, 18});
  EXPECT_EQ(a.lower, 10);
  EXPECT_EQ(a.upper, 18);
  const auto b = revise_window({10, 20}, {12, 18});
  EXPECT_EQ(b.lower, 12);
  EXPECT_EQ(b.upper, 18);
  EXPECT_THROW(revise_window({10, 20}, {7, 9}), InfeasibleError);
}

TEST(ControlEffort, MatchesQuadrature) {
  const auto tr = solve_cubic(1, 0, 15, 13, 150);
  double sum = 0.0;
  const int n = 200000;
  const double h = tr.duration() / n;
  for (int k = 0; k < n; ++k) {
    const double u = tr.eval(tr.t_start() + (k + 0.5) * h).u;
    sum += 0.5 * u * u * h;
  }
  EXPECT_NEAR(tr.control_effort(), sum, 1e-8);
  EXPECT_NEAR(tr.control_effort_until(7), tr.restricted(1).control_effort_until(7), 1e-12);
}

TEST(TrajectoryProperty, BoundaryResiduals) {
  oracle::Gen gen(11);
  for (int i = 0; i < 2000; ++i) {
    const auto r = random_feasible(gen);
    const auto s0 = r.traj.eval(r.t0);
    const auto sf = r.traj.eval(r.tf);
    ASSERT_LE(std::abs(s0.p - r.p0), 1e-9);
    ASSERT_LE(std::abs(s0.v - r.v0), 1e-9);
    ASSERT_LE(std::abs(sf.p - r.pf), 1e-9);
    ASSERT_LE(std::abs(sf.u), 1e-9);
  }
}

TEST(TrajectoryProperty, InverseRoundTrip) {
  oracle::Gen gen(12);
  for (int i = 0; i < 1000; ++i) {
    const auto r = random_feasible(gen);
    const double t = gen.uniform(r.t0, r.tf);
    ASSERT_NEAR(time_at_position(r.traj, r.traj.eval(t).p), t, 1e-9) << i;
  }
}

TEST(TrajectoryProperty, FiniteDifferences) {
  oracle::Gen gen(13);
  constexpr double h = 1e-4;
  for (int i = 0; i < 1000; ++i) {
    const auto r = random_feasible(gen);
    const double t = gen.uniform(r.t0 + h, r.tf - h);
    const auto lo = r.traj.eval(t - h);
    const auto hi = r.traj.eval(t + h);
    const auto mid = r.traj.eval(t);
    ASSERT_NEAR((hi.p - lo.p) / (2 * h), mid.v, 1e-6);
    ASSERT_NEAR((hi.v - lo.v) / (2 * h), mid.u, 1e-6);
  }
}

TEST(TrajectoryProperty, FeasibilityAgreesWithSampling) {
  oracle::Gen gen(14);
  int feasible = 0;
  for (int i = 0; i < 1000; ++i) {
    const double t0 = gen.uniform(0, 50);
    const double v0 = gen.uniform(1, 20);
    const double pf = gen.uniform(20, 215);
    const double tf = t0 + gen.uniform(pf / 25, pf / 0.8);
    const auto tr = solve_cubic(t0, 0, v0, tf, pf);
    const bool exact = feasibility_check(tr, kLimits);
    feasible += exact;
    ASSERT_EQ(exact, oracle::sampled_feasible(tr, kLimits)) << i;
  }
  EXPECT_GT(feasible, 50);
  EXPECT_LT(feasible, 950);
}

TEST(ExitWindowProperty, EndpointsAreSharp) {
  oracle::Gen gen(15);
  for (int i = 0; i < 300; ++i) {
    const double t0 = gen.uniform(0, 100);
    const double p0 = gen.uniform(0, 150);
    const double v0 = gen.uniform(1, 20);
    const double pf = p0 + gen.uniform(2, 215 - p0 + 2);
    ExitTimeWindow w;
    try {
      w = exit_time_window(t0, p0, v0, pf, kLimits);
    } catch (const InfeasibleError&) {
      EXPECT_FALSE(oracle::dense_window(t0, p0, v0, pf, kLimits).any);
      continue;
    }
    const double d = pf - p0;
    ASSERT_GE(w.lower, t0 + d / kLimits.v_max - 1e-12);
    ASSERT_LE(w.upper, t0 + d / kLimits.v_min + 1e-12);
    ASSERT_TRUE(oracle::analytic_feasible(t0, p0, v0, w.lower, pf, kLimits));
    ASSERT_TRUE(oracle::analytic_feasible(t0, p0, v0, w.upper, pf, kLimits));
    ASSERT_FALSE(oracle::analytic_feasible(t0, p0, v0, w.lower - 1e-3, pf, kLimits));
    ASSERT_FALSE(oracle::analytic_feasible(t0, p0, v0, w.upper + 1e-3, pf, kLimits));
  }
}

#include <gtest/gtest.h>

#include "spinsq/spinsq.hpp"
#include "test_support.hpp"

using namespace spinsq;
using W = StrengthKnob::Which;

TEST(Kraus, CompletenessOnGrid) {
  for (ChannelKind kind : all_channel_kinds)
    for (int i = 0; i <= 100; ++i) {
      Matrix2c sum = Matrix2c::Zero();
      for (const auto& e : kraus_operators(kind, i / 100.0)) sum += e.adjoint() * e;
      EXPECT_LT((sum - Matrix2c::Identity()).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(Kraus, AmplitudeDampingAtZeroIsIdentity) {
  const auto ops = kraus_operators(ChannelKind::AmplitudeDamping, 0.0);
  ASSERT_EQ(ops.size(), 2u);
  EXPECT_EQ(ops[0], Matrix2c::Identity());
  EXPECT_EQ(ops[1], Matrix2c::Zero());
}

TEST(Kraus, FullDepolarizingHasEqualHalfWeights) {
  const auto ops = kraus_operators(ChannelKind::Depolarizing, 1.0);
  ASSERT_EQ(ops.size(), 4u);
  EXPECT_NEAR(ops[0](0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(ops[1](0, 1).real(), 0.5, 1e-15);
  EXPECT_NEAR(ops[2](1, 0).imag(), 0.5, 1e-15);
  EXPECT_NEAR(ops[3](1, 1).real(), -0.5, 1e-15);
}

TEST(Kraus, FullDephasingIsProjectorPair) {
  const auto ops = kraus_operators(ChannelKind::PhaseDamping, 1.0);
  EXPECT_EQ(ops[0], Matrix2c::Zero());
  EXPECT_EQ(ops[1](0, 0), cplx(1.0));
  EXPECT_EQ(ops[2](1, 1), cplx(1.0));
}

TEST(Kraus, RejectsOutOfRangeStrength) {
  EXPECT_THROW(kraus_operators(ChannelKind::PhaseDamping, -0.1), InvalidArgument);
  EXPECT_THROW(kraus_operators(ChannelKind::Depolarizing, 1.5), InvalidArgument);
}

TEST(WeakOperators, Definitions) {
  const auto id = weak_operators(1.0, 1.0);
  EXPECT_EQ(id.pre, Eigen::Matrix2d::Identity());
  EXPECT_EQ(*id.reversal, Eigen::Matrix2d::Identity());

  const auto w = weak_operators(2.0, 3.0);
  EXPECT_EQ(w.pre(1, 1), 2.0);
  EXPECT_EQ((*w.reversal)(0, 0), 3.0);
  EXPECT_EQ((*w.reversal)(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(w.reversal_rescaled(1, 1), 1.0 / 3.0);

  const auto inf = weak_operators(2.0, infinity);
  EXPECT_FALSE(inf.reversal.has_value());
  EXPECT_EQ(inf.reversal_rescaled(0, 0), 1.0);
  EXPECT_EQ(inf.reversal_rescaled(1, 1), 0.0);

  EXPECT_THROW(weak_operators(0.0, 1.0), InvalidArgument);
  EXPECT_THROW(weak_operators(1.0, -2.0), InvalidArgument);
}

TEST(SolveStrengths, AmplitudeDamping) {
  const auto ch = solve_strengths(ChannelKind::AmplitudeDamping, 0.36, {W::M, 2.0});
  EXPECT_NEAR(ch.n, std::sqrt(5.6875), 1e-14);
  EXPECT_NEAR(ch.n, 2.38485, 1e-5);
  EXPECT_NEAR(ch.k, 4.0 - 0.36, 1e-15);
  EXPECT_TRUE(ch.satisfies_constraint());

  for (double p : {0.0, 0.3, 0.99, 1.0})
    EXPECT_DOUBLE_EQ(solve_strengths(ChannelKind::AmplitudeDamping, p, {W::M, 1.0}).n, 1.0);

  const auto full = solve_strengths(ChannelKind::AmplitudeDamping, 1.0, {W::M, 3.0});
  EXPECT_TRUE(std::isinf(full.n));
  EXPECT_DOUBLE_EQ(full.k, 8.0);

  EXPECT_THROW(solve_strengths(ChannelKind::AmplitudeDamping, 0.5, {W::M, 0.5}),
               ConstraintError);
  const auto from_n = solve_strengths(ChannelKind::AmplitudeDamping, 0.2, {W::N, 3.0});
  EXPECT_NEAR(from_n.m * from_n.m, 0.8 * 9.0 + 0.2, 1e-14);
}

TEST(SolveStrengths, DepolarizingFixesM) {
  EXPECT_THROW(solve_strengths(ChannelKind::Depolarizing, 0.2, {W::M, 2.0}), ConstraintError);
  const auto ch = solve_strengths(ChannelKind::Depolarizing, 0.2, {W::N, 10.0});
  EXPECT_EQ(ch.m, 1.0);
  EXPECT_EQ(ch.n, 10.0);
}

TEST(SolveStrengths, PhaseDamping) {
  EXPECT_NEAR(solve_strengths(ChannelKind::PhaseDamping, 0.4, {W::M, 1.0}).n, std::sqrt(3.0),
              1e-15);
  EXPECT_NEAR(solve_strengths(ChannelKind::PhaseDamping, 0.4, {W::N, 2.0}).m, std::sqrt(2.0),
              1e-15);
  EXPECT_THROW(solve_strengths(ChannelKind::PhaseDamping, 0.4, {W::N, 1.2}), ConstraintError);
  EXPECT_THROW(solve_strengths(ChannelKind::PhaseDamping, 0.4, {W::M, 0.0}), InvalidArgument);
}

TEST(DualMap, AmplitudeDampingWithoutMeasurement) {
  for (double p : {0.0, 0.25, 0.7, 1.0}) {
    const auto d = dual_map(solve_strengths(ChannelKind::AmplitudeDamping, p, {W::M, 1.0}), 0.3);
    const double s = 1.0 - p;
    EXPECT_NEAR(d.f_xy, std::sqrt(s), 1e-15);
    EXPECT_NEAR(d.f_z, s, 1e-15);
    EXPECT_NEAR(d.c_z, -p, 1e-15);
    EXPECT_NEAR(d.norm, 1.0, 1e-15);
  }
}

TEST(DualMap, IdentityAtZeroDamping) {
  const auto d = dual_map(ProtectedChannel::without_measurement(ChannelKind::AmplitudeDamping, 0.0), -0.4);
  EXPECT_EQ(d.f_xy, 1.0);
  EXPECT_EQ(d.f_z, 1.0);
  EXPECT_EQ(d.c_z, 0.0);
}

TEST(DualMap, AmplitudeDampingIsTracePreservingUnderConstraint) {
  for (int i = 0; i <= 20; ++i) {
    const double p = i / 20.0;
    for (double m : {1.0, 1.5, 2.0, 8.0, 70.0}) {
      const auto ch = solve_strengths(ChannelKind::AmplitudeDamping, p, {W::M, m});
      for (double sz0 : {-1.0, -0.3, 0.8}) {
        const auto d = dual_map(ch, sz0);
        const auto id = DualMapCoefficients::identity_image(heisenberg_map(ch), d.norm);
        EXPECT_NEAR(id[0], 1.0, 1e-14);
        EXPECT_NEAR(id[1], 1.0, 1e-14);
        EXPECT_NEAR(d.norm, m * m, 1e-12 * m * m);
      }
    }
  }
}

TEST(DualMap, PhaseDampingQuotedExample) {
  const auto ch = solve_strengths(ChannelKind::PhaseDamping, 0.5, {W::M, 1.0});
  const auto d = dual_map(ch, -0.8726);
  EXPECT_NEAR(d.norm, 1.1274, 1e-12);
  EXPECT_NEAR(d.f_xy, std::sqrt(3.0) * 0.5 / 1.1274, 1e-12);
  EXPECT_NEAR(d.f_xy, 0.768162, 1e-6);
  EXPECT_NEAR(d.f_z, 2.0 / 1.1274, 1e-12);
  EXPECT_NEAR(d.c_z, 1.0 / 1.1274, 1e-12);
}

TEST(DualMap, DepolarizingQuotedMatrix) {
  // Theta+(A) numerator as written for DPC at m = 1.
  const double p = 0.35, s = 1 - p, n = 3.0, sz0 = 0.4;
  const auto ch = solve_strengths(ChannelKind::Depolarizing, p, {W::N, n});
  const auto h = heisenberg_map(ch);
  EXPECT_NEAR(h.aa, n * n - 0.5 * n * n * p, 1e-14);
  EXPECT_NEAR(h.ad, 0.5 * p, 1e-14);
  EXPECT_NEAR(h.da, 0.5 * p * n * n, 1e-14);
  EXPECT_NEAR(h.dd, 1.0 - 0.5 * p, 1e-14);
  EXPECT_NEAR(h.off, n * s, 1e-14);
  EXPECT_NEAR(dual_map(ch, sz0).norm, 0.5 * (n * n + 1) + 0.5 * (n * n * s - s) * sz0, 1e-14);
}

TEST(DualMap, MatchesHeisenbergSumOverKraus) {
  // Theta+_un(A) = sum_l M^+ E_l^+ N^+ A N E_l M, evaluated numerically.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (int trial = 0; trial < 60; ++trial) {
    const ChannelKind kind = all_channel_kinds[trial % 3];
    const double p = unit(rng), m = 0.2 + 3 * unit(rng), n = 0.2 + 3 * unit(rng);
    const auto ch = ProtectedChannel::with_strengths(kind, p, m, n);
    const auto w = weak_operators(m, n);
    const Matrix2c pre = w.pre.cast<cplx>(), post = w.reversal->cast<cplx>();
    Matrix2c a;
    a << cplx(0.3, 0.1), cplx(-0.7, 0.2), cplx(0.4, -0.5), cplx(1.1, 0.3);
    Matrix2c img = Matrix2c::Zero();
    for (const auto& e : kraus_operators(kind, p))
      img += pre.adjoint() * e.adjoint() * post.adjoint() * a * post * e * pre;
    const auto h = heisenberg_map(ch);
    EXPECT_NEAR(std::abs(img(0, 0) - (h.aa * a(0, 0) + h.ad * a(1, 1))), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(img(1, 1) - (h.da * a(0, 0) + h.dd * a(1, 1))), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(img(0, 1) - h.off * a(0, 1)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(img(1, 0) - h.off * a(1, 0)), 0.0, 1e-12);
  }
}

TEST(DualMap, RejectsViolatedConstraint) {
  const auto ch = ProtectedChannel::with_strengths(ChannelKind::PhaseDamping, 0.3, 1.0, 1.0);
  EXPECT_THROW(dual_map(ch, 0.0), ConstraintError);
  EXPECT_THROW(evolve_correlations(ch, CorrelationSet{}), ConstraintError);
}

TEST(Evolve, IdentityChannelLeavesCorrelations) {
  const auto c0 = closed_initial_correlations(SystemConfig::make(12, 1.8 * pi));
  const auto c = evolve_correlations(
      solve_strengths(ChannelKind::AmplitudeDamping, 0.0, {W::M, 1.0}), c0);
  EXPECT_NEAR(c.sz, c0.sz, 1e-15);
  EXPECT_NEAR(c.szz, c0.szz, 1e-15);
  EXPECT_NEAR(c.y, c0.y, 1e-15);
  EXPECT_NEAR(std::abs(c.u - c0.u), 0.0, 1e-15);
  EXPECT_NEAR(c.q, c0.q, 1e-15);
}

TEST(Evolve, FullDampingRelaxesToGround) {
  const auto c0 = closed_initial_correlations(SystemConfig::make(12, 0.6 * pi));
  const auto c = evolve_correlations(
      ProtectedChannel::without_measurement(ChannelKind::AmplitudeDamping, 1.0), c0);
  EXPECT_DOUBLE_EQ(c.sz, -1.0);
  EXPECT_DOUBLE_EQ(c.szz, 1.0);
  EXPECT_EQ(c.y, 0.0);
  EXPECT_EQ(c.u, cplx(0.0));
}

TEST(Evolve, LargeMeasurementRecoversZZAndPairCorrelation) {
  const auto c0 = closed_initial_correlations(SystemConfig::make(12, 0.1 * pi));
  for (double p : {0.1, 0.5, 0.9, 1.0}) {
    const auto c = evolve_correlations(
        solve_strengths(ChannelKind::AmplitudeDamping, p, {W::M, 1e4}), c0);
    EXPECT_NEAR(c.szz, c0.szz, 1e-7);
    EXPECT_NEAR(c.q, 1.0, 1e-7);
  }
}

namespace {

// Regression table: the per-channel evolved expectations exactly as quoted,
// coded independently of the dual-map route.
CorrelationSet quoted_evolution(const ProtectedChannel& ch, const CorrelationSet& c0) {
  const double p = ch.p, s = ch.s, m2 = ch.m * ch.m, sz0 = c0.sz, zz0 = c0.szz;
  CorrelationSet c;
  switch (ch.kind) {
    case ChannelKind::AmplitudeDamping: {
      const double sn2 = ch.k, m1 = sn2 + p;
      c.sz = (sn2 * sz0 - p) / m1;
      c.u = sn2 * m2 * c0.u / (m1 * m1);
      c.y = sn2 * m2 * c0.y / (m1 * m1);
      c.szz = (sn2 * sn2 * zz0 - 2 * sn2 * p * sz0 + p * p) / (m1 * m1);
      c.q = (sn2 * m2 + sn2 * (sn2 - m2) * zz0 - 2 * sn2 * p * sz0 + p * p) / (m1 * m1);
      break;
    }
    case ChannelKind::Depolarizing: {
      const double n2 = ch.n * ch.n;
      const double m = 0.5 * ((n2 * s - s) * sz0 + (n2 + 1));
      c.sz = 0.5 * ((n2 * s + s) * sz0 + (n2 - 1)) / m;
      c.u = s * s * n2 * c0.u / (m * m);
      c.y = s * s * n2 * c0.y / (m * m);
      const double zz = 0.25 * ((n2 * s + s) * (n2 * s + s) * zz0 +
                                2 * (n2 - 1) * (n2 * s + s) * sz0 + (n2 - 1) * (n2 - 1));
      c.szz = zz / (m * m);
      c.q = (s * s * n2 * (1 - zz0) + zz) / (m * m);
      break;
    }
    case ChannelKind::PhaseDamping: {
      const double n2 = ch.n * ch.n, m = m2 + 1 + sz0;
      c.sz = ((m2 + 1) * sz0 + 1) / m;
      c.u = s * s * m2 * n2 * c0.u / (m * m);
      c.y = s * s * m2 * n2 * c0.y / (m * m);
      const double zz = (m2 + 1) * (m2 + 1) * zz0 + 2 * (m2 + 1) * sz0 + 1;
      c.szz = zz / (m * m);
      c.q = (s * s * m2 * n2 * (1 - zz0) + zz) / (m * m);
      break;
    }
  }
  return c;
}

}  // namespace

TEST(Evolve, MatchesQuotedExpressions) {
  const std::vector<std::pair<ChannelKind, StrengthKnob>> settings = {
      {ChannelKind::AmplitudeDamping, {W::M, 1.0}}, {ChannelKind::AmplitudeDamping, {W::M, 2.0}},
      {ChannelKind::AmplitudeDamping, {W::M, 30.0}}, {ChannelKind::Depolarizing, {W::N, 1.0}},
      {ChannelKind::Depolarizing, {W::N, 10.0}},     {ChannelKind::Depolarizing, {W::N, 500.0}},
      {ChannelKind::PhaseDamping, {W::M, 1.0}},      {ChannelKind::PhaseDamping, {W::M, 0.01}}};
  for (double theta : {0.1 * pi, 0.9 * pi, 1.8 * pi}) {
    const auto c0 = closed_initial_correlations(SystemConfig::make(12, theta));
    for (const auto& [kind, knob] : settings)
      for (int i = 0; i < 20; ++i) {
        const auto ch = solve_strengths(kind, i / 20.0, knob);
        const auto got = evolve_correlations(ch, c0);
        const auto want = quoted_evolution(ch, c0);
        const double scale = std::max(1.0, std::abs(want.szz));
        EXPECT_NEAR(got.sz, want.sz, 1e-12);
        EXPECT_NEAR(got.szz, want.szz, 1e-12 * scale);
        EXPECT_NEAR(got.y, want.y, 1e-12);
        EXPECT_NEAR(std::abs(got.u - want.u), 0.0, 1e-12);
        EXPECT_NEAR(got.q, want.q, 1e-12 * scale);
      }
  }
}

TEST(Evolve, ExchangeIdentityHoldsForAllChannels) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const ChannelKind kind = all_channel_kinds[trial % 3];
    const auto cfg = SystemConfig::make(2 + trial % 13, 2 * pi * unit(rng));
    const double p = unit(rng);
    StrengthKnob knob = kind == ChannelKind::Depolarizing
                            ? StrengthKnob{W::N, 0.5 + 20 * unit(rng)}
                            : StrengthKnob{W::M, 1.0 + 10 * unit(rng)};
    const auto c = evolve_correlations(solve_strengths(kind, p, knob),
                                       closed_initial_correlations(cfg));
    EXPECT_LT(c.exchange_residual(), 1e-12 * std::max(1.0, std::abs(c.szz)));
  }
}

TEST(Evolve, AmplitudeDampingContinuousAtFullDamping) {
  const auto c0 = closed_initial_correlations(SystemConfig::make(12, 1.8 * pi));
  for (double m : {1.5, 4.0, 70.0}) {
    const auto at_one = evolve_correlations(
        solve_strengths(ChannelKind::AmplitudeDamping, 1.0, {W::M, m}), c0);
    const auto near_one = evolve_correlations(
        solve_strengths(ChannelKind::AmplitudeDamping, 1.0 - 1e-9, {W::M, m}), c0);
    EXPECT_NEAR(at_one.sz, near_one.sz, 1e-8);
    EXPECT_NEAR(at_one.szz, near_one.szz, 1e-8);
    EXPECT_NEAR(std::abs(at_one.u - near_one.u), 0.0, 1e-8);
  }
}

TEST(Evolve, KParameterizationMatchesNaiveForm) {
  // naive: explicit s and n with n = sqrt((m^2 - p)/s)
  const auto c0 = closed_initial_correlations(SystemConfig::make(8, 0.4 * pi));
  for (double s : {1.0, 0.5, 1e-3}) {
    const double p = 1 - s;
    for (double m : {1.0, 2.0, 8.0}) {
      const double n = std::sqrt((m * m - p) / s);
      const auto naive = ProtectedChannel::with_strengths(ChannelKind::AmplitudeDamping, p, m, n);
      const auto solved = solve_strengths(ChannelKind::AmplitudeDamping, p, {W::M, m});
      const auto a = evolve_correlations(naive, c0), b = evolve_correlations(solved, c0);
      EXPECT_NEAR(a.sz, b.sz, 1e-12);
      EXPECT_NEAR(a.szz, b.szz, 1e-12);
      EXPECT_NEAR(std::abs(a.u - b.u), 0.0, 1e-12);
    }
  }
}

TEST(PFromTime, Values) {
  EXPECT_EQ(p_from_time(0.0, 5.0), 0.0);
  EXPECT_NEAR(p_from_time(2.0, std::log(4.0)), 0.75, 1e-15);
  EXPECT_NEAR(p_from_time(1.0, 1e3), 1.0, 1e-15);
  EXPECT_THROW(p_from_time(-1.0, 1.0), InvalidArgument);
  EXPECT_THROW(p_from_time(1.0, -1.0), InvalidArgument);
}

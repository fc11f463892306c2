#include <gtest/gtest.h>

#include "spinsq/spinsq.hpp"
#include "test_support.hpp"

using namespace spinsq;
using W = StrengthKnob::Which;

namespace {

struct Case {
  ChannelKind kind;
  double p;
  std::optional<StrengthKnob> knob;
};

ProtectedChannel channel_for(const Case& c) {
  return c.knob ? solve_strengths(c.kind, c.p, *c.knob)
                : ProtectedChannel::without_measurement(c.kind, c.p);
}

std::vector<Case> sample_cases() {
  std::vector<Case> out;
  for (double p : {0.0, 0.3, 0.75}) {
    out.push_back({ChannelKind::AmplitudeDamping, p, std::nullopt});
    out.push_back({ChannelKind::AmplitudeDamping, p, StrengthKnob{W::M, 2.0}});
    out.push_back({ChannelKind::Depolarizing, p, std::nullopt});
    out.push_back({ChannelKind::Depolarizing, p, StrengthKnob{W::N, 10.0}});
    out.push_back({ChannelKind::PhaseDamping, p, std::nullopt});
    out.push_back({ChannelKind::PhaseDamping, p, StrengthKnob{W::M, 0.5}});
  }
  return out;
}

void expect_close(const CorrelationSet& a, const CorrelationSet& b, double tol) {
  EXPECT_NEAR(a.sz, b.sz, tol);
  EXPECT_NEAR(a.szz, b.szz, tol);
  EXPECT_NEAR(a.y, b.y, tol);
  EXPECT_NEAR(std::abs(a.u - b.u), 0.0, tol);
  EXPECT_NEAR(a.q, b.q, tol);
}

}  // namespace

TEST(Oracle, FrozenPostSelectedValues) {
  // Frozen from a full-register evolution and explicit Kraus-tuple sum, N = 4.
  {
    const auto c = post_selected_correlations(
        SystemConfig::make(4, 1.8 * pi),
        solve_strengths(ChannelKind::Depolarizing, 0.5, {W::N, 10.0}));
    EXPECT_NEAR(c.sz, 0.992906825815365, 1e-12);
    EXPECT_NEAR(c.szz, 0.985871622552563, 1e-12);
    EXPECT_NEAR(c.y, 7.40928077931471e-05, 1e-12);
    EXPECT_NEAR(c.u.real(), -0.000221442649243812, 1e-12);
    EXPECT_NEAR(c.u.imag(), 0.00065448868961715, 1e-12);
  }
  {
    const auto c = post_selected_correlations(
        SystemConfig::make(4, 0.1 * pi),
        solve_strengths(ChannelKind::PhaseDamping, 0.3, {W::M, 1.0}));
    EXPECT_NEAR(c.sz, -0.713122819349357, 1e-12);
    EXPECT_NEAR(c.szz, 0.672821549082602, 1e-12);
    EXPECT_NEAR(c.y, 0.0400793602373813, 1e-12);
    EXPECT_NEAR(c.u.real(), -0.0126936610566449, 1e-12);
    EXPECT_NEAR(c.u.imag(), 0.0980714932868761, 1e-12);
  }
  {
    const auto c = post_selected_correlations(
        SystemConfig::make(4, 1.8 * pi),
        solve_strengths(ChannelKind::AmplitudeDamping, 0.36, {W::M, 2.0}));
    EXPECT_NEAR(c.sz, 0.692817217267987, 1e-12);
    EXPECT_NEAR(c.szz, 0.552242144152242, 1e-12);
    EXPECT_NEAR(c.y, 0.0392996584449233, 1e-12);
    EXPECT_NEAR(c.u.real(), -0.0392996584449108, 1e-12);
    EXPECT_NEAR(c.u.imag(), 0.127176366220302, 1e-12);
  }
}

TEST(Oracle, FastPathMatchesBruteForceKrausTuples) {
  for (int n : {2, 3, 4})
    for (double theta : {0.1 * pi, 1.8 * pi})
      for (const auto& cs : sample_cases()) {
        const auto ch = channel_for(cs);
        const auto brute = reference::brute_correlations(
            reference::brute_post_selected(n, theta, ch.kind, ch.p, ch.m, ch.n), n);
        expect_close(post_selected_correlations(SystemConfig::make(n, theta), ch), brute, 1e-11);
      }
}

TEST(Oracle, FastPathMatchesFullRegister) {
  for (int n : {2, 5, 8})
    for (double theta : {0.1 * pi, 0.9 * pi, 1.8 * pi})
      for (const auto& cs : sample_cases()) {
        const auto cfg = SystemConfig::make(n, theta);
        const auto ch = channel_for(cs);
        const auto slow = block_form_check(pair_marginal(exact_post_selected_state(cfg, ch)));
        const auto fast = block_form_check(post_selected_state(cfg, ch));
        EXPECT_LT(slow.residual, 1e-12);
        EXPECT_LT(fast.residual, 1e-12);
        expect_close(fast.correlations, slow.correlations, 1e-10);
      }
}

TEST(Oracle, AmplitudeDampingMatchesDualMapExactly) {
  for (int n : {3, 6, 12})
    for (double theta : {0.1 * pi, 1.8 * pi})
      for (double m : {1.0, 2.0, 8.0})
        for (double p : {0.0, 0.2, 0.55, 0.95}) {
          const auto cfg = SystemConfig::make(n, theta);
          const auto ch = solve_strengths(ChannelKind::AmplitudeDamping, p, {W::M, m});
          expect_close(post_selected_correlations(cfg, ch),
                       evolve_correlations(ch, closed_initial_correlations(cfg)), 1e-10);
        }
}

TEST(Oracle, AmplitudeDampingFiniteAtFullDamping) {
  const auto cfg = SystemConfig::make(6, 1.8 * pi);
  const auto ch = solve_strengths(ChannelKind::AmplitudeDamping, 1.0, {W::M, 3.0});
  ASSERT_TRUE(std::isinf(ch.n));
  expect_close(post_selected_correlations(cfg, ch),
               evolve_correlations(ch, closed_initial_correlations(cfg)), 1e-12);
  expect_close(block_form_check(pair_marginal(exact_post_selected_state(cfg, ch))).correlations,
               post_selected_correlations(cfg, ch), 1e-12);
}

TEST(Oracle, PostSelectedStatesArePhysical) {
  for (int n : {2, 7, 12})
    for (const auto& cs : sample_cases()) {
      const auto st = post_selected_state(SystemConfig::make(n, 1.3 * pi), channel_for(cs));
      EXPECT_NO_THROW(st.validate());
      EXPECT_TRUE(block_form_check(st).correlations.is_physical());
    }
}

TEST(Oracle, FullMatrixSizeLimit) {
  EXPECT_THROW(full_twisted_state(SystemConfig::make(max_full_matrix_spins + 1, pi)),
               InvalidArgument);
}

TEST(Collective, MatchesCorrelationFormsOnInitialStates) {
  for (int n : {2, 4, 6, 8})
    for (int k = 0; k <= 20; ++k) {
      const auto cfg = SystemConfig::make(n, 0.1 * k * pi);
      const auto col = collective_squeezing(full_twisted_state(cfg));
      const auto c = closed_initial_correlations(cfg);
      EXPECT_NEAR(col.mean_spin.z(), 0.5 * n * c.sz, 1e-10);
      if (col.xi1_sq) {
        EXPECT_NEAR(*col.xi1_sq, xi1_sq(c, n), 1e-9) << "N=" << n << " k=" << k;
        // xi2 divides by sz^2, which is ~1e-17 at theta = pi
        if (std::abs(c.sz) > 1e-3)
          EXPECT_NEAR(col.xi2_sq, xi2_sq(c, n), 1e-9 * std::max(1.0, col.xi2_sq));
      }
      if (std::isfinite(col.xi3_sq)) EXPECT_NEAR(col.xi3_sq, xi3_sq(c, n), 1e-9);
    }
}

TEST(Collective, MatchesCorrelationFormsAfterChannel) {
  for (int n : {2, 4, 6, 8})
    for (double theta : {0.1 * pi, 1.8 * pi})
      for (const auto& cs : sample_cases()) {
        const auto cfg = SystemConfig::make(n, theta);
        const auto st = exact_post_selected_state(cfg, channel_for(cs));
        const auto col = collective_squeezing(st);
        const auto c = block_form_check(pair_marginal(st)).correlations;
        if (col.xi1_sq) {
          EXPECT_NEAR(*col.xi1_sq, xi1_sq(c, n), 1e-9);
          EXPECT_NEAR(col.xi2_sq, xi2_sq(c, n), 1e-9 * std::max(1.0, col.xi2_sq));
        }
        if (std::isfinite(col.xi3_sq)) EXPECT_NEAR(col.xi3_sq, xi3_sq(c, n), 1e-9);
      }
}

TEST(Wootters, BellProductWerner) {
  TwoQubitState bell;
  bell.rho.setZero();
  bell.rho(0, 0) = bell.rho(0, 3) = bell.rho(3, 0) = bell.rho(3, 3) = 0.5;
  EXPECT_NEAR(wootters_concurrence(bell), 1.0, 1e-14);

  TwoQubitState product;
  product.rho.setZero();
  product.rho(3, 3) = 1.0;
  EXPECT_EQ(wootters_concurrence(product), 0.0);

  // Werner: w |Phi+><Phi+| + (1 - w) I/4, concurrence (3w - 1)/2
  for (double w : {0.2, 1.0 / 3.0, 0.5, 0.8}) {
    TwoQubitState werner;
    werner.rho = w * bell.rho + (1 - w) * Matrix4c::Identity() / 4.0;
    EXPECT_NEAR(wootters_concurrence(werner), std::max(0.0, 0.5 * (3 * w - 1)), 1e-12);
  }
}

TEST(Wootters, MatchesBlockFormulaOnRandomBlockStates) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 2000; ++i) {
    const auto c = reference::random_block_correlations(rng);
    EXPECT_NEAR(wootters_concurrence(block_state(c)), block_concurrence(c, 2).raw, 1e-10);
  }
}

TEST(Wootters, MatchesBlockFormulaOnOracleStates) {
  for (int n : {2, 5, 12})
    for (double theta : {0.1 * pi, 0.5 * pi, 1.8 * pi})
      for (const auto& cs : sample_cases()) {
        const auto st = post_selected_state(SystemConfig::make(n, theta), channel_for(cs));
        const auto chk = block_form_check(st);
        ASSERT_LT(chk.residual, 1e-10);
        EXPECT_NEAR(wootters_concurrence(st), block_concurrence(chk.correlations, n).raw, 1e-10);
      }
}

TEST(Wootters, RejectsNonStates) {
  TwoQubitState bad;
  bad.rho = Matrix4c::Identity();
  EXPECT_THROW(wootters_concurrence(bad), PositivityViolation);
}

#include "egsolve/analysis.hpp"
#include "egsolve/operators.hpp"
#include "egsolve/solver.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

using namespace egsolve;

namespace {

template <class Fn>
Errc code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an egsolve::Error";
  return Errc::InvalidArgument;
}

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

SolveTrace run(const OperatorInstance& op, const std::string& policy, Vec x0, std::size_t iters, bool force = false) {
  SolveConfig c;
  c.x0 = std::move(x0);
  c.max_iters = iters;
  c.force = force;
  return solve(op, parse_policy(policy), c);
}

OperatorInstance zero_operator() {
  OperatorInstance op;
  op.dim = 2;
  op.label = "zero";
  op.eval = [](const Vector&) -> Vector { return Vector::Zero(2); };
  op.jacobian = [](const Vector&) -> Matrix { return Matrix::Zero(2, 2); };
  op.smoothness = SmoothnessParams(1.0, 1.0, 0.0);
  return registered(op);
}

Vec unit_start(std::size_t dim, std::uint64_t seed) {
  egtest::Gen g(seed);
  Vector x = g.vec(static_cast<Eigen::Index>(dim), -1, 1);
  return Vec(Vector(x / x.norm()));
}

}  // namespace

// ---------------------------------------------------------------------------
// Scatter

TEST(Scatter, QuadraticIsHorizontalLine) {
  const auto op = quadratic_minmax();
  const auto samples = scatter_from_trace(op, run(op, "thm3", Vec{3.0, -1.0}, 100));
  ASSERT_EQ(samples.size(), 100u);
  for (const auto& s : samples) EXPECT_NEAR(s.norm_J, std::numbers::sqrt2, 1e-12);
  EXPECT_EQ(samples.front().iterate_index, 0);
  EXPECT_EQ(samples.back().iterate_index, 99);
}

TEST(Scatter, CubicJacobianGrowsWithOperator) {
  const auto op = cubic_minmax_1d();
  const auto samples = scatter_from_trace(op, run(op, "thm5", Vec{2.0, 2.0}, 500, true));
  std::vector<double> f, j;
  for (const auto& s : samples) {
    f.push_back(s.norm_F);
    j.push_back(s.norm_J);
  }
  EXPECT_GT(spearman_correlation(f, j), 0.99);
}

TEST(Scatter, SingleRowAtRoot) {
  const auto op = cubic_minmax_1d();
  const auto samples = scatter_from_trace(op, run(op, "const:0.1", Vec{0.0, 0.0}, 10));
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(samples[0].norm_F, 0.0);
}

TEST(Scatter, EmptyTraceRejected) {
  EXPECT_EQ(code_of([] { scatter_from_trace(quadratic_minmax(), SolveTrace{}); }), Errc::EmptyTrace);
}

TEST(Scatter, FiniteDifferenceFallback) {
  auto op = cubic_minmax_1d();
  const auto exact = scatter_from_grid(op, Box::cube(2, 3.0), 7);
  op.jacobian.reset();
  const auto fd = scatter_from_grid(op, Box::cube(2, 3.0), 7);
  ASSERT_EQ(exact.size(), 49u);
  for (std::size_t i = 0; i < exact.size(); ++i) EXPECT_NEAR(exact[i].norm_J, fd[i].norm_J, 1e-6);
}

TEST(Spearman, Oracle) {
  EXPECT_NEAR(spearman_correlation({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0, 1e-15);
  EXPECT_NEAR(spearman_correlation({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0, 1e-15);
  // Ranks (1,2,3,4,5) vs (2,1,4,3,5): 1 - 6*4/(5*24) = 0.8.
  EXPECT_NEAR(spearman_correlation({1, 2, 3, 4, 5}, {2, 1, 4, 3, 5}), 0.8, 1e-12);
}

// ---------------------------------------------------------------------------
// Condition checks

TEST(VerifyCondition, CubicPassesWithDeclaredConstants) {
  const auto fit = verify_condition(cubic_minmax_1d(), SmoothnessParams(1, 10, 10), Box::cube(2, 50), 201);
  EXPECT_GT(fit.max_violation, 0.0);
  EXPECT_TRUE(passes(fit));
  EXPECT_EQ(fit.L0_hat, 10.0);
  EXPECT_EQ(fit.L1_hat, 10.0);
}

TEST(VerifyCondition, QuadraticIsTight) {
  for (double r : {1.0, 50.0, 1e4}) {
    const auto fit = verify_condition(quadratic_minmax(), SmoothnessParams(1, std::numbers::sqrt2, 0), Box::cube(2, r), 21);
    EXPECT_NEAR(fit.max_violation, 0.0, 1e-12);
  }
}

TEST(VerifyCondition, SmallConstantsFail) {
  const auto fit = verify_condition(cubic_minmax_1d(), SmoothnessParams(1, 1, 0.1), Box::cube(2, 50), 201);
  EXPECT_LT(fit.max_violation, 0.0);
  EXPECT_FALSE(passes(fit));
}

TEST(VerifyCondition, MatchesBruteForceOracle) {
  const auto op = square_component_operator();
  const SmoothnessParams s(0.5, 0.1, 1.5);
  const auto fit = verify_condition(op, s, Box::cube(2, 4), 31);
  double worst = 1e300;
  for (int i = 0; i < 31; ++i)
    for (int j = 0; j < 31; ++j) {
      const Vector x = v2(-4.0 + 8.0 * i / 30.0, -4.0 + 8.0 * j / 30.0);
      const double g = 0.1 + 1.5 * std::sqrt(op(x).norm()) - egtest::svd_norm((*op.jacobian)(x));
      worst = std::min(worst, g);
    }
  EXPECT_NEAR(fit.max_violation, worst, 1e-12);
}

TEST(VerifyCondition, Errors) {
  EXPECT_EQ(code_of([] { verify_condition(quadratic_minmax(), SmoothnessParams(1, 1, 1), Box::cube(3, 1), 5); }),
            Errc::DimensionMismatch);
  EXPECT_EQ(code_of([] { verify_condition(quadratic_minmax(), SmoothnessParams(1, 1, 1), Box::cube(2, 1), 1); }),
            Errc::InvalidArgument);
}

TEST(VerifyCondition, DeterministicAcrossThreadCounts) {
  const auto op = global_forsaken();
  ::setenv("EG_SOLVE_THREADS", "1", 1);
  const auto a = verify_condition(op, op.smoothness, Box::cube(2, 2), 301);
  const auto s1 = verify_segment_condition(op, op.smoothness, 500, 51, Box::cube(2, 2), 9);
  ::unsetenv("EG_SOLVE_THREADS");
  const auto b = verify_condition(op, op.smoothness, Box::cube(2, 2), 301);
  const auto s2 = verify_segment_condition(op, op.smoothness, 500, 51, Box::cube(2, 2), 9);
  EXPECT_EQ(a.max_violation, b.max_violation);
  EXPECT_EQ(s1.worst_excess, s2.worst_excess);
  EXPECT_EQ(s1.violations, s2.violations);
}

TEST(SegmentCondition, SquareComponentPasses) {
  const auto rep = verify_segment_condition(square_component_operator(), SmoothnessParams(0.5, 0, 2), 1000, 101,
                                            Box::cube(2, 3));
  EXPECT_EQ(rep.checked, 1000u);
  EXPECT_EQ(rep.violations, 0u);
}

TEST(SegmentCondition, LargeL0OnBoundedBox) {
  for (const auto& key : {"cubic1d", "forsaken", "signpower"}) {
    const auto op = build_operator(key);
    const auto rep = verify_segment_condition(op, SmoothnessParams(1, 1e4, 0), 500, 11, Box::cube(2, 5));
    EXPECT_EQ(rep.violations, 0u) << key;
  }
}

TEST(SegmentCondition, WrongClassDetected) {
  const auto rep = verify_segment_condition(square_component_operator(), SmoothnessParams(1, 0, 0.1), 1000, 101,
                                            Box::cube(2, 3));
  EXPECT_GT(rep.violations, 0u);
}

// Grid and segment verdicts agree on every zoo operator, with its declared
// constants and with constants shrunk by a factor of 20.
class VerdictTest : public ::testing::TestWithParam<std::string> {};

TEST_P(VerdictTest, JacobianAndSegmentAgree) {
  const auto op = build_operator(GetParam());
  const Box box = Box::cube(op.dim, 2.0);
  auto jac_verdict = [&](const SmoothnessParams& s) {
    return passes(op.dim <= 3 ? verify_condition(op, s, box, op.dim == 2 ? 201 : 41)
                              : verify_condition_sampled(op, s, box, 20000));
  };
  const SmoothnessParams declared = op.smoothness;
  EXPECT_TRUE(jac_verdict(declared));
  EXPECT_TRUE(verify_segment_condition(op, declared, 1000, 101, box).passed());

  const SmoothnessParams shrunk(declared.alpha, declared.L0 / 20.0, declared.L1 / 20.0);
  EXPECT_EQ(jac_verdict(shrunk), verify_segment_condition(op, shrunk, 4000, 101, box).passed());
}

INSTANTIATE_TEST_SUITE_P(AllKeys, VerdictTest,
                         ::testing::Values("logistic", "quadratic", "cubic1d", "signpower", "cubicRd", "power",
                                           "square", "forsaken", "bilinear", "nplayer"));

// ---------------------------------------------------------------------------
// Two-point growth bound (verify_proposition1)

TEST(TwoPointBound, RightHandSideFormulas) {
  // alpha = 1: (L0 + L1 ||F||) exp(L1 r) r.
  EXPECT_NEAR(proposition1_rhs(SmoothnessParams(1, 2, 3), 0.5, 0.1), (2 + 1.5) * std::exp(0.3) * 0.1, 1e-15);
  // alpha = 1/2: (K0 + K1 ||F||^{1/2} + K2 r) r with the hand-evaluated K's.
  const double K0 = 1.0 + std::numbers::sqrt2;
  const double K1 = 2.0 * std::numbers::sqrt2;
  const double K2 = 2.0 * std::sqrt(6.0);
  EXPECT_NEAR(proposition1_rhs(SmoothnessParams(0.5, 1, 2), 4.0, 0.3), (K0 + K1 * 2.0 + K2 * 0.3) * 0.3, 1e-12);
}

TEST(TwoPointBound, LogisticHoldsWithExampleConstants) {
  const auto op = logistic_gradient(v2(1, 1));
  const auto rep = verify_proposition1(op, op.smoothness, 1000, Box::cube(2, 3));
  EXPECT_EQ(rep.checked, 1000u);
  EXPECT_EQ(rep.violations, 0u);
}

TEST(TwoPointBound, SquareHoldsWithKConstants) {
  const auto rep = verify_proposition1(square_component_operator(), SmoothnessParams(0.5, 0, 2), 1000, Box::cube(2, 3));
  EXPECT_EQ(rep.violations, 0u);
}

TEST(TwoPointBound, ZeroOperator) {
  const auto rep = verify_proposition1(zero_operator(), SmoothnessParams(1, 1, 0), 100, Box::cube(2, 3));
  EXPECT_EQ(rep.violations, 0u);
  EXPECT_LE(rep.worst_excess, 0.0);
}

TEST(TwoPointBound, IndependentSamplingOracle) {
  // Re-derive the alpha = 1 inequality with the test-side generator.
  const auto op = logistic_gradient(v2(1, 1));
  egtest::Gen g(41);
  for (int i = 0; i < 1000; ++i) {
    const Vector x = g.vec(2, -3, 3);
    const Vector y = g.vec(2, -3, 3);
    const double r = (x - y).norm();
    const double rhs = std::numbers::sqrt2 * op(x).norm() * std::exp(std::numbers::sqrt2 * r) * r;
    EXPECT_LE((op(x) - op(y)).norm(), rhs * (1.0 + 1e-9));
  }
}

TEST(TwoPointBound, TraceRatiosBounded) {
  struct Case {
    const char* op;
    const char* policy;
    Vec x0;
    bool force;
  };
  const std::vector<Case> cases = {{"quadratic", "thm3", Vec{1.0, 1.0}, false},
                                   {"signpower", "thm5", Vec{5.0, 5.0}, false},
                                   {"forsaken", "thm8:1:1", Vec{1.0, 1.0}, false},
                                   {"cubic1d", "thm5", Vec{0.3, 0.3}, true},
                                   {"square", "const:0.05", Vec{1.0, 2.0}, false},
                                   {"logistic", "const:1", Vec{0.0, 0.0}, false}};
  for (const auto& c : cases) {
    const auto op = build_operator(c.op);
    const auto rep = verify_trace_proposition1(op, op.smoothness, run(op, c.policy, c.x0, 300, c.force));
    EXPECT_GT(rep.checked, 0u) << c.op;
    EXPECT_EQ(rep.violations, 0u) << c.op;
  }
  const auto rd = build_operator("cubicRd");
  const auto rep = verify_trace_proposition1(rd, rd.smoothness, run(rd, "thm5", unit_start(20, 5), 300));
  EXPECT_EQ(rep.violations, 0u);
}

// ---------------------------------------------------------------------------
// Fitting

TEST(Fit, QuadraticGivesConstantNorm) {
  const auto samples = scatter_from_grid(quadratic_minmax(), Box::cube(2, 10), 11);
  const auto fit = fit_constants(samples, {0.25, 0.5, 1.0});
  EXPECT_NEAR(fit.L0_hat, std::numbers::sqrt2, 1e-6);
  EXPECT_NEAR(fit.L1_hat, 0.0, 1e-9);
  EXPECT_GE(fit.max_violation, -1e-12);
  EXPECT_EQ(fit.samples.size(), samples.size());
}

TEST(Fit, LogisticTraceRecoversExampleConstants) {
  const Vector a = v2(1, 1);
  const auto op = logistic_gradient(a);
  const auto fit = fit_constants(scatter_from_trace(op, run(op, "const:1", Vec{2.0, 2.0}, 1000)), {1.0});
  EXPECT_EQ(fit.alpha_hat, 1.0);
  EXPECT_NEAR(fit.L1_hat, a.norm(), 0.1 * a.norm());
  EXPECT_NEAR(fit.L0_hat, 0.0, 0.01);
}

TEST(Fit, EnvelopeCoversSamples) {
  egtest::Gen g(42);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ScatterSample> s;
    for (int i = 0; i < 50; ++i) {
      const double f = g.uniform(0, 10);
      s.push_back({f, 1.0 + 2.0 * std::sqrt(f) + g.uniform(-0.5, 0.5), -1});
    }
    const auto fit = fit_constants(s, {0.25, 0.5, 0.75, 1.0});
    EXPECT_GE(fit.max_violation, -1e-12);
    for (const auto& p : s)
      EXPECT_LE(p.norm_J, fit.L0_hat + fit.L1_hat * pow_alpha(p.norm_F, fit.alpha_hat) + 1e-12);
  }
}

TEST(Fit, ScaleConsistent) {
  egtest::Gen g(43);
  std::vector<ScatterSample> s;
  for (int i = 0; i < 40; ++i) {
    const double f = g.uniform(0, 5);
    s.push_back({f, 0.5 + f + g.uniform(0, 1), -1});
  }
  const std::vector<double> grid = {0.2, 0.4, 0.6, 0.8, 1.0};
  const auto base = fit_constants(s, grid);
  for (double c : {0.5, 3.0, 100.0}) {
    auto scaled = s;
    for (auto& p : scaled) p.norm_J *= c;
    const auto fit = fit_constants(scaled, grid);
    EXPECT_EQ(fit.alpha_hat, base.alpha_hat);
    EXPECT_NEAR(fit.L0_hat, c * base.L0_hat, 1e-9 * c);
    EXPECT_NEAR(fit.L1_hat, c * base.L1_hat, 1e-9 * c);
  }
}

TEST(Fit, DegenerateSamples) {
  const ScatterSample s{1.0, 2.0, -1};
  EXPECT_EQ(code_of([&] { fit_constants({s, s}, {1.0}); }), Errc::DegenerateSamples);
  EXPECT_EQ(code_of([&] { fit_constants({s, s, s, s}, {1.0}); }), Errc::DegenerateSamples);
  const std::vector<ScatterSample> fine = {{0, 1, -1}, {1, 2, -1}, {2, 3, -1}};
  EXPECT_EQ(code_of([&] { fit_constants(fine, {1.5}); }), Errc::InvalidAlpha);
}

// ---------------------------------------------------------------------------
// Closed-form bounds

TEST(Bounds, Corollary1WithoutL1) {
  const auto op = quadratic_minmax();
  const auto b = theoretical_bounds(op, PolicyKind::Corollary1, Vec{1.0, 1.0}, 1e-8);
  const double v = nu(NuKind::StrongMono_Cor);
  EXPECT_NEAR(*b.zeta, v / std::numbers::sqrt2, 1e-15);
  EXPECT_EQ(*b.term2, 0.0);
  EXPECT_NEAR(*b.term1, 2.0 * std::numbers::sqrt2 / v * std::log(2.0 / 1e-8), 1e-9);
  EXPECT_EQ(*b.iterations, *b.term1);
}

TEST(Bounds, Corollary1WithL1) {
  const auto op = sign_power_strongly_monotone();
  const auto b = theoretical_bounds(op, PolicyKind::Corollary1, Vec{5.0, 5.0}, 1e-8, std::nullopt, 1.0);
  const double L0 = op.smoothness.L0, L1 = op.smoothness.L1, r0 = std::sqrt(50.0);
  const double v = nu(NuKind::StrongMono_Cor);
  const double zeta = v / (L0 * (1.0 + L1 * std::exp(L1 * r0) * r0));
  EXPECT_NEAR(*b.zeta / zeta, 1.0, 1e-12);
  EXPECT_NEAR(*b.term2 / (std::log(2.0 * L1 * r0 * r0 / (zeta * zeta * L0)) / zeta), 1.0, 1e-12);
}

TEST(Bounds, ForsakenDelta1) {
  const auto op = global_forsaken();
  const auto b = theoretical_bounds(op, PolicyKind::Theorem8, Vec{1.0, 1.0}, 1e-6, SmoothnessParams(1, 1, 1));
  const double r0 = std::numbers::sqrt2;
  const double d1 = nu(NuKind::WeakMinty_A1) / (1.0 + r0 * std::exp(r0)) - 4.0 * kForsakenRho;
  EXPECT_NEAR(*b.delta, d1, 1e-15);
  EXPECT_LT(*b.delta, 0.0);
  EXPECT_TRUE(b.guarantee_void);
  EXPECT_FALSE(b.bound_at(10).has_value());
  // Close enough to the root the guarantee holds.
  const auto near = theoretical_bounds(op, PolicyKind::Theorem8, Vec{0.01, 0.0}, 1e-6, SmoothnessParams(1, 0.5, 0.1));
  EXPECT_GT(*near.delta, 0.0);
  EXPECT_FALSE(near.guarantee_void);
}

TEST(Bounds, Theorem5OnQuadratic) {
  const auto b = theoretical_bounds(quadratic_minmax(), PolicyKind::Theorem5, Vec{1.0, 1.0}, 1e-6);
  const double v = nu(NuKind::Mono_A1);
  EXPECT_NEAR(*b.bound_at(999), 8.0 / (v * v * 1000.0), 1e-12);
}

TEST(Bounds, Theorem3Rate) {
  const auto b = theoretical_bounds(quadratic_minmax(), PolicyKind::Theorem3, Vec{1.0, 1.0}, 1e-6);
  EXPECT_NEAR(*b.rate, 1.0 - nu(NuKind::StrongMono_A1) / std::numbers::sqrt2, 1e-15);
}

TEST(Bounds, FractionalAlphaKinds) {
  const auto op = square_component_operator();
  const SmoothnessParams s(0.5, 1.0, 2.0);
  const double K0 = 1.0 + std::numbers::sqrt2, K1 = 2.0 * std::numbers::sqrt2, K2 = 2.0 * std::sqrt(6.0);
  const double r0 = std::sqrt(2.0);
  const double spread = std::sqrt(K0 + K2 * r0) * std::sqrt(r0);
  const double inner = K0 + (K1 + std::pow(2.0, -1.5) * std::sqrt(K2)) * spread;
  const auto t7 = theoretical_bounds(op, PolicyKind::Theorem7, Vec{1.0, 1.0}, 1e-6, s);
  EXPECT_NEAR(*t7.constant, 16.0 * inner * inner * r0 * r0, 1e-9);
  EXPECT_EQ(code_of([&] { theoretical_bounds(op, PolicyKind::Theorem9, Vec{1.0, 1.0}, 1e-6, s); }),
            Errc::MissingConstant);
}

TEST(Bounds, Errors) {
  const auto logistic = logistic_gradient(v2(1, 1));
  EXPECT_EQ(code_of([&] { theoretical_bounds(logistic, PolicyKind::Theorem5, Vec{0.0, 0.0}, 1e-6); }),
            Errc::MissingSolution);
  EXPECT_EQ(code_of([] { theoretical_bounds(cubic_minmax_1d(), PolicyKind::Theorem3, Vec{1.0, 1.0}, 1e-6); }),
            Errc::MissingConstant);
}

// ---------------------------------------------------------------------------
// Rate envelopes

TEST(RateEnvelope, Theorem3LinearRateOnQuadratic) {
  const auto op = quadratic_minmax();
  SolveConfig c;
  c.x0 = Vec{1.0, 1.0};
  c.max_iters = 501;
  c.stop_tol = 1e-300;
  const auto b = theoretical_bounds(op, PolicyKind::Theorem3, c.x0, 1e-12);
  const auto t = solve(op, parse_policy("thm3"), c);
  ASSERT_GT(t.rows.size(), 500u);
  const double d0 = *t.rows.front().dist_sq;
  for (std::size_t K : {10u, 100u, 500u})
    EXPECT_LE(*t.rows[K].dist_sq, std::pow(*b.rate, static_cast<double>(K)) * d0 * (1.0 + 1e-9)) << K;
}

TEST(RateEnvelope, Theorem5SublinearOnCubicRd) {
  const auto op = build_operator("cubicRd");
  const Vec x0 = unit_start(20, 7);
  const auto b = theoretical_bounds(op, PolicyKind::Theorem5, x0, 1e-12);
  const auto t = run(op, "thm5", x0, 1001);
  double best = 1e300;
  for (std::size_t k = 0; k <= 1000 && k < t.rows.size(); ++k) best = std::min(best, t.rows[k].norm_F_x);
  EXPECT_LE(best * best * 1001.0, *b.constant);
}

// ---------------------------------------------------------------------------
// CSV

TEST(Csv, ScatterRoundTrip) {
  const auto op = cubic_minmax_1d();
  const auto samples = scatter_from_trace(op, run(op, "thm5", Vec{0.3, 0.3}, 20, true));
  std::ostringstream os;
  write_scatter_csv(os, samples);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), kScatterHeader);
  std::istringstream is(os.str());
  const auto back = read_scatter_csv(is);
  ASSERT_EQ(back.size(), samples.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].norm_F, samples[i].norm_F);
    EXPECT_EQ(back[i].norm_J, samples[i].norm_J);
    EXPECT_EQ(back[i].iterate_index, samples[i].iterate_index);
  }
}

TEST(Csv, FitRoundTrip) {
  const SmoothnessFit fit{0.5, 1.25, 3.0e-7, -0.125, {}};
  std::ostringstream os;
  write_fit_csv(os, fit);
  std::istringstream is(os.str());
  const auto back = read_fit_csv(is);
  EXPECT_EQ(back.alpha_hat, fit.alpha_hat);
  EXPECT_EQ(back.L0_hat, fit.L0_hat);
  EXPECT_EQ(back.L1_hat, fit.L1_hat);
  EXPECT_EQ(back.max_violation, fit.max_violation);
}

TEST(Csv, RejectsMalformed) {
  std::istringstream bad("norm_F,norm_J,k\n1,2\n");
  EXPECT_EQ(code_of([&] { read_scatter_csv(bad); }), Errc::ParseError);
  std::istringstream bad_fit("alpha,L0,L1,max_violation\n1,x,2,3\n");
  EXPECT_EQ(code_of([&] { read_fit_csv(bad_fit); }), Errc::ParseError);
}

#include "hankelobs/analysis.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <gtest/gtest.h>

#include "hankelobs/family.h"
#include "hankelobs/specfun.h"
#include "test_util.h"

namespace hankelobs {
namespace {

double param(const InequalityInstance& inst, const std::string& name) {
  for (const auto& [k, v] : inst.params) {
    if (k == name) return v;
  }
  ADD_FAILURE() << "missing param " << name;
  return std::nan("");
}

void expect_consistent(const InequalityReport& r) {
  EXPECT_GE(r.lhs, 0.0);
  EXPECT_GE(r.rhs, 0.0);
  EXPECT_EQ(r.passed, r.lhs <= r.rhs) << r.name;
}

class AnalysisTest : public testing::Test {
 protected:
  void SetUp() override {
    grid_ = make_grid(2048, 24.0);
    op_ = hankel_operator(1.0, grid_);
  }
  GridPtr grid_;
  HankelPtr op_;
};

TEST_F(AnalysisTest, ZeroDataPassesEverywhere) {
  const GridFunction zero(grid_);
  VerificationSpec s;
  s.nu = 1.0;
  s.A = IntervalSet({{0.0, 0.05}});
  s.B = IntervalSet({{0.0, 0.05}});
  std::vector<InequalityReport> reports = {
      verify_uncertainty(1.0, s.A, s.B, zero),
      verify_two_point(s, TwoPointCase::kSmallSet, zero),
      verify_time_interval(1.0, 2.0, 1.0, zero)};
  s.b = 2.0;
  reports.push_back(verify_t3(s, zero, T3Variant::kExponential));
  reports.push_back(verify_t3(s, zero, T3Variant::kSuperExponential));
  s.A = IntervalSet({{1.0, 2.0}});
  s.B = IntervalSet({{4.0, 6.0}});
  reports.push_back(verify_t4(s, zero));
  s.N = 3.0;
  s.b = 1.0;
  reports.push_back(verify_t5(s, zero));
  reports.push_back(verify_t8(s, zero));
  s.epsilon = 0.3;
  reports.push_back(verify_t9(s, zero));
  const auto interp = verify_interpolation(s, zero, zero);
  reports.push_back(interp.l7);
  reports.push_back(interp.c1);
  reports.push_back(interp.c2);
  for (const auto& r : reports) {
    EXPECT_TRUE(r.passed) << r.name;
    EXPECT_EQ(r.lhs, 0.0) << r.name;
    expect_consistent(r);
  }
}

TEST_F(AnalysisTest, UncertaintyConstantByRegime) {
  const GridFunction phi = normalized(gaussian_eigenfunction(grid_, 1.0));
  // κ = k_ν√(2π|A||B|) ≈ 3.1 at [0, 0.2]: the explicit constant does not
  // apply and the instance is fitted.
  const IntervalSet wide({{0.0, 0.2}});
  const auto fitted = uncertainty_instance(1.0, wide, wide, phi);
  EXPECT_FALSE(fitted.fixed_constant.has_value());
  EXPECT_NEAR(param(fitted, "regime_kappa"),
              k_nu(1.0) * std::sqrt(2.0 * std::numbers::pi * 0.04), 1e-12);
  EXPECT_TRUE(verify_uncertainty(1.0, wide, wide, phi).passed);

  const IntervalSet small({{0.0, 0.05}});
  const auto fixed = uncertainty_instance(1.0, small, small, phi);
  ASSERT_TRUE(fixed.fixed_constant.has_value());
  const double kappa = k_nu(1.0) * std::sqrt(2.0 * std::numbers::pi) * 0.05;
  EXPECT_NEAR(*fixed.fixed_constant, 1.0 + 1.0 / (1.0 - kappa), 1e-12);
  const auto r = verify_uncertainty(1.0, small, small, phi);
  EXPECT_TRUE(r.passed);
  expect_consistent(r);
  EXPECT_THROW(verify_uncertainty(1.0, small.complement(), small, phi),
               std::invalid_argument);
}

TEST_F(AnalysisTest, SmallSetTwoPointRegime) {
  const GridFunction u0 = gaussian_family(grid_, 1.0, 1, 41).front();
  VerificationSpec s;
  s.nu = 1.0;
  s.T = 1.0;
  s.A = IntervalSet({{0.0, 0.1}});
  s.B = IntervalSet({{0.0, 0.1}});
  EXPECT_THROW(two_point_instance(s, TwoPointCase::kSmallSet, u0), RegimeError);
  s.A = IntervalSet({{0.0, 0.05}});
  s.B = IntervalSet({{0.0, 0.05}});
  const auto inst = two_point_instance(s, TwoPointCase::kSmallSet, u0);
  ASSERT_TRUE(inst.fixed_constant.has_value());
  const double c = std::sqrt(c_nu(1.0));
  const double ab = std::sqrt(std::numbers::pi * 0.0025);
  EXPECT_NEAR(*inst.fixed_constant, (2.0 * c - ab) / (c - ab), 1e-12);
  const FamilyCertificate cert = certify(
      [&] {
        std::vector<InequalityInstance> fam;
        for (const auto& u : gaussian_family(grid_, 1.0, 50, 42)) {
          fam.push_back(two_point_instance(s, TwoPointCase::kSmallSet, u));
        }
        return fam;
      }(),
      42);
  EXPECT_TRUE(cert.passed);
  EXPECT_EQ(cert.estimate.samples, 0);
}

GTEST_TEST(TwoPoint, HalfLinesFitIsStable) {
  const GridPtr g = make_grid(2048, 24.0);
  const HankelPtr op = hankel_operator(0.5, g);
  VerificationSpec s;
  s.nu = 0.5;
  s.A = IntervalSet({{0.0, 2.0}});
  s.B = IntervalSet({{0.0, 2.0}});
  auto family = [&](int count, std::uint64_t seed) {
    std::vector<InequalityInstance> fam;
    for (const auto& u : gaussian_family(g, 0.5, count, seed)) {
      fam.push_back(two_point_instance(s, TwoPointCase::kHalfLines, u));
    }
    return fam;
  };
  const FamilyCertificate small = certify(family(50, 43), 43);
  const FamilyCertificate big = certify(family(100, 43), 43);
  EXPECT_TRUE(small.passed);
  EXPECT_TRUE(big.passed);
  EXPECT_TRUE(std::isfinite(small.estimate.fitted_C));
  EXPECT_LE(small.estimate.max_ratio, 1.0);
  EXPECT_LE(fit_spread(small.estimate, big.estimate), 0.2);
}

TEST_F(AnalysisTest, TimeIntervalFitsFiniteConstant) {
  const GridFunction u0 = compact_bump(grid_, 4.0, 6.0, 4.0);
  for (double r : {1.0, 2.0}) {
    const auto inst = time_interval_instance(1.0, r, 1.0, u0);
    const double C = implied_constant(inst, std::nan(""));
    EXPECT_TRUE(std::isfinite(C)) << r;
    EXPECT_TRUE(verify_time_interval(1.0, r, 1.0, u0).passed);
  }
}

GTEST_TEST(T3, BumpFamilyCertifiedWithTheta) {
  const GridPtr g = make_grid(2048, 24.0);
  for (double nu : {0.5, 1.0}) {
    const HankelPtr op = hankel_operator(nu, g);
    VerificationSpec s;
    s.nu = nu;
    s.lambda = 1.0;
    s.b = 2.0;
    std::vector<InequalityInstance> fam;
    for (const auto& u : bump_family(g, 30, 44)) {
      fam.push_back(t3_instance(s, u, T3Variant::kExponential));
    }
    const FamilyCertificate cert = certify(fam, 44);
    EXPECT_TRUE(cert.passed);
    ASSERT_TRUE(cert.estimate.theta.has_value());
    EXPECT_GT(*cert.estimate.theta, 0.0);
    EXPECT_LT(*cert.estimate.theta, 1.0);
    EXPECT_TRUE(std::isfinite(cert.estimate.fitted_C));
  }
}

TEST_F(AnalysisTest, ExponentialWeightGrowsWithLambda) {
  const GridFunction u = compact_bump(grid_, 1.0, 3.0);
  double prev = 0.0;
  for (double lambda : {0.0, 0.5, 1.0, 2.0}) {
    const double w = weighted_l2_norm_sq(u, Weight::exp_linear(lambda));
    EXPECT_GE(w, prev);
    prev = w;
  }
  VerificationSpec s;
  s.nu = 1.0;
  s.beta = 1.0;  // T3(ii) needs β > 1
  EXPECT_THROW(t3_instance(s, u, T3Variant::kSuperExponential),
               std::invalid_argument);
}

GTEST_TEST(Interpolation, ExponentArithmetic) {
  EXPECT_DOUBLE_EQ(interpolation_exponent({1.0, 2.0}, {4.0, 6.0}, 1.0), 6.0);
  EXPECT_DOUBLE_EQ(interpolation_exponent({1.0, 2.0}, {4.0, 6.0}, 0.5), 11.0);
  EXPECT_THROW(interpolation_exponent({1.0, 1.0}, {4.0, 6.0}, 1.0),
               std::invalid_argument);
}

TEST_F(AnalysisTest, T4ReportsExponent) {
  VerificationSpec s;
  s.nu = 1.0;
  s.A = IntervalSet({{1.0, 2.0}});
  s.B = IntervalSet({{4.0, 6.0}});
  const auto inst = t4_instance(s, compact_bump(grid_, 1.0, 3.0));
  EXPECT_DOUBLE_EQ(param(inst, "p"), 6.0);
  s.B = IntervalSet({{4.0, 6.0}, {7.0, 8.0}});
  EXPECT_THROW(t4_instance(s, compact_bump(grid_, 1.0, 3.0)),
               std::invalid_argument);
}

TEST_F(AnalysisTest, T5BumpAndSupportCheck) {
  VerificationSpec s;
  s.nu = 1.0;
  s.b = 1.0;
  s.N = 3.0;
  const GridFunction u0 = compact_bump(grid_, 1.0, 3.0);
  const auto r = verify_t5(s, u0);
  EXPECT_TRUE(r.passed);
  EXPECT_TRUE(std::isfinite(r.estimate.fitted_C));
  EXPECT_THROW(verify_t5(s, compact_bump(grid_, 2.0, 5.0)),
               std::invalid_argument);

  // log of the observed ratio grows at most linearly in b.
  std::vector<double> bs = {0.5, 1.0, 2.0, 4.0}, logs;
  for (double b : bs) {
    s.b = b;
    s.N = 6.0;
    const auto inst = t5_instance(s, compact_bump(grid_, 1.0, 3.0));
    logs.push_back(std::log(inst.lhs) - inst.log_base(std::nan("")));
  }
  for (size_t i = 1; i < bs.size(); ++i) {
    const double slope = (logs[i] - logs[i - 1]) / (bs[i] - bs[i - 1]);
    EXPECT_LE(slope, 2.0 * s.N) << "b=" << bs[i];
  }
}

TEST_F(AnalysisTest, T8EpsilonRange) {
  VerificationSpec s;
  s.nu = 1.0;
  s.B = IntervalSet({{10.0, 12.0}});
  s.lambda = 0.1;
  s.lambda2 = 0.1;
  const GridFunction u0 = compact_bump(grid_, 1.0, 3.0);
  for (double eps : {0.1, 0.5, 0.9}) {
    s.epsilon = eps;
    EXPECT_TRUE(verify_t8(s, u0).passed) << eps;
  }
  s.epsilon = 1.0;
  EXPECT_THROW(t8_instance(s, u0), std::invalid_argument);
  s.epsilon = 0.0;
  EXPECT_THROW(t8_instance(s, u0), std::invalid_argument);
}

TEST_F(AnalysisTest, T9EpsilonFactorAndPreconditions) {
  const HankelPtr op = hankel_operator(0.5, grid_);
  VerificationSpec s;
  s.nu = 0.5;
  s.B = IntervalSet({{4.0, 6.0}});
  s.epsilon = 0.3;
  const GridFunction u0 = compact_bump(grid_, 2.0, 4.0);
  EXPECT_TRUE(verify_t9(s, u0).passed);
  const auto i3 = t9_instance(s, u0);
  s.epsilon = 0.2;
  const auto i2 = t9_instance(s, u0);
  EXPECT_NEAR(param(i2, "eps_exponent") - param(i3, "eps_exponent"),
              25.0 - 100.0 / 9.0, 1e-12);
  EXPECT_DOUBLE_EQ(param(i3, "K"), 3.0);
  s.epsilon = 0.1;
  EXPECT_THROW(t9_instance(s, u0), std::range_error);
  s.epsilon = 0.3;
  EXPECT_THROW(t9_instance(s, gaussian_eigenfunction(grid_, 0.5)),
               std::invalid_argument);
}

TEST_F(AnalysisTest, C2CompactSpectrum) {
  const SpectralPair p =
      from_spectrum(*op_, compact_bump(grid_, 0.0, 2.0), 2.0);
  VerificationSpec s;
  s.nu = 1.0;
  s.A = IntervalSet({{1.0, 2.0}});
  s.B = IntervalSet({{4.0, 6.0}});
  s.b = 1.0;
  s.N = 2.0;
  const auto reports = verify_interpolation(s, p.f, p.transform);
  for (const auto* r : {&reports.l7, &reports.c1, &reports.c2}) {
    EXPECT_TRUE(r->passed) << r->name;
    EXPECT_TRUE(std::isfinite(r->estimate.fitted_C)) << r->name;
    expect_consistent(*r);
  }
  EXPECT_FALSE(reports.c2.estimate.theta.has_value());
  const auto l7 = l7_instance(s, p.f, p.transform);
  EXPECT_DOUBLE_EQ(param(l7, "p"), 6.0);
}

GTEST_TEST(Summation, ClosedFormExamples) {
  SummationParams p;
  p.x = 0.5;
  p.theta = 0.5;
  p.a = 1.0;
  const InequalityReport r = lr_bound_check(SummationVariant::kExponential, p);
  const double l2 = std::log(2.0);
  EXPECT_NEAR(r.rhs,
              std::exp(1.0) / l2 * std::tgamma(1.0 / l2) * std::pow(l2, -1.0 / l2),
              1e-12 * r.rhs);
  double oracle = 0.0;
  for (int k = 1; k <= 200; ++k) {
    oracle += std::pow(0.5, std::pow(0.5, k)) * std::exp(-1.0 * k);
  }
  EXPECT_NEAR(r.lhs, oracle, 1e-14);
  EXPECT_TRUE(r.passed);

  p.x = 1e-6;
  p.theta = 0.9;
  p.a = 2.0;
  EXPECT_TRUE(lr_bound_check(SummationVariant::kExponential, p).passed);
  p.x = 1e-300;
  const InequalityReport tiny = lr_bound_check(SummationVariant::kExponential, p);
  EXPECT_TRUE(tiny.passed);
  EXPECT_GT(tiny.rhs, 0.0);

  p.x = 1.0;
  EXPECT_THROW(lr_bound_check(SummationVariant::kExponential, p),
               std::invalid_argument);
  p.x = 0.5;
  p.epsilon = -1.0;
  EXPECT_THROW(lr_bound_check(SummationVariant::kPower, p),
               std::invalid_argument);
}

GTEST_TEST(Summation, PowerVariantAgainstLongSum) {
  auto rng = test::seeded(45);
  for (int trial = 0; trial < 40; ++trial) {
    SummationParams p;
    p.x = test::uniform(rng, 0.01, 0.99);
    p.theta = test::uniform(rng, 0.05, 0.95);
    p.epsilon = test::uniform(rng, 0.5, 4.0);
    const InequalityReport r = lr_bound_check(SummationVariant::kPower, p);
    double partial = 0.0;
    for (int k = 1; k <= 100000; ++k) {
      partial += std::pow(p.x, std::pow(p.theta, k)) *
                 std::pow(static_cast<double>(k), -1.0 - p.epsilon);
    }
    // lhs carries an upper bound for the tail, so it never undercounts.
    EXPECT_GE(r.lhs, partial * (1.0 - 1e-12));
    EXPECT_TRUE(r.passed);
  }
}

GTEST_TEST(Fitting, ImpliedConstantIsTight) {
  const GridPtr g = make_grid(2048, 24.0);
  const HankelPtr op = hankel_operator(1.0, g);
  VerificationSpec s;
  s.nu = 1.0;
  s.b = 2.0;
  auto rng = test::seeded(46);
  for (const auto& u : bump_family(g, 5, 46)) {
    const auto inst = t3_instance(s, u, T3Variant::kExponential);
    const double theta = test::uniform(rng, 0.05, 0.95);
    const double C = implied_constant(inst, theta);
    ASSERT_TRUE(std::isfinite(C));
    EXPECT_GE(inst.log_rhs(C, theta), std::log(inst.lhs));
    if (C > 0.0) {
      EXPECT_LT(inst.log_rhs(C * (1.0 - 1e-6), theta), std::log(inst.lhs));
    }
  }
}

GTEST_TEST(Fitting, SpreadArithmetic) {
  ConstantEstimate a, b;
  a.fitted_C = 2.0;
  b.fitted_C = 3.0;
  EXPECT_DOUBLE_EQ(fit_spread(a, b), 1.0 / 3.0);
  a.fitted_C = b.fitted_C = 0.0;
  EXPECT_EQ(fit_spread(a, b), 0.0);
}

}  // namespace
}  // namespace hankelobs

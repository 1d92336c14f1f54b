#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "mpbjac/error.hpp"
#include "mpbjac/mixed_precision.hpp"
#include "mpbjac/problemgen.hpp"
#include "mpbjac/sparse_ops.hpp"
#include "test_support.hpp"

namespace mpbjac {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(Policy, SelectBranch) {
  const auto hl = PrecisionPolicy::adaptive_hl(1e-2);
  EXPECT_EQ(select_branch(hl, 1.0), Branch::High);
  EXPECT_EQ(select_branch(hl, 1e-2), Branch::High);  // tie takes the >= side
  EXPECT_EQ(select_branch(hl, 9e-3), Branch::Low);
  const auto lh = PrecisionPolicy::adaptive_lh(1e-2);
  EXPECT_EQ(select_branch(lh, 1.0), Branch::Low);
  EXPECT_EQ(select_branch(lh, 1e-2), Branch::Low);
  EXPECT_EQ(select_branch(lh, 9e-3), Branch::High);
  EXPECT_EQ(select_branch(PrecisionPolicy::uniform(), 1e-30), Branch::High);
  EXPECT_EQ(select_branch(PrecisionPolicy::fixed_low(), 1e30), Branch::Low);
  EXPECT_EQ(select_branch(PrecisionPolicy::adaptive_hl(kInf), 1e300), Branch::Low);
  EXPECT_EQ(select_branch(PrecisionPolicy::adaptive_lh(kInf), 1e300), Branch::High);
}

TEST(Policy, Defaults) {
  EXPECT_EQ(PrecisionPolicy::adaptive_hl().adp_tol, 10.0);
  EXPECT_EQ(PrecisionPolicy::adaptive_lh().adp_tol, 1e-5);
}

TEST(Policy, ParseAndLabel) {
  EXPECT_EQ(PrecisionPolicy::parse("uniform").kind, PolicyKind::Uniform);
  EXPECT_EQ(PrecisionPolicy::parse("fmp").kind, PolicyKind::FixedLow);
  const auto hl = PrecisionPolicy::parse("hl:0.1");
  EXPECT_EQ(hl.kind, PolicyKind::AdaptiveHL);
  EXPECT_EQ(hl.adp_tol, 0.1);
  EXPECT_EQ(hl.label(), "adaptive-hl:0.1");
  EXPECT_EQ(PrecisionPolicy::parse("adaptive-lh").adp_tol, 1e-5);
  EXPECT_EQ(PrecisionPolicy::parse("lh:inf").adp_tol, kInf);
  EXPECT_EQ(PrecisionPolicy::parse("fixed-low").label(), "fixed-low");
  EXPECT_THROW(PrecisionPolicy::parse("fancy"), InvalidArgument);
  EXPECT_THROW(PrecisionPolicy::parse("uniform:1"), InvalidArgument);
  EXPECT_THROW(PrecisionPolicy::parse("hl:abc"), InvalidArgument);
  EXPECT_THROW(PrecisionPolicy::parse("hl:-1"), InvalidArgument);
  EXPECT_THROW(PrecisionPolicy::parse("hl:0"), InvalidArgument);
}

TEST(Policy, ValidateRejectsUnsupportedPrecisions) {
  auto p = PrecisionPolicy::fixed_low();
  p.low = Precision::F64;
  EXPECT_THROW(p.validate(), InvalidArgument);
}

class MixedApply : public ::testing::Test {
 protected:
  DiscreteSystem sys = build_diffusion_system(GridSpec{8}, CoefficientField::random(1000.0, 2));
  BjacParams params{16, 2, 2};
};

TEST_F(MixedApply, FixedLowIsNarrowApplyWiden) {
  MixedPreconditioner m(sys.matrix, params, PrecisionPolicy::fixed_low());
  EXPECT_FALSE(m.has_high());
  const auto r = testing::random_vector(sys.matrix.rows(), 3);
  const auto z = m.fmp_apply(r);
  BjacPreconditioner<float> low(convert<float, double>(sys.matrix), params);
  const auto expect = convert<double, float>(low.apply(convert<float, double>(r)));
  EXPECT_TRUE(bitwise_equal(z, expect));
  Branch taken = Branch::None;
  EXPECT_TRUE(bitwise_equal(m.amp_apply(r, 1.0, &taken), expect));
  EXPECT_EQ(taken, Branch::Low);
}

TEST_F(MixedApply, HighBranchIsDoubleApply) {
  MixedPreconditioner m(sys.matrix, params, PrecisionPolicy::adaptive_hl(1e-3));
  EXPECT_TRUE(m.has_high());
  EXPECT_TRUE(m.has_low());
  const auto r = testing::random_vector(sys.matrix.rows(), 4);
  BjacPreconditioner<double> high(sys.matrix, params);
  Branch taken = Branch::None;
  EXPECT_TRUE(bitwise_equal(m.amp_apply(r, 0.5, &taken), high.apply(r)));
  EXPECT_EQ(taken, Branch::High);
  EXPECT_TRUE(bitwise_equal(m.amp_apply(r, 1e-4, &taken), m.fmp_apply(r)));
  EXPECT_EQ(taken, Branch::Low);
}

TEST_F(MixedApply, UniformHasNoLowCopy) {
  MixedPreconditioner m(sys.matrix, params, PrecisionPolicy::uniform());
  EXPECT_FALSE(m.has_low());
  EXPECT_TRUE(m.has_high());
}

TEST_F(MixedApply, FixedLowErrorIsSinglePrecisionSized) {
  MixedPreconditioner m(sys.matrix, params, PrecisionPolicy::adaptive_hl(0.5));
  const auto r = testing::random_vector(sys.matrix.rows(), 5);
  const auto hi = m.amp_apply(r, 1.0);
  const auto lo = m.amp_apply(r, 0.1);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    num += (hi[i] - lo[i]) * (hi[i] - lo[i]);
    den += hi[i] * hi[i];
  }
  EXPECT_GT(std::sqrt(num / den), 0.0);
  EXPECT_LT(std::sqrt(num / den), 1e-5);
}

TEST_F(MixedApply, OverflowOnNarrowing) {
  MixedPreconditioner m(sys.matrix, params, PrecisionPolicy::fixed_low());
  std::vector<double> r(sys.matrix.rows(), 1.0);
  r[5] = 1e300;
  EXPECT_THROW((void)m.fmp_apply(r), PrecisionOverflow);
}

}  // namespace
}  // namespace mpbjac

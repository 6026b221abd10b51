#include <gtest/gtest.h>

#include <cmath>

#include "deconv/error.hpp"
#include "deconv/kernel.hpp"

using namespace deconv;

TEST(LambdaEval, PaperKernelValues) {
  const auto k = SmoothingKernelSpec::paper_sim();
  EXPECT_EQ(lambda_eval(k, 3.0), 1.0);
  EXPECT_EQ(lambda_eval(k, 7.0), 1.0);
  EXPECT_DOUBLE_EQ(lambda_eval(k, 14.0), 0.015625);
  EXPECT_DOUBLE_EQ(lambda_eval(k, -14.0), 0.015625);
  EXPECT_NEAR(lambda_eval(k, 10.5), std::pow(1.5, -6.0), 1e-15);
}

TEST(LambdaEval, HardCutoff) {
  const SmoothingKernelSpec k(PaperSimKernel{7.0, 6.0, 20.0});
  EXPECT_GT(lambda_eval(k, 20.0), 0.0);
  EXPECT_EQ(lambda_eval(k, 20.0001), 0.0);
}

TEST(LambdaEval, SpectralCutoff) {
  const auto k = SmoothingKernelSpec::spectral_cutoff(1.0);
  EXPECT_EQ(lambda_eval(k, 2.0), 0.0);
  EXPECT_EQ(lambda_eval(k, 1.0), 1.0);
  EXPECT_EQ(lambda_eval(k, -0.5), 1.0);
  EXPECT_EQ(lambda_eval(k, -1.5), 0.0);
}

TEST(LambdaEval, FlatRegionForcedForCustomProfile) {
  const auto k = SmoothingKernelSpec::custom([](double u) { return std::exp(-u * u); }, 2.0);
  EXPECT_EQ(lambda_eval(k, 1.9), 1.0);
  EXPECT_NEAR(lambda_eval(k, 3.0), std::exp(-9.0), 1e-18);
}

TEST(LambdaEval, PaperKernelIsEven) {
  const auto k = SmoothingKernelSpec::paper_sim();
  for (double u = 0.0; u < 60.0; u += 0.37) EXPECT_EQ(lambda_eval(k, u), lambda_eval(k, -u));
}

TEST(LambdaEval, FlatRegionExactUnderShrinkage) {
  const std::vector<SmoothingKernelSpec> kernels{SmoothingKernelSpec::paper_sim(),
                                                 SmoothingKernelSpec::spectral_cutoff(3.0)};
  for (const auto& kernel : kernels) {
    const double m = kernel.flat_radius();
    for (double h = 0.01; h <= 1.0; h += 0.01) {
      for (int k = -200; k <= 200; ++k) {
        if (std::abs(h * k) <= m) {
          ASSERT_EQ(lambda_eval(kernel, h * k), 1.0) << kernel.name() << " h=" << h;
        }
      }
    }
  }
}

TEST(ValidateAssumption, PaperKernelPasses) {
  const auto report = validate_assumption(SmoothingKernelSpec::paper_sim(), 2.0, 150);
  EXPECT_TRUE(report.flat_region_ok);
  EXPECT_TRUE(report.bounded_ok);
  EXPECT_TRUE(report.moment_finite);
  EXPECT_TRUE(report.usable());
  EXPECT_TRUE(report.failures.empty());
}

TEST(ValidateAssumption, UnboundedCustomFails) {
  const auto k = SmoothingKernelSpec::custom([](double u) { return std::abs(u) <= 1.0 ? 2.0 : 0.0; }, 1.0);
  const auto report = validate_assumption(k, 2.0, 20);
  EXPECT_FALSE(report.bounded_ok);
  EXPECT_FALSE(report.flat_region_ok);
  EXPECT_FALSE(report.usable());
}

TEST(ValidateAssumption, CutoffMomentSum) {
  const auto report = validate_assumption(SmoothingKernelSpec::spectral_cutoff(7.0), 2.0, 100);
  EXPECT_TRUE(report.usable());
  double want = 0.0;
  for (int k = -7; k <= 7; ++k) want += k * k;
  EXPECT_DOUBLE_EQ(want, 280.0);
  EXPECT_DOUBLE_EQ(report.moment_sum, want);
}

TEST(ValidateAssumption, SlowDecayIsNotSummable) {
  const auto report = validate_assumption(SmoothingKernelSpec::paper_sim(7.0, 2.5), 2.0, 400);
  EXPECT_FALSE(report.moment_finite);
  EXPECT_FALSE(report.usable());

  const auto heavy =
      SmoothingKernelSpec::custom([](double u) { return std::min(1.0, std::pow(std::abs(u), -2.0)); }, 1.0);
  EXPECT_FALSE(validate_assumption(heavy, 2.0, 400).moment_finite);
  const auto light = SmoothingKernelSpec::custom([](double u) { return std::exp(-std::abs(u)); }, 1.0);
  EXPECT_TRUE(validate_assumption(light, 2.0, 400).moment_finite);
}

TEST(ValidateAssumption, SmoothnessWindow) {
  AssumptionProfile inside;
  inside.smoothness_s = 3.0;
  AssumptionProfile outside;
  outside.smoothness_s = 4.0;
  const auto k = SmoothingKernelSpec::paper_sim();
  const auto a = validate_assumption(k, 2.0, 50, inside);
  ASSERT_TRUE(a.smoothness_window.has_value());
  EXPECT_DOUBLE_EQ(a.smoothness_window->first, 2.5);
  EXPECT_DOUBLE_EQ(a.smoothness_window->second, 3.5);
  EXPECT_TRUE(a.profile_in_window.value());
  const auto b = validate_assumption(k, 2.0, 50, outside);
  EXPECT_FALSE(b.profile_in_window.value());
  EXPECT_FALSE(b.failures.empty());
}

TEST(ValidateAssumption, RangeMustCoverFlatRegion) {
  EXPECT_THROW(validate_assumption(SmoothingKernelSpec::paper_sim(), 2.0, 5), DomainError);
}

TEST(AssumptionProfile, Validation) {
  AssumptionProfile p;
  EXPECT_NO_THROW(p.validate());
  p.moment_kappa = 2.1;  // needs > 2 + 1/5
  EXPECT_THROW(p.validate(), DomainError);
  p = AssumptionProfile{};
  p.smoothness_s = 0.5;
  EXPECT_THROW(p.validate(), DomainError);
  p = AssumptionProfile{};
  p.holder_gamma = 1.5;
  EXPECT_THROW(p.validate(), DomainError);
}

TEST(SmoothingKernelSpec, BadParameters) {
  EXPECT_THROW(SmoothingKernelSpec::spectral_cutoff(0.0), DomainError);
  EXPECT_THROW(SmoothingKernelSpec::paper_sim(-1.0, 6.0), DomainError);
  EXPECT_THROW(SmoothingKernelSpec::custom(nullptr, 1.0), DomainError);
}

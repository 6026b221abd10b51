#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "deconv/error.hpp"
#include "deconv/estimator.hpp"
#include "oracles.hpp"

using namespace deconv;
using oracle::cd;
using oracle::kPi;

namespace {

Sample random_sample(int n, std::mt19937_64& rng, GridKind kind = GridKind::kSimulation) {
  std::normal_distribution<double> z;
  std::vector<double> y(static_cast<std::size_t>(2 * n + 1));
  for (auto& v : y) v = z(rng);
  return Sample(DesignGrid(n, kind), std::move(y));
}

std::vector<double> xs_of(const Sample& s) { return {s.grid().points().begin(), s.grid().points().end()}; }
std::vector<double> ys_of(const Sample& s) { return {s.responses().begin(), s.responses().end()}; }

DistortionOperator laplace1(int n) {
  return DistortionOperator(DistortionSpec::laplace(1.0, CoefficientMode::kClosedForm), n);
}

double psi_laplace1(int k) { return 1.0 / (1.0 + 4.0 * kPi * kPi * k * k); }

// Lambda of the simulation kernel written out independently.
double paper_lambda(double u) {
  const double a = std::abs(u);
  return a <= 7.0 ? 1.0 : std::pow(a / 7.0, -6.0);
}

}  // namespace

TEST(EstimateTheta, ZeroResponsesGiveZeroEstimate) {
  const Sample s(DesignGrid(5, GridKind::kSimulation), std::vector<double>(11, 0.0));
  const auto est = estimate_theta(s, laplace1(5), SmoothingKernelSpec::paper_sim(), 0.5);
  for (double x : {-0.5, -0.1, 0.0, 0.3}) EXPECT_EQ(est(x), 0.0);
}

TEST(EstimateTheta, TrigonometricInterpolationUnderIdentity) {
  std::mt19937_64 rng(3);
  for (int n : {2, 7, 20}) {
    const auto s = random_sample(n, rng);
    const auto est = estimate_theta(s, DistortionOperator::identity(n), SmoothingKernelSpec::spectral_cutoff(n), 1.0);
    for (std::size_t j = 0; j < s.size(); ++j) EXPECT_NEAR(est(s.grid()[j]), s.responses()[j], 1e-12);
    for (double r : residuals(s, est).values) EXPECT_NEAR(r, 0.0, 1e-12);
  }
}

TEST(EstimateTheta, PerFrequencyOracle) {
  std::mt19937_64 rng(4);
  const auto s = random_sample(3, rng);
  const auto est = estimate_theta(s, laplace1(3), SmoothingKernelSpec::paper_sim(), 0.5);
  const auto x = xs_of(s);
  const auto y = ys_of(s);
  for (int k = -3; k <= 3; ++k) {
    const cd want = paper_lambda(0.5 * k) * oracle::direct_coefficient(x, y, k) / psi_laplace1(k);
    EXPECT_NEAR(std::abs(est.coefficients[k] - want), 0.0, 1e-12) << k;
  }
  EXPECT_EQ(est.regularization_h, 0.5);
  EXPECT_TRUE(est.coefficients.is_hermitian());
}

TEST(EstimateTheta, ShrinksHighFrequencies) {
  std::mt19937_64 rng(5);
  const auto s = random_sample(40, rng);
  const auto op = DistortionOperator(DistortionSpec::laplace(0.1), 40);
  const auto est = estimate_theta(s, op, SmoothingKernelSpec::paper_sim(), 0.5);
  const auto r = empirical_fourier_coefficients(s, 40);
  for (int k : {20, 30, 40}) {
    const cd want = paper_lambda(0.5 * k) * r[k] / op.psi()[k];
    EXPECT_NEAR(std::abs(est.coefficients[k] - want), 0.0, 1e-12 * std::abs(want) + 1e-15);
  }
}

TEST(EstimateTheta, RejectsBadInputs) {
  std::mt19937_64 rng(6);
  const auto s = random_sample(3, rng);
  EXPECT_THROW(estimate_theta(s, laplace1(3), SmoothingKernelSpec::paper_sim(), 0.0), DomainError);
  EXPECT_THROW(estimate_theta(s, laplace1(2), SmoothingKernelSpec::paper_sim(), 0.5), FrequencyOverflowError);
  const auto unbounded = SmoothingKernelSpec::custom([](double) { return 2.0; }, 1.0);
  EXPECT_THROW(estimate_theta(s, laplace1(3), unbounded, 0.5), ValidationError);
}

TEST(EstimateTheta, WeightFormEquivalence) {
  std::mt19937_64 rng(7);
  for (int n = 1; n <= 5; ++n) {
    const auto s = random_sample(n, rng);
    const double h = 0.9;
    const auto kernel = SmoothingKernelSpec::paper_sim(2.0, 6.0);
    const auto est = estimate_theta(s, laplace1(n), kernel, h);
    const auto x = xs_of(s);
    const auto y = ys_of(s);
    const auto weight = [&](double u) {
      cd acc = 0.0;
      for (int k = -n; k <= n; ++k) {
        const double a = std::abs(h * k);
        const double lam = a <= 2.0 ? 1.0 : std::pow(a / 2.0, -6.0);
        acc += lam / psi_laplace1(k) * std::exp(cd(0.0, 2.0 * kPi * k * u));
      }
      return acc.real();
    };
    for (double t : {-0.45, -0.2, 0.0, 0.13, 0.5}) {
      double want = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) want += y[j] * weight(t - x[j]);
      want /= static_cast<double>(x.size());
      EXPECT_NEAR(est(t), want, 1e-10) << "n=" << n << " x=" << t;
    }
  }
}

TEST(EstimateTheta, LinearInResponses) {
  std::mt19937_64 rng(8);
  const auto a = random_sample(12, rng);
  const auto b = random_sample(12, rng);
  std::vector<double> mix(a.size());
  for (std::size_t j = 0; j < mix.size(); ++j) mix[j] = 2.0 * a.responses()[j] - 0.5 * b.responses()[j];
  const Sample m(a.grid(), mix);
  const auto op = laplace1(12);
  const auto kernel = SmoothingKernelSpec::paper_sim();
  const auto ea = estimate_theta(a, op, kernel, 0.8);
  const auto eb = estimate_theta(b, op, kernel, 0.8);
  const auto em = estimate_theta(m, op, kernel, 0.8);
  for (int k = -12; k <= 12; ++k) {
    EXPECT_NEAR(std::abs(em.coefficients[k] - (2.0 * ea.coefficients[k] - 0.5 * eb.coefficients[k])), 0.0,
                1e-12 * (1.0 + std::abs(em.coefficients[k])));
  }
}

TEST(EstimateTheta, DegreesOfFreedomShrinkWithH) {
  const auto kernel = SmoothingKernelSpec::paper_sim();
  double previous = INFINITY;
  for (double h = 0.05; h <= 10.0; h += 0.05) {
    double dof = 0.0;
    for (double w : kernel_weights(kernel, h, 150)) dof += w * w;
    EXPECT_LE(dof, previous) << h;
    previous = dof;
  }
}

TEST(FittedValues, Cases) {
  std::mt19937_64 rng(9);
  const Sample zero(DesignGrid(3, GridKind::kSimulation), std::vector<double>(7, 0.0));
  const auto z = estimate_theta(zero, laplace1(3), SmoothingKernelSpec::paper_sim(), 0.5);
  for (double f : fitted_values(z, zero)) EXPECT_EQ(f, 0.0);

  const auto s = random_sample(3, rng);
  const auto zero_res = residuals(s, z);
  for (std::size_t j = 0; j < s.size(); ++j) EXPECT_EQ(zero_res.values[j], s.responses()[j]);

  const auto id = estimate_theta(s, DistortionOperator::identity(3), SmoothingKernelSpec::paper_sim(), 0.5);
  const auto fid = fitted_values(id, s);
  for (std::size_t j = 0; j < s.size(); ++j) EXPECT_NEAR(fid[j], id(s.grid()[j]), 1e-14);

  // Composition oracle: sum_k Theta_hat(k) Psi(k) e^{i 2 pi k x_j}.
  const auto est = estimate_theta(s, laplace1(3), SmoothingKernelSpec::paper_sim(), 0.5);
  const auto fitted = fitted_values(est, s);
  const auto res = residuals(s, est);
  for (std::size_t j = 0; j < s.size(); ++j) {
    cd acc = 0.0;
    for (int k = -3; k <= 3; ++k) {
      acc += est.coefficients[k] * psi_laplace1(k) * std::exp(cd(0.0, 2.0 * kPi * k * s.grid()[j]));
    }
    EXPECT_NEAR(fitted[j], acc.real(), 1e-12);
    EXPECT_NEAR(res.values[j], s.responses()[j] - acc.real(), 1e-12);
  }
  EXPECT_EQ(res.source_h, 0.5);

  const auto other = random_sample(4, rng);
  EXPECT_THROW(fitted_values(est, other), ShapeError);
}

TEST(Ise, Cases) {
  std::mt19937_64 rng(10);
  const auto s = random_sample(4, rng);
  const auto est = estimate_theta(s, laplace1(4), SmoothingKernelSpec::paper_sim(), 0.5);
  EXPECT_EQ(ise(est, est.coefficients), 0.0);

  const Sample zero(DesignGrid(4, GridKind::kSimulation), std::vector<double>(9, 0.0));
  const auto z = estimate_theta(zero, laplace1(4), SmoothingKernelSpec::paper_sim(), 0.5);
  SpectralCoefficients cos1(6);
  cos1[1] = 0.5;
  cos1[-1] = 0.5;
  EXPECT_DOUBLE_EQ(ise(z, cos1), 0.5);
  EXPECT_DOUBLE_EQ(ise(z, cos1, 0.25), 0.75);

  // Truth with a wider range than the estimate, against a Riemann oracle.
  const auto truth_c = oracle::random_hermitian(6, rng);
  const SpectralCoefficients truth(6, truth_c);
  std::vector<cd> est_c(13, 0.0);
  for (int k = -4; k <= 4; ++k) est_c[static_cast<std::size_t>(k + 6)] = est.coefficients[k];
  const double want = oracle::riemann([&](double x) {
    const double d = oracle::direct_series(est_c, x).real() - oracle::direct_series(truth_c, x).real();
    return d * d;
  });
  EXPECT_NEAR(ise(est, truth), want, 1e-8 * want);
}

TEST(IntegratedVariance, SimpleCases) {
  const auto id = DistortionOperator::identity(10);
  EXPECT_DOUBLE_EQ(integrated_variance_formula(2.0, SmoothingKernelSpec::spectral_cutoff(1.0), id.psi(), 2.0, 10),
                   2.0 / 21.0);
  EXPECT_EQ(integrated_variance_formula(0.0, SmoothingKernelSpec::paper_sim(), laplace1(10).psi(), 0.4, 10), 0.0);
}

TEST(IntegratedVariance, MatchesMonteCarlo) {
  const int n = 25;
  const double sigma = 2.0 / 3.0;
  const double h = 0.4;
  const auto op = laplace1(n);
  const auto kernel = SmoothingKernelSpec::paper_sim();
  const double formula = integrated_variance_formula(sigma * sigma, kernel, op.psi(), h, n);

  std::mt19937_64 rng(2024);
  std::normal_distribution<double> z(0.0, sigma);
  const DesignGrid grid(n, GridKind::kSimulation);
  const SpectralCoefficients zero(n);
  double acc = 0.0;
  const int reps = 2000;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> y(grid.size());
    for (auto& v : y) v = z(rng);
    acc += parseval_l2_distance(estimate_theta(Sample(grid, y), op, kernel, h).coefficients, zero);
  }
  EXPECT_NEAR(acc / reps, formula, 0.05 * formula);
}

TEST(RuleOfThumb, FormulaValues) {
  AssumptionProfile p;  // s = 3, b = 2
  const int n = 1023;   // 2n+1 = 2047
  const double got = rule_of_thumb_h(p, 1.0, 1.0, 1.0, n);
  EXPECT_NEAR(got, std::pow(5.0 / 6.0, 1.0 / 11.0) * std::pow(2047.0, -1.0 / 11.0), 1e-15);
  EXPECT_NEAR(got, 0.4918, 1e-4);
  EXPECT_NEAR(rule_of_thumb_h(p, 1.0, 1.0, 2.0, n) / got, std::pow(2.0, 1.0 / 11.0), 1e-14);
  EXPECT_THROW(rule_of_thumb_h(p, 0.0, 1.0, 1.0, n), DomainError);
  EXPECT_THROW(rule_of_thumb_h(p, 1.0, 1.0, -1.0, n), DomainError);
}

TEST(RuleOfThumb, PilotSequence) {
  const double at201 = pilot_regularization(5.0, 100);
  EXPECT_NEAR(at201, 5.0 * std::pow(201.0, -1.0 / 11.0) * std::pow(std::log(201.0), 1.0 / 11.0), 1e-15);
  EXPECT_NEAR(at201, 3.5929933800831684, 1e-13);
  EXPECT_NEAR(pilot_regularization(2.5, 100), at201 / 2.0, 1e-15);
  EXPECT_THROW(pilot_regularization(0.0, 10), DomainError);
}

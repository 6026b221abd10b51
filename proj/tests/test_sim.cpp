#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "deconv/error.hpp"
#include "deconv/rng.hpp"
#include "deconv/sim.hpp"
#include "oracles.hpp"

using namespace deconv;
using oracle::cd;
using oracle::kPi;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.half_sizes = {25};
  c.replications = 6;
  c.bootstrap.replications = 20;
  c.grid.count = 15;
  c.master_seed = 42;
  return c;
}

SignalSpec custom_signal(int K, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return SignalSpec{CustomSignal{SpectralCoefficients(K, oracle::random_hermitian(K, rng))}};
}

}  // namespace

TEST(Signals, Values) {
  EXPECT_EQ(signal_eval(SignalSpec{Theta1{}}, 0.0), 3.0);
  EXPECT_NEAR(signal_eval(SignalSpec{Theta2{}}, 0.0), 0.0, 1e-15);
  EXPECT_NEAR(signal_eval(SignalSpec{Theta1{}}, 0.5), 3.0 * std::exp(-5.0), 1e-16);
  EXPECT_NEAR(signal_eval(SignalSpec{Theta1{}}, 0.5), 0.02021, 1e-5);
  const double x = 0.3;
  EXPECT_NEAR(signal_eval(SignalSpec{Theta2{}}, x),
              1.0 + 3.0 * std::cos(3.0 * kPi * x / 4.0) - 4.0 * std::pow(std::cos(3.0 * kPi * x), 2), 1e-14);
}

TEST(Signals, TruthCoefficientsMatchQuadrature) {
  for (const SignalSpec& spec : {SignalSpec{Theta1{}}, SignalSpec{Theta2{}}}) {
    const auto truth = truth_coefficients(spec, 40);
    EXPECT_TRUE(truth.coefficients.is_hermitian());
    for (int k : {0, 1, 2, 5, 13, 40}) {
      const double re = oracle::gauss_kronrod(
          [&](double x) { return signal_eval(spec, x) * std::cos(2.0 * kPi * k * x); }, -0.5, 0.5, k + 1);
      const double im = oracle::gauss_kronrod(
          [&](double x) { return -signal_eval(spec, x) * std::sin(2.0 * kPi * k * x); }, -0.5, 0.5, k + 1);
      EXPECT_NEAR(std::abs(truth.coefficients[k] - cd(re, im)), 0.0, 1e-12) << spec.name() << " k=" << k;
    }
    const double energy = oracle::gauss_kronrod([&](double x) { return std::pow(signal_eval(spec, x), 2); }, -0.5,
                                                0.5, 8);
    EXPECT_NEAR(truth.total_energy, energy, 1e-10 * energy);
    double kept = 0.0;
    for (int k = -40; k <= 40; ++k) kept += std::norm(truth.coefficients[k]);
    EXPECT_NEAR(truth.tail_energy, std::max(0.0, energy - kept), 1e-9);
  }
  // Closed form for the Gaussian bump's energy.
  const double want = 9.0 * std::sqrt(kPi / 40.0) * std::erf(std::sqrt(40.0) / 2.0);
  EXPECT_NEAR(truth_coefficients(SignalSpec{Theta1{}}, 10).total_energy, want, 1e-12);
}

TEST(Signals, CustomSignalIsItsSeries) {
  const auto spec = custom_signal(4, 3);
  const auto& c = std::get<CustomSignal>(spec.kind).coefficients;
  std::vector<cd> raw(c.values().begin(), c.values().end());
  for (double x : {-0.5, -0.1, 0.0, 0.37}) EXPECT_NEAR(signal_eval(spec, x), oracle::direct_series(raw, x).real(), 1e-12);
  const auto t = truth_coefficients(spec, 2);
  EXPECT_EQ(t.coefficients[2], c[2]);
  EXPECT_NEAR(t.tail_energy, 2.0 * (std::norm(c[3]) + std::norm(c[4])), 1e-12);
}

TEST(GenerateSample, NoiselessEqualsBlurredSignal) {
  auto cfg = small_config();
  cfg.error_model = ErrorModel::normal(0.0);
  const SimulationContext ctx(cfg);
  std::mt19937_64 rng(1);
  const auto s = generate_sample(ctx, 25, rng);
  const auto& truth = ctx.truth().coefficients;
  const auto& psi = ctx.distortion().psi();
  for (std::size_t j = 0; j < s.size(); j += 7) {
    cd acc = 0.0;
    for (int k = -truth.max_freq(); k <= truth.max_freq(); ++k) {
      acc += truth[k] * psi[k] * std::exp(cd(0.0, 2.0 * kPi * k * s.grid()[j]));
    }
    EXPECT_NEAR(s.responses()[j], acc.real(), 1e-12);
  }
}

TEST(GenerateSample, ZeroSignalGivesPureErrors) {
  auto cfg = small_config();
  cfg.signal = SignalSpec{CustomSignal{SpectralCoefficients(3)}};
  std::mt19937_64 a(2);
  std::mt19937_64 b(2);
  const auto s = generate_sample(cfg, 25, a);
  for (std::size_t j = 0; j < s.size(); ++j) EXPECT_EQ(s.responses()[j], cfg.error_model.sample(b));
}

TEST(GenerateSample, ResponseVariance) {
  const auto cfg = small_config();
  const SimulationContext ctx(cfg);
  std::mt19937_64 rng(3);
  const int reps = 5000;
  std::vector<double> sum(51, 0.0);
  std::vector<double> sq(51, 0.0);
  for (int r = 0; r < reps; ++r) {
    const auto s = generate_sample(ctx, 25, rng);
    for (std::size_t j = 0; j < 51; ++j) {
      sum[j] += s.responses()[j];
      sq[j] += s.responses()[j] * s.responses()[j];
    }
  }
  for (std::size_t j = 0; j < 51; ++j) {
    const double mean = sum[j] / reps;
    const double var = (sq[j] - reps * mean * mean) / (reps - 1);
    EXPECT_NEAR(var, 4.0 / 9.0, 0.05 * 4.0 / 9.0) << j;
  }
}

TEST(OracleIse, MatchesExhaustiveRecompute) {
  const auto cfg = small_config();
  const SimulationContext ctx(cfg);
  std::mt19937_64 rng(4);
  const auto s = generate_sample(ctx, 25, rng);
  const auto op = ctx.distortion_for(25);
  const auto grid = SelectionGrid::standard(25, 20);
  const auto sel = oracle_ise_select(s, ctx.truth(), grid, cfg.kernel(), op);
  const auto pts = grid.points();
  ASSERT_EQ(sel.curve.size(), pts.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto est = estimate_theta(s, op, cfg.kernel(), pts[i]);
    const double want = ise(est, ctx.truth().coefficients, ctx.truth().tail_energy);
    EXPECT_NEAR(sel.curve[i], want, 1e-10 * want) << i;
    if (want < sel.curve[best] - 1e-15 * want) best = i;
  }
  EXPECT_EQ(sel.index, best);
  EXPECT_EQ(sel.g, pts[sel.index]);
}

TEST(OracleIse, NoiselessInterpolation) {
  const int n = 8;
  const auto spec = custom_signal(5, 5);
  const auto truth = truth_coefficients(spec, 5);
  const DesignGrid grid(n, GridKind::kSimulation);
  std::vector<double> y(grid.size());
  for (std::size_t j = 0; j < y.size(); ++j) y[j] = signal_eval(spec, grid[j]);
  const Sample s(grid, y);
  const std::vector<double> gs{0.2, 0.5, 3.0, 8.0};
  const auto sel = oracle_ise_select(s, truth, gs, SmoothingKernelSpec::paper_sim(), DistortionOperator::identity(n));
  EXPECT_EQ(sel.g, 0.2);
  EXPECT_NEAR(sel.curve[0], 0.0, 1e-24);
  EXPECT_EQ(sel.curve[0], sel.curve[1]);
}

TEST(RunExperiment, SingleReplication) {
  auto cfg = small_config();
  cfg.replications = 1;
  cfg.selection_methods = {SelectionMethod::kIseOracle};
  const auto table = run_experiment(cfg);
  ASSERT_EQ(table.sizes.size(), 1u);
  const auto& r = table.sizes[0];
  EXPECT_EQ(r.replications_used, 1);
  EXPECT_EQ(r.ecdf_method, SelectionMethod::kIseOracle);
  ASSERT_EQ(r.cells.size(), 5u);
  for (const auto& c : r.cells) EXPECT_NEAR(c.amse, c.bias * c.bias + c.variance, 1e-12);
  ASSERT_NE(r.method(SelectionMethod::kIseOracle), nullptr);
  EXPECT_EQ(r.method(SelectionMethod::kBootstrap), nullptr);
  EXPECT_EQ(table.asymptotic_amse.size(), 5u);
}

TEST(RunExperiment, AggregationIdentityAndOracleBound) {
  auto cfg = small_config();
  cfg.half_sizes = {25, 50};
  cfg.replications = 40;
  const auto table = run_experiment(cfg);
  for (const auto& r : table.sizes) {
    EXPECT_EQ(r.failures, 0);
    for (const auto& c : r.cells) EXPECT_NEAR(c.amse, c.bias * c.bias + c.variance, 1e-12);
    const auto* boot = r.method(SelectionMethod::kBootstrap);
    const auto* best = r.method(SelectionMethod::kIseOracle);
    ASSERT_TRUE(boot && best);
    EXPECT_LE(best->imse, boot->imse + 2.0 * boot->standard_error);
    EXPECT_EQ(r.log_ratio_boot_ise.size(), 40u);
    for (std::size_t i = 0; i < 40; ++i) {
      EXPECT_NEAR(r.log_ratio_boot_ise[i], std::log(boot->regularization[i] / best->regularization[i]), 1e-14);
      EXPECT_LE(best->ise[i], boot->ise[i] * (1.0 + 1e-12));
    }
  }
}

TEST(RunExperiment, DeterministicAcrossThreads) {
  auto cfg = small_config();
  cfg.selection_methods = {SelectionMethod::kBootstrap, SelectionMethod::kIseOracle, SelectionMethod::kRiskHull};
  cfg.risk_hull.penalty = MonteCarloPenalty{500};
  cfg.threads = 1;
  const auto a = run_experiment(cfg);
  cfg.threads = 3;
  const auto b = run_experiment(cfg);
  ASSERT_EQ(a.sizes.size(), b.sizes.size());
  const auto& x = a.sizes[0];
  const auto& y = b.sizes[0];
  for (std::size_t i = 0; i < x.cells.size(); ++i) {
    EXPECT_EQ(x.cells[i].bias, y.cells[i].bias);
    EXPECT_EQ(x.cells[i].variance, y.cells[i].variance);
  }
  EXPECT_EQ(x.aimse, y.aimse);
  for (std::size_t m = 0; m < x.imse.size(); ++m) {
    EXPECT_EQ(x.imse[m].ise, y.imse[m].ise);
    EXPECT_EQ(x.imse[m].regularization, y.imse[m].regularization);
  }
}

TEST(RunExperiment, RejectsInvalidConfig) {
  auto cfg = small_config();
  cfg.replications = 0;
  EXPECT_THROW(run_experiment(cfg), ValidationError);
  cfg = small_config();
  cfg.half_sizes.clear();
  EXPECT_THROW(run_experiment(cfg), ValidationError);
  cfg = small_config();
  cfg.selection_methods.clear();
  EXPECT_THROW(run_experiment(cfg), ValidationError);
}

TEST(Methods, NameRoundTrip) {
  for (auto m : {SelectionMethod::kBootstrap, SelectionMethod::kIseOracle, SelectionMethod::kRiskHull,
                 SelectionMethod::kBootstrapCutoff}) {
    EXPECT_EQ(parse_method(method_name(m)), m);
  }
  EXPECT_THROW(parse_method("lasso"), ValidationError);
}

TEST(CovarianceCheck, ResidualsFromTheTrueLaw) {
  const auto model = ErrorModel::normal(2.0 / 3.0);
  int good = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto rng = make_stream(seed, {kTagCovariance});
    std::vector<double> eps(301);
    for (auto& e : eps) e = model.sample(rng);
    if (bootstrap_covariance_from_residuals(eps, model).max_abs_difference < 0.05) ++good;
  }
  EXPECT_GE(good, 90);
}

TEST(CovarianceCheck, SymmetricAndRejectsZeroScale) {
  const auto cfg = small_config();
  const auto report = bootstrap_covariance_check(cfg, 25, 11);
  ASSERT_EQ(report.sigma_star.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      EXPECT_NEAR(report.sigma_star[i][j], report.sigma_star[j][i], 1e-12);
      EXPECT_NEAR(report.sigma[i][j], report.sigma[j][i], 1e-12);
    }
  }
  EXPECT_GT(report.c_n, 0.0);
  const std::vector<double> r{-1.0, 0.0, 1.0};
  EXPECT_THROW(bootstrap_covariance_from_residuals(r, ErrorModel::normal(1.0), 0.0), DegenerateDistributionError);
}

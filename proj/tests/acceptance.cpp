// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "deconv/bootstrap.hpp"
#include "deconv/ecdf.hpp"
#include "deconv/estimator.hpp"
#include "deconv/sim.hpp"
#include "oracles.hpp"

using namespace deconv;

namespace {

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail, double seconds) {
  std::printf("%s %d %s  %s  (%.1f s)\n", ok ? "PASS" : "FAIL", id, name, detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

void info(const std::string& line) {
  std::printf("     %s\n", line.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

const double kSd = 2.0 / 3.0;

void criterion1() {
  Timer t;
  const std::vector<double> ts{-2, -1, 0, 1, 2};
  const std::vector<double> normal_row{0.001, 0.046, 0.091, 0.046, 0.001};
  const std::vector<double> t_row{0.006, 0.036, 0.156, 0.036, 0.006};
  const auto n = ErrorModel::normal(kSd);
  const auto s = ErrorModel::student_t(4, kSd);
  double dn = 0.0;
  double dt = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    dn = std::max(dn, std::abs(asymptotic_covariance(n, ts[i], ts[i]) - normal_row[i]));
    dt = std::max(dt, std::abs(asymptotic_covariance(s, ts[i], ts[i]) - t_row[i]));
  }
  const double secs = t.seconds();
  report(1, "analytic-limit-rows", dn <= 5e-4 && dt <= 5e-4 && secs < 1.0,
         "max dev normal " + fmt("%.2e", dn) + ", t4 " + fmt("%.2e", dt), secs);
}

void criterion2() {
  Timer t;
  const double an = asymptotic_aimse(ErrorModel::normal(kSd));
  const double at = asymptotic_aimse(ErrorModel::student_t(4, kSd));
  report(2, "analytic-aimse", std::abs(an - 0.188) <= 1e-3 && std::abs(at - 0.228) <= 1e-3,
         "normal " + fmt("%.6f", an) + ", t4 " + fmt("%.6f", at), t.seconds());
}

// Criteria 3-6 share one 500-replication theta1 / normal run.
void criteria3to6() {
  Timer t;
  ExperimentConfig cfg;
  cfg.signal = SignalSpec{Theta1{}};
  cfg.error_model = ErrorModel::normal(kSd);
  cfg.half_sizes = {25, 50, 100, 150};
  cfg.replications = 500;
  cfg.selection_methods = {SelectionMethod::kBootstrap, SelectionMethod::kIseOracle};
  cfg.threads = threads();
  const auto table = run_experiment(cfg);
  const double secs = t.seconds();
  for (const auto& s : table.sizes) {
    const auto* b = s.method(SelectionMethod::kBootstrap);
    const auto* o = s.method(SelectionMethod::kIseOracle);
    info("2n+1=" + std::to_string(2 * s.n + 1) + "  amse(0)=" + fmt("%.4f", s.cells[2].amse) +
         "  aimse=" + fmt("%.4f", s.aimse) + "  imse boot=" + fmt("%.4f", b->imse) + " (se " +
         fmt("%.4f", b->standard_error) + ")  imse ise=" + fmt("%.4f", o->imse) +
         "  failures=" + std::to_string(s.failures));
  }

  const auto& s301 = table.sizes[3];
  const double amse0 = s301.cells[2].amse;
  report(3, "simulated-ecdf-precision-301",
         std::abs(amse0 - 0.083) <= 0.02 && std::abs(s301.aimse - 0.186) <= 0.02,
         "amse(0) " + fmt("%.4f", amse0) + " vs 0.083, aimse " + fmt("%.4f", s301.aimse) + " vs 0.186", secs);

  const std::vector<double> table7{0.169, 0.093, 0.056, 0.040};
  bool ok4 = true;
  std::string d4;
  for (std::size_t i = 0; i < 4; ++i) {
    const double v = table.sizes[i].method(SelectionMethod::kBootstrap)->imse;
    const double ratio = v / table7[i];
    ok4 = ok4 && ratio >= 0.5 && ratio <= 2.0;
    if (i > 0) ok4 = ok4 && v < table.sizes[i - 1].method(SelectionMethod::kBootstrap)->imse;
    d4 += fmt("%.4f", v) + (i < 3 ? " " : "");
  }
  report(4, "imse-trend", ok4, "bootstrap imse " + d4 + " vs 0.169 0.093 0.056 0.040", 0.0);

  bool ok5 = true;
  std::string d5;
  for (const auto& s : table.sizes) {
    const auto* b = s.method(SelectionMethod::kBootstrap);
    const auto* o = s.method(SelectionMethod::kIseOracle);
    ok5 = ok5 && o->imse <= b->imse + 2.0 * b->standard_error;
    d5 += fmt("%.4f", o->imse) + "<=" + fmt("%.4f", b->imse + 2.0 * b->standard_error) + " ";
  }
  report(5, "oracle-dominance", ok5, d5, 0.0);

  std::vector<double> medians;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& lr = table.sizes[i].log_ratio_boot_ise;
    std::vector<double> first(lr.begin(), lr.begin() + std::min<std::size_t>(100, lr.size()));
    for (auto& v : first) v = std::abs(v);
    medians.push_back(median(first));
  }
  report(6, "selector-consistency", medians[1] <= medians[0] && medians[2] <= medians[1],
         "median |log(g_boot/g_ise)| " + fmt("%.4f", medians[0]) + " " + fmt("%.4f", medians[1]) + " " +
             fmt("%.4f", medians[2]),
         0.0);
}

void criterion7() {
  Timer t;
  std::vector<std::string> broken;
  auto expect = [&](bool ok, const char* what) {
    if (!ok) broken.emplace_back(what);
  };
  std::mt19937_64 rng(7);
  std::normal_distribution<double> z;

  // Parseval against a Riemann sum.
  for (int K : {1, 4, 9}) {
    const auto c = oracle::random_hermitian(K, rng);
    const SpectralCoefficients a(K, c);
    const double spectral = parseval_l2_distance(a, SpectralCoefficients(K));
    const double spatial = oracle::riemann([&](double x) { return std::pow(oracle::direct_series(c, x).real(), 2); });
    expect(std::abs(spectral - spatial) <= 1e-8 * spectral, "parseval");
  }

  // FFT against direct sums; Hermitian symmetry.
  for (int n = 1; n <= 8; ++n) {
    std::vector<double> y(2 * n + 1);
    for (auto& v : y) v = z(rng);
    const Sample s(DesignGrid(n, GridKind::kSimulation), y);
    const auto r = empirical_fourier_coefficients(s, n);
    const std::vector<double> x(s.grid().points().begin(), s.grid().points().end());
    for (int k = -n; k <= n; ++k) expect(std::abs(r[k] - oracle::direct_coefficient(x, y, k)) < 1e-13, "dft");
    expect(r.is_hermitian(1e-12), "hermitian");

    const auto est = estimate_theta(s, DistortionOperator::identity(n), SmoothingKernelSpec::spectral_cutoff(n), 1.0);
    for (std::size_t j = 0; j < y.size(); ++j) expect(std::abs(est(x[j]) - y[j]) < 1e-12, "interpolation");
  }

  // Integrated variance against Monte Carlo.
  {
    const int n = 25;
    const DistortionOperator op(DistortionSpec::laplace(1.0, CoefficientMode::kClosedForm), n);
    const auto kernel = SmoothingKernelSpec::paper_sim();
    const double want = integrated_variance_formula(kSd * kSd, kernel, op.psi(), 0.4, n);
    std::normal_distribution<double> e(0.0, kSd);
    const DesignGrid grid(n, GridKind::kSimulation);
    double acc = 0.0;
    for (int r = 0; r < 2000; ++r) {
      std::vector<double> y(grid.size());
      for (auto& v : y) v = e(rng);
      acc += parseval_l2_distance(estimate_theta(Sample(grid, y), op, kernel, 0.4).coefficients,
                                  SpectralCoefficients(n));
    }
    expect(std::abs(acc / 2000.0 - want) <= 0.05 * want, "integrated-variance");
  }

  // Smooth law: CDF axioms and unit mass.
  {
    std::vector<double> res(51);
    for (auto& v : res) v = kSd * z(rng);
    const SmoothErrorDistribution d(center_residuals(res), silverman_cn(center_residuals(res)));
    double prev = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double f = d.cdf(-6.0 + 12.0 * i / 999.0);
      expect(f >= prev && f >= 0.0 && f <= 1.0, "cdf-axioms");
      prev = f;
    }
    expect(d.cdf(-1e6) < 1e-15 && d.cdf(1e6) > 1.0 - 1e-15, "cdf-limits");
    const double mass = oracle::gauss_kronrod([&](double x) { return d.density(x); }, -10.0, 10.0, 40);
    expect(std::abs(mass - 1.0) <= 1e-6, "density-mass");
  }

  // Replay across thread counts.
  {
    ExperimentConfig cfg;
    cfg.half_sizes = {25, 50};
    cfg.replications = 8;
    cfg.bootstrap.replications = 40;
    cfg.grid.count = 30;
    cfg.selection_methods = {SelectionMethod::kBootstrap, SelectionMethod::kIseOracle, SelectionMethod::kRiskHull};
    cfg.risk_hull.penalty = MonteCarloPenalty{1000};
    cfg.threads = 1;
    const auto a = run_experiment(cfg);
    cfg.threads = std::max(2u, threads());
    const auto b = run_experiment(cfg);
    for (std::size_t i = 0; i < a.sizes.size(); ++i) {
      expect(a.sizes[i].aimse == b.sizes[i].aimse, "replay-aimse");
      for (std::size_t m = 0; m < a.sizes[i].imse.size(); ++m) {
        expect(a.sizes[i].imse[m].ise == b.sizes[i].imse[m].ise, "replay-ise");
      }
    }
  }

  std::string detail = broken.empty() ? "all properties hold" : "broken:";
  for (const auto& b : broken) detail += " " + b;
  report(7, "property-suite", broken.empty(), detail, t.seconds());
}

void criterion8() {
  Timer t;
  ExperimentConfig cfg;
  cfg.signal = SignalSpec{Theta2{}};
  cfg.error_model = ErrorModel::normal(kSd);
  cfg.half_sizes = {25, 50, 100, 150};
  cfg.pilot_constant = 2.5;
  cfg.replications = 100;
  cfg.selection_methods = {SelectionMethod::kBootstrap, SelectionMethod::kRiskHull};
  cfg.risk_hull.alpha = 1.1;
  cfg.risk_hull.penalty = MonteCarloPenalty{10000};
  cfg.threads = threads();
  const auto table = run_experiment(cfg);
  bool ok = true;
  std::string detail;
  for (const auto& s : table.sizes) {
    const auto* b = s.method(SelectionMethod::kBootstrap);
    const auto* h = s.method(SelectionMethod::kRiskHull);
    ok = ok && b->imse <= h->imse;
    info("2n+1=" + std::to_string(2 * s.n + 1) + "  imse bootstrap=" + fmt("%.4f", b->imse) + " (se " +
         fmt("%.4f", b->standard_error) + ")  risk_hull=" + fmt("%.4f", h->imse) + " (se " +
         fmt("%.4f", h->standard_error) + ")");
    detail += std::to_string(2 * s.n + 1) + (b->imse <= h->imse ? ":ok " : ":worse ");
  }
  report(8, "riskhull-comparison", ok, "bootstrap <= risk hull at " + detail, t.seconds());
}

}  // namespace

int main() {
  std::printf("acceptance run, %u thread(s)\n", threads());
  criterion1();
  criterion2();
  criteria3to6();
  criterion7();
  criterion8();
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}

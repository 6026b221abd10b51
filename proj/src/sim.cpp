#include "deconv/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "deconv/error.hpp"
#include "deconv/parallel.hpp"
#include "deconv/rng.hpp"
#include "deconv/simd/kernels.hpp"

namespace deconv {

std::string method_name(SelectionMethod m) {
  switch (m) {
    case SelectionMethod::kBootstrap:
      return "bootstrap";
    case SelectionMethod::kIseOracle:
      return "ise_oracle";
    case SelectionMethod::kRiskHull:
      return "risk_hull";
    case SelectionMethod::kBootstrapCutoff:
      return "bootstrap_cutoff";
  }
  return "unknown";
}

SelectionMethod parse_method(const std::string& name) {
  for (auto m : {SelectionMethod::kBootstrap, SelectionMethod::kIseOracle, SelectionMethod::kRiskHull,
                 SelectionMethod::kBootstrapCutoff}) {
    if (method_name(m) == name) return m;
  }
  throw ValidationError("unknown selection method '" + name + "'");
}

SelectionGrid GridSettings::for_size(int n) const {
  SelectionGrid grid = SelectionGrid::standard(n, count);
  if (lower) grid.lower = *lower;
  if (upper) grid.upper = *upper;
  grid.validate();
  return grid;
}

void ExperimentConfig::validate() const {
  if (replications < 1) throw ValidationError("replications must be >= 1");
  if (half_sizes.empty()) throw ValidationError("half_sizes must not be empty");
  for (int n : half_sizes) {
    if (n < 1) throw ValidationError("half sizes must be positive");
  }
  if (!(pilot_constant > 0.0)) throw ValidationError("pilot_constant must be positive");
  if (selection_methods.empty()) throw ValidationError("at least one selection method is required");
  if (truth_multiplier < 1) throw ValidationError("truth_multiplier must be >= 1");
  if (ecdf_points.empty()) throw ValidationError("ecdf_points must not be empty");
  bootstrap.validate();
  for (int n : half_sizes) {
    grid.for_size(n);
    if (has(SelectionMethod::kRiskHull)) risk_hull.validate(n);
  }
}

bool ExperimentConfig::has(SelectionMethod m) const {
  return std::find(selection_methods.begin(), selection_methods.end(), m) != selection_methods.end();
}

SmoothingKernelSpec ExperimentConfig::kernel() const {
  return SmoothingKernelSpec::paper_sim(kernel_flat_radius, kernel_decay_exponent);
}

// Context -------------------------------------------------------------------------------

SimulationContext::SimulationContext(const ExperimentConfig& config) : config_(config) {
  config_.validate();
  const int n_max = *std::max_element(config_.half_sizes.begin(), config_.half_sizes.end());
  const int k_truth = config_.truth_multiplier * n_max;
  distortion_ = std::make_unique<DistortionOperator>(config_.distortion, k_truth);
  truth_ = truth_coefficients(config_.signal, k_truth);
  const auto blurred = apply_convolution(truth_.coefficients, distortion_->psi());
  for (int n : config_.half_sizes) {
    if (blurred_.count(n)) continue;
    DesignGrid grid(n, GridKind::kSimulation);
    blurred_.emplace(n, evaluate_series(blurred, grid.points()));
  }
}

const std::vector<double>& SimulationContext::blurred_signal(int n) const {
  const auto it = blurred_.find(n);
  if (it == blurred_.end()) throw ValidationError("sample size n = " + std::to_string(n) + " not configured");
  return it->second;
}

DistortionOperator SimulationContext::distortion_for(int n) const {
  SpectralCoefficients psi(n);
  for (int k = -n; k <= n; ++k) psi[k] = distortion_->psi()[k];
  return DistortionOperator(config_.distortion, std::move(psi));
}

Sample generate_sample(const SimulationContext& context, int n, std::mt19937_64& rng) {
  const auto& signal = context.blurred_signal(n);
  std::vector<double> y(signal.size());
  for (std::size_t j = 0; j < y.size(); ++j) y[j] = signal[j] + context.config().error_model.sample(rng);
  return Sample(DesignGrid(n, GridKind::kSimulation), std::move(y));
}

Sample generate_sample(const ExperimentConfig& config, int n, std::mt19937_64& rng) {
  ExperimentConfig single = config;
  single.half_sizes = {n};
  return generate_sample(SimulationContext(single), n, rng);
}

// ISE oracle ------------------------------------------------------------------------------

OracleSelection oracle_ise_select(const Sample& sample, const TruthCoefficients& truth,
                                  std::span<const double> candidates, const SmoothingKernelSpec& kernel,
                                  const DistortionOperator& distortion) {
  if (candidates.empty()) throw DomainError("no candidate regularization parameters");
  const int n = sample.n();
  require_invertible(distortion.psi(), n);
  const auto empirical = empirical_fourier_coefficients(sample, n);

  // Truth energy outside |k| <= n is the same for every candidate.
  double outside = truth.tail_energy;
  for (int k = n + 1; k <= truth.coefficients.max_freq(); ++k) {
    outside += std::norm(truth.coefficients[k]) + std::norm(truth.coefficients[-k]);
  }
  const std::size_t half = static_cast<std::size_t>(n) + 1;
  std::vector<Complex> ratio(half);
  std::vector<Complex> target(half);
  for (int k = 0; k <= n; ++k) {
    ratio[static_cast<std::size_t>(k)] = empirical[k] / distortion.psi()[k];
    target[static_cast<std::size_t>(k)] = k <= truth.coefficients.max_freq() ? truth.coefficients[k] : Complex{};
  }

  OracleSelection out;
  out.curve.reserve(candidates.size());
  for (double g : candidates) {
    if (!(g > 0.0)) throw DomainError("candidate regularization parameters must be positive");
    const auto w = kernel_weights(kernel, g, n);
    const double all = simd::scaled_sq_distance(w, ratio, target);
    const double d0 = std::norm(w[0] * ratio[0] - target[0]);
    out.curve.push_back(2.0 * all - d0 + outside);
  }
  out.index = argmin_first(out.curve);
  out.g = candidates[out.index];
  return out;
}

OracleSelection oracle_ise_select(const Sample& sample, const TruthCoefficients& truth, const SelectionGrid& grid,
                                  const SmoothingKernelSpec& kernel, const DistortionOperator& distortion) {
  const auto points = grid.points();
  return oracle_ise_select(sample, truth, std::span<const double>(points), kernel, distortion);
}

// Experiment ------------------------------------------------------------------------------

const MethodImse* SizeResult::method(SelectionMethod m) const {
  for (const auto& entry : imse) {
    if (entry.method == m) return &entry;
  }
  return nullptr;
}

namespace {

constexpr int kAimsePoints = 601;
constexpr double kAimseLimit = 6.0;

struct Replication {
  bool ok = false;
  std::string error;
  std::vector<double> ecdf_deviation;  ///< F_hat(t) - F(t) at the configured points
  double integrated_sq_deviation = 0.0;
  std::map<SelectionMethod, double> ise;
  std::map<SelectionMethod, double> regularization;
};

SelectionMethod ecdf_method_for(const ExperimentConfig& config) {
  for (auto m : {SelectionMethod::kBootstrap, SelectionMethod::kIseOracle, SelectionMethod::kBootstrapCutoff,
                 SelectionMethod::kRiskHull}) {
    if (config.has(m)) return m;
  }
  return SelectionMethod::kBootstrap;
}

std::vector<double> cutoff_candidates(int n) {
  // Ascending g = 1/(m + 1/2), i.e. descending cut-off m.
  std::vector<double> g;
  for (int m = n; m >= 0; --m) g.push_back(cutoff_regularization(m));
  return g;
}

Replication run_replication(const SimulationContext& ctx, const DistortionOperator& distortion, int n,
                            std::size_t r) {
  const auto& config = ctx.config();
  Replication out;
  auto rng = make_stream(config.master_seed, {kTagData, static_cast<std::uint64_t>(n), r});
  const Sample sample = generate_sample(ctx, n, rng);
  const auto kernel = config.kernel();
  const auto empirical = empirical_fourier_coefficients(sample, n);
  const auto pilot = estimate_theta(empirical, distortion, kernel, pilot_regularization(config.pilot_constant, n));
  const auto grid = config.grid.for_size(n);

  BootstrapConfig boot = config.bootstrap;
  boot.rng_seed = derive_seed(config.master_seed, {kTagBootstrap, static_cast<std::uint64_t>(n), r});
  boot.threads = 1;

  std::map<SelectionMethod, RegularizedEstimate> finals;
  for (SelectionMethod method : config.selection_methods) {
    switch (method) {
      case SelectionMethod::kBootstrap: {
        const auto sel = select_g_opt(sample, pilot, grid, kernel, distortion, boot);
        finals.emplace(method, estimate_theta(empirical, distortion, kernel, sel.g_opt));
        out.regularization[method] = sel.g_opt;
        break;
      }
      case SelectionMethod::kIseOracle: {
        const auto sel = oracle_ise_select(sample, ctx.truth(), grid, kernel, distortion);
        finals.emplace(method, estimate_theta(empirical, distortion, kernel, sel.g));
        out.regularization[method] = sel.g;
        break;
      }
      case SelectionMethod::kRiskHull: {
        const auto centered = center_residuals(residuals(sample, pilot));
        RiskHullConfig rh = config.risk_hull;
        rh.rng_seed = derive_seed(config.master_seed, {kTagRiskHull, static_cast<std::uint64_t>(n), r});
        const auto sel = select_cutoff_risk_hull(sample, distortion, sample_variance(centered), rh);
        finals.emplace(method, spectral_cutoff_estimate(sample, distortion, sel.cutoff));
        out.regularization[method] = cutoff_regularization(sel.cutoff);
        break;
      }
      case SelectionMethod::kBootstrapCutoff: {
        const auto candidates = cutoff_candidates(n);
        const auto sel = select_g_opt(sample, pilot, std::span<const double>(candidates),
                                      SmoothingKernelSpec::spectral_cutoff(1.0), distortion, boot);
        finals.emplace(method, estimate_theta(empirical, distortion, SmoothingKernelSpec::spectral_cutoff(1.0),
                                              sel.g_opt));
        out.regularization[method] = sel.g_opt;
        break;
      }
    }
  }
  for (const auto& [method, estimate] : finals) {
    out.ise[method] = ise(estimate, ctx.truth().coefficients, ctx.truth().tail_energy);
  }

  const Ecdf fhat = residual_ecdf(residuals(sample, finals.at(ecdf_method_for(config))));
  const auto& model = config.error_model;
  for (double t : config.ecdf_points) out.ecdf_deviation.push_back(fhat(t) - model.cdf(t));
  const double step = 2.0 * kAimseLimit / (kAimsePoints - 1);
  for (int i = 0; i < kAimsePoints; ++i) {
    const double t = -kAimseLimit + i * step;
    const double d = fhat(t) - model.cdf(t);
    const double weight = (i == 0 || i == kAimsePoints - 1) ? 0.5 : 1.0;
    out.integrated_sq_deviation += weight * step * d * d;
  }
  out.ok = true;
  return out;
}

SizeResult aggregate(const ExperimentConfig& config, int n, const std::vector<Replication>& reps) {
  SizeResult result;
  result.n = n;
  result.ecdf_method = ecdf_method_for(config);
  const double size = 2.0 * n + 1.0;

  std::vector<const Replication*> good;
  for (const auto& r : reps) {
    if (r.ok) {
      good.push_back(&r);
    } else {
      ++result.failures;
      result.failure_messages.push_back(r.error);
    }
  }
  if (result.failures > 0.01 * static_cast<double>(reps.size())) {
    throw NumericalError("n = " + std::to_string(n) + ": " + std::to_string(result.failures) + " of " +
                         std::to_string(reps.size()) + " replications failed; first: " +
                         result.failure_messages.front());
  }
  result.replications_used = static_cast<int>(good.size());
  const double count = static_cast<double>(good.size());

  for (std::size_t p = 0; p < config.ecdf_points.size(); ++p) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto* r : good) {
      sum += r->ecdf_deviation[p];
      sum_sq += r->ecdf_deviation[p] * r->ecdf_deviation[p];
    }
    const double mean = sum / count;
    const double mean_sq = sum_sq / count;
    CellStats cell;
    cell.t = config.ecdf_points[p];
    cell.bias = std::sqrt(size) * mean;
    cell.amse = size * mean_sq;
    cell.variance = cell.amse - cell.bias * cell.bias;
    result.cells.push_back(cell);
  }
  double integrated = 0.0;
  for (const auto* r : good) integrated += r->integrated_sq_deviation;
  result.aimse = size * integrated / count;

  for (SelectionMethod method : config.selection_methods) {
    MethodImse m{method, 0.0, 0.0, {}, {}};
    for (const auto* r : good) {
      m.ise.push_back(r->ise.at(method));
      m.regularization.push_back(r->regularization.at(method));
    }
    const double mean = std::accumulate(m.ise.begin(), m.ise.end(), 0.0) / count;
    double ss = 0.0;
    for (double v : m.ise) ss += (v - mean) * (v - mean);
    m.imse = mean;
    m.standard_error = count > 1 ? std::sqrt(ss / (count - 1.0) / count) : 0.0;
    result.imse.push_back(std::move(m));
  }

  const auto* boot = result.method(SelectionMethod::kBootstrap);
  const auto* oracle = result.method(SelectionMethod::kIseOracle);
  if (boot && oracle) {
    for (std::size_t i = 0; i < boot->regularization.size(); ++i) {
      result.log_ratio_boot_ise.push_back(std::log(boot->regularization[i] / oracle->regularization[i]));
    }
  }
  const auto* hull = result.method(SelectionMethod::kRiskHull);
  const auto* boot_cut = result.method(SelectionMethod::kBootstrapCutoff);
  if (hull && boot_cut) {
    for (std::size_t i = 0; i < hull->regularization.size(); ++i) {
      result.log_ratio_boot_riskhull.push_back(std::log(boot_cut->regularization[i] / hull->regularization[i]));
    }
  }
  return result;
}

std::string describe(const ErrorModel& model) {
  if (const auto* t = std::get_if<StudentTErrors>(&model.kind())) {
    return "student_t(df=" + std::to_string(t->df) + ", sd=" + std::to_string(t->sd) + ")";
  }
  return "normal(sd=" + std::to_string(model.sd()) + ")";
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& config) {
  const SimulationContext ctx(config);
  ResultTable table;
  table.signal = config.signal.name();
  table.error_model = describe(config.error_model);
  for (double t : config.ecdf_points) table.asymptotic_amse.push_back(asymptotic_covariance(config.error_model, t, t));
  table.asymptotic_aimse = asymptotic_aimse(config.error_model);

  for (int n : config.half_sizes) {
    const DistortionOperator distortion = ctx.distortion_for(n);
    std::vector<Replication> reps(static_cast<std::size_t>(config.replications));
    parallel_for(reps.size(), config.threads, [&](std::size_t r) {
      try {
        reps[r] = run_replication(ctx, distortion, n, r);
      } catch (const Error& e) {
        reps[r].ok = false;
        reps[r].error = e.what();
      }
    });
    table.sizes.push_back(aggregate(config, n, reps));
  }
  return table;
}

// Covariance check ---------------------------------------------------------------------------

CovarianceCheck bootstrap_covariance_from_residuals(std::span<const double> residuals, const ErrorModel& model,
                                                    std::optional<double> c_n, std::span<const double> points) {
  static const std::vector<double> kDefaultPoints = {-2.0, -1.0, 0.0, 1.0, 2.0};
  if (points.empty()) points = kDefaultPoints;
  auto centered = center_residuals(residuals);
  const double scale = c_n ? *c_n : silverman_cn(centered);
  const SmoothErrorDistribution law(std::move(centered), scale);

  CovarianceCheck out;
  out.points.assign(points.begin(), points.end());
  out.c_n = scale;
  const std::size_t m = points.size();
  std::vector<double> cdf(m), pdf(m), pmean(m);
  for (std::size_t i = 0; i < m; ++i) {
    cdf[i] = law.cdf(points[i]);
    pdf[i] = law.density(points[i]);
    pmean[i] = law.partial_mean(points[i]);
  }
  const double var_star = law.variance();
  out.sigma.assign(m, std::vector<double>(m));
  out.sigma_star.assign(m, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t lo = points[i] <= points[j] ? i : j;
      out.sigma_star[i][j] =
          cdf[lo] - cdf[i] * cdf[j] + pdf[i] * pmean[j] + pdf[j] * pmean[i] + var_star * pdf[i] * pdf[j];
      out.sigma[i][j] = asymptotic_covariance(model, points[i], points[j]);
      out.max_abs_difference = std::max(out.max_abs_difference, std::abs(out.sigma_star[i][j] - out.sigma[i][j]));
    }
  }
  return out;
}

CovarianceCheck bootstrap_covariance_check(const ExperimentConfig& config, int n, std::uint64_t seed) {
  ExperimentConfig single = config;
  single.half_sizes = {n};
  const SimulationContext ctx(single);
  auto rng = make_stream(seed, {kTagCovariance, static_cast<std::uint64_t>(n)});
  const Sample sample = generate_sample(ctx, n, rng);
  const auto distortion = ctx.distortion_for(n);
  const auto pilot = estimate_theta(sample, distortion, config.kernel(), pilot_regularization(config.pilot_constant, n));
  const auto res = residuals(sample, pilot);
  return bootstrap_covariance_from_residuals(res.values, config.error_model, config.bootstrap.scaling_c_n,
                                             config.ecdf_points);
}

}  // namespace deconv

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "deconv/bootstrap.hpp"
#include "deconv/ecdf.hpp"
#include "deconv/riskhull.hpp"
#include "deconv/signals.hpp"

namespace deconv {

enum class SelectionMethod {
  kBootstrap,        ///< smooth-bootstrap IMSE* over the regularization grid
  kIseOracle,        ///< grid argmin of the true ISE (needs the truth)
  kRiskHull,         ///< penalized cut-off selection
  kBootstrapCutoff,  ///< smooth-bootstrap IMSE* over spectral cut-offs 0..n
};

std::string method_name(SelectionMethod m);
SelectionMethod parse_method(const std::string& name);

struct GridSettings {
  int count = 100;
  std::optional<double> lower;  ///< defaults to (2n+1)^-1/10
  std::optional<double> upper;  ///< defaults to 10 (2n+1)^-1/12 log^1/12(2n+1)

  SelectionGrid for_size(int n) const;
};

struct ExperimentConfig {
  SignalSpec signal;
  ErrorModel error_model = ErrorModel::normal(2.0 / 3.0);
  std::vector<int> half_sizes = {25, 50, 100, 150};
  double pilot_constant = 5.0;
  GridSettings grid;
  BootstrapConfig bootstrap;
  int replications = 1000;
  std::vector<SelectionMethod> selection_methods = {SelectionMethod::kBootstrap, SelectionMethod::kIseOracle};
  std::uint64_t master_seed = 20240601;
  DistortionSpec distortion = DistortionSpec::laplace(0.1);
  double kernel_flat_radius = 7.0;
  double kernel_decay_exponent = 6.0;
  RiskHullConfig risk_hull;
  int truth_multiplier = 4;  ///< K_truth = truth_multiplier * n
  unsigned threads = 1;
  std::vector<double> ecdf_points = {-2.0, -1.0, 0.0, 1.0, 2.0};

  void validate() const;
  bool has(SelectionMethod m) const;
  SmoothingKernelSpec kernel() const;
};

/// Precomputed per-config state: distortion coefficients, truth coefficients
/// and the blurred signal on each design grid.
class SimulationContext {
 public:
  explicit SimulationContext(const ExperimentConfig& config);

  const ExperimentConfig& config() const { return config_; }
  const DistortionOperator& distortion() const { return *distortion_; }
  const TruthCoefficients& truth() const { return truth_; }
  /// [K theta](x_j) on the simulation grid of half-count n.
  const std::vector<double>& blurred_signal(int n) const;
  /// Distortion restricted to |k| <= n.
  DistortionOperator distortion_for(int n) const;

 private:
  ExperimentConfig config_;
  std::unique_ptr<DistortionOperator> distortion_;
  TruthCoefficients truth_;
  std::map<int, std::vector<double>> blurred_;
};

Sample generate_sample(const SimulationContext& context, int n, std::mt19937_64& rng);
Sample generate_sample(const ExperimentConfig& config, int n, std::mt19937_64& rng);

struct OracleSelection {
  double g = 0.0;
  std::size_t index = 0;
  std::vector<double> curve;  ///< ISE per candidate
};

/// Grid argmin of ise(estimate_theta(sample, g), truth), ties to the smallest g.
OracleSelection oracle_ise_select(const Sample& sample, const TruthCoefficients& truth,
                                  std::span<const double> candidates, const SmoothingKernelSpec& kernel,
                                  const DistortionOperator& distortion);
OracleSelection oracle_ise_select(const Sample& sample, const TruthCoefficients& truth, const SelectionGrid& grid,
                                  const SmoothingKernelSpec& kernel, const DistortionOperator& distortion);

struct CellStats {
  double t = 0.0;
  double bias = 0.0;      ///< sqrt(2n+1) mean(F_hat(t) - F(t))
  double variance = 0.0;  ///< (2n+1) var(F_hat(t)), population form
  double amse = 0.0;      ///< (2n+1) mean((F_hat(t) - F(t))^2)
};

struct MethodImse {
  SelectionMethod method;
  double imse = 0.0;
  double standard_error = 0.0;
  std::vector<double> ise;              ///< per successful replication
  std::vector<double> regularization;   ///< selected g (or cut-off for risk hull)
};

struct SizeResult {
  int n = 0;
  int replications_used = 0;
  int failures = 0;
  std::vector<std::string> failure_messages;
  SelectionMethod ecdf_method = SelectionMethod::kBootstrap;
  std::vector<CellStats> cells;
  double aimse = 0.0;
  std::vector<MethodImse> imse;
  std::vector<double> log_ratio_boot_ise;       ///< log(g_boot / g_ISE)
  std::vector<double> log_ratio_boot_riskhull;  ///< log(g_boot / g_riskhull), cut-off scale

  const MethodImse* method(SelectionMethod m) const;
};

struct ResultTable {
  std::string signal;
  std::string error_model;
  std::vector<SizeResult> sizes;
  /// Analytic reference row from the asymptotic covariance.
  std::vector<double> asymptotic_amse;
  double asymptotic_aimse = 0.0;
};

/// Full simulation. Deterministic in master_seed for any thread count.
ResultTable run_experiment(const ExperimentConfig& config);

struct CovarianceCheck {
  std::vector<double> points;
  std::vector<std::vector<double>> sigma;       ///< Sigma(u, v)
  std::vector<std::vector<double>> sigma_star;  ///< plug-in under the smooth law
  double max_abs_difference = 0.0;
  double c_n = 0.0;
};

/// Sigma* from the smooth law built on `residuals` (centered here) against
/// Sigma of `model`. c_n defaults to Silverman's rule.
CovarianceCheck bootstrap_covariance_from_residuals(std::span<const double> residuals, const ErrorModel& model,
                                                    std::optional<double> c_n = std::nullopt,
                                                    std::span<const double> points = {});

/// Generates a sample, fits the pilot and compares Sigma* with Sigma on the
/// config's ECDF points.
CovarianceCheck bootstrap_covariance_check(const ExperimentConfig& config, int n, std::uint64_t seed);

}  // namespace deconv

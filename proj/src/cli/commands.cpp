#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "deconv/cli.hpp"
#include "deconv/error.hpp"
#include "deconv/quadrature.hpp"
#include "deconv/simd/kernels.hpp"

#ifndef DECONV_VERSION
#define DECONV_VERSION "0.0.0"
#endif

namespace deconv::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out = ".";
  std::string config;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
};

void add_common(CLI::App& cmd, CommonOptions& o) {
  o.seed_opt = cmd.add_option("--seed", o.seed, "master seed (drawn from entropy when omitted)");
  o.threads_opt = cmd.add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  cmd.add_option("--out", o.out, "output directory")->capture_default_str();
  cmd.add_option("--config", o.config, "JSON config file");
}

void setup_logging() {
  auto logger = spdlog::get("deconv");
  if (!logger) logger = spdlog::stderr_color_mt("deconv");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::level::level_enum level = spdlog::level::info;
  if (const char* env = std::getenv("DECONV_LOG"); env != nullptr && *env != '\0') {
    const std::string name(env);
    level = spdlog::level::from_str(name);
    if (level == spdlog::level::off && name != "off") {
      level = spdlog::level::info;
      spdlog::warn("DECONV_LOG='{}' is not a level (trace, debug, info, warn, error, critical, off)", name);
    }
  }
  spdlog::set_level(level);
}

std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

fs::path prepare_out_dir(const std::string& dir) {
  const fs::path out(dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw ValidationError("cannot create output directory " + dir);
  return out;
}

class Manifest {
 public:
  Manifest(std::string command, fs::path dir)
      : command_(std::move(command)), dir_(std::move(dir)), start_(std::chrono::steady_clock::now()) {}

  void set_config(json resolved) { config_ = std::move(resolved); }
  void set_seed(std::uint64_t seed, std::string source) {
    seed_ = seed;
    seed_source_ = std::move(source);
  }
  void set_threads(unsigned t) { threads_ = t; }
  void extra(const std::string& key, json value) { extra_[key] = std::move(value); }

  fs::path emit(const std::string& name, const CsvTable& table) {
    const fs::path path = dir_ / name;
    table.write(path);
    outputs_[name] = path.string();
    return path;
  }
  fs::path emit(const std::string& name, std::string_view text) {
    const fs::path path = dir_ / name;
    write_text(path, text);
    outputs_[name] = path.string();
    return path;
  }

  void finish() {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json doc = {
        {"tool", "deconv"},
        {"version", DECONV_VERSION},
        {"command", command_},
        {"config_hash", config_hash(config_)},
        {"master_seed", seed_},
        {"seed_source", seed_source_},
        {"threads", threads_},
        {"wall_time_seconds", wall},
        {"outputs", outputs_},
        {"config", config_},
    };
    if (!extra_.empty()) doc["details"] = extra_;
    const fs::path path = dir_ / "manifest.json";
    write_text(path, doc.dump(2) + "\n");
    spdlog::info("wrote {} ({} outputs, {:.2f} s)", path.string(), outputs_.size(), wall);
  }

 private:
  std::string command_;
  fs::path dir_;
  std::chrono::steady_clock::time_point start_;
  json config_ = json::object();
  std::uint64_t seed_ = 0;
  std::string seed_source_;
  unsigned threads_ = 1;
  json outputs_ = json::object();
  json extra_ = json::object();
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path + " is not valid JSON: " + e.what());
  }
}

// Config file (if any) plus --seed/--threads. Returns the seed's provenance.
std::string resolve_experiment(const CommonOptions& o, ExperimentConfig& config, const json& doc) {
  std::string source = "entropy";
  if (!o.config.empty()) {
    config = parse_experiment_config(doc);
    if (doc.contains("master_seed")) source = "config";
  }
  if (o.seed_opt->count() > 0) {
    config.master_seed = o.seed;
    source = "flag";
  } else if (source == "entropy") {
    config.master_seed = entropy_seed();
  }
  if (o.threads_opt->count() > 0) config.threads = o.threads;
  config.validate();
  return source;
}

std::string label(double t) { return format_double(t); }

void emit_selections(Manifest& m, const ResultTable& table, const std::string& name) {
  CsvTable sel({"size", "replication", "method", "regularization", "ise"});
  for (const auto& s : table.sizes) {
    for (const auto& mi : s.imse) {
      for (std::size_t r = 0; r < mi.ise.size(); ++r) {
        sel.row().add(2 * s.n + 1).add(static_cast<long long>(r)).add(method_name(mi.method));
        sel.add(mi.regularization[r]).add(mi.ise[r]);
      }
    }
  }
  m.emit(name, sel);
}

void emit_imse(Manifest& m, const ResultTable& table, const std::vector<SelectionMethod>& methods,
               const std::string& name) {
  std::vector<std::string> header{"size"};
  for (auto method : methods) {
    header.push_back(method_name(method));
    header.push_back(method_name(method) + "_se");
  }
  CsvTable imse(header);
  for (const auto& s : table.sizes) {
    imse.row().add(2 * s.n + 1);
    for (auto method : methods) {
      const auto* mi = s.method(method);
      imse.add(mi ? mi->imse : std::nan("")).add(mi ? mi->standard_error : std::nan(""));
    }
  }
  m.emit(name, imse);
}

void emit_log_ratios(Manifest& m, const ResultTable& table, bool riskhull, const std::string& name) {
  CsvTable lr({"size", "replication", "log_ratio"});
  for (const auto& s : table.sizes) {
    const auto& values = riskhull ? s.log_ratio_boot_riskhull : s.log_ratio_boot_ise;
    for (std::size_t r = 0; r < values.size(); ++r) {
      lr.row().add(2 * s.n + 1).add(static_cast<long long>(r)).add(values[r]);
    }
  }
  m.emit(name, lr);
}

void emit_result_tables(Manifest& m, const ResultTable& table, const ExperimentConfig& config) {
  const auto& points = config.ecdf_points;

  std::vector<std::string> bv_header{"size"};
  for (double t : points) {
    bv_header.push_back("bias@" + label(t));
    bv_header.push_back("variance@" + label(t));
  }
  CsvTable bias_variance(bv_header);

  std::vector<std::string> amse_header{"size"};
  for (double t : points) amse_header.push_back("t=" + label(t));
  CsvTable amse(amse_header);
  CsvTable aimse({"size", "aimse"});
  CsvTable counts({"size", "replications_used", "failures", "ecdf_method"});

  for (const auto& s : table.sizes) {
    const int size = 2 * s.n + 1;
    bias_variance.row().add(size);
    amse.row().add(size);
    for (const auto& cell : s.cells) {
      bias_variance.add(cell.bias).add(cell.variance);
      amse.add(cell.amse);
    }
    aimse.row().add(size).add(s.aimse);
    counts.row().add(size).add(s.replications_used).add(s.failures).add(method_name(s.ecdf_method));
  }
  amse.row().add(std::string("inf"));
  for (double v : table.asymptotic_amse) amse.add(v);
  aimse.row().add(std::string("inf")).add(table.asymptotic_aimse);

  m.emit("bias_variance.csv", bias_variance);
  m.emit("amse.csv", amse);
  m.emit("aimse.csv", aimse);
  emit_imse(m, table, config.selection_methods, "imse.csv");
  emit_selections(m, table, "selections.csv");
  if (config.has(SelectionMethod::kBootstrap) && config.has(SelectionMethod::kIseOracle)) {
    emit_log_ratios(m, table, false, "log_ratio.csv");
  }
  m.emit("replications.csv", counts);
}

void log_failures(const ResultTable& table) {
  for (const auto& s : table.sizes) {
    if (s.failures == 0) continue;
    spdlog::warn("size {}: {} replication(s) failed", 2 * s.n + 1, s.failures);
    for (const auto& msg : s.failure_messages) spdlog::debug("  {}", msg);
  }
}

// simulate ---------------------------------------------------------------------

int cmd_simulate(const CommonOptions& o) {
  const json doc = o.config.empty() ? json::object() : read_json_file(o.config);
  ExperimentConfig config;
  const std::string source = resolve_experiment(o, config, doc);
  const fs::path out = prepare_out_dir(o.out);

  Manifest manifest("simulate", out);
  const json resolved = to_json(config);
  manifest.set_config(resolved);
  manifest.set_seed(config.master_seed, source);
  manifest.set_threads(config.threads);

  spdlog::info("simulate: {} x {} sizes, seed {} ({})", config.replications, config.half_sizes.size(),
               config.master_seed, source);
  const ResultTable table = run_experiment(config);
  log_failures(table);

  emit_result_tables(manifest, table, config);
  manifest.emit("config.json", resolved.dump(2) + "\n");
  manifest.finish();
  return exit_code::kOk;
}

// compare-riskhull ---------------------------------------------------------------

int cmd_compare_riskhull(const CommonOptions& o) {
  const json doc = o.config.empty() ? json::object() : read_json_file(o.config);
  ExperimentConfig config;
  if (o.config.empty()) {
    config.selection_methods = {SelectionMethod::kBootstrap, SelectionMethod::kBootstrapCutoff,
                                SelectionMethod::kRiskHull};
    config.replications = 100;
  }
  const std::string source = resolve_experiment(o, config, doc);
  const bool has_boot = config.has(SelectionMethod::kBootstrap) || config.has(SelectionMethod::kBootstrapCutoff);
  if (!config.has(SelectionMethod::kRiskHull) || !has_boot) {
    throw ValidationError(
        "compare-riskhull needs two selectors: selection_methods must include risk_hull and bootstrap or "
        "bootstrap_cutoff");
  }
  const fs::path out = prepare_out_dir(o.out);

  Manifest manifest("compare-riskhull", out);
  const json resolved = to_json(config);
  manifest.set_config(resolved);
  manifest.set_seed(config.master_seed, source);
  manifest.set_threads(config.threads);

  spdlog::info("compare-riskhull: {} replications, seed {} ({})", config.replications, config.master_seed, source);
  const ResultTable table = run_experiment(config);
  log_failures(table);

  std::vector<SelectionMethod> order;
  for (auto m : {SelectionMethod::kBootstrap, SelectionMethod::kBootstrapCutoff, SelectionMethod::kRiskHull,
                 SelectionMethod::kIseOracle}) {
    if (config.has(m)) order.push_back(m);
  }
  emit_imse(manifest, table, order, "riskhull_imse.csv");
  if (config.has(SelectionMethod::kBootstrapCutoff)) {
    emit_log_ratios(manifest, table, true, "riskhull_log_ratio.csv");
  } else {
    spdlog::warn("bootstrap_cutoff not enabled; cut-off log ratios are not available");
  }
  emit_selections(manifest, table, "selections.csv");
  manifest.emit("config.json", resolved.dump(2) + "\n");

  const auto boot_method =
      config.has(SelectionMethod::kBootstrap) ? SelectionMethod::kBootstrap : SelectionMethod::kBootstrapCutoff;
  for (const auto& s : table.sizes) {
    const auto* b = s.method(boot_method);
    const auto* h = s.method(SelectionMethod::kRiskHull);
    spdlog::info("size {}: {} {:.4g}  risk_hull {:.4g}", 2 * s.n + 1, method_name(boot_method), b->imse, h->imse);
  }
  manifest.finish();
  return exit_code::kOk;
}

// estimate ---------------------------------------------------------------------

struct EstimateOptions {
  std::string data;
  double h = 0.0;
  CLI::Option* h_opt = nullptr;
  bool select = false;
  std::string distortion = "laplace";
  CLI::Option* distortion_opt = nullptr;
  double laplace_scale = 0.1;
  CLI::Option* scale_opt = nullptr;
  bool closed_form = false;
  std::string kernel = "flat";
  double flat_radius = 7.0;
  CLI::Option* flat_opt = nullptr;
  double decay = 6.0;
  CLI::Option* decay_opt = nullptr;
  double cutoff_radius = 1.0;
  double pilot_constant = 5.0;
  CLI::Option* pilot_opt = nullptr;
  int bootstrap_replications = 200;
  CLI::Option* boot_opt = nullptr;
  int grid_count = 100;
  CLI::Option* grid_opt = nullptr;
  int grid_points = 512;
};

int cmd_estimate(const CommonOptions& o, const EstimateOptions& e) {
  // A config file supplies defaults for the distortion, kernel, pilot, grid
  // and bootstrap; explicit flags win.
  ExperimentConfig base;
  bool seed_in_config = false;
  if (!o.config.empty()) {
    const json doc = read_json_file(o.config);
    base = parse_experiment_config(doc);
    seed_in_config = doc.contains("master_seed");
  }

  DistortionSpec distortion = base.distortion;
  if (e.distortion_opt->count() > 0 || e.scale_opt->count() > 0 || e.closed_form) {
    if (e.distortion == "laplace") {
      distortion = DistortionSpec::laplace(
          e.laplace_scale, e.closed_form ? CoefficientMode::kClosedForm : CoefficientMode::kQuadrature);
    } else if (e.distortion == "uniform") {
      if (e.closed_form || e.scale_opt->count() > 0) {
        throw ValidationError("--laplace-scale and --closed-form apply to the laplace distortion only");
      }
      distortion = DistortionSpec::uniform();
    } else {
      throw ValidationError("--distortion must be laplace or uniform");
    }
  }
  const double flat = e.flat_opt->count() > 0 ? e.flat_radius : base.kernel_flat_radius;
  const double decay = e.decay_opt->count() > 0 ? e.decay : base.kernel_decay_exponent;
  SmoothingKernelSpec kernel = SmoothingKernelSpec::paper_sim(flat, decay);
  if (e.kernel == "cutoff") {
    kernel = SmoothingKernelSpec::spectral_cutoff(e.cutoff_radius);
  } else if (e.kernel != "flat") {
    throw ValidationError("--kernel must be flat or cutoff");
  }
  const double pilot_constant = e.pilot_opt->count() > 0 ? e.pilot_constant : base.pilot_constant;
  BootstrapConfig boot = base.bootstrap;
  if (e.boot_opt->count() > 0) boot.replications = e.bootstrap_replications;
  GridSettings grid_settings = base.grid;
  if (e.grid_opt->count() > 0) grid_settings.count = e.grid_count;

  std::uint64_t seed = base.master_seed;
  std::string source = seed_in_config ? "config" : "entropy";
  if (o.seed_opt->count() > 0) {
    seed = o.seed;
    source = "flag";
  } else if (!seed_in_config) {
    seed = entropy_seed();
  }
  const unsigned threads = o.threads_opt->count() > 0 ? o.threads : base.threads;

  const Sample sample = read_sample_csv(e.data);
  const int n = sample.n();
  const DistortionOperator op(distortion, n);
  const fs::path out = prepare_out_dir(o.out);

  std::ifstream raw(e.data, std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(raw)), std::istreambuf_iterator<char>());

  json resolved = {
      {"data", e.data},
      {"data_sha256", sha256_hex(bytes)},
      {"grid", sample.grid().kind() == GridKind::kSimulation ? "simulation" : "model"},
      {"half_size", n},
      {"distortion", to_json(distortion)},
      {"kernel", kernel.name()},
      {"kernel_flat_radius", kernel.flat_radius()},
      {"evaluation_points", e.grid_points},
  };
  if (e.kernel == "flat") resolved["kernel_decay_exponent"] = decay;

  Manifest manifest("estimate", out);
  manifest.set_seed(seed, source);
  manifest.set_threads(threads);

  double h = e.h;
  if (e.select) {
    const double pilot_h = pilot_regularization(pilot_constant, n);
    const auto pilot = estimate_theta(sample, op, kernel, pilot_h);
    boot.rng_seed = seed;
    boot.threads = threads;
    SelectionResult sel;
    if (e.kernel == "cutoff") {
      std::vector<double> candidates;
      for (int m = n; m >= 0; --m) candidates.push_back(e.cutoff_radius * cutoff_regularization(m));
      sel = select_g_opt(sample, pilot, std::span<const double>(candidates), kernel, op, boot);
    } else {
      sel = select_g_opt(sample, pilot, grid_settings.for_size(n), kernel, op, boot);
    }
    h = sel.g_opt;
    resolved["selection"] = {{"pilot_constant", pilot_constant},
                             {"pilot_h", pilot_h},
                             {"bootstrap_replications", boot.replications},
                             {"common_random_numbers", boot.common_random_numbers},
                             {"candidates", sel.candidates.size()},
                             {"c_n", sel.c_n},
                             {"seed", seed}};
    manifest.extra("selected_h", sel.g_opt);
    manifest.extra("c_n", sel.c_n);
    CsvTable curve({"g", "imse_star", "standard_error"});
    for (std::size_t i = 0; i < sel.candidates.size(); ++i) {
      curve.row().add(sel.candidates[i]).add(sel.objective_curve[i]).add(sel.standard_errors[i]);
    }
    manifest.emit("objective.csv", curve);
    spdlog::info("bootstrap selected h = {:.6g} (pilot {:.6g}, c_n {:.4g})", h, pilot_h, sel.c_n);
  } else {
    resolved["h"] = h;
  }

  const auto estimate = estimate_theta(sample, op, kernel, h);
  const auto res = residuals(sample, estimate);
  const auto fitted = fitted_values(estimate, sample);

  std::vector<double> xs(static_cast<std::size_t>(e.grid_points));
  for (int i = 0; i < e.grid_points; ++i) xs[static_cast<std::size_t>(i)] = -0.5 + static_cast<double>(i) / (e.grid_points - 1);
  const auto values = evaluate_series(estimate.coefficients, xs);
  CsvTable est({"x", "theta_hat"});
  for (std::size_t i = 0; i < xs.size(); ++i) est.row().add(xs[i]).add(values[i]);
  manifest.emit("estimate.csv", est);

  CsvTable coef({"k", "re", "im"});
  for (int k = 0; k <= estimate.max_freq(); ++k) {
    coef.row().add(k).add(estimate.coefficients[k].real()).add(estimate.coefficients[k].imag());
  }
  manifest.emit("coefficients.csv", coef);

  CsvTable rtab({"x", "y", "fitted", "residual"});
  for (std::size_t j = 0; j < sample.size(); ++j) {
    rtab.row().add(sample.grid()[j]).add(sample.responses()[j]).add(fitted[j]).add(res.values[j]);
  }
  manifest.emit("residuals.csv", rtab);

  const Ecdf fhat = residual_ecdf(res);
  CsvTable ecdf({"t", "ecdf"});
  for (double t : fhat.sorted_values()) ecdf.row().add(t).add(fhat(t));
  manifest.emit("ecdf.csv", ecdf);

  manifest.extra("h", h);
  manifest.set_config(resolved);
  manifest.finish();
  return exit_code::kOk;
}

// selftest -----------------------------------------------------------------------

class Checks {
 public:
  void check(const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
    failed_ += ok ? 0 : 1;
  }
  int failed() const { return failed_; }

 private:
  int failed_ = 0;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

int cmd_selftest(const CommonOptions& o) {
  Checks c;
  const std::uint64_t seed = o.seed_opt->count() > 0 ? o.seed : 20240601;

  {
    const auto normal = ErrorModel::normal(2.0 / 3.0);
    const auto t4 = ErrorModel::student_t(4, 2.0 / 3.0);
    const double want_n[] = {0.001, 0.046, 0.091, 0.046, 0.001};
    const double want_t[] = {0.006, 0.036, 0.156, 0.036, 0.006};
    double dn = 0.0;
    double dt = 0.0;
    for (int i = 0; i < 5; ++i) {
      const double t = i - 2.0;
      dn = std::max(dn, std::abs(asymptotic_covariance(normal, t, t) - want_n[i]));
      dt = std::max(dt, std::abs(asymptotic_covariance(t4, t, t) - want_t[i]));
    }
    c.check("asymptotic-amse-normal", dn <= 5e-4, "max dev " + fmt(dn));
    c.check("asymptotic-amse-t4", dt <= 5e-4, "max dev " + fmt(dt));
    const double an = asymptotic_aimse(normal);
    const double at = asymptotic_aimse(t4);
    c.check("asymptotic-aimse-normal", std::abs(an - 0.188) <= 1e-3, fmt(an));
    c.check("asymptotic-aimse-t4", std::abs(at - 0.228) <= 1e-3, fmt(at));
  }
  {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    double worst = 0.0;
    for (int n = 1; n <= 8; ++n) {
      std::vector<double> y(2 * n + 1);
      for (auto& v : y) v = z(rng);
      const Sample s(DesignGrid(n, GridKind::kSimulation), y);
      worst = std::max(worst, parseval_l2_distance(empirical_fourier_coefficients(s, n),
                                                   empirical_fourier_coefficients_direct(s, n)));
    }
    c.check("fft-vs-direct", worst < 1e-26, "max sq dev " + fmt(worst));

    SpectralCoefficients a(6);
    for (int k = 0; k <= 6; ++k) {
      const Complex v(z(rng), k == 0 ? 0.0 : z(rng));
      a[k] = v;
      a[-k] = std::conj(v);
    }
    const double spectral = parseval_l2_distance(a, SpectralCoefficients(6));
    const double spatial =
        adaptive_simpson([&](double x) { return std::pow(evaluate_series(a, x), 2); }, -0.5, 0.5, 1e-12);
    c.check("parseval", std::abs(spectral - spatial) < 1e-8, fmt(std::abs(spectral - spatial)));
  }
  {
    const auto* wide = simd::avx2_kernels();
    if (wide == nullptr) {
      c.check("simd-equivalence", true, "scalar only");
    } else {
      std::mt19937_64 rng(seed + 1);
      std::normal_distribution<double> z;
      std::vector<Complex> v(37);
      std::vector<Complex> t(37);
      std::vector<double> w(37);
      for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = {z(rng), z(rng)};
        t[i] = {z(rng), z(rng)};
        w[i] = z(rng);
      }
      const auto& s = simd::scalar_kernels();
      const double d1 = std::abs(s.sq_distance(v.data(), t.data(), 37) - wide->sq_distance(v.data(), t.data(), 37));
      const double d2 = std::abs(s.weighted_energy(w.data(), v.data(), 37) - wide->weighted_energy(w.data(), v.data(), 37));
      c.check("simd-equivalence", d1 < 1e-12 && d2 < 1e-12, std::string(simd::isa_name(wide->isa)));
    }
  }
  {
    ExperimentConfig cfg;
    cfg.half_sizes = {25};
    cfg.replications = 4;
    cfg.bootstrap.replications = 20;
    cfg.grid.count = 20;
    cfg.master_seed = seed;
    cfg.threads = 1;
    const auto one = run_experiment(cfg);
    cfg.threads = 3;
    const auto three = run_experiment(cfg);
    const auto& a = one.sizes[0];
    const auto& b = three.sizes[0];
    bool same = a.aimse == b.aimse;
    for (std::size_t i = 0; i < a.imse.size(); ++i) same = same && a.imse[i].ise == b.imse[i].ise;
    c.check("deterministic-replay", same, "threads 1 vs 3");
  }

  std::cout << (c.failed() == 0 ? "selftest passed" : "selftest FAILED") << '\n';
  return c.failed() == 0 ? exit_code::kOk : exit_code::kNumerical;
}

}  // namespace

int run(int argc, const char* const* argv) {
  setup_logging();
  CLI::App app{"Fourier-series deconvolution regression with bootstrap regularization"};
  app.set_version_flag("--version", std::string(DECONV_VERSION));
  app.require_subcommand(1);

  // One set per subcommand: the option handles are what tell a given flag from its default.
  CommonOptions est_common;
  CommonOptions sim_common;
  CommonOptions cmp_common;
  CommonOptions self_common;
  EstimateOptions est;

  auto* estimate = app.add_subcommand("estimate", "estimate theta from x,y data");
  // `--h` is the regularization parameter, so help is long-form only here.
  estimate->set_help_flag("--help", "print this help message and exit");
  add_common(*estimate, est_common);
  estimate->add_option("--data", est.data, "CSV with header x,y")->required()->check(CLI::ExistingFile);
  est.h_opt = estimate->add_option("--h", est.h, "regularization parameter")->check(CLI::PositiveNumber);
  auto* select = estimate->add_flag("--select-bootstrap", est.select, "choose h by the smooth bootstrap");
  est.h_opt->excludes(select);
  est.distortion_opt = estimate->add_option("--distortion", est.distortion, "laplace | uniform");
  est.scale_opt = estimate->add_option("--laplace-scale", est.laplace_scale)->check(CLI::PositiveNumber);
  estimate->add_flag("--closed-form", est.closed_form, "closed-form Laplace coefficients");
  estimate->add_option("--kernel", est.kernel, "flat | cutoff")->capture_default_str();
  est.flat_opt = estimate->add_option("--flat-radius", est.flat_radius)->check(CLI::PositiveNumber);
  est.decay_opt = estimate->add_option("--decay", est.decay)->check(CLI::PositiveNumber);
  estimate->add_option("--cutoff-radius", est.cutoff_radius)->check(CLI::PositiveNumber);
  est.pilot_opt = estimate->add_option("--pilot-constant", est.pilot_constant)->check(CLI::PositiveNumber);
  est.boot_opt = estimate->add_option("--bootstrap-replications", est.bootstrap_replications)
                     ->check(CLI::PositiveNumber);
  est.grid_opt = estimate->add_option("--grid-count", est.grid_count)->check(CLI::Range(2, 100000));
  estimate->add_option("--points", est.grid_points, "evaluation grid size")
      ->capture_default_str()
      ->check(CLI::Range(2, 1 << 24));

  auto* simulate = app.add_subcommand("simulate", "run the simulation study");
  add_common(*simulate, sim_common);
  auto* compare = app.add_subcommand("compare-riskhull", "bootstrap vs risk hull cut-off selection");
  add_common(*compare, cmp_common);
  auto* selftest = app.add_subcommand("selftest", "quick numerical self-checks");
  add_common(*selftest, self_common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_code::kOk : exit_code::kValidation;
  }

  try {
    if (estimate->parsed()) {
      if (est.h_opt->count() == 0 && !est.select) {
        throw ValidationError("estimate needs --h <value> or --select-bootstrap");
      }
      return cmd_estimate(est_common, est);
    }
    if (simulate->parsed()) return cmd_simulate(sim_common);
    if (compare->parsed()) return cmd_compare_riskhull(cmp_common);
    if (selftest->parsed()) return cmd_selftest(self_common);
  } catch (const ValidationError& e) {
    spdlog::error("{}", e.what());
    return exit_code::kValidation;
  } catch (const NumericalError& e) {
    spdlog::error("numerical failure: {}", e.what());
    return exit_code::kNumerical;
  } catch (const std::exception& e) {
    spdlog::error("internal error: {}", e.what());
    return exit_code::kInternal;
  }
  return exit_code::kInternal;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"deconv"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace deconv::cli

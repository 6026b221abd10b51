#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "deconv/cli.hpp"
#include "deconv/error.hpp"

namespace deconv::cli {

using nlohmann::json;

namespace {

// Walks one JSON object, remembering which keys were consumed so leftovers
// can be reported.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ValidationError(where() + " must be an object");
  }

  bool has(const std::string& key) {
    if (!node_.contains(key)) return false;
    seen_.insert(key);
    return !node_.at(key).is_null();
  }

  const json& at(const std::string& key) {
    seen_.insert(key);
    return node_.at(key);
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <class T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    out = convert<T>(at(key), child(key));
  }

  template <class T>
  void read(const std::string& key, std::optional<T>& out) {
    if (!node_.contains(key)) return;
    seen_.insert(key);
    if (node_.at(key).is_null()) {
      out.reset();
    } else {
      out = convert<T>(at(key), child(key));
    }
  }

  template <class T>
  static T convert(const json& value, const std::string& path) {
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!value.is_number()) throw ValidationError(path + " must be a number");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!value.is_number_integer()) throw ValidationError(path + " must be an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (value.is_number_integer() && !value.is_number_unsigned() && value.get<long long>() < 0) {
            throw ValidationError(path + " must be non-negative");
          }
        }
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!value.is_boolean()) throw ValidationError(path + " must be true or false");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!value.is_string()) throw ValidationError(path + " must be a string");
      }
      return value.get<T>();
    } catch (const json::exception& e) {
      throw ValidationError(path + ": " + e.what());
    }
  }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.count(key)) throw ValidationError("unknown config key '" + child(key) + "'");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class T>
std::vector<T> read_list(const json& value, const std::string& path) {
  if (!value.is_array()) throw ValidationError(path + " must be a list");
  std::vector<T> out;
  for (std::size_t i = 0; i < value.size(); ++i) {
    out.push_back(Reader::convert<T>(value[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

SignalSpec parse_signal(const json& node, const std::string& path) {
  if (node.is_string()) {
    const auto name = node.get<std::string>();
    if (name == "theta1") return SignalSpec{Theta1{}};
    if (name == "theta2") return SignalSpec{Theta2{}};
    throw ValidationError(path + ": unknown signal '" + name + "'");
  }
  Reader r(node, path);
  std::string kind;
  r.read("kind", kind);
  if (kind != "custom") {
    throw ValidationError(path + ".kind must be \"custom\" (or give \"theta1\"/\"theta2\" directly)");
  }
  if (!r.has("coefficients")) throw ValidationError(path + ".coefficients is required");
  const json& list = r.at("coefficients");
  if (!list.is_array() || list.empty()) throw ValidationError(path + ".coefficients must be a non-empty list");
  std::vector<Complex> half;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const auto pair = read_list<double>(list[k], r.child("coefficients") + "[" + std::to_string(k) + "]");
    if (pair.size() != 2) throw ValidationError(path + ".coefficients entries are [re, im] pairs");
    half.emplace_back(pair[0], pair[1]);
  }
  if (half[0].imag() != 0.0) throw ValidationError(path + ".coefficients[0] must be real");
  r.finish();
  return SignalSpec{CustomSignal{SpectralCoefficients::from_half(half)}};
}

json signal_json(const SignalSpec& spec) {
  if (const auto* custom = std::get_if<CustomSignal>(&spec.kind)) {
    json list = json::array();
    for (const auto& c : custom->coefficients.nonnegative()) list.push_back({c.real(), c.imag()});
    return {{"kind", "custom"}, {"coefficients", list}};
  }
  return spec.name();
}

ErrorModel parse_error_model(const json& node, const std::string& path) {
  Reader r(node, path);
  std::string kind = "normal";
  double sd = 2.0 / 3.0;
  int df = 4;
  r.read("kind", kind);
  r.read("sd", sd);
  if (kind == "normal") {
    r.finish();
    if (!(sd >= 0.0)) throw ValidationError(path + ".sd must be non-negative");
    return ErrorModel::normal(sd);
  }
  if (kind == "student_t") {
    r.read("df", df);
    r.finish();
    if (df <= 2) throw ValidationError(path + ".df must exceed 2");
    if (!(sd > 0.0)) throw ValidationError(path + ".sd must be positive");
    return ErrorModel::student_t(df, sd);
  }
  throw ValidationError(path + ".kind must be \"normal\" or \"student_t\"");
}

json error_model_json(const ErrorModel& model) {
  if (const auto* t = std::get_if<StudentTErrors>(&model.kind())) {
    return {{"kind", "student_t"}, {"df", t->df}, {"sd", t->sd}};
  }
  return {{"kind", "normal"}, {"sd", model.sd()}};
}

DistortionSpec parse_distortion(const json& node, const std::string& path) {
  Reader r(node, path);
  std::string kind = "laplace";
  r.read("kind", kind);
  DistortionSpec spec;
  if (kind == "laplace") {
    double scale = 0.1;
    std::string coefficients = "quadrature";
    r.read("scale", scale);
    r.read("coefficients", coefficients);
    if (!(scale > 0.0)) throw ValidationError(path + ".scale must be positive");
    CoefficientMode mode;
    if (coefficients == "quadrature") {
      mode = CoefficientMode::kQuadrature;
    } else if (coefficients == "closed_form") {
      mode = CoefficientMode::kClosedForm;
    } else {
      throw ValidationError(path + ".coefficients must be \"quadrature\" or \"closed_form\"");
    }
    spec = DistortionSpec::laplace(scale, mode);
  } else if (kind == "uniform") {
    spec = DistortionSpec::uniform();
  } else {
    throw ValidationError(path + ".kind must be \"laplace\" or \"uniform\"");
  }
  r.read("ill_posedness_b", spec.ill_posedness_b);
  r.read("gamma_threshold", spec.gamma_threshold);
  r.read("c_psi_lower", spec.c_psi_lower);
  r.read("c_psi_upper", spec.c_psi_upper);
  r.finish();
  return spec;
}

}  // namespace

json to_json(const DistortionSpec& spec) {
  json out;
  if (const auto* laplace = std::get_if<LaplaceTruncated>(&spec.kind)) {
    out["kind"] = "laplace";
    out["scale"] = laplace->scale;
    out["coefficients"] = spec.mode == CoefficientMode::kClosedForm ? "closed_form" : "quadrature";
  } else if (std::holds_alternative<UniformDensity>(spec.kind)) {
    out["kind"] = "uniform";
  } else {
    throw ValidationError("custom distortion densities cannot be serialized");
  }
  out["ill_posedness_b"] = spec.ill_posedness_b;
  out["gamma_threshold"] = spec.gamma_threshold;
  out["c_psi_lower"] = spec.c_psi_lower;
  out["c_psi_upper"] = spec.c_psi_upper;
  return out;
}

namespace {

RiskHullPenalty parse_penalty(const json& node, const std::string& path) {
  Reader r(node, path);
  std::string kind = "monte_carlo";
  r.read("kind", kind);
  if (kind == "monte_carlo") {
    MonteCarloPenalty p;
    r.read("draws", p.draws);
    r.finish();
    if (p.draws < 1) throw ValidationError(path + ".draws must be positive");
    return p;
  }
  if (kind == "approximate_scaled") {
    ApproximateScaledPenalty p;
    r.read("scale", p.scale);
    r.finish();
    return p;
  }
  if (kind == "none") {
    r.finish();
    return NoPenalty{};
  }
  throw ValidationError(path + ".kind must be \"monte_carlo\", \"approximate_scaled\" or \"none\"");
}

json penalty_json(const RiskHullPenalty& penalty) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MonteCarloPenalty>) {
          return {{"kind", "monte_carlo"}, {"draws", p.draws}};
        } else if constexpr (std::is_same_v<T, ApproximateScaledPenalty>) {
          return {{"kind", "approximate_scaled"}, {"scale", p.scale}};
        } else {
          return {{"kind", "none"}};
        }
      },
      penalty);
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

ExperimentConfig parse_experiment_config(const json& doc) {
  ExperimentConfig config;
  Reader r(doc, "");

  if (r.has("signal")) config.signal = parse_signal(r.at("signal"), "signal");
  if (r.has("error_model")) config.error_model = parse_error_model(r.at("error_model"), "error_model");
  if (r.has("half_sizes")) config.half_sizes = read_list<int>(r.at("half_sizes"), "half_sizes");
  r.read("pilot_constant", config.pilot_constant);
  if (r.has("grid")) {
    Reader g(r.at("grid"), "grid");
    g.read("count", config.grid.count);
    g.read("lower", config.grid.lower);
    g.read("upper", config.grid.upper);
    g.finish();
  }
  if (r.has("bootstrap")) {
    Reader b(r.at("bootstrap"), "bootstrap");
    b.read("replications", config.bootstrap.replications);
    b.read("c_n", config.bootstrap.scaling_c_n);
    b.read("common_random_numbers", config.bootstrap.common_random_numbers);
    b.finish();
  }
  r.read("replications", config.replications);
  if (r.has("selection_methods")) {
    config.selection_methods.clear();
    for (const auto& name : read_list<std::string>(r.at("selection_methods"), "selection_methods")) {
      const auto m = parse_method(name);
      if (config.has(m)) throw ValidationError("selection method '" + name + "' listed twice");
      config.selection_methods.push_back(m);
    }
  }
  r.read("master_seed", config.master_seed);
  if (r.has("distortion")) config.distortion = parse_distortion(r.at("distortion"), "distortion");
  if (r.has("kernel")) {
    Reader k(r.at("kernel"), "kernel");
    k.read("flat_radius", config.kernel_flat_radius);
    k.read("decay_exponent", config.kernel_decay_exponent);
    k.finish();
  }
  if (r.has("risk_hull")) {
    Reader h(r.at("risk_hull"), "risk_hull");
    h.read("alpha", config.risk_hull.alpha);
    if (h.has("penalty")) config.risk_hull.penalty = parse_penalty(h.at("penalty"), "risk_hull.penalty");
    h.read("max_cutoff", config.risk_hull.max_cutoff);
    h.finish();
  }
  r.read("truth_multiplier", config.truth_multiplier);
  r.read("threads", config.threads);
  if (r.has("ecdf_points")) config.ecdf_points = read_list<double>(r.at("ecdf_points"), "ecdf_points");
  r.finish();

  if (!(config.kernel_flat_radius > 0.0)) throw ValidationError("kernel.flat_radius must be positive");
  if (!(config.kernel_decay_exponent > 0.0)) throw ValidationError("kernel.decay_exponent must be positive");
  if (config.threads < 1) throw ValidationError("threads must be >= 1");
  config.validate();
  return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_experiment_config(doc);
}

json to_json(const ExperimentConfig& c) {
  json methods = json::array();
  for (auto m : c.selection_methods) methods.push_back(method_name(m));
  return {
      {"signal", signal_json(c.signal)},
      {"error_model", error_model_json(c.error_model)},
      {"half_sizes", c.half_sizes},
      {"pilot_constant", c.pilot_constant},
      {"grid", {{"count", c.grid.count}, {"lower", optional_json(c.grid.lower)}, {"upper", optional_json(c.grid.upper)}}},
      {"bootstrap",
       {{"replications", c.bootstrap.replications},
        {"c_n", optional_json(c.bootstrap.scaling_c_n)},
        {"common_random_numbers", c.bootstrap.common_random_numbers}}},
      {"replications", c.replications},
      {"selection_methods", methods},
      {"master_seed", c.master_seed},
      {"distortion", to_json(c.distortion)},
      {"kernel", {{"flat_radius", c.kernel_flat_radius}, {"decay_exponent", c.kernel_decay_exponent}}},
      {"risk_hull",
       {{"alpha", c.risk_hull.alpha},
        {"penalty", penalty_json(c.risk_hull.penalty)},
        {"max_cutoff", optional_json(c.risk_hull.max_cutoff)}}},
      {"truth_multiplier", c.truth_multiplier},
      {"threads", c.threads},
      {"ecdf_points", c.ecdf_points},
  };
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string config_hash(const json& resolved) {
  json copy = resolved;
  copy.erase("threads");
  return sha256_hex(copy.dump());
}

}  // namespace deconv::cli

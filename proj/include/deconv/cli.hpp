#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "deconv/sim.hpp"

namespace deconv::cli {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kInternal = 1;
inline constexpr int kValidation = 2;
inline constexpr int kNumerical = 3;
}  // namespace exit_code

// Config ---------------------------------------------------------------------

/// Strict reader: unknown keys and wrong types raise ValidationError naming
/// the offending path. Missing keys keep the ExperimentConfig defaults.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Fully resolved form; parse_experiment_config(to_json(c)) reproduces c.
nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json to_json(const DistortionSpec& spec);

std::string sha256_hex(std::string_view bytes);

/// SHA-256 of the canonical resolved config with `threads` removed.
std::string config_hash(const nlohmann::json& resolved);

// CSV ------------------------------------------------------------------------

/// 17 significant digits, so every value round-trips.
std::string format_double(double v);

/// Reads `x,y` data. Enforces the header, an odd row count, x strictly
/// increasing inside [-1/2, 1/2] and a supported design grid.
Sample read_sample_csv(const std::filesystem::path& path);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& row();
  CsvTable& add(double v);
  CsvTable& add(long long v);
  CsvTable& add(int v) { return add(static_cast<long long>(v)); }
  CsvTable& add(std::string v);

  std::size_t rows() const { return rows_.size(); }
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_text(const std::filesystem::path& path, std::string_view text);

// Commands -------------------------------------------------------------------

/// Entry point shared by the executable and the tests. Returns the exit code.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace deconv::cli

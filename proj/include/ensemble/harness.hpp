#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ensemble/generators.hpp"
#include "ensemble/serialization.hpp"

namespace ens {

constexpr int kConfigVersion = 1;

/// Every knob a preset reads. Presets fill in defaults; a config document overrides them.
struct PresetParams {
  Index n = 400;
  Index d = 2;
  DesignScheme design = DesignScheme::LhsMidpoint;
  std::string label_model = "pure_noise:0.8";
  std::string noise = "exact:80";
  int iterations = 100;
  int depth = 8;
  int trees = 500;
  std::optional<int> m_try;
  int grid = 400;
  int trial_grid = 200;
  Index holdout = 10000;
  int repetitions = 1;
  int trials = 10;
  int block_size = 100;
  double neighbor_distance = 0.1;
  int theorem_n_max = 10;
  std::vector<std::string> theorem_p{"3/5", "3/4", "9/10"};
  bool write_models = true;
};

struct ExperimentConfig {
  int version = kConfigVersion;
  std::string preset;
  std::uint64_t seed = 20240601;
  int jobs = 1;
  bool paper_scale = false;
  std::optional<std::filesystem::path> output_dir;
  /// Parameter overrides by name, applied on top of the preset defaults.
  Json overrides = Json::object();
};

/// Flat document: version, preset, seed, jobs, paper_scale, output_dir and any
/// PresetParams field by name. Unknown keys are rejected.
ExperimentConfig parse_config(const Json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
Json config_to_json(const ExperimentConfig& config);

std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
PresetParams preset_defaults(const std::string& name, bool paper_scale);
PresetParams resolve_params(const ExperimentConfig& config);
Json params_to_json(const PresetParams& params);

/// Output root: explicit value, else $ENSEMBLE_OUTPUT_DIR, else "runs".
std::filesystem::path resolve_output_root(const std::optional<std::filesystem::path>& explicit_dir);

std::string sha256_hex(const std::string& bytes);

/// Writes files under one directory and records their hashes for the manifest.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  void write(const std::string& relative, const std::string& content);
  void write_json(const std::string& relative, const Json& doc);
  /// manifest.json: resolved config plus path, size and SHA-256 of every file written.
  void write_manifest(const Json& config);

  struct Entry {
    std::string path;
    std::uintmax_t bytes = 0;
    std::string sha256;
  };
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::filesystem::path root_;
  std::vector<Entry> entries_;
};

struct RunResult {
  std::string preset;
  std::filesystem::path directory;
  Json summary;
  /// Only theorem-a can fail; the other presets report measurements.
  bool passed = true;
  std::string headline;
};

/// Runs the preset into <root>/<preset>/ and writes summary.json and manifest.json.
RunResult run_experiment(const ExperimentConfig& config);

/// Small CSV builder with deterministic number formatting.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& cell(const std::string& v);
  CsvWriter& cell(const char* v) { return cell(std::string(v)); }
  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(bool v) { return cell(std::string(v ? "true" : "false")); }
  void end_row();
  std::string str() const;

 private:
  std::size_t columns_;
  std::size_t filled_ = 0;
  std::string text_;
};

/// First iteration m from which the training error stays at zero through the
/// last entry; nullopt if the final error is not zero.
std::optional<int> interpolation_iteration(const std::vector<double>& training_error);

}  // namespace ens

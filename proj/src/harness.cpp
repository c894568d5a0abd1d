#include "ensemble/harness.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

#include <openssl/evp.h>

#include "presets.hpp"

namespace ens {

namespace {

const std::vector<std::string> kPresets{"noise2d",     "rf-votes",   "circle",   "noise20d", "decompose20d",
                                        "localize20d", "signal5d",   "stumps5d", "theorem-a"};

template <typename T>
T get_checked(const Json& doc, const std::string& key) {
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidInput("config key '" + key + "' has the wrong type");
  }
}

DesignScheme parse_design(const std::string& s) {
  if (s == "lhs" || s == "lhs_midpoint") return DesignScheme::LhsMidpoint;
  if (s == "iid" || s == "iid_uniform") return DesignScheme::IidUniform;
  throw InvalidInput("unknown design '" + s + "' (expected lhs or iid)");
}

std::string design_name(DesignScheme s) { return s == DesignScheme::LhsMidpoint ? "lhs" : "iid"; }

void apply_override(PresetParams& p, const std::string& key, const Json& v) {
  auto as_int = [&](int lo) {
    if (!v.is_number_integer()) throw InvalidInput("config key '" + key + "' must be an integer");
    const auto x = v.get<long long>();
    if (x < lo) throw InvalidInput("config key '" + key + "' must be >= " + std::to_string(lo));
    return x;
  };
  if (key == "n") {
    p.n = as_int(1);
  } else if (key == "d") {
    p.d = as_int(1);
  } else if (key == "design") {
    p.design = parse_design(v.get<std::string>());
  } else if (key == "label_model") {
    p.label_model = v.get<std::string>();
  } else if (key == "noise") {
    p.noise = v.get<std::string>();
  } else if (key == "iterations") {
    p.iterations = static_cast<int>(as_int(1));
  } else if (key == "depth") {
    p.depth = static_cast<int>(as_int(1));
  } else if (key == "trees") {
    p.trees = static_cast<int>(as_int(0));
  } else if (key == "m_try") {
    if (v.is_null()) {
      p.m_try.reset();
    } else {
      p.m_try = static_cast<int>(as_int(1));
    }
  } else if (key == "grid") {
    p.grid = static_cast<int>(as_int(1));
  } else if (key == "trial_grid") {
    p.trial_grid = static_cast<int>(as_int(1));
  } else if (key == "holdout") {
    p.holdout = as_int(1);
  } else if (key == "repetitions") {
    p.repetitions = static_cast<int>(as_int(1));
  } else if (key == "trials") {
    p.trials = static_cast<int>(as_int(0));
  } else if (key == "block_size") {
    p.block_size = static_cast<int>(as_int(1));
  } else if (key == "neighbor_distance") {
    if (!v.is_number()) throw InvalidInput("config key 'neighbor_distance' must be a number");
    p.neighbor_distance = v.get<double>();
  } else if (key == "theorem_n_max") {
    p.theorem_n_max = static_cast<int>(as_int(1));
  } else if (key == "theorem_p") {
    p.theorem_p = v.get<std::vector<std::string>>();
  } else if (key == "write_models") {
    if (!v.is_boolean()) throw InvalidInput("config key 'write_models' must be a boolean");
    p.write_models = v.get<bool>();
  } else {
    throw InvalidInput("unknown config key '" + key + "'");
  }
}

const std::set<std::string> kParamKeys{"n",          "d",           "design",      "label_model",       "noise",
                                       "iterations", "depth",       "trees",       "m_try",             "grid",
                                       "trial_grid", "holdout",     "repetitions", "trials",            "block_size",
                                       "neighbor_distance",         "theorem_n_max", "theorem_p",       "write_models"};

}  // namespace

std::vector<std::string> preset_names() { return kPresets; }

bool is_preset(const std::string& name) { return std::find(kPresets.begin(), kPresets.end(), name) != kPresets.end(); }

PresetParams preset_defaults(const std::string& name, bool paper_scale) {
  if (!is_preset(name)) throw InvalidInput("unknown preset '" + name + "'");
  PresetParams p;
  if (name == "noise2d") {
    p.write_models = true;
  } else if (name == "rf-votes") {
    p.trees = 6;
    p.grid = 200;
    p.trials = 0;
  } else if (name == "circle") {
    p.n = 1000;
    p.label_model = "circle";
    p.noise = "model";
    p.iterations = 500;
  } else if (name == "noise20d" || name == "decompose20d" || name == "localize20d") {
    p.n = 5000;
    p.d = 20;
    p.noise = "exact:1000";
    p.iterations = paper_scale ? 1000 : 300;
    p.holdout = paper_scale ? 10000 : 5000;
    p.trials = 0;
    p.trees = name == "noise20d" ? 500 : 0;
  } else if (name == "signal5d" || name == "stumps5d") {
    p.n = 400;
    p.d = 5;
    p.design = DesignScheme::IidUniform;
    p.label_model = "additive5d";
    p.noise = "model";
    p.holdout = 10000;
    p.trees = 0;
    if (name == "signal5d") {
      p.iterations = 100;
      p.block_size = 10;
      p.repetitions = paper_scale ? 200 : 20;
      p.trials = 0;
    } else {
      p.iterations = 250;
      p.trials = 10;
    }
  } else if (name == "theorem-a") {
    p.trials = 0;
    p.trees = 0;
  }
  return p;
}

ExperimentConfig parse_config(const Json& doc) {
  if (!doc.is_object()) throw InvalidInput("config must be a JSON object");
  ExperimentConfig c;
  for (const auto& [key, value] : doc.items()) {
    if (key == "version") {
      c.version = get_checked<int>(doc, key);
      if (c.version != kConfigVersion) throw InvalidInput("unsupported config version " + std::to_string(c.version));
    } else if (key == "preset") {
      c.preset = get_checked<std::string>(doc, key);
    } else if (key == "seed") {
      c.seed = get_checked<std::uint64_t>(doc, key);
    } else if (key == "jobs") {
      c.jobs = get_checked<int>(doc, key);
      if (c.jobs < 1) throw InvalidInput("jobs must be >= 1");
    } else if (key == "paper_scale") {
      c.paper_scale = get_checked<bool>(doc, key);
    } else if (key == "output_dir") {
      c.output_dir = get_checked<std::string>(doc, key);
    } else if (kParamKeys.count(key)) {
      c.overrides[key] = value;
    } else {
      throw InvalidInput("unknown config key '" + key + "'");
    }
  }
  if (!doc.contains("version")) throw InvalidInput("config must state its version");
  if (!is_preset(c.preset)) throw InvalidInput("config names unknown preset '" + c.preset + "'");
  resolve_params(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  Json doc;
  try {
    doc = Json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

Json config_to_json(const ExperimentConfig& c) {
  Json doc{{"version", c.version}, {"preset", c.preset}, {"seed", c.seed}, {"jobs", c.jobs}, {"paper_scale", c.paper_scale}};
  if (c.output_dir) doc["output_dir"] = c.output_dir->string();
  for (const auto& [k, v] : c.overrides.items()) doc[k] = v;
  return doc;
}

PresetParams resolve_params(const ExperimentConfig& config) {
  PresetParams p = preset_defaults(config.preset, config.paper_scale);
  for (const auto& [key, value] : config.overrides.items()) {
    try {
      apply_override(p, key, value);
    } catch (const nlohmann::json::exception&) {
      throw InvalidInput("config key '" + key + "' has the wrong type");
    }
  }
  LabelModel::parse(p.label_model);
  NoiseSpec::parse(p.noise);
  if (p.neighbor_distance <= 0.0) throw InvalidInput("neighbor_distance must be positive");
  return p;
}

Json params_to_json(const PresetParams& p) {
  Json doc{{"n", p.n},
           {"d", p.d},
           {"design", design_name(p.design)},
           {"label_model", LabelModel::parse(p.label_model).to_string()},
           {"noise", p.noise},
           {"iterations", p.iterations},
           {"depth", p.depth},
           {"trees", p.trees}};
  doc["m_try"] = p.m_try ? Json(*p.m_try) : Json(nullptr);
  doc["grid"] = p.grid;
  doc["trial_grid"] = p.trial_grid;
  doc["holdout"] = p.holdout;
  doc["repetitions"] = p.repetitions;
  doc["trials"] = p.trials;
  doc["block_size"] = p.block_size;
  doc["neighbor_distance"] = p.neighbor_distance;
  doc["theorem_n_max"] = p.theorem_n_max;
  doc["theorem_p"] = p.theorem_p;
  doc["write_models"] = p.write_models;
  return doc;
}

std::filesystem::path resolve_output_root(const std::optional<std::filesystem::path>& explicit_dir) {
  if (explicit_dir) return *explicit_dir;
  if (const char* env = std::getenv("ENSEMBLE_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
  return "runs";
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 15];
  }
  return out;
}

ArtifactWriter::ArtifactWriter(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec || !std::filesystem::is_directory(root_)) {
    throw std::runtime_error("cannot create output directory " + root_.string());
  }
}

void ArtifactWriter::write(const std::string& relative, const std::string& content) {
  write_text_file(root_ / relative, content);
  entries_.push_back({relative, content.size(), sha256_hex(content)});
}

void ArtifactWriter::write_json(const std::string& relative, const Json& doc) { write(relative, doc.dump(2) + "\n"); }

void ArtifactWriter::write_manifest(const Json& config) {
  Json files = Json::array();
  for (const auto& e : entries_) files.push_back(Json{{"path", e.path}, {"bytes", e.bytes}, {"sha256", e.sha256}});
  const Json doc{{"format", "ensemble-manifest"}, {"version", 1}, {"config", config}, {"files", std::move(files)}};
  write_text_file(root_ / "manifest.json", doc.dump(2) + "\n");
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
  text_ += '\n';
}

CsvWriter& CsvWriter::cell(const std::string& v) {
  if (filled_ == columns_) throw std::logic_error("too many CSV cells in row");
  text_ += (filled_++ ? "," : "") + v;
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }
CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }

void CsvWriter::end_row() {
  if (filled_ != columns_) throw std::logic_error("CSV row has the wrong number of cells");
  text_ += '\n';
  filled_ = 0;
}

std::string CsvWriter::str() const { return text_; }

std::optional<int> interpolation_iteration(const std::vector<double>& training_error) {
  if (training_error.empty() || training_error.back() != 0.0) return std::nullopt;
  int m = static_cast<int>(training_error.size());
  while (m > 1 && training_error[static_cast<std::size_t>(m) - 2] == 0.0) --m;
  return m;
}

RunResult run_experiment(const ExperimentConfig& config) {
  const PresetParams params = resolve_params(config);
  RunResult result;
  result.preset = config.preset;
  result.directory = resolve_output_root(config.output_dir) / config.preset;
  ArtifactWriter writer(result.directory);
  const PresetContext ctx{params, config.seed, config.jobs, writer};
  result.summary = detail::dispatch_preset(config.preset, ctx, result);
  writer.write_json("summary.json", result.summary);
  Json resolved = config_to_json(config);
  resolved.erase("output_dir");
  resolved.erase("jobs");
  resolved["params"] = params_to_json(params);
  writer.write_manifest(resolved);
  return result;
}

}  // namespace ens

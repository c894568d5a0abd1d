#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "ensemble/baselines.hpp"
#include "ensemble/data_model.hpp"

namespace ens {

using Json = nlohmann::ordered_json;

constexpr int kModelFormatVersion = 1;

using AnyModel = std::variant<DecisionTree, BoostModel, ForestModel, OneNearestNeighbor>;

/// "tree", "boost", "forest" or "onenn".
std::string model_kind(const AnyModel& model);

/// Versioned document; trees are nested {feature, threshold, left, right} / {label} records.
Json model_to_json(const AnyModel& model);
AnyModel model_from_json(const Json& doc);

Json tree_to_json(const DecisionTree& tree);
DecisionTree tree_from_json(const Json& node, Index input_dim);

void save_model(const AnyModel& model, const std::filesystem::path& path);
AnyModel load_model(const std::filesystem::path& path);

/// Header x1..xd,label[,weight]; one row per point.
void write_dataset_csv(const LabeledDataset& data, std::ostream& out);
/// Malformed input is reported as InvalidInput naming the offending line.
LabeledDataset read_dataset_csv(std::istream& in);
void save_dataset(const LabeledDataset& data, const std::filesystem::path& path);
LabeledDataset load_dataset(const std::filesystem::path& path);

/// Points only: header x1..xd.
void write_points_csv(const Matrix& points, std::ostream& out);
Matrix read_points_csv(std::istream& in);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Writes text to path, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace ens

#include "ensemble/serialization.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace ens {

namespace {

constexpr const char* kFormatName = "ensemble-model";

Json dataset_to_json(const LabeledDataset& data) {
  Json rows = Json::array();
  for (Index i = 0; i < data.size(); ++i) {
    Json r = Json::array();
    for (Index j = 0; j < data.dim(); ++j) r.push_back(data.features()(i, j));
    rows.push_back(std::move(r));
  }
  Json labels = Json::array();
  for (Index i = 0; i < data.size(); ++i) labels.push_back(data.label(i));
  return Json{{"features", std::move(rows)}, {"labels", std::move(labels)}};
}

LabeledDataset dataset_from_json(const Json& doc) {
  const auto& rows = doc.at("features");
  const auto& labels = doc.at("labels");
  if (!rows.is_array() || rows.empty() || rows.size() != labels.size()) {
    throw InvalidInput("stored dataset must have matching non-empty features and labels");
  }
  const auto n = static_cast<Index>(rows.size());
  const auto d = static_cast<Index>(rows.at(0).size());
  Matrix x(n, d);
  LabelVector y(n);
  for (Index i = 0; i < n; ++i) {
    const auto& r = rows.at(static_cast<std::size_t>(i));
    if (static_cast<Index>(r.size()) != d) throw InvalidInput("ragged feature rows in stored dataset");
    for (Index j = 0; j < d; ++j) x(i, j) = r.at(static_cast<std::size_t>(j)).get<double>();
    y(i) = labels.at(static_cast<std::size_t>(i)).get<int>();
  }
  return LabeledDataset(std::move(x), std::move(y));
}

void emit_node(const std::vector<DecisionTree::Node>& nodes, int id, Json& out) {
  const auto& node = nodes[static_cast<std::size_t>(id)];
  if (node.is_leaf()) {
    out = Json{{"label", node.label}};
    return;
  }
  out = Json{{"feature", node.rule.feature}, {"threshold", node.rule.threshold}};
  emit_node(nodes, node.left, out["left"]);
  emit_node(nodes, node.right, out["right"]);
}

int parse_node(const Json& rec, std::vector<DecisionTree::Node>& nodes) {
  if (!rec.is_object()) throw InvalidInput("tree node must be an object");
  const int id = static_cast<int>(nodes.size());
  nodes.emplace_back();
  if (rec.contains("label")) {
    const int label = rec.at("label").get<int>();
    if (!is_label(label)) throw InvalidInput("leaf label must be -1 or +1");
    nodes[static_cast<std::size_t>(id)].label = label;
    return id;
  }
  const SplitRule rule{rec.at("feature").get<int>(), rec.at("threshold").get<double>()};
  const int left = parse_node(rec.at("left"), nodes);
  const int right = parse_node(rec.at("right"), nodes);
  auto& node = nodes[static_cast<std::size_t>(id)];
  node.rule = rule;
  node.left = left;
  node.right = right;
  return id;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double parse_real(const std::string& text, std::size_t line) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* first = t.data();
  if (!t.empty() && t.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw InvalidInput("line " + std::to_string(line) + ": '" + t + "' is not a number");
  }
  return v;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    for (auto& f : fields) f = trim(f);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw InvalidInput("line " + std::to_string(number) + ": expected " + std::to_string(t.header.size()) +
                         " columns, found " + std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(number);
  }
  if (t.header.empty()) throw InvalidInput("line 1: missing header row");
  return t;
}

Index feature_columns(const std::vector<std::string>& header) {
  Index d = 0;
  while (d < static_cast<Index>(header.size()) && header[static_cast<std::size_t>(d)] == "x" + std::to_string(d + 1)) ++d;
  return d;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw InvalidInput("could not format number");
  return std::string(buf, ptr);
}

std::string model_kind(const AnyModel& model) {
  switch (model.index()) {
    case 0:
      return "tree";
    case 1:
      return "boost";
    case 2:
      return "forest";
    default:
      return "onenn";
  }
}

Json tree_to_json(const DecisionTree& tree) {
  Json out;
  emit_node(tree.nodes(), 0, out);
  return out;
}

DecisionTree tree_from_json(const Json& node, Index input_dim) {
  std::vector<DecisionTree::Node> nodes;
  parse_node(node, nodes);
  return DecisionTree(std::move(nodes), input_dim);
}

Json model_to_json(const AnyModel& model) {
  Json doc{{"format", kFormatName}, {"version", kModelFormatVersion}, {"kind", model_kind(model)}};
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DecisionTree>) {
          doc["input_dim"] = m.input_dim();
          doc["tree"] = tree_to_json(m);
        } else if constexpr (std::is_same_v<T, BoostModel>) {
          doc["input_dim"] = m.input_dim();
          Json stages = Json::array();
          for (const auto& s : m.stages()) stages.push_back(Json{{"alpha", s.alpha}, {"tree", tree_to_json(s.tree)}});
          doc["stages"] = std::move(stages);
        } else if constexpr (std::is_same_v<T, ForestModel>) {
          doc["input_dim"] = m.input_dim();
          doc["m_try"] = m.m_try();
          doc["training_size"] = m.training_size();
          Json trees = Json::array();
          for (int b = 0; b < m.size(); ++b) {
            const auto ub = static_cast<std::size_t>(b);
            trees.push_back(Json{{"seed", m.tree_seeds()[ub]},
                                 {"bootstrap", m.bootstrap_indices()[ub]},
                                 {"tree", tree_to_json(m.trees()[ub])}});
          }
          doc["trees"] = std::move(trees);
        } else {
          doc["training"] = dataset_to_json(m.data());
        }
      },
      model);
  return doc;
}

AnyModel model_from_json(const Json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kFormatName) throw InvalidInput("not an ensemble model document");
    const int version = doc.at("version").get<int>();
    if (version != kModelFormatVersion) throw InvalidInput("unsupported model version " + std::to_string(version));
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "tree") return tree_from_json(doc.at("tree"), doc.at("input_dim").get<Index>());
    if (kind == "boost") {
      const Index d = doc.at("input_dim").get<Index>();
      std::vector<BoostStage> stages;
      for (const auto& s : doc.at("stages")) stages.push_back({s.at("alpha").get<double>(), tree_from_json(s.at("tree"), d)});
      return BoostModel(std::move(stages));
    }
    if (kind == "forest") {
      const Index d = doc.at("input_dim").get<Index>();
      std::vector<DecisionTree> trees;
      std::vector<std::vector<Index>> boot;
      std::vector<std::uint64_t> seeds;
      for (const auto& t : doc.at("trees")) {
        seeds.push_back(t.at("seed").get<std::uint64_t>());
        boot.push_back(t.at("bootstrap").get<std::vector<Index>>());
        trees.push_back(tree_from_json(t.at("tree"), d));
      }
      return ForestModel(std::move(trees), std::move(boot), std::move(seeds), doc.at("m_try").get<int>(),
                         doc.at("training_size").get<Index>());
    }
    if (kind == "onenn") return OneNearestNeighbor(dataset_from_json(doc.at("training")));
    throw InvalidInput("unknown model kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed model document: ") + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void save_model(const AnyModel& model, const std::filesystem::path& path) {
  write_text_file(path, model_to_json(model).dump() + "\n");
}

AnyModel load_model(const std::filesystem::path& path) {
  Json doc;
  try {
    doc = Json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
  return model_from_json(doc);
}

void write_dataset_csv(const LabeledDataset& data, std::ostream& out) {
  for (Index j = 0; j < data.dim(); ++j) out << 'x' << (j + 1) << ',';
  out << "label";
  if (data.has_weights()) out << ",weight";
  out << '\n';
  for (Index i = 0; i < data.size(); ++i) {
    for (Index j = 0; j < data.dim(); ++j) out << format_double(data.features()(i, j)) << ',';
    out << data.label(i);
    if (data.has_weights()) out << ',' << format_double((*data.weights())(i));
    out << '\n';
  }
}

LabeledDataset read_dataset_csv(std::istream& in) {
  const CsvTable t = read_csv(in);
  const Index d = feature_columns(t.header);
  const auto cols = static_cast<Index>(t.header.size());
  const bool weighted = cols == d + 2 && t.header.back() == "weight";
  if (d < 1 || t.header[static_cast<std::size_t>(d)] != "label" || !(cols == d + 1 || weighted)) {
    throw InvalidInput("line 1: header must be x1,...,xd,label[,weight]");
  }
  if (t.rows.empty()) throw InvalidInput("dataset has no rows");
  const auto n = static_cast<Index>(t.rows.size());
  Matrix x(n, d);
  LabelVector y(n);
  Vector w(weighted ? n : 0);
  for (Index i = 0; i < n; ++i) {
    const auto& row = t.rows[static_cast<std::size_t>(i)];
    const std::size_t line = t.line_numbers[static_cast<std::size_t>(i)];
    for (Index j = 0; j < d; ++j) x(i, j) = parse_real(row[static_cast<std::size_t>(j)], line);
    const std::string& lab = row[static_cast<std::size_t>(d)];
    if (lab == "1" || lab == "+1") {
      y(i) = kPositive;
    } else if (lab == "-1") {
      y(i) = kNegative;
    } else {
      throw InvalidInput("line " + std::to_string(line) + ": label '" + lab + "' is not -1 or +1");
    }
    if (weighted) w(i) = parse_real(row.back(), line);
  }
  try {
    return weighted ? LabeledDataset(std::move(x), std::move(y), std::move(w)) : LabeledDataset(std::move(x), std::move(y));
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string("dataset: ") + e.what());
  }
}

void save_dataset(const LabeledDataset& data, const std::filesystem::path& path) {
  std::ostringstream ss;
  write_dataset_csv(data, ss);
  write_text_file(path, ss.str());
}

LabeledDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read " + path.string());
  try {
    return read_dataset_csv(in);
  } catch (const InvalidInput& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

void write_points_csv(const Matrix& points, std::ostream& out) {
  for (Index j = 0; j < points.cols(); ++j) out << (j ? "," : "") << 'x' << (j + 1);
  out << '\n';
  for (Index i = 0; i < points.rows(); ++i) {
    for (Index j = 0; j < points.cols(); ++j) out << (j ? "," : "") << format_double(points(i, j));
    out << '\n';
  }
}

Matrix read_points_csv(std::istream& in) {
  const CsvTable t = read_csv(in);
  const Index d = feature_columns(t.header);
  // A labeled file is accepted too; extra columns are ignored.
  if (d < 1) throw InvalidInput("line 1: header must start with x1,...,xd");
  Matrix x(static_cast<Index>(t.rows.size()), d);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (Index j = 0; j < d; ++j) x(static_cast<Index>(i), j) = parse_real(t.rows[i][static_cast<std::size_t>(j)], t.line_numbers[i]);
  }
  return x;
}

}  // namespace ens

#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "ico/errors.hpp"
#include "ico/features.hpp"
#include "ico/forest.hpp"
#include "ico/linear.hpp"
#include "ico/util.hpp"
#include "ico/version.hpp"

namespace ico {

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kDatasetTargetColumn = "target_avg_runqlat_ns";

// Per-workload-kind resource predictors (cores and bytes as functions of QPS).
struct ResourceModels {
  LinearModel cpu;
  LinearModel mem;
};

struct ModelBundle {
  ForestModel forest;
  std::map<std::string, ResourceModels> resources;  // keyed by workload kind
};

namespace detail {

inline nlohmann::json linear_to_json(const LinearModel& m) {
  return {{"slope", m.slope},
          {"intercept", m.intercept},
          {"input_label", m.input_label},
          {"output_label", m.output_label}};
}

inline LinearModel linear_from_json(const nlohmann::json& j) {
  LinearModel m;
  m.slope = j.at("slope").get<double>();
  m.intercept = j.at("intercept").get<double>();
  m.input_label = j.value("input_label", "");
  m.output_label = j.value("output_label", "");
  return m;
}

}  // namespace detail

inline nlohmann::json models_to_json(const ModelBundle& bundle) {
  nlohmann::json j;
  j["format_version"] = kModelFormatVersion;
  j["code_version"] = kCodeVersion;
  j["feature_names"] = feature_names();

  nlohmann::json forest;
  forest["n_trees"] = bundle.forest.params.n_trees;
  forest["max_depth"] = bundle.forest.params.max_depth;
  forest["min_samples_leaf"] = bundle.forest.params.min_samples_leaf;
  forest["features_per_split"] = bundle.forest.params.features_per_split;
  forest["bootstrap"] = bundle.forest.params.bootstrap;
  forest["seed"] = bundle.forest.params.seed;
  forest["n_features"] = bundle.forest.n_features;
  forest["target_min"] = bundle.forest.target_min;
  forest["target_max"] = bundle.forest.target_max;
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : bundle.forest.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : tree.nodes) {
      nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    }
    trees.push_back(std::move(nodes));
  }
  forest["trees"] = std::move(trees);
  j["forest"] = std::move(forest);

  nlohmann::json res;
  for (const auto& [kind, models] : bundle.resources) {
    res[kind] = {{"cpu", detail::linear_to_json(models.cpu)},
                 {"mem", detail::linear_to_json(models.mem)}};
  }
  j["resources"] = std::move(res);
  return j;
}

inline ModelBundle models_from_json(const nlohmann::json& j) {
  if (j.value("format_version", -1) != kModelFormatVersion) {
    throw ParseError("model file: unsupported format_version");
  }
  const auto& names = j.at("feature_names");
  const auto& expected = feature_names();
  if (names.size() != expected.size()) {
    throw ShapeError("model file: feature manifest has " + std::to_string(names.size()) +
                     " entries, expected " + std::to_string(expected.size()));
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (names[i].get<std::string>() != expected[i]) {
      throw ShapeError("model file: feature order mismatch at index " + std::to_string(i) +
                       " ('" + names[i].get<std::string>() + "' vs '" + expected[i] + "')");
    }
  }

  ModelBundle bundle;
  const auto& forest = j.at("forest");
  bundle.forest.params.n_trees = forest.at("n_trees").get<int>();
  bundle.forest.params.max_depth = forest.at("max_depth").get<int>();
  bundle.forest.params.min_samples_leaf = forest.at("min_samples_leaf").get<int>();
  bundle.forest.params.features_per_split = forest.at("features_per_split").get<int>();
  bundle.forest.params.bootstrap = forest.at("bootstrap").get<bool>();
  bundle.forest.params.seed = forest.at("seed").get<std::uint64_t>();
  bundle.forest.n_features = forest.at("n_features").get<std::size_t>();
  bundle.forest.target_min = forest.at("target_min").get<double>();
  bundle.forest.target_max = forest.at("target_max").get<double>();
  for (const auto& tree_json : forest.at("trees")) {
    RegressionTree tree;
    tree.nodes.reserve(tree_json.size());
    for (const auto& n : tree_json) {
      if (!n.is_array() || n.size() != 5) throw ParseError("model file: malformed tree node");
      TreeNode node;
      node.feature = n[0].get<int>();
      node.threshold = n[1].get<double>();
      node.left = n[2].get<int>();
      node.right = n[3].get<int>();
      node.value = n[4].get<double>();
      tree.nodes.push_back(node);
    }
    bundle.forest.trees.push_back(std::move(tree));
  }

  if (j.contains("resources")) {
    for (const auto& [kind, models] : j.at("resources").items()) {
      bundle.resources[kind] = {detail::linear_from_json(models.at("cpu")),
                                detail::linear_from_json(models.at("mem"))};
    }
  }
  return bundle;
}

inline void save_models(const std::filesystem::path& path, const ModelBundle& bundle) {
  std::ofstream out(path);
  if (!out) throw NotFound("cannot open for writing: " + path.string());
  out << models_to_json(bundle).dump(1) << '\n';
}

inline ModelBundle load_models(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("model file not found: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("model file " + path.string() + ": " + e.what());
  }
  return models_from_json(j);
}

// Dataset interchange: one header row with the 246 feature names plus the
// target column, then one row per sample. Values use shortest round-trip
// formatting so rewritten files are byte-identical.
inline void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw NotFound("cannot open for writing: " + path.string());
  std::string header;
  for (const auto& name : feature_names()) {
    header += name;
    header += ',';
  }
  header += kDatasetTargetColumn;
  out << header << '\n';
  std::string line;
  for (std::size_t i = 0; i < data.size(); ++i) {
    line.clear();
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      line += format_double(data.x[i].values[f]);
      line += ',';
    }
    line += format_double(data.y[i]);
    out << line << '\n';
  }
}

inline Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("dataset file not found: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": missing header row");
  const auto header = split_csv_line(line);
  const auto& names = feature_names();
  if (header.size() != kFeatureCount + 1) {
    throw ParseError(path.string() + ": header has " + std::to_string(header.size()) +
                     " columns, expected " + std::to_string(kFeatureCount + 1));
  }
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (header[i] != names[i]) {
      throw ParseError(path.string() + ": header column " + std::to_string(i) + " is '" +
                       header[i] + "', expected '" + names[i] + "'");
    }
  }
  if (header.back() != kDatasetTargetColumn) {
    throw ParseError(path.string() + ": last column must be " + std::string(kDatasetTargetColumn));
  }

  Dataset data;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != kFeatureCount + 1) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(kFeatureCount + 1) + " fields, got " +
                       std::to_string(fields.size()));
    }
    FeatureVector f;
    try {
      for (std::size_t i = 0; i < kFeatureCount; ++i) f[i] = parse_double(fields[i]);
      data.push(f, parse_double(fields.back()));
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return data;
}

}  // namespace ico

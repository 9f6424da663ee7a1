#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "ico/errors.hpp"
#include "ico/features.hpp"

namespace ico {

struct ForestParams {
  int n_trees = 100;
  int max_depth = 12;
  int min_samples_leaf = 5;
  int features_per_split = static_cast<int>((kFeatureCount + 2) / 3);  // ceil(246/3)
  bool bootstrap = true;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_trees < 1) throw std::invalid_argument("ForestParams: n_trees must be >= 1");
    if (max_depth < 1) throw std::invalid_argument("ForestParams: max_depth must be >= 1");
    if (min_samples_leaf < 1) {
      throw std::invalid_argument("ForestParams: min_samples_leaf must be >= 1");
    }
    if (features_per_split < 1 || features_per_split > static_cast<int>(kFeatureCount)) {
      throw std::invalid_argument("ForestParams: features_per_split out of range");
    }
  }

  bool operator==(const ForestParams&) const = default;
};

// Binary regression tree stored as a flat node array; feature < 0 marks a
// leaf carrying the prediction.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool operator==(const TreeNode&) const = default;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> features) const {
    int i = 0;
    while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
      const TreeNode& n = nodes[static_cast<std::size_t>(i)];
      i = features[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)].value;
  }

  bool operator==(const RegressionTree&) const = default;
};

struct ForestModel {
  std::vector<RegressionTree> trees;
  ForestParams params;
  std::size_t n_features = kFeatureCount;
  double target_min = 0.0;
  double target_max = 0.0;

  bool operator==(const ForestModel&) const = default;
};

namespace detail {

// Grows one CART tree over data[order]: greedy variance-reduction splits at
// midpoints between consecutive distinct feature values, candidates drawn
// per node without replacement. Ties resolve to the lowest feature index,
// then the lowest threshold, because candidates are scanned in ascending
// order and only strict improvements are kept.
inline RegressionTree grow_tree(const Dataset& data, std::vector<std::uint32_t> order,
                                const ForestParams& p, std::mt19937_64& rng) {
  RegressionTree tree;
  struct Frame {
    std::uint32_t begin, end;
    int depth;
    int node;
  };
  std::vector<Frame> todo;
  tree.nodes.emplace_back();
  todo.push_back({0, static_cast<std::uint32_t>(order.size()), 0, 0});

  std::vector<std::pair<double, double>> scratch;  // (feature value, target)
  scratch.reserve(order.size());
  std::vector<int> pool(kFeatureCount);
  std::vector<int> candidates;
  candidates.reserve(static_cast<std::size_t>(p.features_per_split));

  while (!todo.empty()) {
    const Frame frame = todo.back();
    todo.pop_back();
    const std::uint32_t m = frame.end - frame.begin;

    double sum = 0.0, sumsq = 0.0;
    double ymin = std::numeric_limits<double>::infinity();
    double ymax = -std::numeric_limits<double>::infinity();
    for (std::uint32_t i = frame.begin; i < frame.end; ++i) {
      const double y = data.y[order[i]];
      sum += y;
      sumsq += y * y;
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
    const double mean = sum / m;

    const bool must_leaf = frame.depth >= p.max_depth ||
                           m < 2 * static_cast<std::uint32_t>(p.min_samples_leaf) ||
                           ymin == ymax;

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_sse = std::numeric_limits<double>::infinity();

    // Candidates are drawn in batches of features_per_split. If a whole batch
    // is unsplittable (constant values, or no threshold satisfying the leaf
    // minimum), the search continues into the remaining features; a node only
    // becomes a leaf once no feature at all can split it.
    int sampled = 0;
    while (!must_leaf && best_feature < 0 && sampled < static_cast<int>(kFeatureCount)) {
      if (sampled == 0) {
        for (std::size_t i = 0; i < kFeatureCount; ++i) pool[i] = static_cast<int>(i);
      }
      const int batch =
          std::min(p.features_per_split, static_cast<int>(kFeatureCount) - sampled);
      for (int j = sampled; j < sampled + batch; ++j) {
        std::uniform_int_distribution<int> pick(j, static_cast<int>(kFeatureCount) - 1);
        std::swap(pool[static_cast<std::size_t>(j)], pool[static_cast<std::size_t>(pick(rng))]);
      }
      candidates.assign(pool.begin() + sampled, pool.begin() + sampled + batch);
      std::sort(candidates.begin(), candidates.end());
      sampled += batch;

      for (int f : candidates) {
        scratch.clear();
        for (std::uint32_t i = frame.begin; i < frame.end; ++i) {
          scratch.emplace_back(data.x[order[i]].values[static_cast<std::size_t>(f)],
                               data.y[order[i]]);
        }
        std::sort(scratch.begin(), scratch.end());
        if (scratch.front().first == scratch.back().first) continue;

        double left_sum = 0.0, left_sq = 0.0;
        for (std::uint32_t i = 0; i + 1 < m; ++i) {
          const double y = scratch[i].second;
          left_sum += y;
          left_sq += y * y;
          if (scratch[i].first == scratch[i + 1].first) continue;
          const std::uint32_t nl = i + 1;
          const std::uint32_t nr = m - nl;
          if (nl < static_cast<std::uint32_t>(p.min_samples_leaf) ||
              nr < static_cast<std::uint32_t>(p.min_samples_leaf)) {
            continue;
          }
          const double right_sum = sum - left_sum;
          const double right_sq = sumsq - left_sq;
          const double sse = (left_sq - left_sum * left_sum / nl) +
                             (right_sq - right_sum * right_sum / nr);
          if (sse < best_sse) {
            double thr = scratch[i].first + (scratch[i + 1].first - scratch[i].first) / 2.0;
            if (thr <= scratch[i].first) thr = scratch[i + 1].first;
            best_sse = sse;
            best_feature = f;
            best_threshold = thr;
          }
        }
      }
    }

    if (best_feature < 0) {
      TreeNode& node = tree.nodes[static_cast<std::size_t>(frame.node)];
      node.feature = -1;
      node.value = mean;
      continue;
    }

    auto* base = order.data();
    auto* mid = std::partition(base + frame.begin, base + frame.end, [&](std::uint32_t idx) {
      return data.x[idx].values[static_cast<std::size_t>(best_feature)] < best_threshold;
    });
    const auto split = static_cast<std::uint32_t>(mid - base);

    const int left = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    TreeNode& node = tree.nodes[static_cast<std::size_t>(frame.node)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = left;
    node.right = left + 1;
    todo.push_back({frame.begin, split, frame.depth + 1, left});
    todo.push_back({split, frame.end, frame.depth + 1, left + 1});
  }
  return tree;
}

}  // namespace detail

// Bagged CART regression forest. Tree i draws from its own engine seeded
// with params.seed ^ i, so results are bit-identical no matter how many
// threads train in parallel.
inline ForestModel train_forest(const Dataset& data, const ForestParams& params,
                                int n_threads = 1) {
  params.validate();
  const std::size_t n = data.size();
  if (n < 2 * static_cast<std::size_t>(params.min_samples_leaf)) {
    throw InsufficientData("train_forest: " + std::to_string(n) + " samples, need at least " +
                           std::to_string(2 * params.min_samples_leaf));
  }

  ForestModel model;
  model.params = params;
  model.n_features = kFeatureCount;
  model.target_min = *std::min_element(data.y.begin(), data.y.end());
  model.target_max = *std::max_element(data.y.begin(), data.y.end());
  model.trees.resize(static_cast<std::size_t>(params.n_trees));

  if (n_threads <= 0) {
    n_threads = static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads <= 0) n_threads = 1;
  }
  n_threads = std::min(n_threads, params.n_trees);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int t = next.fetch_add(1); t < params.n_trees; t = next.fetch_add(1)) {
      std::mt19937_64 rng(params.seed ^ static_cast<std::uint64_t>(t));
      std::vector<std::uint32_t> order(n);
      if (params.bootstrap) {
        std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n) - 1);
        for (auto& idx : order) idx = pick(rng);
      } else {
        for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
      }
      model.trees[static_cast<std::size_t>(t)] = detail::grow_tree(data, std::move(order), params, rng);
    }
  };

  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
  }
  return model;
}

// Mean of the per-tree leaf predictions; stays within the training target
// range by construction.
inline double predict_latency(const ForestModel& model, const FeatureVector& features) {
  if (model.n_features != kFeatureCount) {
    throw ShapeError("predict_latency: model expects " + std::to_string(model.n_features) +
                     " features, library provides " + std::to_string(kFeatureCount));
  }
  if (model.trees.empty()) {
    throw ShapeError("predict_latency: model has no trees");
  }
  double sum = 0.0;
  for (const auto& tree : model.trees) sum += tree.predict(features.span());
  return sum / static_cast<double>(model.trees.size());
}

}  // namespace ico

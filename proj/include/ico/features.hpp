#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "ico/errors.hpp"
#include "ico/runqlat.hpp"
#include "ico/types.hpp"

namespace ico {

// The latency predictor's input layout is frozen: pod QPS, then the 13
// performance metrics, then the 32 hardware events, then the node's merged
// 200-bin scheduling-latency histogram. Models persist this order so they
// stay portable across builds.
inline constexpr std::size_t kFeatureCount =
    1 + kPerfMetricCount + kHwEventCount + RunqlatHistogram::kBins;  // 246

inline constexpr std::size_t kQpsFeature = 0;
inline constexpr std::size_t kPerfFeatureOffset = 1;
inline constexpr std::size_t kHwFeatureOffset = kPerfFeatureOffset + kPerfMetricCount;
inline constexpr std::size_t kRunqlatFeatureOffset = kHwFeatureOffset + kHwEventCount;

inline constexpr std::array<const char*, kPerfMetricCount> kPerfMetricNames = {
    "cpu_utilization",  "memory_usage",         "mem_cache",    "mem_pgfault",
    "mem_pgmajfault",   "working_set",          "memory_rss",   "net_recv_avg",
    "net_recv_packets_avg", "net_send_avg",     "net_send_packets_avg",
    "fs_read_avg",      "fs_write_avg"};

inline constexpr std::array<const char*, kHwEventCount> kHwEventNames = {
    "branch-instructions", "ref-cycles",         "branch-misses",      "bus-cycles",
    "cache-misses",        "cache-references",   "cpu-cycles",         "instructions",
    "alignment-faults",    "bpf-output",         "cpu-migration",      "emulation-faults",
    "major-faults",        "minor-faults",       "page-faults",        "dummy",
    "L1-dcache-load-misses", "L1-dcache-loads",  "L1-dcache-stores",   "LLC-load-misses",
    "LLC-loads",           "LLC-store-misses",   "LLC-stores",         "branch-load-misses",
    "branch-loads",        "dTLB-load-misses",   "dTLB-loads",         "dTLB-store-misses",
    "dTLB-stores",         "iTLB-load-misses",   "iTLB-loads",         "node-load-misses"};

inline const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    v.reserve(kFeatureCount);
    v.emplace_back("qps");
    for (const char* n : kPerfMetricNames) v.emplace_back(n);
    for (const char* n : kHwEventNames) v.emplace_back(n);
    for (std::size_t k = 0; k < RunqlatHistogram::kBins; ++k) {
      v.push_back(std::string(kRunqlatBinsField) + "[" + std::to_string(k) + "]");
    }
    return v;
  }();
  return names;
}

struct FeatureVector {
  std::array<double, kFeatureCount> values{};

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::span<const double> span() const { return values; }
  bool operator==(const FeatureVector&) const = default;
};

// Assembles the predictor input for placing a pod with the given QPS on the
// node: the node-level histogram is the merge of every resident service's
// histogram. Non-finite readings fail with the offending feature's name.
inline FeatureVector build_feature_vector(const NodeSnapshot& node, double pod_qps) {
  FeatureVector f;
  f[kQpsFeature] = pod_qps;
  for (std::size_t i = 0; i < kPerfMetricCount; ++i) {
    f[kPerfFeatureOffset + i] = node.perf_metrics[i];
  }
  for (std::size_t i = 0; i < kHwEventCount; ++i) {
    f[kHwFeatureOffset + i] = node.hw_events[i];
  }
  RunqlatHistogram merged;
  for (const auto& svc : node.services) merged.merge_in(svc.runqlat);
  for (std::size_t k = 0; k < RunqlatHistogram::kBins; ++k) {
    f[kRunqlatFeatureOffset + k] = static_cast<double>(merged.bin(k));
  }
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (!std::isfinite(f[i])) {
      throw IncompleteSnapshot("node " + std::to_string(node.node_id) +
                               ": non-finite feature '" + feature_names()[i] + "'");
    }
  }
  return f;
}

// A regression dataset in the frozen feature order.
struct Dataset {
  std::vector<FeatureVector> x;
  std::vector<double> y;

  std::size_t size() const { return y.size(); }
  void push(FeatureVector features, double target) {
    x.push_back(std::move(features));
    y.push_back(target);
  }
};

}  // namespace ico

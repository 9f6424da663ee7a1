#pragma once

#include <array>
#include <string>
#include <vector>

#include "ico/runqlat.hpp"

namespace ico {

enum class ServiceClass { Online, Offline };

inline const char* to_string(ServiceClass c) {
  return c == ServiceClass::Online ? "online" : "offline";
}

inline constexpr std::size_t kPerfMetricCount = 13;
inline constexpr std::size_t kHwEventCount = 32;

// Indices into NodeSnapshot::perf_metrics.
namespace perf {
inline constexpr std::size_t kCpuUtilization = 0;
inline constexpr std::size_t kMemoryUsage = 1;
inline constexpr std::size_t kMemCache = 2;
inline constexpr std::size_t kMemPgfault = 3;
inline constexpr std::size_t kMemPgmajfault = 4;
inline constexpr std::size_t kWorkingSet = 5;
inline constexpr std::size_t kMemoryRss = 6;
inline constexpr std::size_t kNetRecvAvg = 7;
inline constexpr std::size_t kNetRecvPacketsAvg = 8;
inline constexpr std::size_t kNetSendAvg = 9;
inline constexpr std::size_t kNetSendPacketsAvg = 10;
inline constexpr std::size_t kFsReadAvg = 11;
inline constexpr std::size_t kFsWriteAvg = 12;
}  // namespace perf

// Indices into NodeSnapshot::hw_events for the events the simulator
// synthesizes with dedicated formulas.
namespace hw {
inline constexpr std::size_t kCacheMisses = 4;
inline constexpr std::size_t kCpuCycles = 6;
inline constexpr std::size_t kInstructions = 7;
}  // namespace hw

// One resident service as the scheduler sees it: its class, offered QPS and
// the most recent completed window's scheduling-latency histogram.
struct ServiceState {
  ServiceClass cls = ServiceClass::Online;
  double qps = 0.0;
  RunqlatHistogram runqlat;
};

// A node's collected state: capacities, accounted usage, resident services
// and the performance/hardware readings the latency predictor consumes.
struct NodeSnapshot {
  int node_id = 0;
  double cpu_cur = 0.0;  // cores in use
  double cpu_sum = 0.0;  // total cores
  double mem_cur = 0.0;  // bytes in use
  double mem_sum = 0.0;  // total bytes
  std::vector<ServiceState> services;
  std::array<double, kPerfMetricCount> perf_metrics{};
  std::array<double, kHwEventCount> hw_events{};
};

// A workload waiting for placement.
struct PodRequest {
  int pod_id = 0;
  std::string kind;
  ServiceClass cls = ServiceClass::Online;
  double qps = 0.0;       // target requests/s; 0 for offline pods
  double cpu_pred = 0.0;  // predicted demand, cores
  double mem_pred = 0.0;  // predicted demand, bytes
  double arrival_s = 0.0;
};

}  // namespace ico

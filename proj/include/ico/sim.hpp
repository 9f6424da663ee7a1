#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <deque>
#include <istream>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ico/errors.hpp"
#include "ico/rng.hpp"
#include "ico/runqlat.hpp"
#include "ico/sim_config.hpp"
#include "ico/types.hpp"

namespace ico {

// Per-service QPS source: either a bounded mean-reverting random walk around
// the target, or a replayed trace series (cycled past its end).
struct QpsProfile {
  double target = 0.0;
  double q_prev = 0.0;
  std::shared_ptr<const std::vector<double>> series;  // null/empty = random walk
};

inline double generate_qps(QpsProfile& profile, const QpsWalk& walk,
                           std::uint64_t window_index, std::mt19937_64& rng) {
  if (profile.series && !profile.series->empty()) {
    const double q = (*profile.series)[window_index % profile.series->size()];
    profile.q_prev = q;
    return q;
  }
  double q = profile.q_prev + walk.mean_reversion * (profile.target - profile.q_prev);
  if (walk.step_sigma > 0.0) {
    q += std::normal_distribution<double>(0.0, walk.step_sigma)(rng);
  }
  q = std::clamp(q, walk.floor, walk.cap);
  profile.q_prev = q;
  return q;
}

// Replay series from CSV rows (window_index, qps) with strictly increasing
// window indices. An optional "window_index,qps" header row is accepted.
inline std::vector<double> import_qps_profile(std::istream& in) {
  std::vector<double> series;
  std::string line;
  std::size_t line_no = 0;
  long long prev_window = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    if (line_no == 1 && line.find("window_index") != std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) {
      throw ParseError("qps profile line " + std::to_string(line_no) +
                       ": expected 2 fields, got " + std::to_string(fields.size()));
    }
    long long window = 0;
    try {
      window = std::stoll(fields[0]);
    } catch (const std::exception&) {
      throw ParseError("qps profile line " + std::to_string(line_no) + ": bad window index '" +
                       fields[0] + "'");
    }
    if (window <= prev_window) {
      throw ParseError("qps profile line " + std::to_string(line_no) +
                       ": window indices must be strictly increasing");
    }
    prev_window = window;
    double qps = 0.0;
    try {
      qps = parse_double(fields[1]);
    } catch (const ParseError&) {
      throw ParseError("qps profile line " + std::to_string(line_no) + ": bad qps '" + fields[1] +
                       "'");
    }
    if (qps < 0.0) {
      throw ParseError("qps profile line " + std::to_string(line_no) + ": qps must be >= 0");
    }
    series.push_back(qps);
  }
  if (series.empty()) throw ParseError("qps profile: no data rows");
  return series;
}

// Mean scheduling latency as a function of run-queue pressure: flat at
// lambda0 until rho0, then a power-law rise, capped at the histogram range.
inline double contention_mean_ns(double node_load, double cores, const ContentionParams& p) {
  assert(cores > 0.0);
  const double rho = node_load / cores;
  const double mu = p.lambda0_ns + p.lambda1_ns * std::pow(std::max(0.0, rho - p.rho0), p.gamma);
  return std::min(mu, RunqlatHistogram::kMaxAvgNs);
}

// One window's latency histogram: samples_per_window draws from a gamma
// distribution with mean mu and variance mu^2 * dispersion.
inline RunqlatHistogram contention_latency(double node_load, double cores,
                                           const ContentionParams& p, std::mt19937_64& rng) {
  const double mu = contention_mean_ns(node_load, cores, p);
  RunqlatHistogram h;
  if (p.dispersion <= 0.0 || mu <= 0.0) {
    for (int i = 0; i < p.samples_per_window; ++i) h.record(mu);
    return h;
  }
  std::gamma_distribution<double> gamma(1.0 / p.dispersion, mu * p.dispersion);
  for (int i = 0; i < p.samples_per_window; ++i) h.record(gamma(rng));
  return h;
}

inline double quantize_ms(double ms) { return std::round(ms * 1000.0) / 1000.0; }

// Response time grows linearly in the window's average scheduling latency,
// plus folded Gaussian noise. Results are quantized to 1 microsecond so CSV
// exports round-trip exactly.
inline double response_time(double base_ms, double avg_runqlat_ns, const ResponseParams& p,
                            std::mt19937_64& rng) {
  assert(base_ms > 0.0);
  double r = p.s0 * base_ms * (1.0 + p.s1 * (avg_runqlat_ns / RunqlatHistogram::kMaxAvgNs));
  if (p.noise_sigma_ms > 0.0) {
    r += std::abs(std::normal_distribution<double>(0.0, p.noise_sigma_ms)(rng));
  }
  return quantize_ms(r);
}

// A placed workload instance.
struct SimService {
  int pod_id = 0;
  std::string kind;
  ServiceClass cls = ServiceClass::Online;
  // Demand curve (copied from the kind at placement).
  double cpu_per_qps = 0.0, cpu_base = 0.0;
  double mem_per_qps = 0.0, mem_base = 0.0;
  double threads_per_qps = 0.0;
  double base_service_ms = 0.0;
  // Current-window state.
  double qps = 0.0;
  double cpu_demand = 0.0;
  double mem_demand = 0.0;
  double threads = 0.0;
  double end_s = std::numeric_limits<double>::infinity();
  QpsProfile profile;
  RunqlatHistogram window_hist;
  double window_avg_ns = 0.0;
};

struct SimNode {
  int node_id = 0;
  double cpu_sum = 0.0;
  double mem_sum = 0.0;
  double cpu_cur = 0.0;  // accounted usage, saturates at capacity
  double mem_cur = 0.0;
  std::vector<SimService> services;
  std::array<double, kPerfMetricCount> perf{};
  std::array<double, kHwEventCount> hw{};
  double cpu_util_accum = 0.0;
  double mem_util_accum = 0.0;
  std::int64_t util_samples = 0;
};

struct RequestRecord {
  double timestamp_s = 0.0;
  int pod_id = 0;
  double response_ms = 0.0;

  bool operator==(const RequestRecord&) const = default;
};

struct SimState {
  double clock_s = 0.0;
  std::uint64_t window_index = 0;
  std::uint64_t seed = 0;
  std::vector<SimNode> nodes;
  std::deque<PodRequest> pending;
  std::vector<RequestRecord> requests;
  int next_pod_id = 0;
  double next_arrival_s = 0.0;
  std::mt19937_64 arrival_rng;
  std::shared_ptr<const std::vector<double>> qps_series;  // shared trace, may be null
};

namespace detail {

inline const OnlineKind& find_online_kind(const AppConfig& cfg, const std::string& name) {
  for (const auto& k : cfg.workloads.online_kinds) {
    if (k.name == name) return k;
  }
  throw NotFound("unknown online workload kind: " + name);
}

inline const OfflineKind& find_offline_kind(const AppConfig& cfg, const std::string& name) {
  for (const auto& k : cfg.workloads.offline_kinds) {
    if (k.name == name) return k;
  }
  throw NotFound("unknown offline workload kind: " + name);
}

inline void refresh_node_accounting(SimNode& node) {
  double cpu = 0.0, mem = 0.0;
  for (const auto& svc : node.services) {
    cpu += svc.cpu_demand;
    mem += svc.mem_demand;
  }
  // Usage saturates at capacity: an oversubscribed node runs at full
  // utilization while the surplus shows up as run-queue pressure.
  node.cpu_cur = std::min(cpu, node.cpu_sum);
  node.mem_cur = std::min(mem, node.mem_sum);
  assert(node.cpu_cur <= node.cpu_sum && node.mem_cur <= node.mem_sum);
}

inline double node_load(const SimNode& node) {
  double load = 0.0;
  for (const auto& svc : node.services) load += svc.threads;
  return load;
}

inline double total_online_qps(const SimNode& node) {
  double qps = 0.0;
  for (const auto& svc : node.services) {
    if (svc.cls == ServiceClass::Online) qps += svc.qps;
  }
  return qps;
}

// Synthetic node telemetry: deterministic load-correlated stand-ins for the
// counters a real collector would report, with a little seeded noise so the
// predictor never sees perfectly collinear inputs. Not kernel-accurate.
inline void synthesize_metrics(SimNode& node, std::uint64_t seed, std::uint64_t window_index) {
  auto rng = rng::make_engine(seed, rng::Stream::kHardware,
                              static_cast<std::uint64_t>(node.node_id), window_index);
  std::normal_distribution<double> unit(0.0, 1.0);
  const double load = node_load(node);
  const double qps = total_online_qps(node);
  double offline_threads = 0.0;
  for (const auto& svc : node.services) {
    if (svc.cls == ServiceClass::Offline) offline_threads += svc.threads;
  }
  auto noisy = [&](double value, double rel) {
    return std::max(0.0, value * (1.0 + rel * unit(rng)));
  };

  auto& perf = node.perf;
  // Collected utilization carries a little downward measurement jitter, so a
  // saturated node reports ~99.x% rather than a flat 100%.
  perf[perf::kCpuUtilization] =
      (node.cpu_cur / node.cpu_sum) * (1.0 - std::abs(0.003 * unit(rng)));
  perf[perf::kMemoryUsage] =
      (node.mem_cur / node.mem_sum) * (1.0 - std::abs(0.003 * unit(rng)));
  perf[perf::kMemCache] = noisy(0.12 * node.mem_cur + 2.0e8, 0.02);
  perf[perf::kMemPgfault] = noisy(420.0 * load + 3.0 * qps, 0.05);
  perf[perf::kMemPgmajfault] = noisy(2.0 * load, 0.1);
  perf[perf::kWorkingSet] = noisy(0.8 * node.mem_cur, 0.01);
  perf[perf::kMemoryRss] = noisy(0.7 * node.mem_cur, 0.01);
  perf[perf::kNetRecvAvg] = noisy(1.2e3 * qps, 0.03);
  perf[perf::kNetRecvPacketsAvg] = noisy(10.0 * qps, 0.03);
  perf[perf::kNetSendAvg] = noisy(4.0e3 * qps, 0.03);
  perf[perf::kNetSendPacketsAvg] = noisy(9.0 * qps, 0.03);
  perf[perf::kFsReadAvg] = noisy(3.0e5 * offline_threads + 1.0e4, 0.05);
  perf[perf::kFsWriteAvg] = noisy(2.0e5 * offline_threads + 1.0e4, 0.05);

  for (std::size_t j = 0; j < kHwEventCount; ++j) {
    // Per-event scale varies by index; every event tracks load and traffic.
    const double scale = 1.0e6 * (1.0 + static_cast<double>((j * 37) % 11));
    node.hw[j] = noisy(scale * (0.6 * load + 0.01 * qps) + 1.0e4, 0.02);
  }
  node.hw[hw::kCpuCycles] = noisy(2.5e9 * node.cpu_cur, 0.02);
  node.hw[hw::kInstructions] = noisy(1.8e9 * node.cpu_cur, 0.02);
  node.hw[hw::kCacheMisses] = noisy(3.0e6 * load, 0.02);
}

}  // namespace detail

inline SimState init_sim(const AppConfig& cfg, std::uint64_t seed) {
  SimState state;
  state.seed = seed;
  state.nodes.resize(static_cast<std::size_t>(cfg.cluster.nodes));
  for (int i = 0; i < cfg.cluster.nodes; ++i) {
    auto& node = state.nodes[static_cast<std::size_t>(i)];
    node.node_id = i;
    node.cpu_sum = cfg.cluster.cores_per_node;
    node.mem_sum = cfg.cluster.mem_per_node_bytes;
  }
  state.arrival_rng = rng::make_engine(seed, rng::Stream::kArrival);
  if (cfg.workloads.arrival_mean_s > 0.0) {
    std::exponential_distribution<double> exp(1.0 / cfg.workloads.arrival_mean_s);
    state.next_arrival_s = exp(state.arrival_rng);
  } else {
    state.next_arrival_s = std::numeric_limits<double>::infinity();
  }
  if (!cfg.workloads.qps_profile_csv.empty()) {
    std::ifstream in(cfg.workloads.qps_profile_csv);
    if (!in) throw NotFound("qps profile not found: " + cfg.workloads.qps_profile_csv);
    state.qps_series = std::make_shared<const std::vector<double>>(import_qps_profile(in));
  }
  return state;
}

// Places the pod on the node; demand comes from the pod's kind. The caller
// is responsible for having checked raw capacity.
inline void place_pod(SimState& state, const AppConfig& cfg, const PodRequest& pod, int node_id) {
  SimNode* node = nullptr;
  for (auto& n : state.nodes) {
    if (n.node_id == node_id) node = &n;
  }
  if (node == nullptr) throw NotFound("place_pod: unknown node " + std::to_string(node_id));

  SimService svc;
  svc.pod_id = pod.pod_id;
  svc.kind = pod.kind;
  svc.cls = pod.cls;
  if (pod.cls == ServiceClass::Online) {
    const OnlineKind& kind = detail::find_online_kind(cfg, pod.kind);
    svc.cpu_per_qps = kind.cpu_per_qps;
    svc.cpu_base = kind.cpu_base;
    svc.mem_per_qps = kind.mem_per_qps;
    svc.mem_base = kind.mem_base;
    svc.threads_per_qps = kind.threads_per_qps;
    svc.base_service_ms = kind.base_service_ms;
    svc.qps = pod.qps;
    svc.profile.target = pod.qps;
    svc.profile.q_prev = pod.qps;
    svc.profile.series = state.qps_series;
    svc.cpu_demand = svc.cpu_base + svc.cpu_per_qps * svc.qps;
    svc.mem_demand = svc.mem_base + svc.mem_per_qps * svc.qps;
    svc.threads = svc.threads_per_qps * svc.qps;
    if (cfg.workloads.online_lifetime_s > 0.0) {
      svc.end_s = state.clock_s + cfg.workloads.online_lifetime_s;
    }
  } else {
    const OfflineKind& kind = detail::find_offline_kind(cfg, pod.kind);
    svc.cpu_demand = kind.cores;
    svc.mem_demand = kind.mem_bytes;
    svc.threads = kind.cores * kind.thread_factor;
    svc.end_s = state.clock_s + kind.duration_s;
  }
  // Placement is physical, not guarded: the simulator accepts oversubscribed
  // nodes (usage saturates, pressure rises). Capacity checks live in the
  // scheduling policies.
  node->services.push_back(std::move(svc));
  detail::refresh_node_accounting(*node);
}

// Advances the simulation one metric window:
//  (1) draw pod arrivals into the pending queue
//  (2) update online QPS and recompute demand
//  (3) compute per-node runnable load
//  (4) draw each service's latency histogram for the window
//  (5) draw per-request response times for online services
//  (6) retire services whose lifetime ended inside the window
//  (7) accumulate utilization samples and synthesize node telemetry
inline void step(SimState& state, const AppConfig& cfg) {
  const double window_end = state.clock_s + cfg.sim.window_s;

  if (cfg.workloads.arrival_mean_s > 0.0) {
    std::exponential_distribution<double> inter(1.0 / cfg.workloads.arrival_mean_s);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (state.next_arrival_s < window_end) {
      PodRequest pod;
      pod.pod_id = state.next_pod_id++;
      pod.arrival_s = state.next_arrival_s;
      const bool offline = unit(state.arrival_rng) < cfg.workloads.offline_fraction;
      if (offline) {
        const auto& kinds = cfg.workloads.offline_kinds;
        std::uniform_int_distribution<std::size_t> pick(0, kinds.size() - 1);
        const OfflineKind& kind = kinds[pick(state.arrival_rng)];
        pod.kind = kind.name;
        pod.cls = ServiceClass::Offline;
        pod.cpu_pred = kind.cores;  // offline demand is declared, not predicted
        pod.mem_pred = kind.mem_bytes;
      } else {
        const auto& kinds = cfg.workloads.online_kinds;
        std::uniform_int_distribution<std::size_t> pick(0, kinds.size() - 1);
        const OnlineKind& kind = kinds[pick(state.arrival_rng)];
        pod.kind = kind.name;
        pod.cls = ServiceClass::Online;
        const double jitter = cfg.workloads.qps_jitter;
        pod.qps = kind.qps_target * (1.0 + jitter * (2.0 * unit(state.arrival_rng) - 1.0));
      }
      state.pending.push_back(std::move(pod));
      state.next_arrival_s += inter(state.arrival_rng);
    }
  }

  for (auto& node : state.nodes) {
    for (auto& svc : node.services) {
      if (svc.cls != ServiceClass::Online) continue;
      auto rng = rng::make_engine(state.seed, rng::Stream::kQps,
                                  static_cast<std::uint64_t>(svc.pod_id), state.window_index);
      svc.qps = generate_qps(svc.profile, cfg.qps_walk, state.window_index, rng);
      svc.cpu_demand = svc.cpu_base + svc.cpu_per_qps * svc.qps;
      svc.mem_demand = svc.mem_base + svc.mem_per_qps * svc.qps;
      svc.threads = svc.threads_per_qps * svc.qps;
    }
    detail::refresh_node_accounting(node);
  }

  for (auto& node : state.nodes) {
    const double load = detail::node_load(node);
    for (auto& svc : node.services) {
      auto rng = rng::make_engine(state.seed, rng::Stream::kContention,
                                  static_cast<std::uint64_t>(svc.pod_id), state.window_index);
      svc.window_hist = contention_latency(load, node.cpu_sum, cfg.contention, rng);
      svc.window_avg_ns = svc.window_hist.avg_ns();
    }
  }

  if (cfg.sim.record_responses) {
    for (auto& node : state.nodes) {
      for (auto& svc : node.services) {
        if (svc.cls != ServiceClass::Online) continue;
        const auto n_requests = static_cast<long long>(std::llround(svc.qps * cfg.sim.window_s));
        if (n_requests <= 0) continue;
        auto rng = rng::make_engine(state.seed, rng::Stream::kResponse,
                                    static_cast<std::uint64_t>(svc.pod_id), state.window_index);
        const double spacing = cfg.sim.window_s / static_cast<double>(n_requests);
        for (long long i = 0; i < n_requests; ++i) {
          RequestRecord rec;
          rec.timestamp_s =
              std::round((state.clock_s + (static_cast<double>(i) + 0.5) * spacing) * 1000.0) /
              1000.0;
          rec.pod_id = svc.pod_id;
          rec.response_ms = response_time(svc.base_service_ms, svc.window_avg_ns, cfg.response, rng);
          state.requests.push_back(rec);
        }
      }
    }
  }

  for (auto& node : state.nodes) {
    std::erase_if(node.services, [&](const SimService& svc) { return svc.end_s <= window_end; });
    detail::refresh_node_accounting(node);
  }

  for (auto& node : state.nodes) {
    node.cpu_util_accum += node.cpu_cur / node.cpu_sum;
    node.mem_util_accum += node.mem_cur / node.mem_sum;
    ++node.util_samples;
    detail::synthesize_metrics(node, state.seed, state.window_index);
  }

  state.clock_s = window_end;
  ++state.window_index;
}

// Assembles a scheduler-facing snapshot of one node. cpu/mem utilization
// track live accounting (so several placements within one tick see each
// other); the remaining telemetry is the last completed window's.
inline NodeSnapshot snapshot(const SimState& state, int node_id) {
  const SimNode* node = nullptr;
  for (const auto& n : state.nodes) {
    if (n.node_id == node_id) node = &n;
  }
  if (node == nullptr) throw NotFound("snapshot: unknown node " + std::to_string(node_id));

  NodeSnapshot snap;
  snap.node_id = node->node_id;
  snap.cpu_cur = node->cpu_cur;
  snap.cpu_sum = node->cpu_sum;
  snap.mem_cur = node->mem_cur;
  snap.mem_sum = node->mem_sum;
  snap.perf_metrics = node->perf;
  snap.perf_metrics[perf::kCpuUtilization] = node->cpu_cur / node->cpu_sum;
  snap.perf_metrics[perf::kMemoryUsage] = node->mem_cur / node->mem_sum;
  snap.hw_events = node->hw;
  snap.services.reserve(node->services.size());
  for (const auto& svc : node->services) {
    snap.services.push_back({svc.cls, svc.qps, svc.window_hist});
  }
  return snap;
}

inline std::vector<NodeSnapshot> snapshot_all(const SimState& state) {
  std::vector<NodeSnapshot> snaps;
  snaps.reserve(state.nodes.size());
  for (const auto& node : state.nodes) snaps.push_back(snapshot(state, node.node_id));
  return snaps;
}

}  // namespace ico

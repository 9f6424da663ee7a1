#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "ico/metrics.hpp"
#include "ico/model_io.hpp"
#include "ico/scheduler.hpp"
#include "ico/sim.hpp"
#include "ico/version.hpp"

namespace ico {

// Nearest-rank percentile: sort ascending, take element ceil(p*n) - 1.
inline double percentile(std::span<const double> samples, double p) {
  if (samples.empty()) throw EmptyInput("percentile: no samples");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("percentile: p must be in (0,1]");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(
      std::ceil(p * static_cast<double>(sorted.size())));
  return sorted[rank - 1];
}

// Population standard deviation of per-node time-mean utilizations (percent).
inline double utilization_stddev(std::span<const double> per_node_means_pct) {
  if (per_node_means_pct.size() < 2) {
    throw InsufficientNodes("utilization_stddev: need at least 2 nodes, got " +
                            std::to_string(per_node_means_pct.size()));
  }
  double mean = 0.0;
  for (double v : per_node_means_pct) mean += v;
  mean /= static_cast<double>(per_node_means_pct.size());
  double ss = 0.0;
  for (double v : per_node_means_pct) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(per_node_means_pct.size()));
}

struct PolicyMetrics {
  double avg_response_ms = 0.0;
  double p90_ms = 0.0;
  double p99_ms = 0.0;
  std::vector<double> cpu_util_mean_pct;  // per node, node_id order
  std::vector<double> mem_util_mean_pct;
  double cpu_std_pct = 0.0;
  double mem_std_pct = 0.0;
  std::int64_t placements = 0;
  std::int64_t no_feasible = 0;
  std::int64_t request_count = 0;
};

struct ExperimentReport {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string code_version = kCodeVersion;
  std::map<std::string, PolicyMetrics> policies;
};

struct DecisionRecord {
  double timestamp_s = 0.0;
  int pod_id = 0;
  std::optional<int> node_id;
  std::vector<CandidateScore> candidates;
};

struct PolicyRunResult {
  std::vector<RequestRecord> requests;
  std::vector<DecisionRecord> decisions;
  PolicyMetrics metrics;
};

struct FitEntry {
  std::string name;
  std::array<double, 3> coeffs{};  // c0 + c1 x + c2 x^2
  double mape = 0.0;
  double r2 = 0.0;
};

struct FitReport {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<FitEntry> entries;
};

namespace detail {

// Degree-2 least squares, solved on centered x for conditioning and mapped
// back to the raw basis.
inline std::array<double, 3> polyfit2(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("polyfit2: size mismatch");
  std::vector<double> distinct(x.begin(), x.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) {
    throw DegenerateFit("polyfit2: need at least 3 distinct x values, got " +
                        std::to_string(distinct.size()));
  }
  double mx = 0.0;
  for (double v : x) mx += v;
  mx /= static_cast<double>(x.size());

  double s0 = static_cast<double>(x.size());
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0, t0 = 0, t1 = 0, t2 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = x[i] - mx;
    const double u2 = u * u;
    s1 += u;
    s2 += u2;
    s3 += u2 * u;
    s4 += u2 * u2;
    t0 += y[i];
    t1 += u * y[i];
    t2 += u2 * y[i];
  }
  double a[3][4] = {{s0, s1, s2, t0}, {s1, s2, s3, t1}, {s2, s3, s4, t2}};
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    if (a[col][col] == 0.0) throw DegenerateFit("polyfit2: singular normal equations");
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (int cc = col; cc < 4; ++cc) a[r][cc] -= f * a[col][cc];
    }
  }
  const double b0 = a[0][3] / a[0][0];
  const double b1 = a[1][3] / a[1][1];
  const double b2 = a[2][3] / a[2][2];
  // Expand around the centering: y = b0 + b1 (x-m) + b2 (x-m)^2.
  return {b0 - b1 * mx + b2 * mx * mx, b1 - 2.0 * b2 * mx, b2};
}

inline double polyval(const std::array<double, 3>& c, double x) {
  return c[0] + c[1] * x + c[2] * x * x;
}

inline FitEntry fit_entry(const std::string& name, std::span<const double> x,
                          std::span<const double> y) {
  FitEntry e;
  e.name = name;
  e.coeffs = polyfit2(x, y);
  std::vector<double> preds(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) preds[i] = polyval(e.coeffs, x[i]);
  const EvalMetrics m = evaluate(preds, y);
  e.mape = m.mape;
  e.r2 = m.r2;
  return e;
}

inline void fill_resource_prediction(const AppConfig& cfg, const ModelBundle& models,
                                     PodRequest& pod) {
  if (pod.cls == ServiceClass::Offline) return;  // declared at arrival
  auto it = models.resources.find(pod.kind);
  if (it != models.resources.end()) {
    const auto pred = predict_resources(it->second.cpu, it->second.mem, pod.qps);
    pod.cpu_pred = pred.cpu_cores;
    pod.mem_pred = pred.mem_bytes;
    return;
  }
  // Without a trained model the declared demand curve stands in.
  const OnlineKind& kind = find_online_kind(cfg, pod.kind);
  pod.cpu_pred = kind.cpu_base + kind.cpu_per_qps * pod.qps;
  pod.mem_pred = kind.mem_base + kind.mem_per_qps * pod.qps;
}

}  // namespace detail

inline const std::vector<std::string>& known_policies() {
  static const std::vector<std::string> v{"ico", "rr", "hup", "lqp"};
  return v;
}

// Runs one policy over the full horizon: every window the simulator advances,
// then the pending queue is walked once, each pod either placed or left for
// the next tick.
inline PolicyRunResult run_policy(const AppConfig& cfg, const ModelBundle& models,
                                  const std::string& policy, std::uint64_t seed) {
  if (std::find(known_policies().begin(), known_policies().end(), policy) ==
      known_policies().end()) {
    throw NotFound("unknown policy: " + policy);
  }
  const InterferenceWeights iw = cfg.interference.weights();
  const SchedulerWeights& sw = cfg.scheduler;

  SimState state = init_sim(cfg, seed);
  RoundRobinCursor cursor;
  PolicyRunResult result;

  const auto n_windows = static_cast<std::uint64_t>(
      std::llround(cfg.sim.horizon_s / cfg.sim.window_s));
  for (std::uint64_t w = 0; w < n_windows; ++w) {
    step(state, cfg);

    std::deque<PodRequest> queue;
    std::swap(queue, state.pending);
    while (!queue.empty()) {
      PodRequest pod = std::move(queue.front());
      queue.pop_front();
      detail::fill_resource_prediction(cfg, models, pod);

      const auto snaps = snapshot_all(state);
      ScheduleDecision decision;
      if (policy == "ico") {
        decision = select_node_ico(snaps, pod, models.forest, iw, sw);
      } else if (policy == "hup") {
        decision = select_node_hup(snaps, pod, models.forest, iw, sw);
      } else if (policy == "rr") {
        decision = select_node_rr(cursor, snaps, pod);
      } else {
        decision = select_node_lqp(snaps, pod);
      }
      result.decisions.push_back(
          {state.clock_s, pod.pod_id, decision.node_id, std::move(decision.candidates)});
      if (decision.node_id) {
        place_pod(state, cfg, pod, *decision.node_id);
        ++result.metrics.placements;
      } else {
        ++result.metrics.no_feasible;
        state.pending.push_back(std::move(pod));
      }
    }
  }

  auto& m = result.metrics;
  m.request_count = static_cast<std::int64_t>(state.requests.size());
  if (!state.requests.empty()) {
    std::vector<double> responses;
    responses.reserve(state.requests.size());
    double sum = 0.0;
    for (const auto& r : state.requests) {
      responses.push_back(r.response_ms);
      sum += r.response_ms;
    }
    m.avg_response_ms = sum / static_cast<double>(responses.size());
    m.p90_ms = percentile(responses, 0.90);
    m.p99_ms = percentile(responses, 0.99);
  }
  for (const auto& node : state.nodes) {
    const double denom = node.util_samples > 0 ? static_cast<double>(node.util_samples) : 1.0;
    m.cpu_util_mean_pct.push_back(100.0 * node.cpu_util_accum / denom);
    m.mem_util_mean_pct.push_back(100.0 * node.mem_util_accum / denom);
  }
  if (m.cpu_util_mean_pct.size() >= 2) {
    m.cpu_std_pct = utilization_stddev(m.cpu_util_mean_pct);
    m.mem_std_pct = utilization_stddev(m.mem_util_mean_pct);
  }
  result.requests = std::move(state.requests);
  return result;
}

// Runs the requested policies from the same seed (common random numbers: the
// arrival sequence and every per-pod noise stream are identical across
// policies) and aggregates one report.
inline ExperimentReport run_comparison(const AppConfig& cfg, const ModelBundle& models,
                                       std::uint64_t seed,
                                       std::span<const std::string> policies,
                                       std::map<std::string, PolicyRunResult>* outputs = nullptr,
                                       int parallelism = 1) {
  ExperimentReport report;
  report.config_hash = config_hash(cfg);
  report.seed = seed;

  std::map<std::string, PolicyRunResult> results;
  if (parallelism > 1 && policies.size() > 1) {
    std::vector<std::pair<std::string, std::future<PolicyRunResult>>> futures;
    for (const auto& p : policies) {
      futures.emplace_back(p, std::async(std::launch::async, [&, p] {
                             return run_policy(cfg, models, p, seed);
                           }));
    }
    for (auto& [p, fut] : futures) results[p] = fut.get();
  } else {
    for (const auto& p : policies) results[p] = run_policy(cfg, models, p, seed);
  }

  for (auto& [p, r] : results) report.policies[p] = r.metrics;
  if (outputs != nullptr) *outputs = std::move(results);
  return report;
}

// Single-node sweeps reproducing the two motivation experiments: fixed QPS
// with growing offline cores, then fixed offline cores with growing QPS.
// Each (window, sweep point) pair contributes one sample; response is fitted
// against average scheduling latency and against CPU utilization.
inline FitReport motivation_fit(const AppConfig& cfg, std::uint64_t seed) {
  FitReport report;
  report.config_hash = config_hash(cfg);
  report.seed = seed;

  struct Samples {
    std::vector<double> runqlat, cpu, response;
  };

  auto sweep = [&](int exp_index, std::span<const double> qps_points,
                   std::span<const double> offline_core_points) {
    Samples samples;
    int point_index = 0;
    for (std::size_t pi = 0; pi < std::max(qps_points.size(), offline_core_points.size()); ++pi) {
      const double qps = qps_points[std::min(pi, qps_points.size() - 1)];
      const double offline_cores =
          offline_core_points[std::min(pi, offline_core_points.size() - 1)];

      AppConfig mini = cfg;
      mini.cluster.nodes = 1;
      mini.workloads.arrival_mean_s = 0.0;  // no stochastic arrivals
      mini.workloads.online_lifetime_s = 0.0;
      OnlineKind online = cfg.workloads.online_kinds.front();
      online.qps_target = qps;
      mini.workloads.online_kinds = {online};
      mini.workloads.offline_kinds = {
          {"sweep-offline", offline_cores, 1.0 * kGiB, 1e9}};
      mini.qps_walk.step_sigma = 0.0;  // hold QPS at the sweep point
      mini.sim.record_responses = true;
      const int total_windows = cfg.motivation.warmup_windows + cfg.motivation.windows_per_point;
      mini.sim.horizon_s = total_windows * cfg.sim.window_s;
      mini.sim.window_s = cfg.sim.window_s;

      const std::uint64_t run_seed =
          rng::derive_seed(seed, rng::Stream::kCalibration,
                           static_cast<std::uint64_t>(exp_index),
                           static_cast<std::uint64_t>(point_index));
      SimState state = init_sim(mini, run_seed);
      PodRequest online_pod;
      online_pod.pod_id = 0;
      online_pod.kind = online.name;
      online_pod.cls = ServiceClass::Online;
      online_pod.qps = qps;
      place_pod(state, mini, online_pod, 0);
      PodRequest offline_pod;
      offline_pod.pod_id = 1;
      offline_pod.kind = "sweep-offline";
      offline_pod.cls = ServiceClass::Offline;
      place_pod(state, mini, offline_pod, 0);

      for (int w = 0; w < total_windows; ++w) {
        const std::size_t before = state.requests.size();
        step(state, mini);
        if (w < cfg.motivation.warmup_windows) continue;
        const SimNode& node = state.nodes.front();
        const SimService* svc = nullptr;
        for (const auto& s : node.services) {
          if (s.cls == ServiceClass::Online) svc = &s;
        }
        if (svc == nullptr || state.requests.size() == before) continue;
        double sum = 0.0;
        for (std::size_t i = before; i < state.requests.size(); ++i) {
          sum += state.requests[i].response_ms;
        }
        samples.runqlat.push_back(svc->window_avg_ns);
        // The collected (noisy) reading, as the study would observe it.
        samples.cpu.push_back(node.perf[perf::kCpuUtilization]);
        samples.response.push_back(sum / static_cast<double>(state.requests.size() - before));
      }
      ++point_index;
    }
    return samples;
  };

  const std::vector<double> exp1_qps{cfg.motivation.exp1_qps};
  Samples exp1 = sweep(1, exp1_qps, cfg.motivation.exp1_offline_cores);
  const std::vector<double> exp2_cores{cfg.motivation.exp2_offline_cores};
  Samples exp2 = sweep(2, cfg.motivation.exp2_qps, exp2_cores);

  report.entries.push_back(detail::fit_entry("exp1_runqlat_response", exp1.runqlat, exp1.response));
  report.entries.push_back(detail::fit_entry("exp1_cpu_response", exp1.cpu, exp1.response));
  report.entries.push_back(detail::fit_entry("exp2_runqlat_response", exp2.runqlat, exp2.response));
  report.entries.push_back(detail::fit_entry("exp2_cpu_response", exp2.cpu, exp2.response));
  return report;
}

// Calibration pass for the resource predictors: one pod per online kind on
// its own node, QPS driven by the walk so each kind contributes a spread of
// (qps, demand) observations.
inline std::map<std::string, ResourceModels> fit_resource_models(const AppConfig& cfg,
                                                                 std::uint64_t seed) {
  AppConfig cal = cfg;
  cal.cluster.nodes = static_cast<int>(cfg.workloads.online_kinds.size());
  cal.workloads.arrival_mean_s = 0.0;
  cal.workloads.online_lifetime_s = 0.0;
  cal.workloads.qps_profile_csv.clear();
  cal.sim.record_responses = false;
  cal.qps_walk.step_sigma = std::max(cfg.qps_walk.step_sigma, 2.0);
  const int windows = 40;
  cal.sim.horizon_s = windows * cal.sim.window_s;

  SimState state = init_sim(cal, rng::derive_seed(seed, rng::Stream::kCalibration));
  for (std::size_t i = 0; i < cfg.workloads.online_kinds.size(); ++i) {
    const auto& kind = cfg.workloads.online_kinds[i];
    PodRequest pod;
    pod.pod_id = static_cast<int>(i);
    pod.kind = kind.name;
    pod.cls = ServiceClass::Online;
    pod.qps = kind.qps_target;
    place_pod(state, cal, pod, static_cast<int>(i));
  }

  std::map<std::string, std::vector<std::pair<double, double>>> cpu_samples, mem_samples;
  for (int w = 0; w < windows; ++w) {
    step(state, cal);
    for (const auto& node : state.nodes) {
      for (const auto& svc : node.services) {
        cpu_samples[svc.kind].emplace_back(svc.qps, svc.cpu_demand);
        mem_samples[svc.kind].emplace_back(svc.qps, svc.mem_demand);
      }
    }
  }

  std::map<std::string, ResourceModels> models;
  for (const auto& kind : cfg.workloads.online_kinds) {
    models[kind.name] = {fit_linear(cpu_samples.at(kind.name), "qps", "cores"),
                         fit_linear(mem_samples.at(kind.name), "qps", "bytes")};
  }
  return models;
}

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

// Builds a latency-prediction dataset from randomized simulations under a
// random placement policy: each online placement contributes the chosen
// node's pre-placement feature vector plus the pod's QPS, and the target is
// that pod's realized average scheduling latency over its first full window.
// Offline placements shape the node states but contribute no samples; their
// demand is declared up front, so there is nothing for the model to learn
// from a zero-QPS row it cannot identify.
inline TrainTestSplit generate_training_dataset(const AppConfig& cfg, int n_runs,
                                                std::uint64_t seed) {
  if (n_runs < 1) throw std::invalid_argument("generate_training_dataset: n_runs must be >= 1");
  Dataset all;

  for (int run = 0; run < n_runs; ++run) {
    auto vr = rng::make_engine(seed, rng::Stream::kDatasetConfig, static_cast<std::uint64_t>(run));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    AppConfig v = cfg;
    v.cluster.nodes = 4 + static_cast<int>(vr() % 7);  // 4..10
    v.workloads.arrival_mean_s = 6.0 + 10.0 * unit(vr);
    v.workloads.offline_fraction = 0.35 + 0.35 * unit(vr);
    v.workloads.online_lifetime_s = 400.0 + 500.0 * unit(vr);
    const double qps_scale = 0.5 + 1.5 * unit(vr);
    for (auto& kind : v.workloads.online_kinds) kind.qps_target *= qps_scale;
    const double duration_scale = 0.25 + 0.55 * unit(vr);
    for (auto& kind : v.workloads.offline_kinds) kind.duration_s *= duration_scale;
    v.sim.record_responses = false;

    const std::uint64_t run_seed =
        rng::derive_seed(seed, rng::Stream::kDataset, static_cast<std::uint64_t>(run));
    SimState state = init_sim(v, run_seed);

    struct OpenSample {
      FeatureVector features;
      int node_id;
      std::uint64_t placed_at;
    };
    std::unordered_map<int, OpenSample> open;

    const auto n_windows = static_cast<std::uint64_t>(
        std::llround(v.sim.horizon_s / v.sim.window_s));
    for (std::uint64_t w = 0; w < n_windows; ++w) {
      step(state, v);

      for (auto it = open.begin(); it != open.end();) {
        if (it->second.placed_at + 1 != state.window_index) {
          ++it;
          continue;
        }
        for (const auto& node : state.nodes) {
          if (node.node_id != it->second.node_id) continue;
          for (const auto& svc : node.services) {
            if (svc.pod_id == it->first) {
              all.push(it->second.features, svc.window_avg_ns);
              break;
            }
          }
        }
        it = open.erase(it);
      }

      std::deque<PodRequest> queue;
      std::swap(queue, state.pending);
      while (!queue.empty()) {
        PodRequest pod = std::move(queue.front());
        queue.pop_front();
        detail::fill_resource_prediction(v, ModelBundle{}, pod);

        std::vector<int> feasible;
        for (const auto& node : state.nodes) {
          if (pod.cpu_pred <= node.cpu_sum - node.cpu_cur + 1e-9 &&
              pod.mem_pred <= node.mem_sum - node.mem_cur + 1.0) {
            feasible.push_back(node.node_id);
          }
        }
        if (feasible.empty()) {
          state.pending.push_back(std::move(pod));
          continue;
        }
        auto prng = rng::make_engine(run_seed, rng::Stream::kPlacement,
                                     static_cast<std::uint64_t>(pod.pod_id), state.window_index);
        std::uniform_int_distribution<std::size_t> pick(0, feasible.size() - 1);
        const int node_id = feasible[pick(prng)];
        const bool sample = pod.cls == ServiceClass::Online;
        FeatureVector features;
        if (sample) features = build_feature_vector(snapshot(state, node_id), pod.qps);
        place_pod(state, v, pod, node_id);
        if (sample) open[pod.pod_id] = {std::move(features), node_id, state.window_index};
      }
    }
  }

  // Seeded 80/20 shuffle-split.
  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto srng = rng::make_engine(seed, rng::Stream::kSplit);
  std::shuffle(order.begin(), order.end(), srng);
  const std::size_t n_train = all.size() - all.size() / 5;

  TrainTestSplit split;
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto& dst = i < n_train ? split.train : split.test;
    dst.push(all.x[order[i]], all.y[order[i]]);
  }
  return split;
}

// ---- report serialization ----

inline nlohmann::json report_to_json(const ExperimentReport& report) {
  nlohmann::json j;
  j["config_hash"] = report.config_hash;
  j["seed"] = report.seed;
  j["code_version"] = report.code_version;
  nlohmann::json policies;
  for (const auto& [name, m] : report.policies) {
    policies[name] = {{"avg_response_ms", m.avg_response_ms},
                      {"p90_ms", m.p90_ms},
                      {"p99_ms", m.p99_ms},
                      {"cpu_util_mean_pct", m.cpu_util_mean_pct},
                      {"mem_util_mean_pct", m.mem_util_mean_pct},
                      {"cpu_std_pct", m.cpu_std_pct},
                      {"mem_std_pct", m.mem_std_pct},
                      {"placements", m.placements},
                      {"no_feasible", m.no_feasible},
                      {"request_count", m.request_count}};
  }
  j["policies"] = std::move(policies);
  return j;
}

inline ExperimentReport report_from_json(const nlohmann::json& j) {
  ExperimentReport report;
  report.config_hash = j.at("config_hash").get<std::string>();
  report.seed = j.at("seed").get<std::uint64_t>();
  report.code_version = j.at("code_version").get<std::string>();
  for (const auto& [name, m] : j.at("policies").items()) {
    PolicyMetrics pm;
    pm.avg_response_ms = m.at("avg_response_ms").get<double>();
    pm.p90_ms = m.at("p90_ms").get<double>();
    pm.p99_ms = m.at("p99_ms").get<double>();
    pm.cpu_util_mean_pct = m.at("cpu_util_mean_pct").get<std::vector<double>>();
    pm.mem_util_mean_pct = m.at("mem_util_mean_pct").get<std::vector<double>>();
    pm.cpu_std_pct = m.at("cpu_std_pct").get<double>();
    pm.mem_std_pct = m.at("mem_std_pct").get<double>();
    pm.placements = m.at("placements").get<std::int64_t>();
    pm.no_feasible = m.at("no_feasible").get<std::int64_t>();
    pm.request_count = m.at("request_count").get<std::int64_t>();
    report.policies[name] = std::move(pm);
  }
  return report;
}

inline nlohmann::json fit_report_to_json(const FitReport& report) {
  nlohmann::json j;
  j["config_hash"] = report.config_hash;
  j["seed"] = report.seed;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"name", e.name},
                       {"coeffs", e.coeffs},
                       {"mape", e.mape},
                       {"r2", e.r2}});
  }
  j["entries"] = std::move(entries);
  return j;
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw NotFound("cannot open for writing: " + path.string());
  out << j.dump(1) << '\n';
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open: " + path.string());
  nlohmann::json j;
  in >> j;
  return j;
}

// requests.csv: one row per simulated request, grouped by policy.
inline void write_requests_csv(const std::filesystem::path& path,
                               const std::map<std::string, PolicyRunResult>& results) {
  std::ofstream out(path);
  if (!out) throw NotFound("cannot open for writing: " + path.string());
  out << "policy,timestamp_s,pod_id,response_ms\n";
  std::string line;
  for (const auto& [policy, r] : results) {
    for (const auto& rec : r.requests) {
      line.clear();
      line += policy;
      line += ',';
      line += format_fixed3(rec.timestamp_s);
      line += ',';
      line += std::to_string(rec.pod_id);
      line += ',';
      line += format_fixed3(rec.response_ms);
      line += '\n';
      out << line;
    }
  }
}

inline nlohmann::json candidates_to_json(const std::vector<CandidateScore>& candidates) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : candidates) {
    arr.push_back({{"node", c.node_id},
                   {"u_cpu", c.u_cpu},
                   {"u_mem", c.u_mem},
                   {"util", c.util_term},
                   {"intf_h", c.intf_h},
                   {"intf_p", c.intf_p},
                   {"total", c.total},
                   {"feasible", c.feasible}});
  }
  return arr;
}

// decisions.csv: one row per placement attempt; the per-candidate score
// breakdown rides along as a JSON-encoded column.
inline void write_decisions_csv(const std::filesystem::path& path,
                                const std::map<std::string, PolicyRunResult>& results) {
  std::ofstream out(path);
  if (!out) throw NotFound("cannot open for writing: " + path.string());
  out << "policy,timestamp_s,pod_id,node_id,candidates\n";
  for (const auto& [policy, r] : results) {
    for (const auto& d : r.decisions) {
      out << policy << ',' << format_fixed3(d.timestamp_s) << ',' << d.pod_id << ','
          << (d.node_id ? *d.node_id : -1) << ','
          << csv_quote(candidates_to_json(d.candidates).dump()) << '\n';
    }
  }
}

// Run directories are named by config hash and seed so reruns land in the
// same place and identical inputs are easy to spot.
inline std::filesystem::path make_run_dir(const std::filesystem::path& out_root,
                                          const AppConfig& cfg, std::uint64_t seed) {
  auto dir = out_root / (config_hash(cfg) + "-" + std::to_string(seed));
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_config_snapshot(const std::filesystem::path& dir, const AppConfig& cfg,
                                  std::uint64_t seed) {
  AppConfig resolved = cfg;
  resolved.sim.seed = seed;
  write_json_file(dir / "config.json", to_json(resolved));
}

}  // namespace ico

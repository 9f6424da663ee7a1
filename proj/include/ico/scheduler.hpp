#pragma once

#include <algorithm>
#include <cassert>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ico/features.hpp"
#include "ico/forest.hpp"
#include "ico/interference.hpp"
#include "ico/types.hpp"

namespace ico {

struct SchedulerWeights {
  double w_d = 1.2;   // CPU headroom factor, > 1
  double w_e = 1.25;  // memory headroom factor, > 1
  double cpu_threshold = 0.70;
  double mem_threshold = 0.80;

  void validate() const {
    if (!(w_d > 1.0)) throw std::invalid_argument("SchedulerWeights: w_d must be > 1");
    if (!(w_e > 1.0)) throw std::invalid_argument("SchedulerWeights: w_e must be > 1");
    if (!(cpu_threshold > 0.0 && cpu_threshold <= 1.0)) {
      throw std::invalid_argument("SchedulerWeights: cpu_threshold must be in (0,1]");
    }
    if (!(mem_threshold > 0.0 && mem_threshold <= 1.0)) {
      throw std::invalid_argument("SchedulerWeights: mem_threshold must be in (0,1]");
    }
  }
};

// Per-candidate score breakdown, kept for the decision log.
struct CandidateScore {
  int node_id = 0;
  double u_cpu = 0.0;
  double u_mem = 0.0;
  double util_term = 0.0;
  double intf_h = 0.0;
  double intf_p = 0.0;
  double total = 0.0;
  bool feasible = false;
};

// Outcome of one placement attempt. An empty node_id means no feasible node.
struct ScheduleDecision {
  std::optional<int> node_id;
  std::vector<CandidateScore> candidates;
};

struct Projection {
  double u_cpu = 0.0;
  double u_mem = 0.0;
};

// Projected utilization once the pod lands, with headroom factors folded in.
// Values above 1 are meaningful: they signal infeasibility to the caller.
inline Projection utilization_projection(const NodeSnapshot& node, const PodRequest& pod,
                                         const SchedulerWeights& w) {
  assert(node.cpu_sum > 0.0 && node.mem_sum > 0.0);
  return {(node.cpu_cur + w.w_d * pod.cpu_pred) / node.cpu_sum,
          (node.mem_cur + w.w_e * pod.mem_pred) / node.mem_sum};
}

inline double ico_score(const NodeSnapshot& node, const PodRequest& pod, double intf_h,
                        double intf_p, const SchedulerWeights& w) {
  const Projection u = utilization_projection(node, pod, w);
  return (1.0 - u.u_cpu) * (1.0 - u.u_mem) - intf_h - intf_p;
}

inline double hup_score(const NodeSnapshot& node, const PodRequest& pod, double intf_h,
                        double intf_p, const SchedulerWeights& w) {
  const Projection u = utilization_projection(node, pod, w);
  return u.u_cpu * u.u_mem - intf_h - intf_p;
}

// All policies refuse to place a pod that does not fit in a node's remaining
// raw capacity, independent of the soft utilization thresholds.
inline bool raw_capacity_fits(const NodeSnapshot& node, const PodRequest& pod) {
  return pod.cpu_pred <= node.cpu_sum - node.cpu_cur + 1e-9 &&
         pod.mem_pred <= node.mem_sum - node.mem_cur + 1e-9;
}

namespace detail {

inline std::vector<std::size_t> by_node_id(std::span<const NodeSnapshot> nodes) {
  std::vector<std::size_t> order(nodes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return nodes[a].node_id < nodes[b].node_id; });
  return order;
}

enum class ScoreKind { Ico, Hup };

inline ScheduleDecision select_scored(std::span<const NodeSnapshot> nodes, const PodRequest& pod,
                                      const ForestModel& predictor, const InterferenceWeights& iw,
                                      const SchedulerWeights& sw, ScoreKind kind,
                                      InterferenceDiagnostics* diag) {
  sw.validate();
  if (nodes.empty()) throw EmptyInput("select_node: empty node list");
  ScheduleDecision decision;
  decision.candidates.reserve(nodes.size());
  double best = -std::numeric_limits<double>::infinity();
  // Ascending node_id plus strict improvement implements the lowest-id
  // tie-break and makes the result independent of input order.
  for (std::size_t pos : by_node_id(nodes)) {
    const NodeSnapshot& node = nodes[pos];
    const Projection u = utilization_projection(node, pod, sw);
    CandidateScore cs;
    cs.node_id = node.node_id;
    cs.u_cpu = u.u_cpu;
    cs.u_mem = u.u_mem;
    cs.util_term =
        kind == ScoreKind::Ico ? (1.0 - u.u_cpu) * (1.0 - u.u_mem) : u.u_cpu * u.u_mem;
    const bool within_thresholds = u.u_cpu <= sw.cpu_threshold && u.u_mem <= sw.mem_threshold;
    if (raw_capacity_fits(node, pod) && within_thresholds) {
      cs.feasible = true;
      cs.intf_h = node_interference(node, iw);
      const double predicted = predict_latency(predictor, build_feature_vector(node, pod.qps));
      cs.intf_p = pod_interference(predicted, iw, diag);
      cs.total = cs.util_term - cs.intf_h - cs.intf_p;
      if (cs.total > best) {
        best = cs.total;
        decision.node_id = node.node_id;
      }
    }
    decision.candidates.push_back(cs);
  }
  return decision;
}

}  // namespace detail

// Interference-aware selection: filter candidates by projected utilization
// thresholds, score the rest by free-capacity product minus node and pod
// interference, and take the argmax (lowest node_id on ties).
inline ScheduleDecision select_node_ico(std::span<const NodeSnapshot> nodes, const PodRequest& pod,
                                        const ForestModel& predictor,
                                        const InterferenceWeights& iw, const SchedulerWeights& sw,
                                        InterferenceDiagnostics* diag = nullptr) {
  return detail::select_scored(nodes, pod, predictor, iw, sw, detail::ScoreKind::Ico, diag);
}

// High-utilization-priority baseline: same candidate filtering, but scores
// reward the projected utilization product instead of free capacity.
inline ScheduleDecision select_node_hup(std::span<const NodeSnapshot> nodes, const PodRequest& pod,
                                        const ForestModel& predictor,
                                        const InterferenceWeights& iw, const SchedulerWeights& sw,
                                        InterferenceDiagnostics* diag = nullptr) {
  return detail::select_scored(nodes, pod, predictor, iw, sw, detail::ScoreKind::Hup, diag);
}

// Round-robin cursor: position in the node list ordered by node_id.
struct RoundRobinCursor {
  std::size_t next = 0;
};

inline ScheduleDecision select_node_rr(RoundRobinCursor& cursor,
                                       std::span<const NodeSnapshot> nodes,
                                       const PodRequest& pod) {
  if (nodes.empty()) throw EmptyInput("select_node_rr: empty node list");
  const auto order = detail::by_node_id(nodes);
  const std::size_t n = order.size();
  ScheduleDecision decision;
  decision.candidates.reserve(n);
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t pos = (cursor.next + step) % n;
    const NodeSnapshot& node = nodes[order[pos]];
    CandidateScore cs;
    cs.node_id = node.node_id;
    cs.feasible = raw_capacity_fits(node, pod);
    decision.candidates.push_back(cs);
    if (cs.feasible) {
      decision.node_id = node.node_id;
      cursor.next = (pos + 1) % n;
      break;
    }
  }
  return decision;
}

// Low-QPS-priority baseline: the capacity-feasible node with the smallest
// total online QPS wins; ties go to the lowest node_id.
inline ScheduleDecision select_node_lqp(std::span<const NodeSnapshot> nodes,
                                        const PodRequest& pod) {
  if (nodes.empty()) throw EmptyInput("select_node_lqp: empty node list");
  ScheduleDecision decision;
  decision.candidates.reserve(nodes.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t pos : detail::by_node_id(nodes)) {
    const NodeSnapshot& node = nodes[pos];
    double qps_sum = 0.0;
    for (const auto& svc : node.services) {
      if (svc.cls == ServiceClass::Online) qps_sum += svc.qps;
    }
    CandidateScore cs;
    cs.node_id = node.node_id;
    cs.total = qps_sum;  // selection minimizes this value
    cs.feasible = raw_capacity_fits(node, pod);
    if (cs.feasible && qps_sum < best) {
      best = qps_sum;
      decision.node_id = node.node_id;
    }
    decision.candidates.push_back(cs);
  }
  return decision;
}

}  // namespace ico

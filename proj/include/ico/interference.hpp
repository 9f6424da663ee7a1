#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

#include "ico/runqlat.hpp"
#include "ico/types.hpp"

namespace ico {

// Weights for the interference scores. w_a and w_b scale the online and
// offline contributions and must both exceed 1; w_c scales the pod-side
// prediction and must be positive. norm_ns divides the nanosecond-scale
// latency sums so the scores sit on the same scale as the [0,1] utilization
// terms they are combined with; norm_ns = 1 leaves raw nanoseconds.
class InterferenceWeights {
 public:
  InterferenceWeights(double w_a, double w_b, double w_c,
                      double norm_ns = RunqlatHistogram::kMaxAvgNs)
      : w_a_(w_a), w_b_(w_b), w_c_(w_c), norm_ns_(norm_ns) {
    if (!(w_a > 1.0)) throw std::invalid_argument("InterferenceWeights: w_a must be > 1");
    if (!(w_b > 1.0)) throw std::invalid_argument("InterferenceWeights: w_b must be > 1");
    if (!(w_c > 0.0)) throw std::invalid_argument("InterferenceWeights: w_c must be > 0");
    if (!(norm_ns > 0.0)) throw std::invalid_argument("InterferenceWeights: norm_ns must be > 0");
  }

  static InterferenceWeights defaults() { return {2.0, 1.5, 1.0}; }

  double w_a() const { return w_a_; }
  double w_b() const { return w_b_; }
  double w_c() const { return w_c_; }
  double norm_ns() const { return norm_ns_; }

 private:
  double w_a_, w_b_, w_c_, norm_ns_;
};

// Counters for conditions worth surfacing but not failing on.
struct InterferenceDiagnostics {
  std::uint64_t negative_predictions = 0;
};

// Node-side interference: weighted sum of every resident service's average
// scheduling latency, online and offline summed separately, then rescaled
// by norm_ns. Empty service lists contribute nothing.
inline double node_interference(std::span<const RunqlatHistogram> online,
                                std::span<const RunqlatHistogram> offline,
                                const InterferenceWeights& w) {
  double online_sum = 0.0;
  for (const auto& h : online) online_sum += h.avg_ns();
  double offline_sum = 0.0;
  for (const auto& h : offline) offline_sum += h.avg_ns();
  return (w.w_a() * online_sum + w.w_b() * offline_sum) / w.norm_ns();
}

inline double node_interference(const NodeSnapshot& node, const InterferenceWeights& w) {
  double online_sum = 0.0;
  double offline_sum = 0.0;
  for (const auto& svc : node.services) {
    if (svc.cls == ServiceClass::Online) {
      online_sum += svc.runqlat.avg_ns();
    } else {
      offline_sum += svc.runqlat.avg_ns();
    }
  }
  return (w.w_a() * online_sum + w.w_b() * offline_sum) / w.norm_ns();
}

// Pod-side interference: the predicted average scheduling latency the pod
// would see on the candidate node, weighted and rescaled. A negative
// prediction is clamped to zero and counted in the diagnostics.
inline double pod_interference(double predicted_avg_ns, const InterferenceWeights& w,
                               InterferenceDiagnostics* diag = nullptr) {
  if (predicted_avg_ns < 0.0) {
    if (diag != nullptr) ++diag->negative_predictions;
    predicted_avg_ns = 0.0;
  }
  return w.w_c() * predicted_avg_ns / w.norm_ns();
}

}  // namespace ico

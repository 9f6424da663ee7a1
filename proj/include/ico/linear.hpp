#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>

#include "ico/errors.hpp"

namespace ico {

// Ordinary least-squares line y = slope * x + intercept.
struct LinearModel {
  double slope = 0.0;
  double intercept = 0.0;
  std::string input_label;
  std::string output_label;

  double operator()(double x) const { return slope * x + intercept; }
};

inline LinearModel fit_linear(std::span<const std::pair<double, double>> samples,
                              std::string input_label = {}, std::string output_label = {}) {
  if (samples.size() < 2) {
    throw DegenerateFit("fit_linear: need at least 2 samples, got " +
                        std::to_string(samples.size()));
  }
  double mean_x = 0.0, mean_y = 0.0;
  for (const auto& [x, y] : samples) {
    mean_x += x;
    mean_y += y;
  }
  const double n = static_cast<double>(samples.size());
  mean_x /= n;
  mean_y /= n;

  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : samples) {
    sxx += (x - mean_x) * (x - mean_x);
    sxy += (x - mean_x) * (y - mean_y);
  }
  if (sxx == 0.0) {
    throw DegenerateFit("fit_linear: zero variance in x");
  }
  LinearModel m;
  m.slope = sxy / sxx;
  m.intercept = mean_y - m.slope * mean_x;
  m.input_label = std::move(input_label);
  m.output_label = std::move(output_label);
  return m;
}

struct ResourcePrediction {
  double cpu_cores = 0.0;
  double mem_bytes = 0.0;
};

// Evaluates both resource models at the given QPS; negative raw predictions
// clamp to zero.
inline ResourcePrediction predict_resources(const LinearModel& cpu_model,
                                            const LinearModel& mem_model, double qps) {
  return {std::max(0.0, cpu_model(qps)), std::max(0.0, mem_model(qps))};
}

}  // namespace ico

#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>

#include "ico/errors.hpp"

namespace ico {

// Regression quality metrics. r2 (and mape, when every truth is zero) use
// NaN as the "undefined" sentinel rather than failing.
struct EvalMetrics {
  double mae = 0.0;
  double mse = 0.0;
  double mape = 0.0;
  double r2 = 0.0;
};

inline EvalMetrics evaluate(std::span<const double> predictions, std::span<const double> truths) {
  if (predictions.size() != truths.size()) {
    throw ShapeError("evaluate: " + std::to_string(predictions.size()) + " predictions vs " +
                     std::to_string(truths.size()) + " truths");
  }
  if (predictions.empty()) {
    throw ShapeError("evaluate: empty inputs");
  }
  const double n = static_cast<double>(predictions.size());

  double abs_sum = 0.0, sq_sum = 0.0, pct_sum = 0.0, truth_sum = 0.0;
  std::size_t pct_terms = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double err = predictions[i] - truths[i];
    abs_sum += std::abs(err);
    sq_sum += err * err;
    truth_sum += truths[i];
    if (truths[i] != 0.0) {
      pct_sum += std::abs(err) / std::abs(truths[i]);
      ++pct_terms;
    }
  }

  EvalMetrics m;
  m.mae = abs_sum / n;
  m.mse = sq_sum / n;
  m.mape = pct_terms > 0 ? pct_sum / static_cast<double>(pct_terms)
                         : std::numeric_limits<double>::quiet_NaN();

  const double truth_mean = truth_sum / n;
  double ss_tot = 0.0;
  for (double t : truths) ss_tot += (t - truth_mean) * (t - truth_mean);
  m.r2 = ss_tot == 0.0 ? std::numeric_limits<double>::quiet_NaN() : 1.0 - sq_sum / ss_tot;
  return m;
}

}  // namespace ico

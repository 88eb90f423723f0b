#pragma once

#include <array>
#include <span>
#include <vector>

namespace mothbench {

struct ADResult {
  double statistic = 0.0;   // A2akN, midrank form that allows ties
  double normalized = 0.0;  // (A2 - (k - 1)) / sigma_N
  double p_value = 1.0;     // approximate, see ad_k_sample
  std::array<double, 7> critical_values{};  // normalized scale, for the levels below
  static constexpr std::array<double, 7> significance_levels{0.25, 0.1, 0.05, 0.025, 0.01, 0.005, 0.001};
};

// k-sample Anderson-Darling test (Scholz & Stephens 1987).
//
// The p-value interpolates log(p) quadratically against the tabulated
// critical values of the normalized statistic. Outside the table the log(p)
// curve is continued linearly with the slope at the nearest end, and the
// result is capped at 1. It is an approximation, not an exact finite-sample
// p-value.
//
// Throws InvalidInput for fewer than two samples, any sample with fewer
// than five observations, or a pooled sample with a single distinct value.
ADResult ad_k_sample(std::span<const std::vector<double>> samples);

}  // namespace mothbench

#include "mothbench/anderson_darling.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "mothbench/errors.hpp"

namespace mothbench {

namespace {

// Scholz & Stephens (1987), table of t_m = b0 + b1 / sqrt(m) + b2 / m.
constexpr std::array<double, 7> kB0{0.675, 1.281, 1.645, 1.96, 2.326, 2.573, 3.085};
constexpr std::array<double, 7> kB1{-0.245, 0.25, 0.678, 1.149, 1.822, 2.364, 3.615};
constexpr std::array<double, 7> kB2{-0.105, -0.305, -0.362, -0.391, -0.396, -0.345, -0.154};

// Number of elements of sorted `v` strictly below / at most `x`.
std::size_t count_below(const std::vector<double>& v, double x) {
  return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
}
std::size_t count_at_most(const std::vector<double>& v, double x) {
  return static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), x) - v.begin());
}

double approximate_p(const std::array<double, 7>& crit, double t) {
  Eigen::Matrix<double, 7, 3> design;
  Eigen::Matrix<double, 7, 1> logp;
  for (int i = 0; i < 7; ++i) {
    design(i, 0) = crit[i] * crit[i];
    design(i, 1) = crit[i];
    design(i, 2) = 1.0;
    logp(i) = std::log(ADResult::significance_levels[i]);
  }
  const Eigen::Vector3d c = (design.transpose() * design).ldlt().solve(design.transpose() * logp);
  auto poly = [&](double x) { return (c(0) * x + c(1)) * x + c(2); };
  auto slope = [&](double x) { return 2.0 * c(0) * x + c(1); };

  double lp;
  if (t > crit.back()) {
    lp = poly(crit.back()) + slope(crit.back()) * (t - crit.back());
  } else if (t < crit.front()) {
    lp = poly(crit.front()) + slope(crit.front()) * (t - crit.front());
  } else {
    lp = poly(t);
  }
  return std::min(1.0, std::exp(lp));
}

}  // namespace

ADResult ad_k_sample(std::span<const std::vector<double>> samples) {
  const std::size_t k = samples.size();
  if (k < 2) throw InvalidInput("Anderson-Darling needs at least two samples");

  std::vector<std::vector<double>> sorted;
  sorted.reserve(k);
  std::vector<double> pooled;
  for (std::size_t i = 0; i < k; ++i) {
    if (samples[i].size() < 5) {
      throw InvalidInput("Anderson-Darling sample " + std::to_string(i) + " has fewer than 5 observations");
    }
    for (double x : samples[i]) {
      if (!std::isfinite(x)) throw InvalidInput("Anderson-Darling samples must be finite");
    }
    sorted.emplace_back(samples[i]);
    std::ranges::sort(sorted.back());
    pooled.insert(pooled.end(), samples[i].begin(), samples[i].end());
  }
  std::ranges::sort(pooled);
  std::vector<double> distinct = pooled;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) throw InvalidInput("Anderson-Darling needs at least two distinct pooled values");

  const auto N = static_cast<double>(pooled.size());

  double a2 = 0.0;
  for (const auto& s : sorted) {
    const auto ni = static_cast<double>(s.size());
    double inner = 0.0;
    for (double z : distinct) {
      const auto below = static_cast<double>(count_below(pooled, z));
      const auto lj = static_cast<double>(count_at_most(pooled, z)) - below;
      const double bj = below + lj / 2.0;
      const auto s_below = static_cast<double>(count_below(s, z));
      const auto fij = static_cast<double>(count_at_most(s, z)) - s_below;
      const double mij = s_below + fij / 2.0;
      const double num = N * mij - bj * ni;
      inner += lj / N * num * num / (bj * (N - bj) - N * lj / 4.0);
    }
    a2 += inner / ni;
  }
  a2 *= (N - 1.0) / N;

  // Variance of A2 under the null.
  double H = 0.0;
  for (const auto& s : sorted) H += 1.0 / static_cast<double>(s.size());
  const auto n_int = static_cast<long long>(pooled.size());
  double h = 0.0;
  for (long long i = 1; i <= n_int - 1; ++i) h += 1.0 / static_cast<double>(i);
  // g = sum_{i=1}^{N-2} sum_{j=i+1}^{N-1} 1 / ((N - i) j), via partial sums.
  double g = 0.0;
  double tail = 0.0;
  for (long long t = 0; t <= n_int - 3; ++t) {
    tail += 1.0 / static_cast<double>(n_int - 1 - t);
    g += tail / static_cast<double>(t + 2);
  }
  const auto kk = static_cast<double>(k);
  const double a = (4 * g - 6) * (kk - 1) + (10 - 6 * g) * H;
  const double b = (2 * g - 4) * kk * kk + 8 * h * kk + (2 * g - 14 * h - 4) * H - 8 * h + 4 * g - 6;
  const double c = (6 * h + 2 * g - 2) * kk * kk + (4 * h - 4 * g + 6) * kk + (2 * h - 6) * H + 4 * h;
  const double d = (2 * h + 6) * kk * kk - 4 * h * kk;
  const double sigma2 = (a * N * N * N + b * N * N + c * N + d) / ((N - 1.0) * (N - 2.0) * (N - 3.0));

  ADResult r;
  r.statistic = a2;
  const double m = kk - 1.0;
  r.normalized = (a2 - m) / std::sqrt(sigma2);
  for (std::size_t i = 0; i < 7; ++i) r.critical_values[i] = kB0[i] + kB1[i] / std::sqrt(m) + kB2[i] / m;
  r.p_value = approximate_p(r.critical_values, r.normalized);
  return r;
}

}  // namespace mothbench

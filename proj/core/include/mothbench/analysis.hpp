#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mothbench/navigator.hpp"
#include "mothbench/segmentation.hpp"
#include "mothbench/trajectory.hpp"

namespace mothbench {

struct DtwAlignment {
  double cost = 0.0;                                     // accumulated per-pair cost
  std::vector<std::pair<std::size_t, std::size_t>> path;  // (index in a, index in b), in order
};

// Per-pair cost is the mean absolute componentwise difference. Among equal
// cost predecessors the shorter warping path wins, which keeps the result
// symmetric in its arguments. Throws InvalidInput on an empty input.
DtwAlignment dtw_align(const Trajectory& a, const Trajectory& b);

// DTW cost divided by warping-path length (metres).
double dtw_mae(const Trajectory& a, const Trajectory& b);

// Coefficient of determination of `model` against `reference`, pairing
// samples along the DTW path and pooling the three axes. Clamped to [0, 1].
// Throws InvalidInput when the reference has zero variance.
double r_squared(const Trajectory& reference, const Trajectory& model);

struct FitReport {
  double mae = 0.0;
  double r_squared = 0.0;
};

FitReport fit_report(const Trajectory& reference, const Trajectory& model);

// Distance bins [i * w, (i + 1) * w) with w = 2 * bin_radius, covering
// [0, max_distance).
struct DistanceBins {
  double bin_radius = 0.06;
  double max_distance = 2.04;

  std::size_t count() const;
  double center(std::size_t i) const { return (2.0 * static_cast<double>(i) + 1.0) * bin_radius; }
  std::optional<std::size_t> bin_of(double distance) const;
};

// Exploration / exploitation step counts per distance bin for one flight.
struct FlightBinCounts {
  std::vector<std::size_t> exploration;
  std::vector<std::size_t> exploitation;

  std::size_t total(std::size_t bin) const { return exploration[bin] + exploitation[bin]; }
  // explore / (explore + exploit); nullopt for an empty bin.
  std::optional<double> fraction(std::size_t bin) const;
  // explore / exploit; nullopt unless both counts are positive.
  std::optional<double> ratio(std::size_t bin) const;
};

struct EERProfile {
  double bin_radius = 0.06;
  std::vector<double> bin_centers;
  std::vector<double> mean_eer;  // exploration fraction
  std::vector<double> std_eer;
  std::vector<std::optional<double>> mean_ratio;
  std::vector<std::optional<double>> std_ratio;
  std::vector<std::size_t> counts;  // samples behind each mean
  std::vector<std::size_t> steps;   // velocity steps in each bin

  // Bins with at least `min_count` samples.
  std::vector<std::size_t> occupied(std::size_t min_count = 1) const;
};

// Assigns every velocity step its segment label and its distance from
// `target`. Throws InvalidInput when the segmentation does not cover the
// record's velocity series.
FlightBinCounts bin_counts(const FlightRecord& record, const Segmentation& seg, const Vec3& target,
                           const DistanceBins& bins = {});

// Single-flight profile: counts are steps; std is zero.
EERProfile eer_profile(const FlightRecord& record, const Segmentation& seg, const Vec3& target,
                       double bin_radius = 0.06);

// Mean and population std across flights of the per-flight bin fraction and
// ratio; counts are the number of flights occupying each bin.
EERProfile aggregate_eer(std::span<const FlightBinCounts> flights, const DistanceBins& bins = {});

// Exploration fraction over the whole velocity series of one flight.
double mean_eer(const FlightRecord& record, const Segmentation& seg);

enum class Plane { XY, XZ, YZ };

Trajectory project_plane(const Trajectory& traj, Plane plane);

// Share of pooled, mean-centred variance along x, y and z. With
// `principal_components` the eigenvalues of the pooled covariance are
// returned instead, largest first. Throws InvalidInput with fewer than two
// samples or when every point coincides.
std::array<double, 3> axis_variance_fractions(std::span<const Trajectory> trajectories,
                                              bool principal_components = false);

// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::size_t> counts;
};

// Equal-width bins over [lo, hi]; values outside are clamped to the edge bins.
Histogram histogram(std::span<const double> values, std::size_t bins, double lo, double hi);

}  // namespace mothbench

#include "mothbench/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mothbench/errors.hpp"

namespace mothbench {

namespace {

double pair_cost(const Vec3& a, const Vec3& b) {
  return (std::abs(a.x - b.x) + std::abs(a.y - b.y) + std::abs(a.z - b.z)) / 3.0;
}

struct Cell {
  double cost = std::numeric_limits<double>::infinity();
  std::size_t length = 0;
};

bool better(const Cell& a, const Cell& b) {
  return a.cost < b.cost || (a.cost == b.cost && a.length < b.length);
}

void require_covers(const FlightRecord& record, const Segmentation& seg) {
  const std::size_t n = record.trajectory.size();
  if (n < kStencilMinSamples || seg.series_length != n - 4) {
    throw InvalidInput("segmentation does not cover the flight's velocity series");
  }
  seg.validate();
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& v) {
  MeanStd out;
  if (v.empty()) return out;
  out.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - out.mean) * (x - out.mean);
  out.std = std::sqrt(ss / static_cast<double>(v.size()));
  return out;
}

}  // namespace

DtwAlignment dtw_align(const Trajectory& a, const Trajectory& b) {
  if (a.empty() || b.empty()) throw InvalidInput("DTW needs non-empty trajectories");
  const std::size_t n = a.size();
  const std::size_t m = b.size();

  // 0 = diagonal, 1 = from (i-1, j), 2 = from (i, j-1)
  std::vector<std::uint8_t> step(n * m, 0);
  std::vector<Cell> prev(m);
  std::vector<Cell> curr(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double c = pair_cost(a[i], b[j]);
      if (i == 0 && j == 0) {
        curr[j] = {c, 1};
        continue;
      }
      Cell best;
      std::uint8_t dir = 0;
      if (i > 0 && j > 0) best = prev[j - 1];
      if (i > 0 && better(prev[j], best)) {
        best = prev[j];
        dir = 1;
      }
      if (j > 0 && better(curr[j - 1], best)) {
        best = curr[j - 1];
        dir = 2;
      }
      curr[j] = {best.cost + c, best.length + 1};
      step[i * m + j] = dir;
    }
    std::swap(prev, curr);
  }

  DtwAlignment out;
  out.cost = prev[m - 1].cost;
  out.path.reserve(prev[m - 1].length);
  std::size_t i = n - 1;
  std::size_t j = m - 1;
  while (true) {
    out.path.emplace_back(i, j);
    if (i == 0 && j == 0) break;
    switch (step[i * m + j]) {
      case 0:
        --i;
        --j;
        break;
      case 1:
        --i;
        break;
      default:
        --j;
        break;
    }
  }
  std::ranges::reverse(out.path);
  return out;
}

double dtw_mae(const Trajectory& a, const Trajectory& b) {
  const DtwAlignment al = dtw_align(a, b);
  return al.cost / static_cast<double>(al.path.size());
}

double r_squared(const Trajectory& reference, const Trajectory& model) {
  if (reference.empty() || model.empty()) throw InvalidInput("r_squared needs non-empty trajectories");
  Vec3 mean;
  for (const auto& p : reference.samples()) mean += p;
  mean = mean / static_cast<double>(reference.size());

  const DtwAlignment al = dtw_align(reference, model);
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (const auto& [i, j] : al.path) {
    ss_res += squared_norm(reference[i] - model[j]);
    ss_tot += squared_norm(reference[i] - mean);
  }
  if (!(ss_tot > 0.0)) throw InvalidInput("r_squared is undefined for a zero-variance reference");
  return std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
}

FitReport fit_report(const Trajectory& reference, const Trajectory& model) {
  return {dtw_mae(reference, model), r_squared(reference, model)};
}

std::size_t DistanceBins::count() const {
  if (!(bin_radius > 0.0) || !(max_distance > 0.0)) throw InvalidInput("distance bins need positive sizes");
  return static_cast<std::size_t>(std::ceil(max_distance / (2.0 * bin_radius) - 1e-9));
}

std::optional<std::size_t> DistanceBins::bin_of(double d) const {
  if (!(d >= 0.0) || d >= max_distance) return std::nullopt;
  return std::min(static_cast<std::size_t>(d / (2.0 * bin_radius)), count() - 1);
}

std::optional<double> FlightBinCounts::fraction(std::size_t bin) const {
  const std::size_t t = total(bin);
  if (t == 0) return std::nullopt;
  return static_cast<double>(exploration[bin]) / static_cast<double>(t);
}

std::optional<double> FlightBinCounts::ratio(std::size_t bin) const {
  if (exploration[bin] == 0 && exploitation[bin] == 0) return std::nullopt;
  if (exploitation[bin] == 0) return std::nullopt;
  return static_cast<double>(exploration[bin]) / static_cast<double>(exploitation[bin]);
}

std::vector<std::size_t> EERProfile::occupied(std::size_t min_count) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] >= min_count && counts[i] > 0) out.push_back(i);
  }
  return out;
}

FlightBinCounts bin_counts(const FlightRecord& record, const Segmentation& seg, const Vec3& target,
                           const DistanceBins& bins) {
  require_covers(record, seg);
  const std::size_t nb = bins.count();
  FlightBinCounts out{std::vector<std::size_t>(nb, 0), std::vector<std::size_t>(nb, 0)};
  const std::vector<Phase> labels = seg.step_labels();
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const auto bin = bins.bin_of(distance(record.trajectory[j + 2], target));
    if (!bin) continue;
    if (labels[j] == Phase::Exploration) {
      ++out.exploration[*bin];
    } else {
      ++out.exploitation[*bin];
    }
  }
  return out;
}

EERProfile eer_profile(const FlightRecord& record, const Segmentation& seg, const Vec3& target, double bin_radius) {
  DistanceBins bins;
  bins.bin_radius = bin_radius;
  const FlightBinCounts c = bin_counts(record, seg, target, bins);
  EERProfile p;
  p.bin_radius = bin_radius;
  for (std::size_t i = 0; i < bins.count(); ++i) {
    p.bin_centers.push_back(bins.center(i));
    p.mean_eer.push_back(c.fraction(i).value_or(0.0));
    p.std_eer.push_back(0.0);
    p.mean_ratio.push_back(c.ratio(i));
    p.std_ratio.push_back(c.ratio(i) ? std::optional<double>(0.0) : std::nullopt);
    p.counts.push_back(c.total(i));
    p.steps.push_back(c.total(i));
  }
  return p;
}

EERProfile aggregate_eer(std::span<const FlightBinCounts> flights, const DistanceBins& bins) {
  EERProfile p;
  p.bin_radius = bins.bin_radius;
  const std::size_t nb = bins.count();
  for (std::size_t i = 0; i < nb; ++i) {
    std::vector<double> fractions;
    std::vector<double> ratios;
    std::size_t steps = 0;
    for (const auto& f : flights) {
      if (f.exploration.size() != nb) throw InvalidInput("flight bin counts do not match the bin layout");
      steps += f.total(i);
      if (auto fr = f.fraction(i)) fractions.push_back(*fr);
      if (auto r = f.ratio(i)) ratios.push_back(*r);
    }
    const MeanStd fs = mean_std(fractions);
    p.bin_centers.push_back(bins.center(i));
    p.mean_eer.push_back(fs.mean);
    p.std_eer.push_back(fs.std);
    if (ratios.empty()) {
      p.mean_ratio.emplace_back();
      p.std_ratio.emplace_back();
    } else {
      const MeanStd rs = mean_std(ratios);
      p.mean_ratio.emplace_back(rs.mean);
      p.std_ratio.emplace_back(rs.std);
    }
    p.counts.push_back(fractions.size());
    p.steps.push_back(steps);
  }
  return p;
}

double mean_eer(const FlightRecord& record, const Segmentation& seg) {
  require_covers(record, seg);
  std::size_t explore = 0;
  for (std::size_t i = 0; i < seg.segment_count(); ++i) {
    if (seg.labels[i] == Phase::Exploration) explore += seg.end(i) - seg.start(i);
  }
  return static_cast<double>(explore) / static_cast<double>(seg.series_length);
}

Trajectory project_plane(const Trajectory& traj, Plane plane) {
  std::vector<Vec3> out(traj.samples().begin(), traj.samples().end());
  for (auto& p : out) {
    switch (plane) {
      case Plane::XY:
        p.z = 0.0;
        break;
      case Plane::XZ:
        p.y = 0.0;
        break;
      case Plane::YZ:
        p.x = 0.0;
        break;
    }
  }
  return Trajectory(std::move(out), traj.dt());
}

std::array<double, 3> axis_variance_fractions(std::span<const Trajectory> trajectories, bool principal_components) {
  std::size_t total = 0;
  Vec3 mean;
  for (const auto& t : trajectories) {
    for (const auto& p : t.samples()) mean += p;
    total += t.size();
  }
  if (total < 2) throw InvalidInput("axis_variance_fractions needs at least two samples");
  mean = mean / static_cast<double>(total);

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& t : trajectories) {
    for (const auto& p : t.samples()) {
      const Eigen::Vector3d d(p.x - mean.x, p.y - mean.y, p.z - mean.z);
      cov += d * d.transpose();
    }
  }
  const double trace = cov.trace();
  if (!(trace > 0.0)) throw InvalidInput("axis_variance_fractions is undefined when all points coincide");

  std::array<double, 3> out{};
  if (principal_components) {
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov, Eigen::EigenvaluesOnly);
    const Eigen::Vector3d ev = eig.eigenvalues();  // ascending
    const double sum = ev.cwiseMax(0.0).sum();
    for (int i = 0; i < 3; ++i) out[static_cast<std::size_t>(i)] = std::max(0.0, ev(2 - i)) / sum;
  } else {
    for (int i = 0; i < 3; ++i) out[static_cast<std::size_t>(i)] = cov(i, i) / trace;
  }
  return out;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidInput("spearman needs equal-length inputs");
  if (x.size() < 2) throw InvalidInput("spearman needs at least two points");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(rx.size());
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(ry.size());
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

Histogram histogram(std::span<const double> values, std::size_t bins, double lo, double hi) {
  if (bins == 0 || !(hi > lo)) throw InvalidInput("histogram needs bins > 0 and hi > lo");
  Histogram h{lo, hi, std::vector<std::size_t>(bins, 0)};
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double v : values) {
    const double pos = std::floor((v - lo) / width);
    const auto idx = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(bins - 1)));
    ++h.counts[idx];
  }
  return h;
}

}  // namespace mothbench

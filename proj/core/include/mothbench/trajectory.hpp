#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mothbench/vec3.hpp"

namespace mothbench {

// Uniformly sampled 3D position sequence.
class Trajectory {
 public:
  Trajectory() = default;
  // Throws InvalidInput when dt <= 0 or any sample is non-finite.
  Trajectory(std::vector<Vec3> samples, double dt);

  std::span<const Vec3> samples() const noexcept { return samples_; }
  const Vec3& operator[](std::size_t i) const { return samples_[i]; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  double dt() const noexcept { return dt_; }
  double duration() const noexcept {
    return samples_.empty() ? 0.0 : dt_ * static_cast<double>(samples_.size() - 1);
  }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  std::vector<Vec3> samples_;
  double dt_ = 1.0;
};

// Velocity estimates at interior trajectory samples. values[j] belongs to
// trajectory sample j + offset.
struct VelocitySeries {
  std::vector<Vec3> values;
  std::size_t offset = 2;

  std::size_t size() const noexcept { return values.size(); }
  const Vec3& operator[](std::size_t i) const { return values[i]; }
};

inline constexpr std::size_t kStencilMinSamples = 5;

// Central five-point first-derivative stencil,
//   v_i = (l[i-2] - 8 l[i-1] + 8 l[i+1] - l[i+2]) / (12 dt),
// evaluated for i in [2, n-3]. Exact for polynomials up to degree four.
// Throws InvalidInput for trajectories shorter than five samples.
VelocitySeries velocity_profile(const Trajectory& traj);

}  // namespace mothbench

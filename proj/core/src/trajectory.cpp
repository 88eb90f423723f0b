#include "mothbench/trajectory.hpp"

#include <string>
#include <utility>

#include "mothbench/errors.hpp"

namespace mothbench {

Trajectory::Trajectory(std::vector<Vec3> samples, double dt) : samples_(std::move(samples)), dt_(dt) {
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw InvalidInput("trajectory dt must be positive and finite");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!is_finite(samples_[i])) {
      throw InvalidInput("trajectory sample " + std::to_string(i) + " is not finite");
    }
  }
}

VelocitySeries velocity_profile(const Trajectory& traj) {
  const std::size_t n = traj.size();
  if (n < kStencilMinSamples) {
    throw InvalidInput("velocity_profile needs at least 5 samples, got " + std::to_string(n));
  }
  VelocitySeries out;
  out.offset = 2;
  out.values.reserve(n - 4);
  const double scale = 1.0 / (12.0 * traj.dt());
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const Vec3 d = (traj[i - 2] - traj[i + 2]) + 8.0 * (traj[i + 1] - traj[i - 1]);
    out.values.push_back(d * scale);
  }
  return out;
}

}  // namespace mothbench

#include "mothbench/plume.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mothbench/errors.hpp"

namespace mothbench {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr Vec3 kUp{0.0, 0.0, 1.0};
// Kernel terms below exp(-kCutoff) are dropped.
constexpr double kCutoff = 50.0;

Vec3 wake_crossflow(const WindModel& w, const Vec3& pos, const Vec3& source, double t, double phase) {
  const double downstream = dot(pos - source, w.mean_direction);
  if (downstream < 0.0 || downstream > w.wake_length) return {};
  // Travelling wave: a puff riding the mean flow sees a constant phase.
  const double wavelength = w.mean_speed / w.shedding_frequency;
  const double amplitude = w.wake_gain * w.turbulence_intensity * w.mean_speed;
  const double arg = kTwoPi * (w.shedding_frequency * t - downstream / wavelength) + phase;
  return w.crosswind_axis() * (amplitude * std::sin(arg));
}

bool has_wake(const WindModel& w) { return w.disturbed && w.shedding_frequency > 0.0; }
}  // namespace

Vec3 Box::clamp(const Vec3& p) const {
  return {std::clamp(p.x, lo.x, hi.x), std::clamp(p.y, lo.y, hi.y), std::clamp(p.z, lo.z, hi.z)};
}

void WindModel::validate() const {
  if (!(mean_speed > 0.0)) throw ConfigError("wind mean_speed must be positive");
  if (!(turbulence_intensity >= 0.0)) throw ConfigError("wind turbulence_intensity must be >= 0");
  if (!is_finite(mean_direction) || std::abs(norm(mean_direction) - 1.0) > 1e-9) {
    throw ConfigError("wind mean_direction must be a unit vector");
  }
  if (meander_frequency < 0.0 || shedding_frequency < 0.0 || wake_length < 0.0 || wake_gain < 0.0) {
    throw ConfigError("wind meander/wake parameters must be non-negative");
  }
}

Vec3 WindModel::crosswind_axis() const {
  const Vec3 c = cross(kUp, mean_direction);
  return norm(c) > 0.0 ? normalized(c) : Vec3{0.0, 1.0, 0.0};
}

Vec3 WindModel::mean_velocity(double t, double phase) const {
  const Vec3 base = mean_direction * mean_speed;
  if (meander_amplitude == 0.0) return base;
  const double angle = meander_amplitude * std::sin(kTwoPi * meander_frequency * t + phase);
  return rotate(base, kUp, angle);
}

Vec3 WindModel::velocity_at(const Vec3& pos, const Vec3& source, double t, double phase) const {
  Vec3 v = mean_velocity(t, phase);
  if (has_wake(*this)) v += wake_crossflow(*this, pos, source, t, phase);
  return v;
}

void advance_plume(PlumeState& state, const WindModel& wind, double dt, Rng& rng) {
  if (dt < 0.0) throw InvalidInput("plume step dt must be >= 0");
  if (dt == 0.0) return;

  const double sigma = wind.turbulence_intensity * wind.mean_speed;
  const Vec3 mean = wind.mean_velocity(state.time, state.phase);
  const bool wake = has_wake(wind);
  std::normal_distribution<double> fluct(0.0, sigma > 0.0 ? sigma : 1.0);
  for (Puff& p : state.puffs) {
    Vec3 v = mean;
    if (wake) v += wake_crossflow(wind, p.center, state.source_position, state.time, state.phase);
    if (sigma > 0.0) {
      const double fx = fluct(rng);
      const double fy = fluct(rng);
      const double fz = fluct(rng);
      v += Vec3{fx, fy, fz};
    }
    p.center += v * dt;
    p.radius += state.growth_rate * dt;
  }

  state.release_residual += state.release_rate * dt;
  // The epsilon absorbs rounding in the accumulated rate * dt.
  const auto spawn = static_cast<std::size_t>(std::floor(state.release_residual + 1e-9));
  state.release_residual = std::max(0.0, state.release_residual - static_cast<double>(spawn));
  for (std::size_t i = 0; i < spawn; ++i) {
    state.puffs.push_back({state.source_position, state.initial_radius, state.puff_mass});
  }

  std::erase_if(state.puffs, [&](const Puff& p) { return !state.domain.contains(p.center); });
  state.time += dt;
}

PlumeState step_plume(const PlumeState& state, const WindModel& wind, double dt, Rng& rng) {
  PlumeState next = state;
  advance_plume(next, wind, dt, rng);
  return next;
}

double concentration_at(const PlumeState& state, const Vec3& pos) {
  double c = 0.0;
  for (const Puff& p : state.puffs) {
    const double r2 = p.radius * p.radius;
    const double e = squared_norm(pos - p.center) / (2.0 * r2);
    if (e > kCutoff) continue;
    const double var = kTwoPi * r2;
    c += p.mass / (var * std::sqrt(var)) * std::exp(-e);
  }
  return c;
}

bool sense(double c, double threshold, double noise_mean, double noise_std, Rng& rng) {
  return c + gaussian(rng, noise_mean, noise_std) > threshold;
}

}  // namespace mothbench

#pragma once

#include <vector>

#include "mothbench/random.hpp"
#include "mothbench/vec3.hpp"

namespace mothbench {

struct Box {
  Vec3 lo;
  Vec3 hi;

  bool contains(const Vec3& p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z && p.z <= hi.z;
  }
  Vec3 clamp(const Vec3& p) const;
};

// Mean wind plus its fluctuating parts. The meander swings the mean
// direction about the vertical axis; in disturbed mode a travelling
// sinusoidal crossflow (a crude vortex street) acts within `wake_length`
// downstream of the source.
struct WindModel {
  double mean_speed = 0.25;                // m/s
  Vec3 mean_direction{-1.0, 0.0, 0.0};     // unit, source -> release point
  double turbulence_intensity = 0.05;      // fluctuation std / mean_speed
  double meander_amplitude = 0.08;         // rad
  double meander_frequency = 0.1;          // Hz
  bool disturbed = false;
  double wake_length = 0.6;                // m downstream of the source
  double shedding_frequency = 1.0;         // Hz; St 0.2 for a 0.05 m cylinder at 0.25 m/s
  double wake_gain = 4.0;                  // crossflow amplitude / (turbulence_intensity * mean_speed)

  // Throws ConfigError on a non-positive speed, negative intensity or a
  // non-unit direction.
  void validate() const;

  // Horizontal unit vector perpendicular to the mean direction.
  Vec3 crosswind_axis() const;
  // Mean wind rotated by the meander angle at time t (phase in radians).
  Vec3 mean_velocity(double t, double phase = 0.0) const;
  // Deterministic part of the local wind: mean + meander + wake crossflow.
  Vec3 velocity_at(const Vec3& pos, const Vec3& source, double t, double phase = 0.0) const;
};

struct Puff {
  Vec3 center;
  double radius = 0.0;  // m
  double mass = 0.0;    // odor units
};

struct PlumeState {
  std::vector<Puff> puffs;
  double time = 0.0;
  Vec3 source_position{2.0, 0.5, 0.5};
  double release_rate = 10.0;      // puffs/s
  double growth_rate = 0.01;       // m/s of radius
  double initial_radius = 0.005;   // m
  double puff_mass = 1.0;
  Box domain{{-0.5, 0.0, 0.0}, {2.2, 1.0, 1.0}};
  double release_residual = 0.0;   // fractional puff carried to the next step
  double phase = 0.0;              // meander / wake phase offset (rad)
};

// Advances the plume by dt in place. dt == 0 leaves the state and rng
// untouched. Throws InvalidInput for dt < 0.
void advance_plume(PlumeState& state, const WindModel& wind, double dt, Rng& rng);

// Value-returning form of advance_plume.
PlumeState step_plume(const PlumeState& state, const WindModel& wind, double dt, Rng& rng);

// Superposition of isotropic Gaussian kernels, one per puff.
double concentration_at(const PlumeState& state, const Vec3& pos);

// Binary detector: (c + g) > threshold with g ~ N(noise_mean, noise_std).
bool sense(double c, double threshold, double noise_mean, double noise_std, Rng& rng);

}  // namespace mothbench

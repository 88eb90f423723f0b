#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mothbench/phase.hpp"
#include "mothbench/plume.hpp"
#include "mothbench/trajectory.hpp"

namespace mothbench {

struct AgentConfig {
  double max_speed = 0.45;               // m/s
  double surge_speed = 0.2;              // m/s
  double max_acceleration = 6.0;         // m/s^2
  double surge_duration = 0.5;           // s
  double cast_crosswind_speed = 0.35;    // m/s
  double cast_upwind_bias = 0.2;         // m/s
  double cast_leg_duration = 0.2;        // s per crosswind leg
  double sensor_threshold = 1000.0;       // odor units / m^3
  double sensor_noise_mean = 0.0;
  double sensor_noise_std = 5.0;
  double wind_direction_noise_std = 0.02; // rad
  double capture_radius = 0.1;           // m
  Vec3 start_position{0.0, 0.5, 0.5};    // 2 m downwind of the default source
  double max_flight_time = 40.0;         // s
  double hold_altitude = 0.5;            // m, height the surge controller tracks
  double altitude_gain = 1.0;            // 1/s
  bool start_surging = false;

  void validate() const;
};

enum class FlightMode : std::uint8_t { Cast, Surge };

struct AgentState {
  Vec3 position;
  Vec3 velocity;
  FlightMode mode = FlightMode::Cast;
  double timer_remaining = 0.0;  // surge timer
  int cast_sign = 1;             // side of the current crosswind leg
  double leg_remaining = 0.0;    // time left on the current cast leg
};

inline Phase phase_of(FlightMode m) {
  return m == FlightMode::Surge ? Phase::Exploitation : Phase::Exploration;
}

// One control step. A detection (re)arms the surge timer; an expired timer
// drops back to casting on the opposite side. The commanded acceleration is
// clipped to max_acceleration, then speed to max_speed, then the position is
// advanced by explicit Euler with the pre-step velocity. `upwind` is the
// agent's (noisy) estimate of the upwind unit vector. Throws InvalidInput
// for dt <= 0.
AgentState step_agent(const AgentState& state, const AgentConfig& cfg, bool detected, const Vec3& upwind,
                      double dt);

struct PlumeConfig {
  Vec3 source_position{2.0, 0.5, 0.5};
  double release_rate = 10.0;
  double growth_rate = 0.01;
  double initial_radius = 0.03;
  double puff_mass = 1.0;
  Box domain{{-0.5, 0.0, 0.0}, {2.2, 1.0, 1.0}};
  double warmup_time = 10.0;  // plume spin-up before the agent is released

  void validate() const;
  PlumeState initial_state() const;
};

struct Scenario {
  std::string id = "undisturbed";
  WindModel wind;
  PlumeConfig plume;
  AgentConfig agent;
  Box arena{{-0.3, 0.0, 0.0}, {2.2, 1.0, 1.0}};  // walls the agent cannot cross
  double dt = 1.0 / 75.0;

  // Throws ConfigError.
  void validate() const;
};

struct FlightRecord {
  Trajectory trajectory;
  std::vector<Phase> true_labels;  // one per trajectory sample
  bool success = false;
  std::uint64_t seed = 0;
  std::string scenario_id;
};

// Co-steps plume and agent until capture or max_flight_time. Deterministic
// in (scenario, seed).
FlightRecord run_flight(const Scenario& scenario, std::uint64_t seed);

// Resamples each trajectory by arc length to the median sample count and
// averages pointwise. Throws InvalidInput on empty input.
Trajectory mean_path(std::span<const Trajectory> trajectories);
// As above; additionally rejects unsuccessful flights.
Trajectory mean_path(std::span<const FlightRecord> records);

// Arc-length parameterised resampling to `count` samples spanning the path.
Trajectory resample_arc_length(const Trajectory& traj, std::size_t count);

}  // namespace mothbench

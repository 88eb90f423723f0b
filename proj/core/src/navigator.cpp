#include "mothbench/navigator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mothbench/errors.hpp"

namespace mothbench {

namespace {

constexpr Vec3 kUp{0.0, 0.0, 1.0};

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(what);
}

// Uniform direction on the unit sphere.
Vec3 random_unit(Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> phi(0.0, 2.0 * std::numbers::pi);
  const double z = u(rng);
  const double a = phi(rng);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(a), r * std::sin(a), z};
}

Vec3 perturb_direction(const Vec3& dir, double angle_std, Rng& rng) {
  if (angle_std <= 0.0) return dir;
  const Vec3 axis = random_unit(rng);
  return normalized(rotate(dir, axis, gaussian(rng, 0.0, angle_std)));
}

// Horizontal unit vector perpendicular to the given upwind direction.
Vec3 crosswind_axis(const Vec3& up) {
  const Vec3 side = cross(kUp, up);
  return norm(side) > 1e-12 ? normalized(side) : Vec3{0.0, 1.0, 0.0};
}

}  // namespace

void AgentConfig::validate() const {
  require(max_speed >= 0.0, "agent max_speed must be >= 0");
  require(surge_speed >= 0.0 && surge_speed <= max_speed, "agent surge_speed must lie in [0, max_speed]");
  require(max_acceleration > 0.0, "agent max_acceleration must be positive");
  require(surge_duration > 0.0, "agent surge_duration must be positive");
  require(cast_crosswind_speed >= 0.0 && cast_upwind_bias >= 0.0, "agent cast speeds must be >= 0");
  require(cast_leg_duration > 0.0, "agent cast_leg_duration must be positive");
  require(sensor_noise_std >= 0.0, "agent sensor_noise_std must be >= 0");
  require(wind_direction_noise_std >= 0.0, "agent wind_direction_noise_std must be >= 0");
  require(capture_radius > 0.0, "agent capture_radius must be positive");
  require(max_flight_time >= 0.0, "agent max_flight_time must be >= 0");
  require(altitude_gain >= 0.0, "agent altitude_gain must be >= 0");
  require(is_finite(start_position), "agent start_position must be finite");
}

AgentState step_agent(const AgentState& state, const AgentConfig& cfg, bool detected, const Vec3& upwind,
                      double dt) {
  if (!(dt > 0.0)) throw InvalidInput("agent step dt must be positive");

  AgentState next = state;
  if (detected) {
    next.mode = FlightMode::Surge;
    next.timer_remaining = cfg.surge_duration;
  } else if (next.mode == FlightMode::Surge) {
    next.timer_remaining -= dt;
    if (next.timer_remaining <= 0.0) {
      next.mode = FlightMode::Cast;
      next.timer_remaining = 0.0;
      next.cast_sign = -next.cast_sign;
      // First leg is half length so the zigzag straddles the point of loss.
      next.leg_remaining = 0.5 * cfg.cast_leg_duration;
    }
  } else {
    next.leg_remaining -= dt;
    if (next.leg_remaining <= 0.0) {
      next.cast_sign = -next.cast_sign;
      next.leg_remaining += cfg.cast_leg_duration;
    }
  }

  const Vec3 up = normalized(upwind);
  Vec3 desired;
  if (next.mode == FlightMode::Surge) {
    desired = up * cfg.surge_speed;
    desired.z += -cfg.altitude_gain * (state.position.z - cfg.hold_altitude);
    desired = clip_norm(desired, cfg.max_speed);
  } else {
    desired = crosswind_axis(up) * (next.cast_sign * cfg.cast_crosswind_speed) + up * cfg.cast_upwind_bias;
  }

  const Vec3 accel = clip_norm((desired - state.velocity) / dt, cfg.max_acceleration);
  next.velocity = clip_norm(state.velocity + accel * dt, cfg.max_speed);
  next.position = state.position + state.velocity * dt;
  return next;
}

void PlumeConfig::validate() const {
  require(is_finite(source_position), "plume source_position must be finite");
  require(release_rate >= 0.0, "plume release_rate must be >= 0");
  require(growth_rate >= 0.0, "plume growth_rate must be >= 0");
  require(initial_radius > 0.0, "plume initial_radius must be positive");
  require(puff_mass > 0.0, "plume puff_mass must be positive");
  require(warmup_time >= 0.0, "plume warmup_time must be >= 0");
  require(domain.contains(source_position), "plume source must lie inside the domain");
}

PlumeState PlumeConfig::initial_state() const {
  PlumeState s;
  s.source_position = source_position;
  s.release_rate = release_rate;
  s.growth_rate = growth_rate;
  s.initial_radius = initial_radius;
  s.puff_mass = puff_mass;
  s.domain = domain;
  return s;
}

void Scenario::validate() const {
  if (id.empty()) throw ConfigError("scenario id must not be empty");
  require(dt > 0.0 && std::isfinite(dt), "scenario dt must be positive");
  wind.validate();
  plume.validate();
  agent.validate();
  require(arena.contains(agent.start_position), "agent start_position must lie inside the arena");
}

FlightRecord run_flight(const Scenario& scenario, std::uint64_t seed) {
  scenario.validate();
  const AgentConfig& cfg = scenario.agent;
  const double dt = scenario.dt;

  Rng plume_rng = make_rng(seed, 1);
  Rng sensor_rng = make_rng(seed, 2);
  Rng wind_rng = make_rng(seed, 3);

  PlumeState plume = scenario.plume.initial_state();
  plume.phase = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(plume_rng);
  const auto warmup_steps = static_cast<std::size_t>(std::llround(scenario.plume.warmup_time / dt));
  for (std::size_t i = 0; i < warmup_steps; ++i) advance_plume(plume, scenario.wind, dt, plume_rng);

  const Vec3 target = scenario.plume.source_position;
  // The agent is released already flying, so the record has no take-off
  // transient.
  AgentState agent;
  agent.position = cfg.start_position;
  agent.cast_sign = std::uniform_int_distribution<int>(0, 1)(wind_rng) == 0 ? -1 : 1;
  agent.leg_remaining = 0.5 * cfg.cast_leg_duration;
  const Vec3 up0 = normalized(-scenario.wind.mean_direction);
  if (cfg.start_surging) {
    agent.mode = FlightMode::Surge;
    agent.timer_remaining = cfg.surge_duration;
    agent.velocity = up0 * cfg.surge_speed;
  } else {
    agent.velocity = clip_norm(crosswind_axis(up0) * (agent.cast_sign * cfg.cast_crosswind_speed) +
                                   up0 * cfg.cast_upwind_bias,
                               cfg.max_speed);
  }

  FlightRecord rec;
  rec.seed = seed;
  rec.scenario_id = scenario.id;
  std::vector<Vec3> samples{agent.position};
  rec.true_labels.push_back(phase_of(agent.mode));
  bool captured = distance(agent.position, target) <= cfg.capture_radius;

  const auto max_steps = static_cast<std::size_t>(std::floor(cfg.max_flight_time / dt + 1e-9));
  for (std::size_t step = 1; step <= max_steps && !captured; ++step) {
    advance_plume(plume, scenario.wind, dt, plume_rng);
    const double c = concentration_at(plume, agent.position);
    const bool detected = sense(c, cfg.sensor_threshold, cfg.sensor_noise_mean, cfg.sensor_noise_std, sensor_rng);
    const Vec3 wind = scenario.wind.velocity_at(agent.position, target, plume.time, plume.phase);
    const Vec3 upwind = perturb_direction(normalized(-wind), cfg.wind_direction_noise_std, wind_rng);

    agent = step_agent(agent, cfg, detected, upwind, dt);
    const Vec3 clamped = scenario.arena.clamp(agent.position);
    if (!(clamped == agent.position)) {
      // Hitting a wall stops motion into it; a casting agent turns back.
      const Vec3 hit = agent.position - clamped;
      if (hit.x != 0.0) agent.velocity.x = 0.0;
      if (hit.y != 0.0) agent.velocity.y = 0.0;
      if (hit.z != 0.0) agent.velocity.z = 0.0;
      agent.position = clamped;
      if (agent.mode == FlightMode::Cast && hit.y != 0.0) {
        agent.cast_sign = -agent.cast_sign;
        agent.leg_remaining = cfg.cast_leg_duration;
      }
    }

    samples.push_back(agent.position);
    rec.true_labels.push_back(phase_of(agent.mode));
    captured = distance(agent.position, target) <= cfg.capture_radius;
  }

  rec.trajectory = Trajectory(std::move(samples), dt);
  rec.success = captured;
  return rec;
}

Trajectory resample_arc_length(const Trajectory& traj, std::size_t count) {
  if (traj.empty()) throw InvalidInput("cannot resample an empty trajectory");
  if (count == 0) throw InvalidInput("resample count must be positive");
  const auto pts = traj.samples();
  const double duration = traj.duration();
  const double out_dt = count > 1 && duration > 0.0 ? duration / static_cast<double>(count - 1) : traj.dt();

  std::vector<double> cum(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) cum[i] = cum[i - 1] + distance(pts[i], pts[i - 1]);
  const double total = cum.back();

  std::vector<Vec3> out;
  out.reserve(count);
  if (total <= 0.0 || count == 1) {
    out.assign(count, pts.front());
    return Trajectory(std::move(out), out_dt);
  }
  std::size_t seg = 0;
  for (std::size_t j = 0; j < count; ++j) {
    const double s = total * static_cast<double>(j) / static_cast<double>(count - 1);
    while (seg + 2 < pts.size() && cum[seg + 1] < s) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double w = len > 0.0 ? std::clamp((s - cum[seg]) / len, 0.0, 1.0) : 0.0;
    out.push_back(pts[seg] + (pts[seg + 1] - pts[seg]) * w);
  }
  return Trajectory(std::move(out), out_dt);
}

Trajectory mean_path(std::span<const Trajectory> trajectories) {
  if (trajectories.empty()) throw InvalidInput("mean_path needs at least one trajectory");
  std::vector<std::size_t> lengths;
  lengths.reserve(trajectories.size());
  for (const auto& t : trajectories) {
    if (t.empty()) throw InvalidInput("mean_path got an empty trajectory");
    lengths.push_back(t.size());
  }
  std::ranges::sort(lengths);
  const std::size_t count = lengths[(lengths.size() - 1) / 2];

  std::vector<Vec3> acc(count);
  double dt_sum = 0.0;
  for (const auto& t : trajectories) {
    const Trajectory r = resample_arc_length(t, count);
    for (std::size_t i = 0; i < count; ++i) acc[i] += r[i];
    dt_sum += r.dt();
  }
  const double inv = 1.0 / static_cast<double>(trajectories.size());
  for (auto& p : acc) p *= inv;
  return Trajectory(std::move(acc), dt_sum * inv);
}

Trajectory mean_path(std::span<const FlightRecord> records) {
  if (records.empty()) throw InvalidInput("mean_path needs at least one flight record");
  std::vector<Trajectory> trajs;
  trajs.reserve(records.size());
  for (const auto& r : records) {
    if (!r.success) throw InvalidInput("mean_path accepts successful flights only");
    trajs.push_back(r.trajectory);
  }
  return mean_path(std::span<const Trajectory>(trajs));
}

}  // namespace mothbench

#include <doctest.h>

#include <cmath>

#include "mothbench/errors.hpp"
#include "mothbench/navigator.hpp"

using namespace mothbench;

namespace {

const Vec3 kUpwind{1.0, 0.0, 0.0};

// Final position after T seconds of clipped-acceleration surge from rest.
double surge_distance(double accel, double T, double dt) {
  AgentConfig cfg;
  cfg.max_speed = 100.0;
  cfg.surge_speed = 100.0;
  cfg.max_acceleration = accel;
  cfg.altitude_gain = 0.0;
  AgentState s;
  s.mode = FlightMode::Surge;
  s.timer_remaining = 1e9;
  const auto steps = static_cast<int>(std::lround(T / dt));
  for (int i = 0; i < steps; ++i) s = step_agent(s, cfg, true, kUpwind, dt);
  CHECK(s.velocity.x == doctest::Approx(accel * T).epsilon(1e-9));
  return s.position.x;
}

double success_rate(double noise_std, std::size_t flights) {
  Scenario sc;
  sc.agent.sensor_noise_std = noise_std;
  std::size_t ok = 0;
  for (std::size_t s = 0; s < flights; ++s) ok += run_flight(sc, 1000 + s).success ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(flights);
}

}  // namespace

TEST_SUITE("navigator") {
  TEST_CASE("detection starts a surge") {
    AgentConfig cfg;
    AgentState s;
    s.mode = FlightMode::Cast;
    const AgentState n = step_agent(s, cfg, true, kUpwind, 1.0 / 75.0);
    CHECK(n.mode == FlightMode::Surge);
    CHECK(n.timer_remaining == cfg.surge_duration);
  }

  TEST_CASE("expired surge falls back to casting on the other side") {
    AgentConfig cfg;
    AgentState s;
    s.mode = FlightMode::Surge;
    s.timer_remaining = 0.005;
    s.cast_sign = 1;
    const AgentState n = step_agent(s, cfg, false, kUpwind, 0.01);
    CHECK(n.mode == FlightMode::Cast);
    CHECK(n.cast_sign == -1);
    CHECK(n.timer_remaining == 0.0);
  }

  TEST_CASE("acceleration is clipped") {
    AgentConfig cfg;
    cfg.max_speed = 10.0;
    cfg.surge_speed = 3.0;
    cfg.max_acceleration = 2.0;
    cfg.altitude_gain = 0.0;
    const double dt = 0.5;  // commanded 3 / 0.5 = 6 = 3 * max_acceleration
    AgentState s;
    const AgentState n = step_agent(s, cfg, true, kUpwind, dt);
    CHECK(norm(n.velocity - s.velocity) / dt == doctest::Approx(cfg.max_acceleration));
  }

  TEST_CASE("speed is clipped") {
    AgentConfig cfg;
    AgentState s;
    s.velocity = {5.0, 0.0, 0.0};
    const AgentState n = step_agent(s, cfg, true, kUpwind, 1.0 / 75.0);
    CHECK(norm(n.velocity) <= cfg.max_speed + 1e-12);
  }

  TEST_CASE("euler position uses the pre-step velocity") {
    AgentConfig cfg;
    AgentState s;
    s.position = {1, 2, 3};
    s.velocity = {0.1, 0.0, 0.0};
    const AgentState n = step_agent(s, cfg, false, kUpwind, 0.5);
    CHECK(n.position.x == doctest::Approx(1.05));
  }

  TEST_CASE("non-positive dt is rejected") {
    CHECK_THROWS_AS(step_agent(AgentState{}, AgentConfig{}, false, kUpwind, 0.0), InvalidInput);
  }

  TEST_CASE("constant acceleration kinematics") {
    const double a = 2.0, T = 1.0;
    const double exact = 0.5 * a * T * T;
    const double coarse = surge_distance(a, T, 0.01);
    const double fine = surge_distance(a, T, 0.005);
    CHECK(std::abs(coarse - exact) <= 0.5 * a * T * 0.01 + 1e-9);
    CHECK(std::abs(fine - exact) < std::abs(coarse - exact));
    CHECK(2.0 * fine - coarse == doctest::Approx(exact).epsilon(1e-9));
  }

  TEST_CASE("speed and acceleration bounds hold along random inputs") {
    AgentConfig cfg;
    Rng rng = make_rng(5);
    std::bernoulli_distribution det(0.1);
    std::normal_distribution<double> g;
    AgentState s;
    const double dt = 1.0 / 75.0;
    for (int i = 0; i < 5000; ++i) {
      const Vec3 up = normalized(Vec3{1.0 + 0.3 * g(rng), 0.3 * g(rng), 0.3 * g(rng)});
      const AgentState n = step_agent(s, cfg, det(rng), up, dt);
      CHECK(norm(n.velocity) <= cfg.max_speed + 1e-12);
      CHECK(norm(n.velocity - s.velocity) / dt <= cfg.max_acceleration + 1e-9);
      CHECK(n.timer_remaining >= 0.0);
      CHECK(n.timer_remaining <= cfg.surge_duration);
      if (n.mode == FlightMode::Surge) CHECK(n.timer_remaining > 0.0);
      s = n;
    }
  }

  TEST_CASE("start inside the capture radius") {
    Scenario sc;
    sc.agent.start_position = sc.plume.source_position + Vec3{0.05, 0.0, 0.0};
    const FlightRecord r = run_flight(sc, 1);
    CHECK(r.success);
    CHECK(r.trajectory.size() == 1);
    CHECK(r.true_labels.size() == 1);
  }

  TEST_CASE("immobile agent times out") {
    Scenario sc;
    sc.agent.max_speed = 0.0;
    sc.agent.surge_speed = 0.0;
    sc.agent.max_flight_time = 2.0;
    const FlightRecord r = run_flight(sc, 1);
    CHECK_FALSE(r.success);
    CHECK(r.trajectory.size() == 151);
    CHECK(r.trajectory.duration() == doctest::Approx(2.0));
    CHECK(r.trajectory[150] == sc.agent.start_position);
  }

  TEST_CASE("flights are deterministic per seed") {
    Scenario sc;
    sc.wind.disturbed = true;
    const FlightRecord a = run_flight(sc, 42);
    const FlightRecord b = run_flight(sc, 42);
    CHECK(a.trajectory == b.trajectory);
    CHECK(a.true_labels == b.true_labels);
    CHECK(a.success == b.success);
    CHECK_FALSE(run_flight(sc, 43).trajectory == a.trajectory);
  }

  TEST_CASE("flight record invariants") {
    Scenario sc;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const FlightRecord r = run_flight(sc, seed);
      CHECK(r.true_labels.size() == r.trajectory.size());
      CHECK(r.seed == seed);
      if (r.success) {
        CHECK(distance(r.trajectory[r.trajectory.size() - 1], sc.plume.source_position) <= sc.agent.capture_radius);
      }
      const double dt = r.trajectory.dt();
      for (std::size_t i = 0; i + 1 < r.trajectory.size(); ++i) {
        CHECK(distance(r.trajectory[i + 1], r.trajectory[i]) / dt <= sc.agent.max_speed + 1e-9);
      }
    }
  }

  TEST_CASE("a sensor that never fires never surges") {
    Scenario sc;
    sc.agent.sensor_threshold = 1e300;
    sc.agent.max_flight_time = 5.0;
    const FlightRecord r = run_flight(sc, 3);
    for (Phase p : r.true_labels) CHECK(p == Phase::Exploration);
  }

  TEST_CASE("a sensor that always fires surges to the end") {
    Scenario sc;
    sc.agent.sensor_threshold = -1e300;
    const FlightRecord r = run_flight(sc, 3);
    for (std::size_t i = 1; i < r.true_labels.size(); ++i) CHECK(r.true_labels[i] == Phase::Exploitation);
  }

  TEST_CASE("success rate does not rise with sensor noise") {
    const double low = success_rate(5.0, 500);
    const double mid = success_rate(2000.0, 500);
    const double high = success_rate(20000.0, 500);
    CHECK(low >= mid);
    CHECK(mid >= high);
  }

  TEST_CASE("invalid scenario is a config error") {
    Scenario sc;
    sc.dt = 0.0;
    CHECK_THROWS_AS(run_flight(sc, 1), ConfigError);
    sc = Scenario{};
    sc.agent.capture_radius = 0.0;
    CHECK_THROWS_AS(run_flight(sc, 1), ConfigError);
    sc = Scenario{};
    sc.agent.surge_speed = 1.0;
    CHECK_THROWS_AS(run_flight(sc, 1), ConfigError);
  }

  TEST_CASE("mean path") {
    CHECK_THROWS_AS(mean_path(std::span<const Trajectory>{}), InvalidInput);
    const Trajectory t({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {1, 1, 2}}, 0.5);
    const std::vector<Trajectory> one{t};
    const Trajectory m1 = mean_path(std::span<const Trajectory>(one));
    const Trajectory r = resample_arc_length(t, t.size());
    REQUIRE(m1.size() == r.size());
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(distance(m1[i], r[i]) < 1e-12);

    const std::vector<Trajectory> two{t, t};
    const Trajectory m2 = mean_path(std::span<const Trajectory>(two));
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(distance(m2[i], r[i]) < 1e-12);

    std::vector<Vec3> a, b;
    for (int i = 0; i < 20; ++i) {
      const double y = 0.5 + 0.2 * std::sin(0.7 * i);
      a.push_back({0.1 * i, y, 0.5});
      b.push_back({0.1 * i, 1.0 - y, 0.5});
    }
    const std::vector<Trajectory> mirror{Trajectory(a, 0.1), Trajectory(b, 0.1)};
    const Trajectory mm = mean_path(std::span<const Trajectory>(mirror));
    for (const Vec3& p : mm.samples()) {
      CHECK(p.y == doctest::Approx(0.5).epsilon(1e-12));
    }
  }

  TEST_CASE("mean path of records rejects failed flights") {
    FlightRecord r;
    r.trajectory = Trajectory({{0, 0, 0}, {1, 0, 0}}, 1.0);
    r.success = false;
    const std::vector<FlightRecord> v{r};
    CHECK_THROWS_AS(mean_path(std::span<const FlightRecord>(v)), InvalidInput);
  }

  TEST_CASE("arc length resampling keeps the end points") {
    const Trajectory t({{0, 0, 0}, {3, 0, 0}, {3, 4, 0}}, 1.0);
    const Trajectory r = resample_arc_length(t, 8);
    CHECK(r.size() == 8);
    CHECK(r[0] == t[0]);
    CHECK(distance(r[7], t[2]) < 1e-12);
    CHECK(distance(r[7], r[6]) == doctest::Approx(1.0));
  }
}

#include <doctest.h>

#include "mothbench/config.hpp"
#include "mothbench/errors.hpp"

using namespace mothbench;

TEST_SUITE("config") {
  TEST_CASE("empty object gives the defaults") {
    const ExperimentConfig cfg = parse_config("{}");
    CHECK(cfg.runs == ExperimentConfig{}.runs);
    CHECK(cfg.ga.label_convention == LabelConvention::Flipped);
    CHECK(cfg.scenario.agent.max_speed == AgentConfig{}.max_speed);
    CHECK(cfg.conditions == std::vector<std::string>{"undisturbed", "disturbed"});
  }

  TEST_CASE("nested overrides") {
    const ExperimentConfig cfg = parse_config(R"({
      "runs": 7, "base_seed": 123,
      "scenario": {"dt": 0.02, "wind": {"mean_speed": 0.3, "mean_direction": [0, -1, 0]},
                   "plume": {"domain": {"lo": [-1, -1, -1], "hi": [3, 3, 3]}},
                   "agent": {"surge_duration": 0.8}},
      "ga": {"max_segments": 8, "label_convention": "paper"},
      "analysis": {"bin_radius": 0.1}
    })");
    CHECK(cfg.runs == 7);
    CHECK(cfg.seed_for(3) == 126);
    CHECK(cfg.scenario.dt == 0.02);
    CHECK(cfg.scenario.wind.mean_speed == 0.3);
    CHECK(cfg.scenario.wind.mean_direction == Vec3{0, -1, 0});
    CHECK(cfg.scenario.plume.domain.hi == Vec3{3, 3, 3});
    CHECK(cfg.scenario.agent.surge_duration == 0.8);
    CHECK(cfg.scenario.agent.max_speed == AgentConfig{}.max_speed);
    CHECK(cfg.ga.max_segments == 8);
    CHECK(cfg.ga.label_convention == LabelConvention::Paper);
    CHECK(cfg.analysis.bin_radius == 0.1);
  }

  TEST_CASE("json round trip") {
    ExperimentConfig cfg;
    cfg.runs = 3;
    cfg.scenario.agent.sensor_threshold = 123.25;
    cfg.conditions = {"disturbed"};
    const std::string text = config_to_json(cfg);
    const ExperimentConfig back = parse_config(text);
    CHECK(config_to_json(back) == text);
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(parse_config("{"), ConfigError);
    CHECK_THROWS_AS(parse_config("[]"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"runz": 3})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"runs": 0})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"runs": -2})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"runs": "many"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"conditions": ["windy"]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"conditions": ["disturbed", "disturbed"]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"scenario": {"wind": {"mean_direction": [1, 0]}}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"scenario": {"agent": {"capture_radius": 0}}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"ga": {"label_convention": "sideways"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"ga": {"population_size": 3}})"), ConfigError);
    try {
      (void)parse_config(R"({"scenario": {"agent": {"max_sped": 1}}})");
      FAIL("expected a config error");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("scenario.agent.max_sped") != std::string::npos);
    }
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
  }

  TEST_CASE("conditions") {
    const Scenario base;
    const Scenario u = apply_condition(base, "undisturbed", 0.2);
    const Scenario d = apply_condition(base, "disturbed", 0.2);
    CHECK_FALSE(u.wind.disturbed);
    CHECK(u.wind.turbulence_intensity == base.wind.turbulence_intensity);
    CHECK(d.wind.disturbed);
    CHECK(d.wind.turbulence_intensity == 0.2);
    CHECK(d.id == "disturbed");
    CHECK_THROWS_AS(apply_condition(base, "calm", 0.2), ConfigError);
  }

  TEST_CASE("label convention names") {
    CHECK(parse_label_convention("paper") == LabelConvention::Paper);
    CHECK(parse_label_convention("flipped") == LabelConvention::Flipped);
    CHECK(to_string(LabelConvention::Flipped) == "flipped");
    CHECK_THROWS_AS(parse_label_convention("Paper"), ConfigError);
  }
}

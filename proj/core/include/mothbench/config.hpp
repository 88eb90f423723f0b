#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mothbench/navigator.hpp"
#include "mothbench/segmentation.hpp"

namespace mothbench {

struct AnalysisOptions {
  double bin_radius = 0.06;         // m, half-width of a distance bin
  double max_distance = 2.04;       // m
  std::size_t min_bin_flights = 30; // bins with fewer flights are left out of trend statistics
  std::size_t histogram_bins = 20;  // per-flight EER histogram over [0, 1]
  std::size_t fit_holdout = 20;     // last runs of a condition held out as fit references
  bool principal_components = false;

  void validate() const;
};

struct ExperimentConfig {
  Scenario scenario;  // base scenario; conditions are applied on top
  std::vector<std::string> conditions{"undisturbed", "disturbed"};
  double disturbed_turbulence_intensity = 0.2;
  std::size_t runs = 10;
  std::uint64_t base_seed = 1;
  GAConfig ga = default_experiment_ga();
  AnalysisOptions analysis;
  std::filesystem::path output_dir = "mothbench-out";
  bool write_flights = true;  // per-flight trajectory and label files
  std::size_t threads = 1;    // 0 = hardware concurrency

  // Experiments label casting as exploration out of the box.
  static GAConfig default_experiment_ga() {
    GAConfig g;
    g.label_convention = LabelConvention::Flipped;
    return g;
  }

  // Throws ConfigError.
  void validate() const;
  std::uint64_t seed_for(std::size_t run) const { return base_seed + run; }
};

// Applies a named condition to a base scenario: "undisturbed" turns the wake
// off, "disturbed" turns it on and raises the turbulence intensity.
// Throws ConfigError for any other name.
Scenario apply_condition(const Scenario& base, std::string_view condition, double disturbed_turbulence_intensity);

LabelConvention parse_label_convention(std::string_view text);
std::string_view to_string(LabelConvention convention);

// JSON text. Missing keys keep their defaults; unknown keys are errors.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& cfg);

}  // namespace mothbench

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mothbench/analysis.hpp"
#include "mothbench/anderson_darling.hpp"
#include "mothbench/config.hpp"

namespace mothbench {

struct FlightOutcome {
  std::size_t run = 0;
  FlightRecord record;
  // False when the flight is too short for a velocity profile; the
  // remaining fields are then left empty.
  bool segmented = false;
  std::uint64_t ga_seed = 0;
  SegmentReport segmentation;
  double objective = 0.0;
  double accuracy = 0.0;  // predicted vs true labels, per trajectory sample
  double mean_eer = 0.0;
  FlightBinCounts bins;
};

struct FitEntry {
  std::size_t reference_run = 0;
  std::uint64_t reference_seed = 0;
  std::size_t model_flights = 0;  // successful flights averaged into the mean path
  FitReport fit;
};

struct ConditionResult {
  std::string condition;
  Scenario scenario;
  std::vector<FlightOutcome> flights;  // in run order
  EERProfile profile;
  Histogram eer_histogram;
  std::vector<FitEntry> fits;

  double success_rate() const;
  // Means over segmented flights; zero when there are none.
  double mean_accuracy() const;
  std::vector<double> flight_eers() const;
};

struct ConditionComparison {
  std::string first;
  std::string second;
  double mean_eer_difference = 0.0;  // second minus first
  std::optional<ADResult> anderson_darling;
};

struct ExperimentResult {
  std::vector<ConditionResult> conditions;
  std::vector<ConditionComparison> comparisons;
};

// Simulates and segments one flight of a condition.
FlightOutcome run_single_flight(const Scenario& scenario, const ExperimentConfig& cfg, std::size_t run);

// Mean path of the successful non-held-out flights against each successful
// held-out flight. Empty when either side has no successful flight.
std::vector<FitEntry> fit_holdout(std::span<const FlightOutcome> flights, std::size_t holdout);

// Every condition of the config, in memory. Flights of a condition run on
// cfg.threads workers; results do not depend on the thread count.
ExperimentResult run_conditions(const ExperimentConfig& cfg);

// run_conditions followed by write_results into cfg.output_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Flights only (no segmentation): trajectories, true labels, flights.csv and
// the manifest.
void run_simulation(const ExperimentConfig& cfg);

// Writes all tables, per-flight files (when enabled) and manifest.json.
// Throws std::runtime_error when the directory cannot be written.
void write_results(const ExperimentConfig& cfg, const ExperimentResult& result);

// One row per segment with step and time bounds and the s/o label.
void write_segmentation(const std::filesystem::path& path, const Segmentation& seg, double dt);

// Per-condition summary rebuilt from a results directory's
// eer_per_flight.csv and flights.csv.
struct ConditionSummary {
  std::string condition;
  std::size_t flights = 0;
  double success_rate = 0.0;
  double mean_accuracy = 0.0;
  double mean_eer = 0.0;
  double std_eer = 0.0;
  std::vector<double> eers;
};

std::vector<ConditionSummary> summarize_directory(const std::filesystem::path& dir);

}  // namespace mothbench

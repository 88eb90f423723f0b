#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "mothbench/phase.hpp"
#include "mothbench/random.hpp"
#include "mothbench/trajectory.hpp"

namespace mothbench {

// Which label collects the positive score in the division objective.
// Paper: exploitation segments add their score and exploration segments
// subtract it. Flipped: the reverse, so high-dispersion segments come out
// as exploration.
enum class LabelConvention : std::uint8_t { Paper, Flipped };

struct GAConfig {
  std::size_t population_size = 100;  // alpha
  double elite_fraction = 0.1;        // beta
  std::size_t generations = 200;      // zeta
  std::size_t max_segments = 5;       // z
  std::size_t min_segment_length = 30;
  std::uint64_t seed = 0;
  LabelConvention label_convention = LabelConvention::Paper;

  // Throws ConfigError. Checks z against the series length when one is given.
  void validate(std::size_t series_length = 0) const;
};

// Division of a velocity series into k alternating segments.
// Segment i spans [start(i), end(i)).
struct Segmentation {
  std::vector<std::size_t> boundaries;  // k - 1, strictly increasing, interior
  std::vector<Phase> labels;            // k, strictly alternating
  std::size_t series_length = 0;

  std::size_t segment_count() const noexcept { return labels.size(); }
  std::size_t start(std::size_t i) const { return i == 0 ? 0 : boundaries[i - 1]; }
  std::size_t end(std::size_t i) const { return i == boundaries.size() ? series_length : boundaries[i]; }

  // Label of every velocity-series step.
  std::vector<Phase> step_labels() const;
  // Throws InvalidInput when alternation, ordering or minimum length fails.
  void validate(std::size_t min_segment_length = 1) const;
};

// Labels per trajectory sample: velocity step j maps to sample j + offset and
// the uncovered ends take the label of the nearest segment.
std::vector<Phase> trajectory_labels(const Segmentation& seg, std::size_t trajectory_length,
                                     std::size_t offset = 2);

// (1 / 2pi) * sqrt(sum_{i in [ts, te)} |v_i - vbar|^2 / (te - ts)).
// Throws InvalidInput for empty, reversed or out-of-range segments.
double exploration_score(const VelocitySeries& vel, std::size_t ts, std::size_t te);

// Signed sum of segment scores under `convention`. Throws InvalidInput when
// `seg` does not fit `vel`.
double objective(const VelocitySeries& vel, const Segmentation& seg,
                 LabelConvention convention = LabelConvention::Paper);

// O(1) segment scores from centred prefix sums.
class SegmentScorer {
 public:
  explicit SegmentScorer(const VelocitySeries& vel);

  std::size_t size() const noexcept { return n_; }
  double score(std::size_t ts, std::size_t te) const;
  // sum_i (-1)^i score(segment i) for the division given by `boundaries`.
  double alternating_sum(std::span<const std::size_t> boundaries) const;

 private:
  std::size_t n_ = 0;
  std::vector<Vec3> s1_;
  std::vector<double> s2_;
};

// Label of the first segment that maximises the objective given the
// alternating score sum; ties go to exploration.
Phase best_first_label(double alternating_sum, LabelConvention convention);
// Alternating labels starting with `first`.
std::vector<Phase> alternating_labels(std::size_t k, Phase first);

// Feasible boundary placements for k - 1 cuts.
struct SearchSpace {
  std::size_t series_length = 0;
  std::size_t min_segment_length = 1;
  std::size_t boundary_count = 0;  // k - 1

  bool feasible() const {
    return (boundary_count + 1) * min_segment_length <= series_length;
  }
  std::size_t lowest(std::size_t i) const { return (i + 1) * min_segment_length; }
  std::size_t highest(std::size_t i) const {
    return series_length - (boundary_count - i) * min_segment_length;
  }
};

struct Individual {
  std::vector<std::size_t> indices;
  double fitness = 0.0;
};

// Sort, push indices right until consecutive gaps reach the minimum length,
// then pull back left from the upper end if the push overran it.
std::vector<std::size_t> repair(std::vector<std::size_t> indices, const SearchSpace& space);

// Shifts one uniformly chosen index by +1 or -1 (probability 0.5 each), then repairs.
Individual mutate(const Individual& ind, const SearchSpace& space, Rng& rng);

// One-point exchange of index tails after the first `j` entries (1-based,
// j in [2, k-2]); children are repaired.
std::pair<Individual, Individual> crossover_at(const Individual& a, const Individual& b, std::size_t j,
                                               const SearchSpace& space);
// crossover_at with j drawn uniformly; parents are returned unchanged when
// they carry fewer than three indices.
std::pair<Individual, Individual> crossover(const Individual& a, const Individual& b, const SearchSpace& space,
                                            Rng& rng);

// Fitnesses shifted by (1 - min) and normalised to sum to one.
std::vector<double> selection_probabilities(std::span<const double> fitnesses);

// Tournament with royalty: the ceil(beta * target) fittest survive, the
// remaining slots are drawn with replacement from the rest of `population`
// in proportion to their normalised fitness. target_size == 0 keeps the
// input size.
std::vector<Individual> next_generation(std::span<const Individual> population, double elite_fraction, Rng& rng,
                                        std::size_t target_size = 0);

struct GAResult {
  Individual best;
  std::vector<double> best_history;  // best-ever fitness after each generation
};

// Fitness is the objective maximised over both label phases.
// Throws InvalidInput when k < 2 or k segments cannot fit.
GAResult ga_run(const VelocitySeries& vel, std::size_t k, const GAConfig& cfg);
Individual ga_optimize(const VelocitySeries& vel, std::size_t k, const GAConfig& cfg);

struct BruteForceResult {
  Segmentation segmentation;
  double objective = 0.0;
  std::size_t placements = 0;  // boundary placements visited
};

// Exhaustive search over boundary placements and both label phases.
// Refuses (InvalidInput) when the placement count exceeds max_placements.
BruteForceResult brute_force_search(const VelocitySeries& vel, std::size_t k, std::size_t min_segment_length,
                                    LabelConvention convention = LabelConvention::Paper,
                                    std::size_t max_placements = 1'000'000);
Segmentation brute_force_segment(const VelocitySeries& vel, std::size_t k, std::size_t min_segment_length,
                                 LabelConvention convention = LabelConvention::Paper);

// Number of ways to place k - 1 cuts with every segment >= min length.
std::size_t placement_count(std::size_t series_length, std::size_t k, std::size_t min_segment_length);

// Knee of the score-vs-k curve: the k farthest from the chord joining the
// first and last entries. Ties and collinear curves give the smallest k;
// fewer than three entries give the smallest k.
std::size_t elbow_select(const std::map<std::size_t, double>& scores);

struct SegmentReport {
  Segmentation segmentation;
  std::map<std::size_t, double> scores;  // best objective per k
  std::size_t chosen_k = 0;
};

// Full pipeline on a velocity series: GA for k in [2, z], elbow choice,
// best label phase. Series too short for two segments yield k = 1.
SegmentReport segment_velocity(const VelocitySeries& vel, const GAConfig& cfg);
Segmentation segment(const Trajectory& traj, const GAConfig& cfg);

// Fraction of steps whose labels agree. Throws InvalidInput on length
// mismatch or empty input.
double segmentation_accuracy(std::span<const Phase> predicted, std::span<const Phase> truth);

}  // namespace mothbench

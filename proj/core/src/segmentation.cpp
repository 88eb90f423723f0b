#include "mothbench/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "mothbench/errors.hpp"

namespace mothbench {

namespace {

constexpr double kInvTwoPi = 1.0 / (2.0 * std::numbers::pi);

double signed_term(Phase label, double score, LabelConvention convention) {
  const bool positive = (label == Phase::Exploitation) == (convention == LabelConvention::Paper);
  return positive ? score : -score;
}

void repair_in_place(std::span<std::size_t> indices, const SearchSpace& space) {
  std::ranges::sort(indices);
  const std::size_t m = space.min_segment_length;
  const std::size_t count = indices.size();
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t floor = i == 0 ? m : indices[i - 1] + m;
    indices[i] = std::max(indices[i], floor);
  }
  for (std::size_t i = count; i-- > 0;) {
    const std::size_t ceil = i + 1 == count ? space.series_length - m : indices[i + 1] - m;
    indices[i] = std::min(indices[i], ceil);
  }
}

void random_fill(std::span<std::size_t> indices, const SearchSpace& space, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(space.min_segment_length,
                                                  space.series_length - space.min_segment_length);
  for (auto& v : indices) v = pick(rng);
  repair_in_place(indices, space);
}

void mutate_in_place(std::span<std::size_t> indices, const SearchSpace& space, Rng& rng) {
  if (indices.empty()) return;
  const std::size_t pos = std::uniform_int_distribution<std::size_t>(0, indices.size() - 1)(rng);
  const bool up = std::bernoulli_distribution(0.5)(rng);
  if (up) {
    ++indices[pos];
  } else if (indices[pos] > 0) {
    --indices[pos];
  }
  repair_in_place(indices, space);
}

// Pool rows that survive into the next generation: the elites by fitness
// (ties by position), then roulette draws over the non-elites.
std::vector<std::size_t> survivors(std::span<const double> fitness, double elite_fraction, std::size_t target,
                                   Rng& rng) {
  const std::size_t n = fitness.size();
  const auto elite_count = std::min(
      {target, n, static_cast<std::size_t>(std::ceil(elite_fraction * static_cast<double>(target) - 1e-9))});

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(elite_count), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return fitness[a] > fitness[b] || (fitness[a] == fitness[b] && a < b);
                    });
  std::vector<std::size_t> out(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(elite_count));
  if (out.size() == target) return out;

  std::vector<bool> elite(n, false);
  for (std::size_t i : out) elite[i] = true;
  std::vector<std::size_t> rest;
  rest.reserve(n - elite_count);
  for (std::size_t i = 0; i < n; ++i) {
    if (!elite[i]) rest.push_back(i);
  }
  if (rest.empty()) rest = order;

  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t i : rest) lowest = std::min(lowest, fitness[i]);
  const double shift = 1.0 - lowest;
  std::vector<double> cumulative(rest.size());
  double total = 0.0;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    total += fitness[rest[i]] + shift;
    cumulative[i] = total;
  }
  std::uniform_real_distribution<double> spin(0.0, total);
  while (out.size() < target) {
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), spin(rng));
    const auto pos = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), rest.size() - 1);
    out.push_back(rest[pos]);
  }
  return out;
}

}  // namespace

void GAConfig::validate(std::size_t series_length) const {
  if (population_size < 10) throw ConfigError("GA population_size must be >= 10");
  if (!(elite_fraction > 0.0 && elite_fraction < 1.0)) throw ConfigError("GA elite_fraction must lie in (0, 1)");
  if (generations < 1) throw ConfigError("GA generations must be >= 1");
  if (max_segments < 2) throw ConfigError("GA max_segments must be >= 2");
  if (min_segment_length < 2) throw ConfigError("GA min_segment_length must be >= 2");
  if (series_length != 0 && max_segments >= series_length) {
    throw ConfigError("GA max_segments must be smaller than the series length");
  }
}

std::vector<Phase> Segmentation::step_labels() const {
  std::vector<Phase> out;
  out.reserve(series_length);
  for (std::size_t i = 0; i < segment_count(); ++i) out.insert(out.end(), end(i) - start(i), labels[i]);
  return out;
}

void Segmentation::validate(std::size_t min_segment_length) const {
  if (labels.empty()) throw InvalidInput("segmentation has no segments");
  if (boundaries.size() + 1 != labels.size()) throw InvalidInput("segmentation needs k - 1 boundaries for k labels");
  for (std::size_t i = 1; i < labels.size(); ++i) {
    if (labels[i] == labels[i - 1]) throw InvalidInput("segmentation labels must alternate");
  }
  for (std::size_t i = 0; i < segment_count(); ++i) {
    if (end(i) <= start(i) || end(i) > series_length) {
      throw InvalidInput("segmentation boundaries must be strictly increasing and interior");
    }
    if (end(i) - start(i) < min_segment_length) {
      throw InvalidInput("segment " + std::to_string(i) + " is shorter than the minimum length");
    }
  }
}

std::vector<Phase> trajectory_labels(const Segmentation& seg, std::size_t trajectory_length, std::size_t offset) {
  const std::vector<Phase> steps = seg.step_labels();
  if (steps.empty()) throw InvalidInput("segmentation covers no steps");
  std::vector<Phase> out(trajectory_length);
  for (std::size_t i = 0; i < trajectory_length; ++i) {
    const std::size_t j = i < offset ? 0 : std::min(i - offset, steps.size() - 1);
    out[i] = steps[j];
  }
  return out;
}

double exploration_score(const VelocitySeries& vel, std::size_t ts, std::size_t te) {
  if (te <= ts || te > vel.size()) {
    throw InvalidInput("exploration_score needs 0 <= ts < te <= n, got [" + std::to_string(ts) + ", " +
                       std::to_string(te) + ")");
  }
  const double m = static_cast<double>(te - ts);
  Vec3 mean;
  for (std::size_t i = ts; i < te; ++i) mean += vel[i];
  mean = mean / m;
  double ss = 0.0;
  for (std::size_t i = ts; i < te; ++i) ss += squared_norm(vel[i] - mean);
  return kInvTwoPi * std::sqrt(ss / m);
}

double objective(const VelocitySeries& vel, const Segmentation& seg, LabelConvention convention) {
  if (seg.series_length != vel.size()) throw InvalidInput("segmentation does not match the velocity series length");
  seg.validate();
  double total = 0.0;
  for (std::size_t i = 0; i < seg.segment_count(); ++i) {
    total += signed_term(seg.labels[i], exploration_score(vel, seg.start(i), seg.end(i)), convention);
  }
  return total;
}

SegmentScorer::SegmentScorer(const VelocitySeries& vel) : n_(vel.size()), s1_(n_ + 1), s2_(n_ + 1, 0.0) {
  Vec3 centre;
  for (const auto& v : vel.values) centre += v;
  if (n_ > 0) centre = centre / static_cast<double>(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const Vec3 d = vel[i] - centre;
    s1_[i + 1] = s1_[i] + d;
    s2_[i + 1] = s2_[i] + squared_norm(d);
  }
}

double SegmentScorer::score(std::size_t ts, std::size_t te) const {
  if (te - ts == 1) return 0.0;
  const double m = static_cast<double>(te - ts);
  const Vec3 s1 = s1_[te] - s1_[ts];
  const double var = (s2_[te] - s2_[ts] - squared_norm(s1) / m) / m;
  return kInvTwoPi * std::sqrt(std::max(0.0, var));
}

double SegmentScorer::alternating_sum(std::span<const std::size_t> boundaries) const {
  double sum = 0.0;
  double sign = 1.0;
  std::size_t prev = 0;
  for (std::size_t b : boundaries) {
    sum += sign * score(prev, b);
    sign = -sign;
    prev = b;
  }
  return sum + sign * score(prev, n_);
}

Phase best_first_label(double alternating_sum, LabelConvention convention) {
  // With exploitation first the Paper-convention objective equals the alternating sum.
  if (convention == LabelConvention::Paper) return alternating_sum > 0.0 ? Phase::Exploitation : Phase::Exploration;
  return alternating_sum >= 0.0 ? Phase::Exploration : Phase::Exploitation;
}

std::vector<Phase> alternating_labels(std::size_t k, Phase first) {
  std::vector<Phase> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = i % 2 == 0 ? first : opposite(first);
  return out;
}

std::vector<std::size_t> repair(std::vector<std::size_t> indices, const SearchSpace& space) {
  repair_in_place(indices, space);
  return indices;
}

Individual mutate(const Individual& ind, const SearchSpace& space, Rng& rng) {
  Individual out = ind;
  mutate_in_place(out.indices, space, rng);
  return out;
}

std::pair<Individual, Individual> crossover_at(const Individual& a, const Individual& b, std::size_t j,
                                               const SearchSpace& space) {
  if (a.indices.size() != b.indices.size()) throw InvalidInput("crossover parents must have equal length");
  if (j > a.indices.size()) throw InvalidInput("crossover point out of range");
  Individual c1;
  Individual c2;
  c1.indices.assign(a.indices.begin(), a.indices.begin() + static_cast<std::ptrdiff_t>(j));
  c1.indices.insert(c1.indices.end(), b.indices.begin() + static_cast<std::ptrdiff_t>(j), b.indices.end());
  c2.indices.assign(b.indices.begin(), b.indices.begin() + static_cast<std::ptrdiff_t>(j));
  c2.indices.insert(c2.indices.end(), a.indices.begin() + static_cast<std::ptrdiff_t>(j), a.indices.end());
  c1.indices = repair(std::move(c1.indices), space);
  c2.indices = repair(std::move(c2.indices), space);
  return {std::move(c1), std::move(c2)};
}

std::pair<Individual, Individual> crossover(const Individual& a, const Individual& b, const SearchSpace& space,
                                            Rng& rng) {
  const std::size_t len = a.indices.size();
  if (len < 3 || b.indices.size() != len) return {a, b};
  // len = k - 1, so j in [2, k - 2] is [2, len - 1].
  const std::size_t j = std::uniform_int_distribution<std::size_t>(2, len - 1)(rng);
  return crossover_at(a, b, j, space);
}

std::vector<double> selection_probabilities(std::span<const double> fitnesses) {
  if (fitnesses.empty()) return {};
  const double shift = 1.0 - *std::ranges::min_element(fitnesses);
  std::vector<double> p(fitnesses.begin(), fitnesses.end());
  double total = 0.0;
  for (double& v : p) {
    v += shift;
    total += v;
  }
  for (double& v : p) v /= total;
  return p;
}

std::vector<Individual> next_generation(std::span<const Individual> population, double elite_fraction, Rng& rng,
                                        std::size_t target_size) {
  if (population.empty()) return {};
  const std::size_t target = target_size == 0 ? population.size() : target_size;
  std::vector<double> fitness;
  fitness.reserve(population.size());
  for (const auto& ind : population) fitness.push_back(ind.fitness);
  std::vector<Individual> next;
  next.reserve(target);
  for (std::size_t i : survivors(fitness, elite_fraction, target, rng)) next.push_back(population[i]);
  return next;
}

GAResult ga_run(const VelocitySeries& vel, std::size_t k, const GAConfig& cfg) {
  cfg.validate();
  if (k < 2) throw InvalidInput("ga_optimize needs k >= 2");
  const SearchSpace space{vel.size(), cfg.min_segment_length, k - 1};
  if (!space.feasible()) {
    throw InvalidInput("k = " + std::to_string(k) + " segments of length >= " +
                       std::to_string(cfg.min_segment_length) + " do not fit " + std::to_string(vel.size()) +
                       " steps");
  }

  // Individuals are rows of length k - 1 in flat buffers.
  const std::size_t len = space.boundary_count;
  const std::size_t size = cfg.population_size;
  const SegmentScorer scorer(vel);
  auto row = [len](std::vector<std::size_t>& buf, std::size_t i) {
    return std::span<std::size_t>(buf.data() + i * len, len);
  };
  auto fitness_of = [&](std::span<const std::size_t> ind) { return std::abs(scorer.alternating_sum(ind)); };

  Rng rng = make_rng(cfg.seed, k);
  std::vector<std::size_t> pop(size * len);
  std::vector<double> pop_fit(size);
  for (std::size_t i = 0; i < size; ++i) {
    random_fill(row(pop, i), space, rng);
    pop_fit[i] = fitness_of(row(pop, i));
  }

  GAResult result;
  auto record_best = [&]() {
    const auto i = static_cast<std::size_t>(std::ranges::max_element(pop_fit) - pop_fit.begin());
    if (result.best.indices.empty() || pop_fit[i] > result.best.fitness) {
      const auto r = row(pop, i);
      result.best.indices.assign(r.begin(), r.end());
      result.best.fitness = pop_fit[i];
    }
    result.best_history.push_back(result.best.fitness);
  };
  result.best_history.reserve(cfg.generations + 1);
  record_best();

  const bool cross = len >= 3;
  const std::size_t pool_size = size * 2 + (cross ? size / 2 * 2 : 0);
  std::vector<std::size_t> pool(pool_size * len);
  std::vector<double> pool_fit(pool_size);
  std::vector<std::size_t> perm(size);
  for (std::size_t gen = 0; gen < cfg.generations; ++gen) {
    std::ranges::copy(pop, pool.begin());
    std::ranges::copy(pop_fit, pool_fit.begin());
    std::size_t filled = size;
    for (std::size_t i = 0; i < size; ++i, ++filled) {
      auto child = row(pool, filled);
      std::ranges::copy(row(pop, i), child.begin());
      mutate_in_place(child, space, rng);
      pool_fit[filled] = fitness_of(child);
    }
    if (cross) {
      std::iota(perm.begin(), perm.end(), 0);
      std::ranges::shuffle(perm, rng);
      std::uniform_int_distribution<std::size_t> point(2, len - 1);
      for (std::size_t i = 0; i + 1 < size; i += 2, filled += 2) {
        const auto a = row(pop, perm[i]);
        const auto b = row(pop, perm[i + 1]);
        const std::size_t j = point(rng);
        auto c1 = row(pool, filled);
        auto c2 = row(pool, filled + 1);
        for (std::size_t t = 0; t < len; ++t) {
          c1[t] = t < j ? a[t] : b[t];
          c2[t] = t < j ? b[t] : a[t];
        }
        repair_in_place(c1, space);
        repair_in_place(c2, space);
        pool_fit[filled] = fitness_of(c1);
        pool_fit[filled + 1] = fitness_of(c2);
      }
    }

    const auto keep = survivors(pool_fit, cfg.elite_fraction, size, rng);
    for (std::size_t i = 0; i < size; ++i) {
      std::ranges::copy(row(pool, keep[i]), row(pop, i).begin());
      pop_fit[i] = pool_fit[keep[i]];
    }
    record_best();
  }
  return result;
}

Individual ga_optimize(const VelocitySeries& vel, std::size_t k, const GAConfig& cfg) {
  return ga_run(vel, k, cfg).best;
}

std::size_t placement_count(std::size_t series_length, std::size_t k, std::size_t min_segment_length) {
  if (k == 0 || k * min_segment_length > series_length) return 0;
  // Stars and bars: distribute the slack over k segments.
  const std::size_t slack = series_length - k * min_segment_length;
  const std::size_t r = k - 1;
  long double c = 1.0L;
  for (std::size_t i = 1; i <= r; ++i) {
    c = c * static_cast<long double>(slack + i) / static_cast<long double>(i);
    if (c > static_cast<long double>(std::numeric_limits<std::size_t>::max() / 2)) {
      return std::numeric_limits<std::size_t>::max();
    }
  }
  return static_cast<std::size_t>(std::llround(c));
}

BruteForceResult brute_force_search(const VelocitySeries& vel, std::size_t k, std::size_t min_segment_length,
                                    LabelConvention convention, std::size_t max_placements) {
  if (k < 1) throw InvalidInput("brute force needs k >= 1");
  if (min_segment_length < 1) throw InvalidInput("brute force needs min_segment_length >= 1");
  const std::size_t n = vel.size();
  const std::size_t total = placement_count(n, k, min_segment_length);
  if (total == 0) throw InvalidInput("no feasible placement for k = " + std::to_string(k));
  if (total > max_placements) {
    throw InvalidInput("brute force refused: " + std::to_string(total) + " placements exceed the guard");
  }

  BruteForceResult best;
  best.objective = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> cuts(k - 1);

  auto consider = [&]() {
    ++best.placements;
    for (Phase first : {Phase::Exploration, Phase::Exploitation}) {
      Segmentation seg{cuts, alternating_labels(k, first), n};
      const double value = objective(vel, seg, convention);
      if (value > best.objective) {
        best.objective = value;
        best.segmentation = std::move(seg);
      }
    }
  };
  auto recurse = [&](auto&& self, std::size_t depth, std::size_t lo) -> void {
    if (depth == cuts.size()) {
      consider();
      return;
    }
    const std::size_t remaining = cuts.size() - depth;
    for (std::size_t c = lo; c + remaining * min_segment_length <= n; ++c) {
      cuts[depth] = c;
      self(self, depth + 1, c + min_segment_length);
    }
  };
  recurse(recurse, 0, min_segment_length);
  return best;
}

Segmentation brute_force_segment(const VelocitySeries& vel, std::size_t k, std::size_t min_segment_length,
                                 LabelConvention convention) {
  return brute_force_search(vel, k, min_segment_length, convention).segmentation;
}

std::size_t elbow_select(const std::map<std::size_t, double>& scores) {
  if (scores.empty()) throw InvalidInput("elbow_select needs at least one score");
  if (scores.size() < 3) return scores.begin()->first;
  const auto [k0, s0] = *scores.begin();
  const auto [k1, s1] = *scores.rbegin();
  const double slope = (s1 - s0) / static_cast<double>(k1 - k0);
  const double denom = std::sqrt(1.0 + slope * slope);

  double scale = 0.0;
  for (const auto& [k, s] : scores) scale = std::max(scale, std::abs(s));
  const double tol = 1e-12 * (1.0 + scale);

  std::size_t best_k = k0;
  double best_d = 0.0;
  for (const auto& [k, s] : scores) {
    const double d = std::abs(s - s0 - slope * static_cast<double>(k - k0)) / denom;
    if (d > best_d + tol) {
      best_d = d;
      best_k = k;
    }
  }
  return best_k;
}

SegmentReport segment_velocity(const VelocitySeries& vel, const GAConfig& cfg) {
  cfg.validate();
  SegmentReport report;
  const std::size_t n = vel.size();
  if (n == 0) throw InvalidInput("cannot segment an empty velocity series");

  const SegmentScorer scorer(vel);
  std::map<std::size_t, std::vector<std::size_t>> cuts_by_k;
  for (std::size_t k = 2; k <= cfg.max_segments && k < n; ++k) {
    if (!SearchSpace{n, cfg.min_segment_length, k - 1}.feasible()) break;
    Individual best = ga_optimize(vel, k, cfg);
    report.scores[k] = best.fitness;
    cuts_by_k[k] = std::move(best.indices);
  }

  if (report.scores.empty()) {
    const double whole = scorer.alternating_sum({});
    report.chosen_k = 1;
    report.segmentation = {{}, {best_first_label(whole, cfg.label_convention)}, n};
    return report;
  }

  report.chosen_k = elbow_select(report.scores);
  auto& cuts = cuts_by_k[report.chosen_k];
  const Phase first = best_first_label(scorer.alternating_sum(cuts), cfg.label_convention);
  report.segmentation = {std::move(cuts), alternating_labels(report.chosen_k, first), n};
  return report;
}

Segmentation segment(const Trajectory& traj, const GAConfig& cfg) {
  return segment_velocity(velocity_profile(traj), cfg).segmentation;
}

double segmentation_accuracy(std::span<const Phase> predicted, std::span<const Phase> truth) {
  if (predicted.size() != truth.size()) {
    throw InvalidInput("label sequences differ in length: " + std::to_string(predicted.size()) + " vs " +
                       std::to_string(truth.size()));
  }
  if (predicted.empty()) throw InvalidInput("accuracy of empty label sequences is undefined");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

}  // namespace mothbench

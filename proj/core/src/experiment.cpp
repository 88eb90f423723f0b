#include "mothbench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "mothbench/errors.hpp"
#include "mothbench/trajectory_io.hpp"

namespace mothbench {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

template <class F>
void parallel_for(std::size_t n, std::size_t threads, F&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n) return;
          try {
            body(i);
          } catch (...) {
            const std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next.store(n);
            return;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

DistanceBins bins_of(const AnalysisOptions& a) {
  DistanceBins b;
  b.bin_radius = a.bin_radius;
  b.max_distance = a.max_distance;
  return b;
}

std::string run_name(std::size_t run) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "run_%05zu", run);
  return buf;
}

std::string fmt(double v) { return format_double(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }
std::string fmt(std::optional<double> v) { return v ? format_double(*v) : std::string(); }

class CsvFile {
 public:
  CsvFile(const fs::path& path, std::initializer_list<std::string_view> header) : path_(path), out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    row(header);
  }

  template <class... T>
  void add(const T&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cells, first = false), ...);
    out_ << '\n';
  }

  void row(std::initializer_list<std::string_view> cells) {
    bool first = true;
    for (auto c : cells) {
      out_ << (first ? "" : ",") << c;
      first = false;
    }
    out_ << '\n';
  }

  ~CsvFile() noexcept(false) {
    out_.close();
    if (!out_ && std::uncaught_exceptions() == 0) throw std::runtime_error("failed writing " + path_.string());
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  out.close();
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void write_flight_files(const fs::path& dir, const FlightOutcome& f) {
  const std::string base = run_name(f.run);
  const double dt = f.record.trajectory.dt();
  write_trajectory(dir / (base + "_trajectory.csv"), f.record.trajectory);
  write_labels(dir / (base + "_truth.csv"), f.record.true_labels, dt);
  if (f.segmented) {
    const auto predicted = trajectory_labels(f.segmentation.segmentation, f.record.trajectory.size());
    write_labels(dir / (base + "_labels.csv"), predicted, dt);
    write_segmentation(dir / (base + "_segmentation.csv"), f.segmentation.segmentation, dt);
  }
}

Json manifest_json(const ExperimentConfig& cfg, std::span<const ConditionResult> conditions) {
  Json m;
  m["format"] = "mothbench-results";
  m["version"] = 1;
  m["config"] = Json::parse(config_to_json(cfg));
  Json conds = Json::array();
  for (const auto& c : conditions) {
    Json flights = Json::array();
    for (const auto& f : c.flights) {
      flights.push_back(Json{{"run", f.run}, {"seed", f.record.seed}, {"ga_seed", f.ga_seed}});
    }
    ExperimentConfig applied = cfg;
    applied.scenario = c.scenario;
    conds.push_back(Json{{"condition", c.condition},
                         {"scenario", Json::parse(config_to_json(applied))["scenario"]},
                         {"flights", std::move(flights)}});
  }
  m["conditions"] = std::move(conds);
  return m;
}

double mean_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

std::vector<FlightOutcome> simulate_condition(const Scenario& scenario, const ExperimentConfig& cfg,
                                              bool with_segmentation) {
  std::vector<FlightOutcome> flights(cfg.runs);
  parallel_for(cfg.runs, cfg.threads, [&](std::size_t run) {
    if (with_segmentation) {
      flights[run] = run_single_flight(scenario, cfg, run);
    } else {
      flights[run].run = run;
      flights[run].record = run_flight(scenario, cfg.seed_for(run));
    }
  });
  return flights;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(std::move(line));
  }
  if (lines.empty()) throw std::runtime_error(path.string() + ": empty file");
  return lines;
}

double parse_number(std::string_view s, const fs::path& path, std::size_t line) {
  try {
    std::size_t used = 0;
    const std::string text(s);
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(path.string() + ": " + ParseError(line, "bad number '" + std::string(s) + "'").what());
  }
}

}  // namespace

void write_segmentation(const fs::path& path, const Segmentation& seg, double dt) {
  CsvFile f(path, {"segment", "start_step", "end_step", "t_start", "t_end", "label"});
  const double off = static_cast<double>(kStencilMinSamples / 2);
  for (std::size_t i = 0; i < seg.segment_count(); ++i) {
    f.add(i, seg.start(i), seg.end(i), fmt((static_cast<double>(seg.start(i)) + off) * dt),
          fmt((static_cast<double>(seg.end(i)) + off) * dt), to_char(seg.labels[i]));
  }
}

double ConditionResult::success_rate() const {
  if (flights.empty()) return 0.0;
  const auto ok = std::ranges::count_if(flights, [](const FlightOutcome& f) { return f.record.success; });
  return static_cast<double>(ok) / static_cast<double>(flights.size());
}

double ConditionResult::mean_accuracy() const {
  std::vector<double> acc;
  for (const auto& f : flights) {
    if (f.segmented) acc.push_back(f.accuracy);
  }
  return mean_of(acc);
}

std::vector<double> ConditionResult::flight_eers() const {
  std::vector<double> out;
  for (const auto& f : flights) {
    if (f.segmented) out.push_back(f.mean_eer);
  }
  return out;
}

FlightOutcome run_single_flight(const Scenario& scenario, const ExperimentConfig& cfg, std::size_t run) {
  FlightOutcome out;
  out.run = run;
  out.record = run_flight(scenario, cfg.seed_for(run));
  out.ga_seed = cfg.ga.seed + out.record.seed;
  if (out.record.trajectory.size() < kStencilMinSamples) return out;

  GAConfig ga = cfg.ga;
  ga.seed = out.ga_seed;
  const VelocitySeries vel = velocity_profile(out.record.trajectory);
  out.segmentation = segment_velocity(vel, ga);
  out.segmented = true;
  const Segmentation& seg = out.segmentation.segmentation;
  out.objective = objective(vel, seg, ga.label_convention);
  const auto predicted = trajectory_labels(seg, out.record.trajectory.size());
  out.accuracy = segmentation_accuracy(predicted, out.record.true_labels);
  out.mean_eer = mean_eer(out.record, seg);
  out.bins = bin_counts(out.record, seg, scenario.plume.source_position, bins_of(cfg.analysis));
  return out;
}

std::vector<FitEntry> fit_holdout(std::span<const FlightOutcome> flights, std::size_t holdout) {
  const std::size_t split = flights.size() > holdout ? flights.size() - holdout : 0;
  std::vector<Trajectory> model_set;
  for (std::size_t i = 0; i < split; ++i) {
    if (flights[i].record.success) model_set.push_back(flights[i].record.trajectory);
  }
  std::vector<FitEntry> out;
  if (model_set.empty()) return out;
  const Trajectory model = mean_path(std::span<const Trajectory>(model_set));
  for (std::size_t i = split; i < flights.size(); ++i) {
    const FlightOutcome& ref = flights[i];
    if (!ref.record.success || ref.record.trajectory.size() < 2) continue;
    FitEntry e;
    e.reference_run = ref.run;
    e.reference_seed = ref.record.seed;
    e.model_flights = model_set.size();
    try {
      e.fit = fit_report(ref.record.trajectory, model);
    } catch (const InvalidInput&) {
      continue;  // stationary reference
    }
    out.push_back(e);
  }
  return out;
}

ExperimentResult run_conditions(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult result;
  const DistanceBins bins = bins_of(cfg.analysis);
  for (const auto& name : cfg.conditions) {
    ConditionResult c;
    c.condition = name;
    c.scenario = apply_condition(cfg.scenario, name, cfg.disturbed_turbulence_intensity);
    c.flights = simulate_condition(c.scenario, cfg, true);

    std::vector<FlightBinCounts> counts;
    for (const auto& f : c.flights) {
      if (f.segmented) counts.push_back(f.bins);
    }
    c.profile = aggregate_eer(counts, bins);
    const auto eers = c.flight_eers();
    c.eer_histogram = histogram(eers, cfg.analysis.histogram_bins, 0.0, 1.0);
    c.fits = fit_holdout(c.flights, cfg.analysis.fit_holdout);
    result.conditions.push_back(std::move(c));
  }

  for (std::size_t i = 0; i < result.conditions.size(); ++i) {
    for (std::size_t j = i + 1; j < result.conditions.size(); ++j) {
      const auto& a = result.conditions[i];
      const auto& b = result.conditions[j];
      ConditionComparison cmp;
      cmp.first = a.condition;
      cmp.second = b.condition;
      const std::vector<std::vector<double>> samples{a.flight_eers(), b.flight_eers()};
      cmp.mean_eer_difference = mean_of(samples[1]) - mean_of(samples[0]);
      try {
        cmp.anderson_darling = ad_k_sample(samples);
      } catch (const InvalidInput&) {
        cmp.anderson_darling.reset();
      }
      result.comparisons.push_back(std::move(cmp));
    }
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult result = run_conditions(cfg);
  write_results(cfg, result);
  return result;
}

void write_results(const ExperimentConfig& cfg, const ExperimentResult& result) {
  const fs::path& out = cfg.output_dir;
  make_dir(out);

  CsvFile flights(out / "flights.csv",
                  {"condition", "run", "seed", "success", "samples", "duration", "segments", "accuracy"});
  CsvFile segs(out / "segmentations.csv", {"condition", "run", "chosen_k", "k", "score"});
  CsvFile eer(out / "eer_per_flight.csv", {"condition", "run", "seed", "mean_eer"});
  CsvFile profile(out / "eer_profile.csv", {"condition", "bin", "distance", "flights", "steps", "mean_fraction",
                                            "std_fraction", "mean_ratio", "std_ratio"});
  CsvFile hist(out / "eer_histogram.csv", {"condition", "bin", "lo", "hi", "flights"});
  CsvFile fits(out / "fit_report.csv", {"condition", "reference_run", "reference_seed", "model_flights", "mae",
                                        "r_squared"});
  CsvFile summary(out / "summary.csv", {"condition", "flights", "success_rate", "mean_accuracy", "mean_eer",
                                        "std_eer", "mean_fit_r_squared"});

  for (const auto& c : result.conditions) {
    if (cfg.write_flights) make_dir(out / c.condition / "flights");
    for (const auto& f : c.flights) {
      const auto& seg = f.segmentation;
      flights.add(c.condition, f.run, f.record.seed, f.record.success ? 1 : 0, f.record.trajectory.size(),
                  fmt(f.record.trajectory.duration()), f.segmented ? fmt(seg.chosen_k) : std::string(),
                  f.segmented ? fmt(f.accuracy) : std::string());
      if (f.segmented) {
        for (const auto& [k, score] : seg.scores) segs.add(c.condition, f.run, seg.chosen_k, k, fmt(score));
        eer.add(c.condition, f.run, f.record.seed, fmt(f.mean_eer));
      }
      if (cfg.write_flights) write_flight_files(out / c.condition / "flights", f);
    }

    const auto& p = c.profile;
    for (std::size_t b = 0; b < p.bin_centers.size(); ++b) {
      profile.add(c.condition, b, fmt(p.bin_centers[b]), p.counts[b], p.steps[b], fmt(p.mean_eer[b]),
                  fmt(p.std_eer[b]), fmt(p.mean_ratio[b]), fmt(p.std_ratio[b]));
    }
    const auto& h = c.eer_histogram;
    const double width = (h.hi - h.lo) / static_cast<double>(h.counts.size());
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      hist.add(c.condition, b, fmt(h.lo + width * static_cast<double>(b)),
               fmt(h.lo + width * static_cast<double>(b + 1)), h.counts[b]);
    }
    std::vector<double> r2;
    for (const auto& e : c.fits) {
      fits.add(c.condition, e.reference_run, e.reference_seed, e.model_flights, fmt(e.fit.mae), fmt(e.fit.r_squared));
      r2.push_back(e.fit.r_squared);
    }
    const auto eers = c.flight_eers();
    summary.add(c.condition, c.flights.size(), fmt(c.success_rate()), fmt(c.mean_accuracy()), fmt(mean_of(eers)),
                fmt(std_of(eers)), r2.empty() ? std::string() : fmt(mean_of(r2)));
  }

  CsvFile comparison(out / "comparison.csv",
                     {"first", "second", "mean_eer_difference", "ad_statistic", "ad_normalized", "ad_p_value"});
  for (const auto& cmp : result.comparisons) {
    const auto& ad = cmp.anderson_darling;
    comparison.add(cmp.first, cmp.second, fmt(cmp.mean_eer_difference), ad ? fmt(ad->statistic) : std::string(),
                   ad ? fmt(ad->normalized) : std::string(), ad ? fmt(ad->p_value) : std::string());
  }

  write_text(out / "manifest.json", manifest_json(cfg, result.conditions).dump(2) + "\n");
}

void run_simulation(const ExperimentConfig& cfg) {
  cfg.validate();
  const fs::path& out = cfg.output_dir;
  make_dir(out);
  std::vector<ConditionResult> conditions;
  {
    CsvFile flights(out / "flights.csv", {"condition", "run", "seed", "success", "samples", "duration"});
    for (const auto& name : cfg.conditions) {
      ConditionResult c;
      c.condition = name;
      c.scenario = apply_condition(cfg.scenario, name, cfg.disturbed_turbulence_intensity);
      c.flights = simulate_condition(c.scenario, cfg, false);
      const fs::path dir = out / name / "flights";
      make_dir(dir);
      for (auto& f : c.flights) {
        f.ga_seed = cfg.ga.seed + f.record.seed;
        flights.add(name, f.run, f.record.seed, f.record.success ? 1 : 0, f.record.trajectory.size(),
                    fmt(f.record.trajectory.duration()));
        write_flight_files(dir, f);
      }
      conditions.push_back(std::move(c));
    }
  }
  write_text(out / "manifest.json", manifest_json(cfg, conditions).dump(2) + "\n");
}

std::vector<ConditionSummary> summarize_directory(const fs::path& dir) {
  std::vector<ConditionSummary> out;
  auto find = [&](std::string_view name) -> ConditionSummary& {
    for (auto& s : out) {
      if (s.condition == name) return s;
    }
    ConditionSummary s;
    s.condition = std::string(name);
    out.push_back(std::move(s));
    return out.back();
  };

  const fs::path flights_path = dir / "flights.csv";
  const auto flights = read_lines(flights_path);
  const auto header = split_csv_line(flights[0]);
  const auto col = [&](std::string_view name) -> std::optional<std::size_t> {
    const auto it = std::ranges::find(header, name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto cond_col = col("condition");
  const auto success_col = col("success");
  const auto acc_col = col("accuracy");
  if (!cond_col || !success_col) {
    throw std::runtime_error(flights_path.string() + ": missing condition or success column");
  }

  std::map<std::string, std::pair<double, std::size_t>, std::less<>> accuracy;
  std::map<std::string, std::size_t, std::less<>> successes;
  for (std::size_t i = 1; i < flights.size(); ++i) {
    const auto cells = split_csv_line(flights[i]);
    if (cells.size() != header.size()) {
      throw std::runtime_error(flights_path.string() + ": line " + std::to_string(i + 1) + ": expected " +
                               std::to_string(header.size()) + " fields");
    }
    ConditionSummary& s = find(cells[*cond_col]);
    ++s.flights;
    if (cells[*success_col] == "1") ++successes[s.condition];
    if (acc_col && !cells[*acc_col].empty()) {
      auto& [sum, n] = accuracy[s.condition];
      sum += parse_number(cells[*acc_col], flights_path, i + 1);
      ++n;
    }
  }

  const fs::path eer_path = dir / "eer_per_flight.csv";
  if (fs::exists(eer_path)) {
    const auto rows = read_lines(eer_path);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto cells = split_csv_line(rows[i]);
      if (cells.size() != 4) {
        throw std::runtime_error(eer_path.string() + ": line " + std::to_string(i + 1) + ": expected 4 fields");
      }
      find(cells[0]).eers.push_back(parse_number(cells[3], eer_path, i + 1));
    }
  }

  for (auto& s : out) {
    if (s.flights > 0) s.success_rate = static_cast<double>(successes[s.condition]) / static_cast<double>(s.flights);
    if (const auto it = accuracy.find(s.condition); it != accuracy.end() && it->second.second > 0) {
      s.mean_accuracy = it->second.first / static_cast<double>(it->second.second);
    }
    s.mean_eer = mean_of(s.eers);
    s.std_eer = std_of(s.eers);
  }
  return out;
}

}  // namespace mothbench

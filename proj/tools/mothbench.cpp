#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mothbench/errors.hpp"
#include "mothbench/experiment.hpp"
#include "mothbench/trajectory_io.hpp"

namespace fs = std::filesystem;
using namespace mothbench;

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<std::string> out;
  std::optional<std::string> condition;
  std::optional<std::string> convention;
  std::optional<std::size_t> threads;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool experiment) {
  cmd->add_option("--config", o.config, "JSON config file; missing keys keep their defaults")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, experiment ? "base seed (flight r uses seed + r)" : "GA seed");
  cmd->add_option("--label-convention", o.convention, "which phase collects the positive score")
      ->check(CLI::IsMember({"paper", "flipped"}));
  if (!experiment) return;
  cmd->add_option("--runs", o.runs, "flights per condition")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--condition", o.condition, "run a single condition")
      ->check(CLI::IsMember({"undisturbed", "disturbed"}));
  cmd->add_option("--threads", o.threads, "worker threads, 0 = one per core");
}

ExperimentConfig build_config(const CommonOptions& o) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (o.seed) cfg.base_seed = *o.seed;
  if (o.runs) cfg.runs = *o.runs;
  if (o.out) cfg.output_dir = *o.out;
  if (o.condition) cfg.conditions = {*o.condition};
  if (o.convention) cfg.ga.label_convention = parse_label_convention(*o.convention);
  if (o.threads) cfg.threads = *o.threads;
  cfg.validate();
  return cfg;
}

void print_summary(const ExperimentResult& r) {
  std::printf("%-12s %8s %8s %9s %9s %9s %8s\n", "condition", "flights", "success", "accuracy", "mean_eer",
              "std_eer", "fit_r2");
  for (const auto& c : r.conditions) {
    const auto eers = c.flight_eers();
    double m = 0.0;
    for (double e : eers) m += e;
    m = eers.empty() ? 0.0 : m / static_cast<double>(eers.size());
    double ss = 0.0;
    for (double e : eers) ss += (e - m) * (e - m);
    const double sd = eers.empty() ? 0.0 : std::sqrt(ss / static_cast<double>(eers.size()));
    double r2 = 0.0;
    for (const auto& f : c.fits) r2 += f.fit.r_squared;
    std::printf("%-12s %8zu %8.3f %9.4f %9.4f %9.4f ", c.condition.c_str(), c.flights.size(), c.success_rate(),
                c.mean_accuracy(), m, sd);
    if (c.fits.empty()) {
      std::printf("%8s\n", "-");
    } else {
      std::printf("%8.4f\n", r2 / static_cast<double>(c.fits.size()));
    }
  }
  for (const auto& cmp : r.comparisons) {
    std::printf("%s - %s mean EER: %+.4f", cmp.second.c_str(), cmp.first.c_str(), cmp.mean_eer_difference);
    if (cmp.anderson_darling) {
      std::printf("  (Anderson-Darling A2 = %.3f, p ~ %.3g)", cmp.anderson_darling->statistic,
                  cmp.anderson_darling->p_value);
    }
    std::printf("\n");
  }
}

int cmd_segment(const CommonOptions& o, const std::string& input, const std::string& truth, const std::string& out,
                std::optional<double> dt) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  GAConfig ga = cfg.ga;
  if (o.seed) ga.seed = *o.seed;
  if (o.convention) ga.label_convention = parse_label_convention(*o.convention);

  const Trajectory traj = read_trajectory(input, dt);
  if (traj.size() < kStencilMinSamples) {
    throw InvalidInput("trajectory needs at least " + std::to_string(kStencilMinSamples) + " samples");
  }
  const VelocitySeries vel = velocity_profile(traj);
  const SegmentReport rep = segment_velocity(vel, ga);
  const Segmentation& seg = rep.segmentation;
  const auto labels = trajectory_labels(seg, traj.size());

  std::printf("samples %zu  dt %s  chosen k %zu  objective %s\n", traj.size(), format_double(traj.dt()).c_str(),
              rep.chosen_k, format_double(objective(vel, seg, ga.label_convention)).c_str());
  for (const auto& [k, score] : rep.scores) std::printf("  k=%zu score %s\n", k, format_double(score).c_str());
  for (std::size_t i = 0; i < seg.segment_count(); ++i) {
    std::printf("  segment %zu  steps [%zu, %zu)  %c\n", i, seg.start(i), seg.end(i), to_char(seg.labels[i]));
  }
  if (!truth.empty()) {
    const auto t = read_labels(truth);
    std::printf("accuracy %s\n", format_double(segmentation_accuracy(labels, t)).c_str());
  }
  if (!out.empty()) {
    fs::create_directories(out);
    const std::string stem = fs::path(input).stem().string();
    write_labels(fs::path(out) / (stem + "_labels.csv"), labels, traj.dt());
    write_segmentation(fs::path(out) / (stem + "_segmentation.csv"), seg, traj.dt());
  }
  return 0;
}

int cmd_fit(const CommonOptions& o, const std::string& reference, const std::vector<std::string>& flights) {
  if (!reference.empty() || !flights.empty()) {
    if (reference.empty() || flights.empty()) throw CLI::ValidationError("--reference and --flights go together");
    std::vector<Trajectory> set;
    for (const auto& f : flights) set.push_back(read_trajectory(f));
    const Trajectory model = mean_path(std::span<const Trajectory>(set));
    const FitReport fit = fit_report(read_trajectory(reference), model);
    std::printf("mean path of %zu flights vs %s\nmae %s\nr_squared %s\n", set.size(), reference.c_str(),
                format_double(fit.mae).c_str(), format_double(fit.r_squared).c_str());
    return 0;
  }

  const ExperimentConfig cfg = build_config(o);
  std::printf("%-12s %6s %12s %7s %12s %12s\n", "condition", "run", "seed", "model", "mae", "r_squared");
  for (const auto& name : cfg.conditions) {
    const Scenario s = apply_condition(cfg.scenario, name, cfg.disturbed_turbulence_intensity);
    std::vector<FlightOutcome> outcomes(cfg.runs);
    for (std::size_t r = 0; r < cfg.runs; ++r) {
      outcomes[r].run = r;
      outcomes[r].record = run_flight(s, cfg.seed_for(r));
    }
    const auto fits = fit_holdout(outcomes, cfg.analysis.fit_holdout);
    double sum = 0.0;
    for (const auto& e : fits) {
      std::printf("%-12s %6zu %12llu %7zu %12.6f %12.6f\n", name.c_str(), e.reference_run,
                  static_cast<unsigned long long>(e.reference_seed), e.model_flights, e.fit.mae, e.fit.r_squared);
      sum += e.fit.r_squared;
    }
    if (fits.empty()) {
      std::printf("%-12s no successful flights on one side of the hold-out split\n", name.c_str());
    } else {
      std::printf("%-12s mean r_squared %.4f over %zu references\n", name.c_str(),
                  sum / static_cast<double>(fits.size()), fits.size());
    }
  }
  return 0;
}

int cmd_report(const std::string& dir) {
  const auto rows = summarize_directory(dir);
  std::printf("%-12s %8s %8s %9s %9s %9s\n", "condition", "flights", "success", "accuracy", "mean_eer", "std_eer");
  for (const auto& s : rows) {
    std::printf("%-12s %8zu %8.3f %9.4f %9.4f %9.4f\n", s.condition.c_str(), s.flights, s.success_rate,
                s.mean_accuracy, s.mean_eer, s.std_eer);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cast-and-surge plume tracking simulator with exploration/exploitation segmentation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mothbench 0.1.0");

  CommonOptions sim_o, seg_o, ana_o, fit_o, cfg_o;

  auto* simulate = app.add_subcommand("simulate", "simulate flights and write trajectories with true labels");
  add_common(simulate, sim_o, true);

  auto* segment = app.add_subcommand("segment", "segment one trajectory file into s/o phases");
  add_common(segment, seg_o, false);
  std::string input, truth, seg_out;
  std::optional<double> seg_dt;
  segment->add_option("--input,-i", input, "trajectory CSV (t,x,y,z)")->required()->check(CLI::ExistingFile);
  segment->add_option("--truth", truth, "true label CSV (t,label) for an accuracy score")
      ->check(CLI::ExistingFile);
  segment->add_option("--out", seg_out, "directory for the label and segmentation files");
  segment->add_option("--dt", seg_dt, "sample spacing for single-row files");

  auto* analyze = app.add_subcommand("analyze", "full experiment: simulate, segment, EER tables, fits");
  add_common(analyze, ana_o, true);

  auto* fit = app.add_subcommand("fit", "compare a mean path against reference flights");
  add_common(fit, fit_o, true);
  std::string reference;
  std::vector<std::string> fit_flights;
  fit->add_option("--reference", reference, "reference trajectory CSV")->check(CLI::ExistingFile);
  fit->add_option("--flights", fit_flights, "trajectories averaged into the mean path")->check(CLI::ExistingFile);

  auto* report = app.add_subcommand("report", "summarize a results directory");
  std::string report_dir;
  report->add_option("dir,--in", report_dir, "results directory")->required()->check(CLI::ExistingDirectory);

  auto* config = app.add_subcommand("config", "print the effective config as JSON");
  add_common(config, cfg_o, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*simulate) {
      const ExperimentConfig cfg = build_config(sim_o);
      run_simulation(cfg);
      std::printf("wrote %zu flights per condition to %s\n", cfg.runs, cfg.output_dir.string().c_str());
      return 0;
    }
    if (*segment) return cmd_segment(seg_o, input, truth, seg_out, seg_dt);
    if (*analyze) {
      const ExperimentConfig cfg = build_config(ana_o);
      print_summary(run_experiment(cfg));
      std::printf("results in %s\n", cfg.output_dir.string().c_str());
      return 0;
    }
    if (*fit) return cmd_fit(fit_o, reference, fit_flights);
    if (*report) return cmd_report(report_dir);
    if (*config) {
      std::cout << config_to_json(build_config(cfg_o));
      return 0;
    }
  } catch (const CLI::Error& e) {
    std::cerr << "mothbench: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "mothbench: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

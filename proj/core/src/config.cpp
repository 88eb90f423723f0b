#include "mothbench/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "mothbench/errors.hpp"

namespace mothbench {

namespace {

using Json = nlohmann::ordered_json;

// One field list per struct, walked by both the reader and the writer.
template <class V>
void fields(V& v, WindModel& w) {
  v("mean_speed", w.mean_speed);
  v("mean_direction", w.mean_direction);
  v("turbulence_intensity", w.turbulence_intensity);
  v("meander_amplitude", w.meander_amplitude);
  v("meander_frequency", w.meander_frequency);
  v("disturbed", w.disturbed);
  v("wake_length", w.wake_length);
  v("shedding_frequency", w.shedding_frequency);
  v("wake_gain", w.wake_gain);
}

template <class V>
void fields(V& v, PlumeConfig& p) {
  v("source_position", p.source_position);
  v("release_rate", p.release_rate);
  v("growth_rate", p.growth_rate);
  v("initial_radius", p.initial_radius);
  v("puff_mass", p.puff_mass);
  v("domain", p.domain);
  v("warmup_time", p.warmup_time);
}

template <class V>
void fields(V& v, AgentConfig& a) {
  v("max_speed", a.max_speed);
  v("surge_speed", a.surge_speed);
  v("max_acceleration", a.max_acceleration);
  v("surge_duration", a.surge_duration);
  v("cast_crosswind_speed", a.cast_crosswind_speed);
  v("cast_upwind_bias", a.cast_upwind_bias);
  v("cast_leg_duration", a.cast_leg_duration);
  v("sensor_threshold", a.sensor_threshold);
  v("sensor_noise_mean", a.sensor_noise_mean);
  v("sensor_noise_std", a.sensor_noise_std);
  v("wind_direction_noise_std", a.wind_direction_noise_std);
  v("capture_radius", a.capture_radius);
  v("start_position", a.start_position);
  v("max_flight_time", a.max_flight_time);
  v("hold_altitude", a.hold_altitude);
  v("altitude_gain", a.altitude_gain);
  v("start_surging", a.start_surging);
}

template <class V>
void fields(V& v, Scenario& s) {
  v("id", s.id);
  v("dt", s.dt);
  v("arena", s.arena);
  v("wind", s.wind);
  v("plume", s.plume);
  v("agent", s.agent);
}

template <class V>
void fields(V& v, GAConfig& g) {
  v("population_size", g.population_size);
  v("elite_fraction", g.elite_fraction);
  v("generations", g.generations);
  v("max_segments", g.max_segments);
  v("min_segment_length", g.min_segment_length);
  v("seed", g.seed);
  v("label_convention", g.label_convention);
}

template <class V>
void fields(V& v, AnalysisOptions& a) {
  v("bin_radius", a.bin_radius);
  v("max_distance", a.max_distance);
  v("min_bin_flights", a.min_bin_flights);
  v("histogram_bins", a.histogram_bins);
  v("fit_holdout", a.fit_holdout);
  v("principal_components", a.principal_components);
}

template <class V>
void fields(V& v, ExperimentConfig& c) {
  v("runs", c.runs);
  v("base_seed", c.base_seed);
  v("conditions", c.conditions);
  v("disturbed_turbulence_intensity", c.disturbed_turbulence_intensity);
  v("output_dir", c.output_dir);
  v("write_flights", c.write_flights);
  v("threads", c.threads);
  v("scenario", c.scenario);
  v("ga", c.ga);
  v("analysis", c.analysis);
}

template <class T>
concept HasFields = std::same_as<T, WindModel> ||
                    std::same_as<T, PlumeConfig> || std::same_as<T, AgentConfig> || std::same_as<T, Scenario> ||
                    std::same_as<T, GAConfig> || std::same_as<T, AnalysisOptions> ||
                    std::same_as<T, ExperimentConfig>;

[[noreturn]] void bad(const std::string& where, const char* expected) {
  throw ConfigError(where + ": expected " + expected);
}

class Reader {
 public:
  Reader(const Json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) bad(where_, "an object");
  }

  template <class T>
  void operator()(const char* key, T& out) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    if (it != obj_.end()) read(*it, out, where_ + "." + key);
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.contains(key)) throw ConfigError("unknown key " + where_ + "." + key);
    }
  }

  static void read(const Json& j, double& out, const std::string& where) {
    if (!j.is_number()) bad(where, "a number");
    out = j.get<double>();
  }
  static void read(const Json& j, std::uint64_t& out, const std::string& where) {
    if (!j.is_number_unsigned()) bad(where, "a non-negative integer");
    out = j.get<std::uint64_t>();
  }
  static void read(const Json& j, bool& out, const std::string& where) {
    if (!j.is_boolean()) bad(where, "true or false");
    out = j.get<bool>();
  }
  static void read(const Json& j, std::string& out, const std::string& where) {
    if (!j.is_string()) bad(where, "a string");
    out = j.get<std::string>();
  }
  static void read(const Json& j, std::filesystem::path& out, const std::string& where) {
    std::string s;
    read(j, s, where);
    out = s;
  }
  static void read(const Json& j, std::vector<std::string>& out, const std::string& where) {
    if (!j.is_array()) bad(where, "an array of strings");
    out.clear();
    for (const auto& e : j) {
      if (!e.is_string()) bad(where, "an array of strings");
      out.push_back(e.get<std::string>());
    }
  }
  static void read(const Json& j, Vec3& out, const std::string& where) {
    if (!j.is_array() || j.size() != 3) bad(where, "[x, y, z]");
    for (const auto& e : j) {
      if (!e.is_number()) bad(where, "[x, y, z]");
    }
    out = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  }
  static void read(const Json& j, Box& out, const std::string& where) {
    Reader r(j, where);
    r("lo", out.lo);
    r("hi", out.hi);
    r.finish();
  }
  static void read(const Json& j, LabelConvention& out, const std::string& where) {
    std::string s;
    read(j, s, where);
    try {
      out = parse_label_convention(s);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  template <class T>
    requires HasFields<T>
  static void read(const Json& j, T& out, const std::string& where) {
    Reader r(j, where);
    fields(r, out);
    r.finish();
  }
  // size_t and uint64_t are the same type on LP64; this covers the rest.
  template <class T>
    requires(std::is_unsigned_v<T> && !std::is_same_v<T, std::uint64_t> && !std::is_same_v<T, bool>)
  static void read(const Json& j, T& out, const std::string& where) {
    std::uint64_t v = 0;
    read(j, v, where);
    out = static_cast<T>(v);
  }

 private:
  const Json& obj_;
  std::string where_;
  std::set<std::string, std::less<>> seen_;
};

class Writer {
 public:
  template <class T>
  void operator()(const char* key, T& value) {
    obj_[key] = write(value);
  }
  Json take() { return std::move(obj_); }

  static Json write(double v) { return v; }
  static Json write(bool v) { return v; }
  static Json write(const std::string& v) { return v; }
  static Json write(const std::filesystem::path& v) { return v.generic_string(); }
  static Json write(const std::vector<std::string>& v) { return v; }
  static Json write(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }
  static Json write(const Box& b) { return Json{{"lo", write(b.lo)}, {"hi", write(b.hi)}}; }
  static Json write(LabelConvention c) { return std::string(to_string(c)); }
  template <class T>
    requires(std::is_unsigned_v<T> && !std::is_same_v<T, bool>)
  static Json write(T v) {
    return static_cast<std::uint64_t>(v);
  }
  template <class T>
    requires HasFields<T>
  static Json write(const T& value) {
    T copy = value;
    Writer w;
    fields(w, copy);
    return w.take();
  }

 private:
  Json obj_ = Json::object();
};

}  // namespace

void AnalysisOptions::validate() const {
  if (!(bin_radius > 0.0)) throw ConfigError("analysis bin_radius must be positive");
  if (!(max_distance > 2.0 * bin_radius)) throw ConfigError("analysis max_distance must exceed one bin width");
  if (histogram_bins < 1) throw ConfigError("analysis histogram_bins must be >= 1");
}

void ExperimentConfig::validate() const {
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (conditions.empty()) throw ConfigError("at least one condition is required");
  std::set<std::string, std::less<>> unique;
  for (const auto& c : conditions) {
    (void)apply_condition(scenario, c, disturbed_turbulence_intensity);
    if (!unique.insert(c).second) throw ConfigError("condition '" + c + "' listed twice");
  }
  if (!(disturbed_turbulence_intensity >= 0.0)) throw ConfigError("disturbed_turbulence_intensity must be >= 0");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  scenario.validate();
  ga.validate();
  analysis.validate();
}

Scenario apply_condition(const Scenario& base, std::string_view condition, double disturbed_turbulence_intensity) {
  Scenario s = base;
  if (condition == "undisturbed") {
    s.wind.disturbed = false;
  } else if (condition == "disturbed") {
    s.wind.disturbed = true;
    s.wind.turbulence_intensity = disturbed_turbulence_intensity;
  } else {
    throw ConfigError("unknown condition '" + std::string(condition) + "' (expected undisturbed or disturbed)");
  }
  s.id = std::string(condition);
  return s;
}

LabelConvention parse_label_convention(std::string_view text) {
  if (text == "paper") return LabelConvention::Paper;
  if (text == "flipped") return LabelConvention::Flipped;
  throw ConfigError("unknown label convention '" + std::string(text) + "' (expected paper or flipped)");
}

std::string_view to_string(LabelConvention convention) {
  return convention == LabelConvention::Paper ? "paper" : "flipped";
}

ExperimentConfig parse_config(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  Reader::read(j, cfg, "config");
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string config_to_json(const ExperimentConfig& cfg) {
  return Writer::write(cfg).dump(2) + "\n";
}

}  // namespace mothbench

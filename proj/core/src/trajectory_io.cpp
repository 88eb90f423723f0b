#include "mothbench/trajectory_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "mothbench/errors.hpp"

namespace mothbench {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view field, std::size_t line) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError(line, "invalid number '" + std::string(field) + "'");
  }
  return v;
}

void expect_header(std::istream& in, std::string_view expected, std::size_t& line_no) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header '" + std::string(expected) + "'");
  ++line_no;
  const auto fields = split_csv_line(line);
  std::string joined;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) joined += ',';
    joined += fields[i];
  }
  if (joined != expected) throw ParseError(line_no, "expected header '" + std::string(expected) + "'");
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot open '" + path.string() + "' for writing");
  writer(out);
  if (!out) throw InvalidInput("failed writing '" + path.string() + "'");
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

std::string format_double(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw InvalidInput("cannot format number");
  return std::string(buf, ptr);
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Trajectory parse_trajectory(std::istream& in, std::optional<double> fallback_dt) {
  std::size_t line_no = 0;
  expect_header(in, "t,x,y,z", line_no);

  std::vector<double> times;
  std::vector<std::size_t> lines;
  std::vector<Vec3> samples;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 4) {
      throw ParseError(line_no, "expected 4 fields (t,x,y,z), found " + std::to_string(f.size()));
    }
    times.push_back(parse_number(f[0], line_no));
    samples.push_back({parse_number(f[1], line_no), parse_number(f[2], line_no), parse_number(f[3], line_no)});
    lines.push_back(line_no);
  }
  if (samples.empty()) throw ParseError(line_no + 1, "trajectory has no samples");

  double dt = 0.0;
  if (samples.size() == 1) {
    if (!fallback_dt) throw ParseError(lines.front(), "cannot infer dt from a single sample");
    dt = *fallback_dt;
  } else {
    const double first = times[1] - times[0];
    for (std::size_t i = 1; i < times.size(); ++i) {
      const double step = times[i] - times[i - 1];
      if (!(step > 0.0)) throw ParseError(lines[i], "t must be strictly increasing");
      if (std::abs(step - first) > 1e-6 * first) throw ParseError(lines[i], "non-uniform sampling interval");
    }
    dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  }
  return Trajectory(std::move(samples), dt);
}

Trajectory read_trajectory(const std::filesystem::path& path, std::optional<double> fallback_dt) {
  auto in = open_input(path);
  return parse_trajectory(in, fallback_dt);
}

void write_trajectory(std::ostream& out, const Trajectory& traj) {
  out << "t,x,y,z\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Vec3& p = traj[i];
    out << format_double(static_cast<double>(i) * traj.dt()) << ',' << format_double(p.x) << ','
        << format_double(p.y) << ',' << format_double(p.z) << '\n';
  }
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
  write_file(path, [&](std::ostream& out) { write_trajectory(out, traj); });
}

std::vector<Phase> parse_labels(std::istream& in) {
  std::size_t line_no = 0;
  expect_header(in, "t,label", line_no);
  std::vector<Phase> out;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 2) throw ParseError(line_no, "expected 2 fields (t,label), found " + std::to_string(f.size()));
    parse_number(f[0], line_no);
    const auto p = f[1].size() == 1 ? phase_from_char(f[1][0]) : std::nullopt;
    if (!p) throw ParseError(line_no, "label must be 's' or 'o'");
    out.push_back(*p);
  }
  return out;
}

std::vector<Phase> read_labels(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_labels(in);
}

void write_labels(std::ostream& out, std::span<const Phase> labels, double dt) {
  out << "t,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << format_double(static_cast<double>(i) * dt) << ',' << to_char(labels[i]) << '\n';
  }
}

void write_labels(const std::filesystem::path& path, std::span<const Phase> labels, double dt) {
  write_file(path, [&](std::ostream& out) { write_labels(out, labels, dt); });
}

}  // namespace mothbench

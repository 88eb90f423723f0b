#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mothbench/phase.hpp"
#include "mothbench/trajectory.hpp"

namespace mothbench {

// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

// Reads `t,x,y,z` CSV. dt is inferred from the t column; spacing that
// deviates from uniform by more than 1e-6 (relative) is rejected. A
// single-row file needs `fallback_dt`. Throws ParseError naming the
// 1-based line.
Trajectory parse_trajectory(std::istream& in, std::optional<double> fallback_dt = std::nullopt);
Trajectory read_trajectory(const std::filesystem::path& path, std::optional<double> fallback_dt = std::nullopt);

void write_trajectory(std::ostream& out, const Trajectory& traj);
void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);

// `t,label` CSV with label in {s, o}.
std::vector<Phase> parse_labels(std::istream& in);
std::vector<Phase> read_labels(const std::filesystem::path& path);

void write_labels(std::ostream& out, std::span<const Phase> labels, double dt);
void write_labels(const std::filesystem::path& path, std::span<const Phase> labels, double dt);

// Splits one CSV line on commas, trimming blanks and a trailing CR.
std::vector<std::string_view> split_csv_line(std::string_view line);

}  // namespace mothbench

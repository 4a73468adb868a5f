#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pulsesync/pulse.hpp"

namespace pulsesync {

/// Shortest decimal representation that reads back to the same double.
std::string format_double(double x);
double parse_double(std::string_view text);

/// Pulse file: a header line `# pulsesync-pulse {json}`, a column-name line,
/// then one row per grid point with x, u_1..u_n, psi_1..psi_n, du_1..du_n.
void write_pulse(std::ostream& os, const PulseSolution& pulse);
void write_pulse(const std::filesystem::path& path, const PulseSolution& pulse);
PulseSolution read_pulse(std::istream& is);
PulseSolution read_pulse(const std::filesystem::path& path);

/// Whitespace-separated columns with a `#`-prefixed header line.
void write_columns(const std::filesystem::path& path, const std::vector<std::string>& names,
                   const std::vector<std::vector<double>>& columns);

}  // namespace pulsesync

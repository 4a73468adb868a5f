#include "pulsesync/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pulsesync/errors.hpp"

namespace pulsesync {

namespace {

constexpr std::string_view kPulseTag = "# pulsesync-pulse ";

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot open " + path.string() + " for writing");
  return os;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

double parse_double(std::string_view text) {
  double x = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw ValidationError("malformed number '" + std::string(text) + "'");
  return x;
}

void write_pulse(std::ostream& os, const PulseSolution& pulse) {
  const Grid1D& g = pulse.grid();
  const int n = pulse.profile.components();
  nlohmann::json header = {
      {"L", g.length()},
      {"N", g.points()},
      {"components", n},
      {"speed", pulse.speed},
      {"a_gap", pulse.a_gap},
      {"bvp_residual", pulse.bvp_residual},
      {"adjoint_residual", pulse.adjoint_residual},
      {"normalization", pulse.normalization},
      {"zero_eigenvalue", pulse.zero_eigenvalue},
      {"near_zero_count", pulse.near_zero_count},
      {"eigenvector_cosine", pulse.eigenvector_cosine},
      {"second_singular", pulse.second_singular},
      {"newton_iterations", pulse.newton_iterations},
  };
  os << kPulseTag << header.dump() << '\n';
  os << "# x";
  for (const char* prefix : {"u", "psi", "du"})
    for (int c = 1; c <= n; ++c) os << ' ' << prefix << c;
  os << '\n';
  for (int i = 0; i < g.points(); ++i) {
    os << format_double(g.coordinate(i));
    for (const FieldState* f : {&pulse.profile, &pulse.adjoint, &pulse.derivative})
      for (int c = 0; c < n; ++c) os << ' ' << format_double(f->at(c, i));
    os << '\n';
  }
}

void write_pulse(const std::filesystem::path& path, const PulseSolution& pulse) {
  auto os = open_out(path);
  write_pulse(os, pulse);
}

PulseSolution read_pulse(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind(kPulseTag, 0) != 0)
    throw ValidationError("not a pulse file: missing header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line.substr(kPulseTag.size()));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("pulse header: ") + e.what());
  }
  const Grid1D grid(header.at("L").get<int>(), header.at("N").get<int>());
  const int n = header.at("components").get<int>();
  PulseSolution p(FieldState(grid, n), FieldState(grid, n), FieldState(grid, n));
  p.speed = header.at("speed").get<double>();
  p.a_gap = header.at("a_gap").get<double>();
  p.bvp_residual = header.at("bvp_residual").get<double>();
  p.adjoint_residual = header.at("adjoint_residual").get<double>();
  p.normalization = header.at("normalization").get<double>();
  p.zero_eigenvalue = header.at("zero_eigenvalue").get<double>();
  p.near_zero_count = header.at("near_zero_count").get<int>();
  p.eigenvector_cosine = header.at("eigenvector_cosine").get<double>();
  p.second_singular = header.at("second_singular").get<double>();
  p.newton_iterations = header.at("newton_iterations").get<int>();
  std::getline(is, line);  // column names

  for (int i = 0; i < grid.points(); ++i) {
    if (!std::getline(is, line)) throw ValidationError("pulse file truncated");
    std::istringstream row(line);
    std::string tok;
    row >> tok;
    for (FieldState* f : {&p.profile, &p.adjoint, &p.derivative})
      for (int c = 0; c < n; ++c) {
        if (!(row >> tok)) throw ValidationError("pulse file: short row " + std::to_string(i));
        f->at(c, i) = parse_double(tok);
      }
  }
  return p;
}

PulseSolution read_pulse(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open " + path.string());
  return read_pulse(is);
}

void write_columns(const std::filesystem::path& path, const std::vector<std::string>& names,
                   const std::vector<std::vector<double>>& columns) {
  if (names.size() != columns.size()) throw ValidationError("column name count mismatch");
  auto os = open_out(path);
  os << '#';
  for (const auto& n : names) os << ' ' << n;
  os << '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) throw ValidationError("ragged columns");
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) os << ' ';
      os << format_double(columns[c][r]);
    }
    os << '\n';
  }
}

}  // namespace pulsesync

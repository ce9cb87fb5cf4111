#include "stationing/distance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace stationing {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    cells.push_back(cell);
  }
  return cells;
}

double parse_km(const std::string& text, const std::string& where) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value) || value < 0.0) {
    throw ConfigError(where + ": bad distance '" + text + "'");
  }
  return value;
}

}  // namespace

DistanceMatrix DistanceMatrix::from_coordinates(const TransitSchedule& schedule, double detour_factor) {
  DistanceMatrix m(schedule.stops.size());
  for (std::size_t a = 0; a < m.n_; ++a) {
    for (std::size_t b = a + 1; b < m.n_; ++b) {
      const Stop& sa = schedule.stops[a];
      const Stop& sb = schedule.stops[b];
      const double euclid = std::hypot(sa.x_km - sb.x_km, sa.y_km - sb.y_km);
      const double km = std::max(0.001, std::round(euclid * detour_factor * 1000.0) / 1000.0);
      m.km_[a * m.n_ + b] = km;
      m.km_[b * m.n_ + a] = km;
    }
  }
  return m;
}

MatrixReport inspect_matrix(const DistanceMatrix& m) {
  MatrixReport report;
  const std::size_t n = m.size();
  for (std::size_t a = 0; a < n; ++a) {
    const StopId sa(a);
    if (m(sa, sa) != 0.0) report.zero_diagonal = false;
    for (std::size_t b = 0; b < n; ++b) {
      const StopId sb(b);
      if (a == b) continue;
      if (m(sa, sb) != m(sb, sa)) report.symmetric = false;
      if (!(m(sa, sb) > 0.0)) report.positive_off_diagonal = false;
      for (std::size_t c = 0; c < n; ++c) {
        if (c == a || c == b) continue;
        const StopId sc(c);
        const double via = m(sa, sb) + m(sb, sc);
        if (via > 0.0) report.worst_triangle_excess = std::max(report.worst_triangle_excess, m(sa, sc) / via - 1.0);
      }
    }
  }
  return report;
}

DistanceMatrix read_distance_csv(std::istream& in, const TransitSchedule& schedule) {
  const std::size_t n = schedule.stops.size();
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("distance matrix: empty file");
  const auto header = split_csv_line(line);
  if (header.size() != n + 1) {
    throw ConfigError("distance matrix: header has " + std::to_string(header.size() - 1) + " stops, schedule has " +
                      std::to_string(n));
  }
  for (std::size_t c = 0; c < n; ++c) {
    if (header[c + 1] != schedule.stops[c].id) {
      throw ConfigError("distance matrix: column " + std::to_string(c + 1) + " is '" + header[c + 1] +
                        "', expected '" + schedule.stops[c].id + "'");
    }
  }
  DistanceMatrix m(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (!std::getline(in, line)) throw ConfigError("distance matrix: missing row for " + schedule.stops[r].id);
    const auto cells = split_csv_line(line);
    if (cells.size() != n + 1 || cells[0] != schedule.stops[r].id) {
      throw ConfigError("distance matrix: malformed row for " + schedule.stops[r].id);
    }
    for (std::size_t c = 0; c < n; ++c) {
      m.at(StopId(r), StopId(c)) = parse_km(cells[c + 1], "distance matrix row " + cells[0]);
    }
  }
  const MatrixReport report = inspect_matrix(m);
  if (!report.zero_diagonal) throw ConfigError("distance matrix: non-zero diagonal");
  if (!report.positive_off_diagonal) throw ConfigError("distance matrix: non-positive off-diagonal entry");
  return m;
}

DistanceMatrix load_distance_csv(const std::filesystem::path& path, const TransitSchedule& schedule) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return read_distance_csv(in, schedule);
}

void write_distance_csv(std::ostream& out, const DistanceMatrix& m, const TransitSchedule& schedule) {
  out << "stop_id";
  for (const Stop& s : schedule.stops) out << ',' << s.id;
  out << '\n';
  char buf[64];
  for (std::size_t r = 0; r < m.size(); ++r) {
    out << schedule.stops[r].id;
    for (std::size_t c = 0; c < m.size(); ++c) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, m(StopId(r), StopId(c)));
      out << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
    }
    out << '\n';
  }
}

}  // namespace stationing

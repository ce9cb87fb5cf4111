#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "stationing/schedule.hpp"

namespace stationing {

// Dense all-pairs road distance between stops, in kilometres.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t stop_count)
      : n_(stop_count), km_(stop_count * stop_count, 0.0) {}

  [[nodiscard]] std::size_t size() const { return n_; }

  [[nodiscard]] double operator()(StopId from, StopId to) const { return km_[from.index() * n_ + to.index()]; }
  double& at(StopId from, StopId to) { return km_[from.index() * n_ + to.index()]; }

  // Planar distances scaled by a detour factor, rounded to whole metres.
  static DistanceMatrix from_coordinates(const TransitSchedule& schedule, double detour_factor);

 private:
  std::size_t n_ = 0;
  std::vector<double> km_;
};

// Property checks used when loading and synthesizing scenarios.
struct MatrixReport {
  bool symmetric = true;
  bool zero_diagonal = true;
  bool positive_off_diagonal = true;
  // Largest d(a,c) / (d(a,b) + d(b,c)) - 1 over all triples; <= 0.01 means
  // the triangle inequality holds within 1 %.
  double worst_triangle_excess = 0.0;
};

MatrixReport inspect_matrix(const DistanceMatrix& matrix);

// CSV: header row "stop_id,<id>,<id>,..." then one row per stop. Row and
// column order must match the schedule's stops.
DistanceMatrix read_distance_csv(std::istream& in, const TransitSchedule& schedule);
DistanceMatrix load_distance_csv(const std::filesystem::path& path, const TransitSchedule& schedule);
void write_distance_csv(std::ostream& out, const DistanceMatrix& matrix, const TransitSchedule& schedule);

}  // namespace stationing

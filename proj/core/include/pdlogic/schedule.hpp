#pragma once

#include <cstddef>
#include <vector>

namespace pdl {

class Network;

// One constant piece of a schedule, active on [start, end).
struct Segment {
  double start = 0.0;
  double end = 0.0;
  double value = 0.0;
};

// Piecewise-constant, dimensionless time profile. Segments are kept sorted and
// never overlap; outside every segment the schedule takes its default value.
class Schedule {
 public:
  explicit Schedule(double default_value = 0.0) : default_(default_value) {}
  Schedule(std::vector<Segment> segments, double default_value);

  static Schedule constant(double value) { return Schedule(value); }
  // `inside` on [start, end), `outside` elsewhere.
  static Schedule pulse(double start, double end, double inside, double outside);

  void add(Segment segment);

  [[nodiscard]] double value(double t) const noexcept {
    for (const Segment& s : segments_) {
      if (t < s.start) break;
      if (t < s.end) return s.value;
    }
    return default_;
  }

  [[nodiscard]] double default_value() const noexcept { return default_; }
  [[nodiscard]] const std::vector<Segment>& segments() const noexcept { return segments_; }

 private:
  std::vector<Segment> segments_;
  double default_;
};

[[nodiscard]] inline double schedule_value(const Schedule& s, double t) noexcept {
  return s.value(t);
}

// Time dependence of a network: one multiplier per edge (scales the edge's base
// coupling) and one drive gate per site (scales the model's modulation depth).
// An empty list means "1 everywhere".
struct ScheduleSet {
  std::vector<Schedule> edges;
  std::vector<Schedule> drives;

  [[nodiscard]] double edge_gate(std::size_t edge, double t) const noexcept {
    return edges.empty() ? 1.0 : edges[edge].value(t);
  }
  [[nodiscard]] double drive_gate(std::size_t site, double t) const noexcept {
    return drives.empty() ? 1.0 : drives[site].value(t);
  }

  // Throws ConfigError when a list is non-empty and does not match the network.
  void validate(const Network& network) const;
};

}  // namespace pdl

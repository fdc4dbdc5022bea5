#include "pdlogic/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pdlogic/error.hpp"
#include "pdlogic/models.hpp"

namespace pdl {

Schedule::Schedule(std::vector<Segment> segments, double default_value)
    : default_(default_value) {
  for (const Segment& s : segments) add(s);
}

Schedule Schedule::pulse(double start, double end, double inside, double outside) {
  Schedule s(outside);
  if (end > start) s.add({start, end, inside});
  return s;
}

void Schedule::add(Segment segment) {
  if (!std::isfinite(segment.start) || !std::isfinite(segment.end) ||
      !(segment.start < segment.end)) {
    throw ConfigError("schedule segment needs start < end");
  }
  auto pos = std::lower_bound(
      segments_.begin(), segments_.end(), segment,
      [](const Segment& lhs, const Segment& rhs) { return lhs.start < rhs.start; });
  if (pos != segments_.end() && pos->start < segment.end) {
    throw ConfigError("schedule segments overlap");
  }
  if (pos != segments_.begin() && std::prev(pos)->end > segment.start) {
    throw ConfigError("schedule segments overlap");
  }
  segments_.insert(pos, segment);
}

void ScheduleSet::validate(const Network& network) const {
  if (!edges.empty() && edges.size() != network.edges().size()) {
    throw ConfigError("edge schedules: expected " + std::to_string(network.edges().size()) +
                      ", got " + std::to_string(edges.size()));
  }
  if (!drives.empty() && drives.size() != network.sites()) {
    throw ConfigError("drive schedules: expected " + std::to_string(network.sites()) +
                      ", got " + std::to_string(drives.size()));
  }
}

}  // namespace pdl

#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "powlmine/event_log.hpp"

namespace powlmine {

enum class IntervalOrigin { matched, atomic };

/// One complete activity execution; start <= end always holds.
struct IntervalEvent {
  std::string label;
  std::string case_id;
  Timestamp start;
  Timestamp end;
  IntervalOrigin origin = IntervalOrigin::atomic;
  /// File position of the event that opened the interval; breaks ties between
  /// intervals with identical start and end.
  std::size_t seq_no = 0;
};

struct IntervalStats {
  std::size_t matched = 0;
  std::size_t atomic = 0;
  /// Atomic intervals created from "start" events that never completed.
  std::size_t unmatched_starts = 0;
};

/// Intervals in canonical order: case_id, start, end, label, seq_no.
class IntervalLog {
 public:
  IntervalLog() = default;
  IntervalLog(std::vector<IntervalEvent> intervals, IntervalStats stats = {});

  const std::vector<IntervalEvent>& intervals() const noexcept { return intervals_; }
  const std::set<std::string>& cases() const noexcept { return cases_; }
  const IntervalStats& stats() const noexcept { return stats_; }

 private:
  std::vector<IntervalEvent> intervals_;
  std::set<std::string> cases_;
  IntervalStats stats_;
};

/// FIFO matching of start/complete events per (case, label). Unmatched
/// completes, lifecycle-free events and leftover starts become atomic
/// intervals at their own timestamp.
IntervalLog build_interval_log(const EventLog& log);

}  // namespace powlmine

#include "powlmine/interval_log.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <tuple>

namespace powlmine {

IntervalLog::IntervalLog(std::vector<IntervalEvent> intervals, IntervalStats stats)
    : intervals_(std::move(intervals)), stats_(stats) {
  std::sort(intervals_.begin(), intervals_.end(),
            [](const IntervalEvent& a, const IntervalEvent& b) {
              return std::tie(a.case_id, a.start, a.end, a.label, a.seq_no) <
                     std::tie(b.case_id, b.start, b.end, b.label, b.seq_no);
            });
  for (const auto& iv : intervals_) cases_.insert(iv.case_id);
}

IntervalLog build_interval_log(const EventLog& log) {
  using Key = std::pair<std::string_view, std::string_view>;
  std::map<Key, std::deque<const Event*>> open_starts;
  std::vector<IntervalEvent> out;
  out.reserve(log.size());
  IntervalStats stats;

  auto atomic = [&](const Event& e) {
    out.push_back(IntervalEvent{e.label, e.case_id, e.timestamp, e.timestamp,
                                IntervalOrigin::atomic, e.seq_no});
    ++stats.atomic;
  };

  for (const auto& e : log.events()) {
    switch (e.lifecycle) {
      case Lifecycle::start:
        open_starts[{e.case_id, e.label}].push_back(&e);
        break;
      case Lifecycle::complete: {
        auto it = open_starts.find({e.case_id, e.label});
        if (it == open_starts.end() || it->second.empty()) {
          atomic(e);
          break;
        }
        const Event* s = it->second.front();
        it->second.pop_front();
        out.push_back(IntervalEvent{e.label, e.case_id, s->timestamp, e.timestamp,
                                    IntervalOrigin::matched, s->seq_no});
        ++stats.matched;
        break;
      }
      case Lifecycle::none:
        atomic(e);
        break;
    }
  }
  for (auto& [key, queue] : open_starts) {
    for (const Event* s : queue) {
      atomic(*s);
      ++stats.unmatched_starts;
    }
  }
  return IntervalLog(std::move(out), stats);
}

}  // namespace powlmine

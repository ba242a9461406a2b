#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "powlmine/timestamp.hpp"

namespace powlmine {

/// Lifecycle phases that matter for interval reconstruction. Every other tag
/// found in a log is normalized to `none`.
enum class Lifecycle { none, start, complete };

/// Lowercases and trims `raw`; "start" and "complete" map to their phase,
/// anything else to Lifecycle::none.
Lifecycle normalize_lifecycle(std::string_view raw);

struct Event {
  std::string case_id;
  std::string label;
  Timestamp timestamp;
  Lifecycle lifecycle = Lifecycle::none;
  std::size_t seq_no = 0;
};

struct SourceMeta {
  std::string format;  // "xes" or "csv"
  std::size_t records_read = 0;
  std::size_t records_skipped = 0;
  std::size_t distinct_cases = 0;
  std::size_t distinct_labels = 0;
};

/// A normalized, immutable event log. Events are ordered by (timestamp, seq_no).
class EventLog {
 public:
  EventLog() = default;
  /// Sorts `events` and fills the distinct-case/label counters of `meta`.
  EventLog(std::vector<Event> events, SourceMeta meta);

  const std::vector<Event>& events() const noexcept { return events_; }
  const SourceMeta& source_meta() const noexcept { return meta_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }

 private:
  std::vector<Event> events_;
  SourceMeta meta_;
};

enum class Granularity { none, second, minute, hour, day };

std::optional<Granularity> parse_granularity(std::string_view name);
std::string_view to_string(Granularity g);

/// Reads an XES document. In lenient mode events lacking a label or timestamp
/// (and events of traces lacking a case id) are skipped and counted; strict
/// mode raises ValidationError naming the trace and event index instead.
EventLog parse_xes(std::istream& input, bool strict = false);
EventLog parse_xes_file(const std::string& path, bool strict = false);

struct CsvMapping {
  std::string case_column = "case";
  std::string activity_column = "activity";
  std::string timestamp_column = "timestamp";
  std::optional<std::string> start_timestamp_column;
  std::optional<std::string> lifecycle_column;
  char delimiter = ',';
};

/// Reads a UTF-8 CSV file with a header row. With a start column mapped, each
/// row yields a "start" and a "complete" event. `timestamp_format` uses the
/// pattern language of parse_timestamp (empty means ISO-8601).
EventLog parse_csv(std::istream& input, const CsvMapping& mapping,
                   std::string_view timestamp_format = {});
EventLog parse_csv_file(const std::string& path, const CsvMapping& mapping,
                        std::string_view timestamp_format = {});

/// Floors every timestamp to the start of its UTC second/minute/hour/day and
/// re-sorts by (timestamp, seq_no).
EventLog abstract_timestamps(const EventLog& log, Granularity g);

}  // namespace powlmine

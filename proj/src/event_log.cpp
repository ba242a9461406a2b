#include "powlmine/event_log.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "powlmine/error.hpp"

namespace powlmine {

Lifecycle normalize_lifecycle(std::string_view raw) {
  while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.front()))) raw.remove_prefix(1);
  while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.back()))) raw.remove_suffix(1);
  std::string lower(raw);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "start") return Lifecycle::start;
  if (lower == "complete") return Lifecycle::complete;
  return Lifecycle::none;
}

namespace {

bool by_time_then_seq(const Event& a, const Event& b) {
  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
  return a.seq_no < b.seq_no;
}

}  // namespace

EventLog::EventLog(std::vector<Event> events, SourceMeta meta)
    : events_(std::move(events)), meta_(std::move(meta)) {
  std::stable_sort(events_.begin(), events_.end(), by_time_then_seq);
  std::set<std::string_view> cases;
  std::set<std::string_view> labels;
  for (const auto& e : events_) {
    cases.insert(e.case_id);
    labels.insert(e.label);
  }
  meta_.distinct_cases = cases.size();
  meta_.distinct_labels = labels.size();
}

std::optional<Granularity> parse_granularity(std::string_view name) {
  if (name == "none") return Granularity::none;
  if (name == "second") return Granularity::second;
  if (name == "minute") return Granularity::minute;
  if (name == "hour") return Granularity::hour;
  if (name == "day") return Granularity::day;
  return std::nullopt;
}

std::string_view to_string(Granularity g) {
  switch (g) {
    case Granularity::none:
      return "none";
    case Granularity::second:
      return "second";
    case Granularity::minute:
      return "minute";
    case Granularity::hour:
      return "hour";
    case Granularity::day:
      return "day";
  }
  return "none";
}

EventLog parse_xes_file(const std::string& path, bool strict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return parse_xes(in, strict);
}

EventLog parse_csv_file(const std::string& path, const CsvMapping& mapping,
                        std::string_view timestamp_format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return parse_csv(in, mapping, timestamp_format);
}

EventLog abstract_timestamps(const EventLog& log, Granularity g) {
  using namespace std::chrono;
  if (g == Granularity::none) return log;
  std::vector<Event> events = log.events();
  for (auto& e : events) {
    switch (g) {
      case Granularity::second:
        e.timestamp = floor<seconds>(e.timestamp);
        break;
      case Granularity::minute:
        e.timestamp = floor<minutes>(e.timestamp);
        break;
      case Granularity::hour:
        e.timestamp = floor<hours>(e.timestamp);
        break;
      case Granularity::day:
        e.timestamp = floor<days>(e.timestamp);
        break;
      case Granularity::none:
        break;
    }
  }
  return EventLog(std::move(events), log.source_meta());
}

}  // namespace powlmine

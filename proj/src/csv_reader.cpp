#include <iterator>
#include <string>
#include <vector>

#include "powlmine/error.hpp"
#include "powlmine/event_log.hpp"

namespace powlmine {
namespace {

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    if (c < 0x80) {
      extra = 0;
    } else if ((c >> 5) == 0x6) {
      extra = 1;
      if (c < 0xC2) return false;
    } else if ((c >> 4) == 0xE) {
      extra = 2;
    } else if ((c >> 3) == 0x1E && c <= 0xF4) {
      extra = 3;
    } else {
      return false;
    }
    if (i + extra >= s.size() && extra > 0) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return false;
    }
    i += extra + 1;
  }
  return true;
}

// RFC 4180 records: quoted fields may contain delimiters, doubled quotes and
// line breaks. CRLF and LF both end a record.
std::vector<std::vector<std::string>> split_records(std::string_view text, char delim) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  std::size_t quote_line = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
      quote_line = line;
    } else if (c == delim) {
      row.push_back(std::move(field));
      field.clear();
      field_started = false;
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      continue;
    } else if (c == '\n') {
      ++line;
      row.push_back(std::move(field));
      field.clear();
      field_started = false;
      rows.push_back(std::move(row));
      row.clear();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (quoted) throw ParseError("unterminated quoted CSV field", quote_line, 1);
  if (field_started || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  std::string available;
  for (const auto& h : header) available += (available.empty() ? "" : ", ") + h;
  throw ConfigError("CSV column '" + name + "' not found; available columns: " + available);
}

}  // namespace

EventLog parse_csv(std::istream& input, const CsvMapping& mapping,
                   std::string_view timestamp_format) {
  std::string text{std::istreambuf_iterator<char>(input), std::istreambuf_iterator<char>()};
  if (input.bad()) throw InputError("read error while parsing CSV");
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) text.erase(0, 3);
  if (!valid_utf8(text)) throw InputError("CSV input is not valid UTF-8");

  auto rows = split_records(text, mapping.delimiter);
  if (rows.empty()) throw EmptyInputError("CSV input has no header row");
  const auto& header = rows.front();

  const std::size_t case_col = column_index(header, mapping.case_column);
  const std::size_t act_col = column_index(header, mapping.activity_column);
  const std::size_t ts_col = column_index(header, mapping.timestamp_column);
  std::optional<std::size_t> start_col;
  std::optional<std::size_t> life_col;
  if (mapping.start_timestamp_column)
    start_col = column_index(header, *mapping.start_timestamp_column);
  if (mapping.lifecycle_column) life_col = column_index(header, *mapping.lifecycle_column);

  SourceMeta meta{"csv"};
  std::vector<Event> events;
  auto cell = [](const std::vector<std::string>& row, std::size_t i) -> std::string_view {
    return i < row.size() ? std::string_view(row[i]) : std::string_view();
  };

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty()) continue;  // blank line
    const std::size_t candidates = start_col ? 2 : 1;
    meta.records_read += candidates;

    std::string_view case_id = cell(row, case_col);
    std::string_view label = cell(row, act_col);
    auto end_ts = parse_timestamp(cell(row, ts_col), timestamp_format);
    if (case_id.empty() || label.empty() || !end_ts) {
      meta.records_skipped += candidates;
      continue;
    }
    if (start_col) {
      auto start_ts = parse_timestamp(cell(row, *start_col), timestamp_format);
      if (start_ts) {
        events.push_back(Event{std::string(case_id), std::string(label), *start_ts,
                               Lifecycle::start, events.size()});
      } else {
        ++meta.records_skipped;
      }
      events.push_back(Event{std::string(case_id), std::string(label), *end_ts,
                             Lifecycle::complete, events.size()});
    } else {
      Lifecycle lc = life_col ? normalize_lifecycle(cell(row, *life_col)) : Lifecycle::none;
      events.push_back(
          Event{std::string(case_id), std::string(label), *end_ts, lc, events.size()});
    }
  }
  if (events.empty()) throw EmptyInputError("CSV log contains no usable events");
  return EventLog(std::move(events), std::move(meta));
}

}  // namespace powlmine

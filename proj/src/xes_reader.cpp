// XES ingestion on top of expat. Only attributes that are direct children of
// <trace> or <event> are read; globals, extensions and classifiers are ignored.

#include <expat.h>

#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "powlmine/error.hpp"
#include "powlmine/event_log.hpp"

namespace powlmine {
namespace {

constexpr std::string_view kName = "concept:name";
constexpr std::string_view kTime = "time:timestamp";
constexpr std::string_view kLifecycle = "lifecycle:transition";

struct PendingEvent {
  std::optional<std::string> label;
  std::optional<std::string> time_text;
  std::optional<std::string> lifecycle;
  std::size_t index_in_trace = 0;
};

struct XesState {
  bool strict = false;
  std::vector<std::string> stack;

  std::size_t trace_index = 0;
  std::optional<std::string> case_id;
  std::vector<PendingEvent> trace_events;
  PendingEvent current;

  std::vector<Event> events;
  SourceMeta meta{"xes"};
  std::optional<std::string> failure;  // strict-mode validation message

  const std::string* parent() const {
    return stack.size() >= 2 ? &stack[stack.size() - 2] : nullptr;
  }

  void fail(std::string message) {
    if (!failure) failure = std::move(message);
  }

  std::string trace_ref() const {
    return "trace " + std::to_string(trace_index) + (case_id ? " ('" + *case_id + "')" : "");
  }

  void flush_trace() {
    for (auto& pe : trace_events) {
      ++meta.records_read;
      std::string problem;
      std::optional<Timestamp> ts;
      if (!case_id) {
        problem = "trace has no concept:name";
      } else if (!pe.label || pe.label->empty()) {
        problem = "missing concept:name";
      } else if (!pe.time_text) {
        problem = "missing time:timestamp";
      } else if (!(ts = parse_iso8601(*pe.time_text))) {
        problem = "unparseable time:timestamp '" + *pe.time_text + "'";
      }
      if (!problem.empty()) {
        if (strict) {
          fail(trace_ref() + ", event " + std::to_string(pe.index_in_trace) + ": " + problem);
          return;
        }
        ++meta.records_skipped;
        continue;
      }
      Event e;
      e.case_id = *case_id;
      e.label = std::move(*pe.label);
      e.timestamp = *ts;
      e.lifecycle = pe.lifecycle ? normalize_lifecycle(*pe.lifecycle) : Lifecycle::none;
      e.seq_no = events.size();
      events.push_back(std::move(e));
    }
    trace_events.clear();
    case_id.reset();
  }
};

const char* find_attr(const XML_Char** attrs, const char* name) {
  for (std::size_t i = 0; attrs[i] != nullptr; i += 2) {
    if (std::strcmp(attrs[i], name) == 0) return attrs[i + 1];
  }
  return nullptr;
}

void XMLCALL on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
  auto& st = *static_cast<XesState*>(user);
  st.stack.emplace_back(name);
  const std::string& el = st.stack.back();
  const std::string* parent = st.parent();

  if (el == "trace" && parent && *parent == "log") {
    st.case_id.reset();
    st.trace_events.clear();
    return;
  }
  if (el == "event" && parent && *parent == "trace") {
    st.current = PendingEvent{};
    st.current.index_in_trace = st.trace_events.size();
    return;
  }
  if (!parent) return;
  const char* key = find_attr(attrs, "key");
  const char* value = find_attr(attrs, "value");
  if (!key || !value) return;
  std::string_view k{key};
  if (*parent == "trace" && st.stack.size() >= 3 && st.stack[st.stack.size() - 3] == "log") {
    if (k == kName) st.case_id = value;
  } else if (*parent == "event" && st.stack.size() >= 3 &&
             st.stack[st.stack.size() - 3] == "trace") {
    if (k == kName) {
      st.current.label = value;
    } else if (k == kTime) {
      st.current.time_text = value;
    } else if (k == kLifecycle) {
      st.current.lifecycle = value;
    }
  }
}

void XMLCALL on_end(void* user, const XML_Char* /*name*/) {
  auto& st = *static_cast<XesState*>(user);
  const std::string el = st.stack.back();
  const std::string* parent = st.parent();
  if (el == "event" && parent && *parent == "trace") {
    st.trace_events.push_back(std::move(st.current));
  } else if (el == "trace" && parent && *parent == "log") {
    st.flush_trace();
    ++st.trace_index;
  }
  st.stack.pop_back();
}

struct ParserDeleter {
  void operator()(XML_Parser p) const { XML_ParserFree(p); }
};

}  // namespace

EventLog parse_xes(std::istream& input, bool strict) {
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, ParserDeleter> parser{
      XML_ParserCreate(nullptr)};
  if (!parser) throw InputError("cannot allocate XML parser");
  XesState state;
  state.strict = strict;
  XML_SetUserData(parser.get(), &state);
  XML_SetElementHandler(parser.get(), on_start, on_end);

  std::vector<char> buffer(1 << 16);
  bool last = false;
  while (!last) {
    input.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    std::streamsize got = input.gcount();
    last = got < static_cast<std::streamsize>(buffer.size());
    if (input.bad()) throw InputError("read error while parsing XES");
    if (XML_Parse(parser.get(), buffer.data(), static_cast<int>(got), last) ==
        XML_STATUS_ERROR) {
      throw ParseError(std::string("malformed XML: ") +
                           XML_ErrorString(XML_GetErrorCode(parser.get())),
                       XML_GetCurrentLineNumber(parser.get()),
                       XML_GetCurrentColumnNumber(parser.get()) + 1);
    }
    if (state.failure) throw ValidationError(*state.failure);
  }
  if (state.events.empty()) throw EmptyInputError("XES log contains no usable events");
  return EventLog(std::move(state.events), std::move(state.meta));
}

}  // namespace powlmine

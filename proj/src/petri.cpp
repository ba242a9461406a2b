#include "powlmine/petri.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "powlmine/error.hpp"

namespace powlmine {

std::size_t WorkflowNet::add_place(std::string name) {
  if (name.empty()) name = "p" + std::to_string(places_.size());
  places_.push_back(std::move(name));
  return places_.size() - 1;
}

std::size_t WorkflowNet::add_transition(std::optional<std::string> label, std::string name,
                                        std::vector<std::size_t> inputs,
                                        std::vector<std::size_t> outputs) {
  transitions_.push_back({std::move(label), std::move(name), std::move(inputs), std::move(outputs)});
  return transitions_.size() - 1;
}

std::size_t WorkflowNet::arc_count() const noexcept {
  std::size_t n = 0;
  for (const auto& t : transitions_) n += t.inputs.size() + t.outputs.size();
  return n;
}

std::pair<std::size_t, std::size_t> WorkflowNet::source_and_sink() const {
  std::vector<char> has_in(places_.size(), 0);
  std::vector<char> has_out(places_.size(), 0);
  for (const auto& t : transitions_) {
    for (auto p : t.inputs) has_out.at(p) = 1;
    for (auto p : t.outputs) has_in.at(p) = 1;
  }
  std::vector<std::size_t> sources;
  std::vector<std::size_t> sinks;
  for (std::size_t p = 0; p < places_.size(); ++p) {
    if (!has_in[p]) sources.push_back(p);
    if (!has_out[p]) sinks.push_back(p);
  }
  if (sources.size() != 1)
    throw StructureError("workflow net needs exactly one source place, found " +
                         std::to_string(sources.size()));
  if (sinks.size() != 1)
    throw StructureError("workflow net needs exactly one sink place, found " +
                         std::to_string(sinks.size()));
  if (sources.front() == sinks.front())
    throw StructureError("source and sink place coincide");
  return {sources.front(), sinks.front()};
}

namespace {

class NetBuilder {
 public:
  WorkflowNet build(const Model& m) {
    const std::size_t source = net_.add_place("source");
    const std::size_t sink = net_.add_place("sink");
    visit(m, source, sink);
    return std::move(net_);
  }

 private:
  std::size_t silent(const std::string& role, std::vector<std::size_t> in,
                     std::vector<std::size_t> out) {
    std::string name = "tau_" + role + "_" + std::to_string(net_.transitions().size());
    return net_.add_transition(std::nullopt, std::move(name), std::move(in), std::move(out));
  }

  void visit(const Model& m, std::size_t entry, std::size_t exit) {
    switch (m.kind()) {
      case Model::Kind::transition:
        net_.add_transition(m.label(), m.label(), {entry}, {exit});
        return;
      case Model::Kind::silent:
        silent("skip", {entry}, {exit});
        return;
      case Model::Kind::choice:
        for (const auto& c : m.children()) {
          const std::size_t in = net_.add_place();
          const std::size_t out = net_.add_place();
          silent("xor_enter", {entry}, {in});
          visit(c, in, out);
          silent("xor_leave", {out}, {exit});
        }
        return;
      case Model::Kind::loop: {
        const std::size_t body_in = net_.add_place();
        const std::size_t body_out = net_.add_place();
        const std::size_t redo_in = net_.add_place();
        const std::size_t redo_out = net_.add_place();
        silent("loop_enter", {entry}, {body_in});
        visit(m.body(), body_in, body_out);
        silent("loop_redo", {body_out}, {redo_in});
        visit(m.redo(), redo_in, redo_out);
        silent("loop_back", {redo_out}, {body_in});
        silent("loop_exit", {body_out}, {exit});
        return;
      }
      case Model::Kind::order: {
        const std::size_t k = m.children().size();
        std::vector<std::size_t> control(k);
        std::vector<std::size_t> done(k);
        for (std::size_t i = 0; i < k; ++i) control[i] = net_.add_place();
        for (std::size_t i = 0; i < k; ++i) done[i] = net_.add_place();
        std::vector<std::vector<std::size_t>> incoming(k);
        std::vector<std::vector<std::size_t>> outgoing(k);
        for (auto [u, v] : m.edges()) {
          const std::size_t p = net_.add_place();
          outgoing[u].push_back(p);
          incoming[v].push_back(p);
        }
        silent("order_init", {entry}, control);
        for (std::size_t i = 0; i < k; ++i) {
          const std::size_t in = net_.add_place();
          const std::size_t out = net_.add_place();
          std::vector<std::size_t> start_inputs{control[i]};
          start_inputs.insert(start_inputs.end(), incoming[i].begin(), incoming[i].end());
          silent("order_start", std::move(start_inputs), {in});
          visit(m.children()[i], in, out);
          std::vector<std::size_t> finish_outputs = outgoing[i];
          finish_outputs.push_back(done[i]);
          silent("order_finish", {out}, std::move(finish_outputs));
        }
        silent("order_final", done, {exit});
        return;
      }
    }
  }

  WorkflowNet net_;
};

using Marking = std::u16string;

bool enabled(const WorkflowNet::Transition& t, const Marking& m) {
  // A place may occur once per transition in inputs (no multi-arcs).
  return std::all_of(t.inputs.begin(), t.inputs.end(), [&](std::size_t p) { return m[p] > 0; });
}

Marking fire(const WorkflowNet::Transition& t, Marking m) {
  for (auto p : t.inputs) --m[p];
  for (auto p : t.outputs) {
    if (m[p] == 0xFFFF) throw BudgetExceeded("token count overflow", 0xFFFF);
    ++m[p];
  }
  return m;
}

std::string describe_marking(const WorkflowNet& net, const Marking& m) {
  std::string out = "[";
  bool first = true;
  for (std::size_t p = 0; p < m.size(); ++p) {
    if (m[p] == 0) continue;
    if (!first) out += ", ";
    first = false;
    out += net.places()[p];
    if (m[p] > 1) out += "^" + std::to_string(static_cast<unsigned>(m[p]));
  }
  return out + "]";
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      case '\'':
        out += "&apos;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

WorkflowNet to_workflow_net(const Model& m) { return NetBuilder{}.build(m); }

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::sound:
      return "sound";
    case Verdict::unsound:
      return "unsound";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

SoundnessReport check_soundness(const WorkflowNet& net, std::size_t state_budget) {
  if (state_budget == 0) throw DomainError("soundness budget must be at least 1");
  const auto [source, sink] = net.source_and_sink();
  const std::size_t np = net.places().size();
  const auto& ts = net.transitions();

  Marking initial(np, 0);
  initial[source] = 1;
  Marking final_marking(np, 0);
  final_marking[sink] = 1;

  std::unordered_map<Marking, std::size_t> index;
  std::vector<Marking> states;
  std::vector<std::vector<std::size_t>> predecessors;
  std::vector<char> fired(ts.size(), 0);
  SoundnessReport report;

  index.emplace(initial, 0);
  states.push_back(initial);
  predecessors.emplace_back();
  for (std::size_t cur = 0; cur < states.size(); ++cur) {
    for (std::size_t t = 0; t < ts.size(); ++t) {
      if (!enabled(ts[t], states[cur])) continue;
      fired[t] = 1;
      Marking next;
      try {
        next = fire(ts[t], states[cur]);
      } catch (const BudgetExceeded&) {
        report.verdict = Verdict::inconclusive;
        report.explored_states = states.size();
        return report;
      }
      auto [it, fresh] = index.emplace(next, states.size());
      if (fresh) {
        if (states.size() >= state_budget) {
          report.verdict = Verdict::inconclusive;
          report.explored_states = states.size();
          return report;
        }
        states.push_back(std::move(next));
        predecessors.emplace_back();
      }
      predecessors[it->second].push_back(cur);
    }
  }
  report.explored_states = states.size();

  // Proper completion: a token in the sink means exactly the final marking.
  for (const auto& s : states) {
    if (s[sink] > 0 && s != final_marking)
      report.witnesses.push_back("improper completion at marking " + describe_marking(net, s));
  }
  // Option to complete: backward reachability from the final marking.
  std::vector<char> can_finish(states.size(), 0);
  auto fin = index.find(final_marking);
  if (fin != index.end()) {
    std::deque<std::size_t> queue{fin->second};
    can_finish[fin->second] = 1;
    while (!queue.empty()) {
      std::size_t s = queue.front();
      queue.pop_front();
      for (std::size_t p : predecessors[s]) {
        if (!can_finish[p]) {
          can_finish[p] = 1;
          queue.push_back(p);
        }
      }
    }
  }
  for (std::size_t s = 0; s < states.size(); ++s) {
    if (!can_finish[s])
      report.witnesses.push_back("cannot complete from marking " + describe_marking(net, states[s]));
  }
  for (std::size_t t = 0; t < ts.size(); ++t) {
    if (!fired[t]) report.witnesses.push_back("dead transition " + ts[t].name);
  }
  report.verdict = report.witnesses.empty() ? Verdict::sound : Verdict::unsound;
  return report;
}

std::set<Trace> net_language(const WorkflowNet& net, std::size_t max_length,
                             std::size_t budget) {
  const auto [source, sink] = net.source_and_sink();
  const std::size_t np = net.places().size();
  Marking initial(np, 0);
  initial[source] = 1;
  Marking final_marking(np, 0);
  final_marking[sink] = 1;

  struct Config {
    Marking marking;
    Trace trace;
  };
  struct ConfigHash {
    std::size_t operator()(const Config& c) const {
      std::size_t h = std::hash<Marking>{}(c.marking);
      for (const auto& l : c.trace) h = h * 1000003u ^ std::hash<std::string>{}(l);
      return h;
    }
  };
  struct ConfigEq {
    bool operator()(const Config& a, const Config& b) const {
      return a.marking == b.marking && a.trace == b.trace;
    }
  };
  std::unordered_set<Config, ConfigHash, ConfigEq> seen;
  std::vector<Config> stack{{initial, {}}};
  seen.insert(stack.front());
  std::set<Trace> out;
  while (!stack.empty()) {
    Config c = std::move(stack.back());
    stack.pop_back();
    if (c.marking == final_marking) out.insert(c.trace);
    for (const auto& t : net.transitions()) {
      if (!enabled(t, c.marking)) continue;
      Config next{fire(t, c.marking), c.trace};
      if (t.label) {
        if (next.trace.size() == max_length) continue;
        next.trace.push_back(*t.label);
      }
      if (seen.insert(next).second) {
        if (seen.size() > budget) throw BudgetExceeded("net language exploration", budget);
        stack.push_back(std::move(next));
      }
    }
  }
  return out;
}

std::string export_pnml(const WorkflowNet& net) {
  const auto [source, sink] = net.source_and_sink();
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<pnml>\n"
      << "  <net id=\"net1\" type=\"http://www.pnml.org/version-2009/grammar/pnmlcoremodel\">\n"
      << "    <name>\n      <text>powl</text>\n    </name>\n"
      << "    <page id=\"page1\">\n";
  for (std::size_t p = 0; p < net.places().size(); ++p) {
    out << "      <place id=\"p" << p << "\">\n"
        << "        <name>\n          <text>" << xml_escape(net.places()[p]) << "</text>\n"
        << "        </name>\n";
    if (p == source) out << "        <initialMarking>\n          <text>1</text>\n        </initialMarking>\n";
    out << "      </place>\n";
  }
  for (std::size_t t = 0; t < net.transitions().size(); ++t) {
    const auto& tr = net.transitions()[t];
    out << "      <transition id=\"t" << t << "\">\n"
        << "        <name>\n          <text>" << (tr.label ? xml_escape(*tr.label) : "")
        << "</text>\n        </name>\n";
    if (!tr.label) {
      out << "        <toolspecific tool=\"ProM\" version=\"6.4\" activity=\"$invisible$\" "
             "localNodeID=\"t"
          << t << "\"/>\n";
    }
    out << "      </transition>\n";
  }
  std::size_t arc = 0;
  for (std::size_t t = 0; t < net.transitions().size(); ++t) {
    const auto& tr = net.transitions()[t];
    for (auto p : tr.inputs)
      out << "      <arc id=\"a" << arc++ << "\" source=\"p" << p << "\" target=\"t" << t
          << "\"/>\n";
    for (auto p : tr.outputs)
      out << "      <arc id=\"a" << arc++ << "\" source=\"t" << t << "\" target=\"p" << p
          << "\"/>\n";
  }
  out << "    </page>\n"
      << "    <finalmarkings>\n      <marking>\n"
      << "        <place idref=\"p" << sink << "\">\n          <text>1</text>\n        </place>\n"
      << "      </marking>\n    </finalmarkings>\n"
      << "  </net>\n</pnml>\n";
  return out.str();
}

std::string export_net_dot(const WorkflowNet& net) {
  const auto [source, sink] = net.source_and_sink();
  std::ostringstream out;
  out << "digraph workflow_net {\n  rankdir=LR;\n";
  for (std::size_t p = 0; p < net.places().size(); ++p) {
    out << "  p" << p << " [shape=circle, label=\"" << (p == source ? "&#9679;" : "")
        << "\", xlabel=\"" << dot_escape(net.places()[p]) << "\""
        << (p == sink ? ", peripheries=2" : "") << "];\n";
  }
  for (std::size_t t = 0; t < net.transitions().size(); ++t) {
    const auto& tr = net.transitions()[t];
    if (tr.label) {
      out << "  t" << t << " [shape=box, label=\"" << dot_escape(*tr.label) << "\"];\n";
    } else {
      out << "  t" << t
          << " [shape=box, style=filled, fillcolor=black, label=\"\", width=0.15];\n";
    }
  }
  for (std::size_t t = 0; t < net.transitions().size(); ++t) {
    for (auto p : net.transitions()[t].inputs) out << "  p" << p << " -> t" << t << ";\n";
    for (auto p : net.transitions()[t].outputs) out << "  t" << t << " -> p" << p << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace powlmine

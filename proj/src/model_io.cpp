#include <nlohmann/json.hpp>

#include <sstream>

#include "powlmine/error.hpp"
#include "powlmine/model.hpp"

namespace powlmine {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json encode(const Model& m) {
  ordered_json j;
  switch (m.kind()) {
    case Model::Kind::transition:
      j["kind"] = "transition";
      j["label"] = m.label();
      break;
    case Model::Kind::silent:
      j["kind"] = "silent";
      break;
    case Model::Kind::choice: {
      j["kind"] = "xor";
      auto& children = j["children"] = ordered_json::array();
      for (const auto& c : m.children()) children.push_back(encode(c));
      break;
    }
    case Model::Kind::loop:
      j["kind"] = "loop";
      j["do"] = encode(m.body());
      j["redo"] = encode(m.redo());
      break;
    case Model::Kind::order: {
      j["kind"] = "order";
      auto& children = j["children"] = ordered_json::array();
      for (const auto& c : m.children()) children.push_back(encode(c));
      auto& edges = j["edges"] = ordered_json::array();
      for (auto [u, v] : m.edges()) edges.push_back({u, v});
      break;
    }
  }
  return j;
}

[[noreturn]] void schema(const std::string& what) {
  throw FormatError("invalid model JSON: " + what);
}

const ordered_json& member(const ordered_json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) schema(std::string("missing \"") + name + "\"");
  return *it;
}

std::vector<Model> decode_children(const ordered_json& j);

Model decode(const ordered_json& j) {
  if (!j.is_object()) schema("model node must be an object");
  const auto& kind = member(j, "kind");
  if (!kind.is_string()) schema("\"kind\" must be a string");
  const std::string k = kind.get<std::string>();
  if (k == "transition") {
    const auto& label = member(j, "label");
    if (!label.is_string() || label.get<std::string>().empty())
      schema("\"label\" must be a non-empty string");
    return Model::transition(label.get<std::string>());
  }
  if (k == "silent") return Model::silent();
  if (k == "xor") return Model::choice(decode_children(j));
  if (k == "loop") return Model::loop(decode(member(j, "do")), decode(member(j, "redo")));
  if (k == "order") {
    auto children = decode_children(j);
    const auto& edges = member(j, "edges");
    if (!edges.is_array()) schema("\"edges\" must be an array");
    std::vector<Model::Edge> parsed;
    for (const auto& e : edges) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() ||
          !e[1].is_number_unsigned())
        schema("each edge must be a pair of child indexes");
      parsed.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
    }
    return Model::partial_order(std::move(children), std::move(parsed));
  }
  schema("unknown kind \"" + k + "\"");
}

std::vector<Model> decode_children(const ordered_json& j) {
  const auto& children = member(j, "children");
  if (!children.is_array()) schema("\"children\" must be an array");
  std::vector<Model> out;
  out.reserve(children.size());
  for (const auto& c : children) out.push_back(decode(c));
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

class DotWriter {
 public:
  std::string run(const Model& m) {
    out_ << "digraph powl {\n  rankdir=LR;\n  node [fontname=\"Helvetica\"];\n";
    visit(m, 1);
    out_ << "}\n";
    return out_.str();
  }

 private:
  // Returns the id of a node representing `m` for edges drawn by the parent.
  std::string visit(const Model& m, int depth) {
    const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    const std::string id = "n" + std::to_string(next_++);
    switch (m.kind()) {
      case Model::Kind::transition:
        out_ << indent << id << " [shape=box, style=rounded, label=\"" << dot_escape(m.label())
             << "\"];\n";
        return id;
      case Model::Kind::silent:
        out_ << indent << id << " [shape=box, style=filled, fillcolor=black, label=\"\", "
             << "width=0.3, height=0.3];\n";
        return id;
      case Model::Kind::choice:
      case Model::Kind::loop: {
        const bool is_loop = m.kind() == Model::Kind::loop;
        out_ << indent << id << " [shape=circle, label=\"" << (is_loop ? "loop" : "xor")
             << "\"];\n";
        for (std::size_t i = 0; i < m.children().size(); ++i) {
          std::string child = visit(m.children()[i], depth);
          out_ << indent << id << " -> " << child << " [arrowhead=none";
          if (is_loop) out_ << ", label=\"" << (i == 0 ? "do" : "redo") << "\"";
          out_ << "];\n";
        }
        return id;
      }
      case Model::Kind::order: {
        out_ << indent << "subgraph cluster_" << id << " {\n"
             << indent << "  label=\"\";\n"
             << indent << "  style=rounded;\n";
        std::vector<std::string> ids;
        for (const auto& c : m.children()) ids.push_back(visit(c, depth + 1));
        // Only the transitive reduction is drawn.
        for (auto [u, v] : m.edges()) {
          bool implied = false;
          for (std::size_t w = 0; w < m.children().size() && !implied; ++w)
            implied = m.has_edge(u, w) && m.has_edge(w, v);
          if (!implied) out_ << indent << "  " << ids[u] << " -> " << ids[v] << ";\n";
        }
        out_ << indent << "}\n";
        return ids.front();
      }
    }
    return id;
  }

  std::ostringstream out_;
  std::size_t next_ = 0;
};

}  // namespace

std::string to_json(const Model& m) { return encode(m).dump(); }

Model model_from_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text.begin(), text.end());
  } catch (const ordered_json::parse_error& e) {
    throw FormatError(std::string("invalid model JSON: ") + e.what());
  }
  return decode(j);
}

std::string to_dot(const Model& m) { return DotWriter{}.run(m); }

}  // namespace powlmine

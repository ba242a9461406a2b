#include "powlmine/pot.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "powlmine/bit_matrix.hpp"
#include "powlmine/error.hpp"

namespace powlmine {

bool Pot::is_strict_partial_order() const {
  BitMatrix rel(nodes.size());
  for (auto [u, v] : edges) {
    if (u >= nodes.size() || v >= nodes.size()) return false;
    rel.set(u, v);
  }
  return rel.is_strict_partial_order();
}

Pot build_pot(std::span<const IntervalEvent> intervals) {
  if (intervals.empty()) throw EmptyInputError("cannot build a partial order from an empty case");
  const std::size_t n = intervals.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = intervals[a];
    const auto& y = intervals[b];
    return std::tie(x.start, x.end, x.seq_no) < std::tie(y.start, y.end, y.seq_no);
  });

  Pot pot;
  pot.nodes.reserve(n);
  std::map<std::string_view, int> next_index;
  for (std::size_t i : order) {
    const auto& iv = intervals[i];
    pot.nodes.push_back(Model::transition(iv.label, ++next_index[iv.label]));
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (intervals[order[a]].end < intervals[order[b]].start) pot.edges.emplace_back(a, b);
    }
  }
  return pot;
}

namespace {

std::string node_caption(const Model& m) {
  if (m.kind() == Model::Kind::transition)
    return m.index() > 1 ? m.label() + "#" + std::to_string(m.index()) : m.label();
  if (m.kind() == Model::Kind::silent) return "tau";
  return describe(m);
}

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string key_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == ',' || c == '|' || c == '<' || c == '#' || c == '\\' || c == '\t' || c == '\n')
      out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string export_pot_dot(const Pot& pot) {
  BitMatrix rel(pot.nodes.size());
  for (auto [u, v] : pot.edges) rel.set(u, v);
  rel.close_transitively();
  const BitMatrix reduced = rel.transitive_reduction();
  std::ostringstream out;
  out << "digraph pot {\n  rankdir=LR;\n  node [shape=box, style=rounded];\n";
  for (std::size_t i = 0; i < pot.nodes.size(); ++i)
    out << "  n" << i << " [label=\"" << dot_escape(node_caption(pot.nodes[i])) << "\"];\n";
  for (auto [u, v] : reduced.pairs()) out << "  n" << u << " -> n" << v << ";\n";
  out << "}\n";
  return out.str();
}

NodeId NodeTable::add(Model payload) {
  payloads_.push_back(std::move(payload));
  return static_cast<NodeId>(payloads_.size() - 1);
}

bool Variant::contains(NodeId n) const {
  return std::binary_search(nodes.begin(), nodes.end(), n);
}

bool Variant::has_edge(NodeId from, NodeId to) const {
  return std::binary_search(edges.begin(), edges.end(), std::pair{from, to});
}

PotMultiset::PotMultiset(std::shared_ptr<NodeTable> table, std::vector<Variant> variants)
    : table_(std::move(table)) {
  for (auto& v : variants) {
    std::sort(v.nodes.begin(), v.nodes.end());
    v.nodes.erase(std::unique(v.nodes.begin(), v.nodes.end()), v.nodes.end());
    std::sort(v.edges.begin(), v.edges.end());
    v.edges.erase(std::unique(v.edges.begin(), v.edges.end()), v.edges.end());
  }
  std::erase_if(variants, [](const Variant& v) { return v.nodes.empty() || v.count == 0; });
  std::sort(variants.begin(), variants.end(), [](const Variant& a, const Variant& b) {
    return std::tie(a.nodes, a.edges) < std::tie(b.nodes, b.edges);
  });
  for (auto& v : variants) {
    if (!variants_.empty() && variants_.back().nodes == v.nodes &&
        variants_.back().edges == v.edges) {
      variants_.back().count += v.count;
    } else {
      variants_.push_back(std::move(v));
    }
  }
  for (const auto& v : variants_) universe_.insert(universe_.end(), v.nodes.begin(), v.nodes.end());
  std::sort(universe_.begin(), universe_.end());
  universe_.erase(std::unique(universe_.begin(), universe_.end()), universe_.end());
  std::sort(universe_.begin(), universe_.end(),
            [this](NodeId a, NodeId b) { return table_->before(a, b); });
}

PotMultiset PotMultiset::from_pots(std::span<const Pot> pots) {
  // Identity of a payload across pots.
  using Identity = std::pair<std::string, int>;
  auto identity = [](const Model& m) {
    return Identity{m.key(), m.is_leaf() ? m.index() : 0};
  };
  std::map<Identity, const Model*> distinct;
  for (const auto& p : pots)
    for (const auto& n : p.nodes) distinct.emplace(identity(n), &n);

  auto table = std::make_shared<NodeTable>();
  std::map<Identity, NodeId> ids;
  for (const auto& [ident, model] : distinct) ids.emplace(ident, table->add(*model));

  std::vector<Variant> variants;
  variants.reserve(pots.size());
  for (const auto& p : pots) {
    Variant v;
    std::vector<NodeId> local;
    local.reserve(p.nodes.size());
    for (const auto& n : p.nodes) local.push_back(ids.at(identity(n)));
    v.nodes = local;
    for (auto [a, b] : p.edges) v.edges.emplace_back(local.at(a), local.at(b));
    variants.push_back(std::move(v));
  }
  return PotMultiset(std::move(table), std::move(variants));
}

std::size_t PotMultiset::total_count() const noexcept {
  std::size_t total = 0;
  for (const auto& v : variants_) total += v.count;
  return total;
}

Pot PotMultiset::pot(std::size_t variant) const {
  const auto& v = variants_.at(variant);
  std::vector<NodeId> order = v.nodes;
  std::sort(order.begin(), order.end(), [this](NodeId a, NodeId b) { return table_->before(a, b); });
  Pot p;
  std::map<NodeId, std::size_t> pos;
  for (NodeId id : order) {
    pos[id] = p.nodes.size();
    p.nodes.push_back(table_->payload(id));
  }
  for (auto [a, b] : v.edges) p.edges.emplace_back(pos.at(a), pos.at(b));
  std::sort(p.edges.begin(), p.edges.end());
  return p;
}

std::string PotMultiset::variant_key(std::size_t variant) const {
  const Pot p = pot(variant);
  auto name = [](const Model& m) {
    if (m.kind() == Model::Kind::transition)
      return key_escape(m.label()) + "#" + std::to_string(m.index());
    return key_escape(m.key());
  };
  std::string out;
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    if (i) out += ',';
    out += name(p.nodes[i]);
  }
  out += '|';
  for (std::size_t i = 0; i < p.edges.size(); ++i) {
    if (i) out += ',';
    out += name(p.nodes[p.edges[i].first]) + "<" + name(p.nodes[p.edges[i].second]);
  }
  return out;
}

PotMultiset build_pot_multiset(const IntervalLog& log) {
  const auto& all = log.intervals();
  if (all.empty()) throw EmptyInputError("interval log has no cases");
  std::vector<Pot> pots;
  pots.reserve(log.cases().size());
  std::size_t begin = 0;
  while (begin < all.size()) {
    std::size_t end = begin + 1;
    while (end < all.size() && all[end].case_id == all[begin].case_id) ++end;
    pots.push_back(build_pot(std::span<const IntervalEvent>(all.data() + begin, end - begin)));
    begin = end;
  }
  return PotMultiset::from_pots(pots);
}

}  // namespace powlmine

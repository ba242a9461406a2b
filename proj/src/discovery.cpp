#include "powlmine/discovery.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <tuple>

#include "powlmine/bit_matrix.hpp"
#include "powlmine/error.hpp"

namespace powlmine {
namespace {

std::vector<char> membership(std::size_t table_size, std::span<const NodeId> ids) {
  std::vector<char> in(table_size, 0);
  for (NodeId id : ids) in.at(id) = 1;
  return in;
}

void require_subset(const PotMultiset& m, std::span<const NodeId> ids, const char* what) {
  auto in_universe = membership(m.table().size(), m.universe());
  for (NodeId id : ids) {
    if (id >= in_universe.size() || !in_universe[id])
      throw DomainError(std::string(what) + ": node " + std::to_string(id) +
                        " is not in the multiset");
  }
}

// Canonical order of the universe as positions indexed by node id.
std::vector<std::size_t> positions(const PotMultiset& m) {
  std::vector<std::size_t> pos(m.table().size(), SIZE_MAX);
  for (std::size_t i = 0; i < m.universe().size(); ++i) pos[m.universe()[i]] = i;
  return pos;
}

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> parent;
};

}  // namespace

PotMultiset project(const PotMultiset& m, std::span<const NodeId> keep) {
  require_subset(m, keep, "project");
  auto in = membership(m.table().size(), keep);
  std::vector<Variant> out;
  out.reserve(m.variants().size());
  for (const auto& v : m.variants()) {
    Variant p;
    p.count = v.count;
    for (NodeId n : v.nodes)
      if (in[n]) p.nodes.push_back(n);
    if (p.nodes.empty()) continue;
    for (auto e : v.edges)
      if (in[e.first] && in[e.second]) p.edges.push_back(e);
    out.push_back(std::move(p));
  }
  return PotMultiset(m.shared_table(), std::move(out));
}

PotMultiset substitute(const PotMultiset& m, std::span<const NodeId> old, NodeId replacement) {
  Substitution s{std::vector<NodeId>(old.begin(), old.end()), replacement};
  return substitute_all(m, std::span<const Substitution>(&s, 1));
}

PotMultiset substitute_all(const PotMultiset& m, std::span<const Substitution> subs) {
  const std::size_t table_size = m.table().size();
  auto in_universe = membership(table_size, m.universe());
  std::vector<int> group_of(table_size, -1);
  for (std::size_t g = 0; g < subs.size(); ++g) {
    require_subset(m, subs[g].old, "substitute");
    const NodeId r = subs[g].replacement;
    if (r >= table_size) throw DomainError("substitute: replacement is not a registered node");
    if (in_universe[r])
      throw DomainError("substitute: replacement node " + std::to_string(r) +
                        " already occurs in the multiset");
    for (NodeId n : subs[g].old) {
      if (group_of[n] != -1) throw DomainError("substitute: node sets overlap");
      group_of[n] = static_cast<int>(g);
    }
  }

  std::vector<Variant> out;
  out.reserve(m.variants().size());
  std::vector<std::size_t> local(table_size, 0);
  for (const auto& v : m.variants()) {
    bool touched = std::any_of(v.nodes.begin(), v.nodes.end(),
                               [&](NodeId n) { return group_of[n] != -1; });
    if (!touched) {
      out.push_back(v);
      continue;
    }
    const std::size_t k = v.nodes.size();
    for (std::size_t i = 0; i < k; ++i) local[v.nodes[i]] = i;
    BitMatrix rel(k);
    for (auto [a, b] : v.edges) rel.set(local[a], local[b]);

    // New vertex list: untouched nodes keep their own slot, each touched
    // group collapses into one slot holding its member positions.
    struct Slot {
      NodeId id;
      std::vector<std::size_t> members;
    };
    std::vector<Slot> slots;
    std::map<int, std::size_t> group_slot;
    for (std::size_t i = 0; i < k; ++i) {
      const int g = group_of[v.nodes[i]];
      if (g == -1) {
        slots.push_back({v.nodes[i], {i}});
      } else {
        auto [it, fresh] = group_slot.emplace(g, slots.size());
        if (fresh) slots.push_back({subs[static_cast<std::size_t>(g)].replacement, {}});
        slots[it->second].members.push_back(i);
      }
    }
    Variant nv;
    nv.count = v.count;
    for (const auto& s : slots) nv.nodes.push_back(s.id);
    for (const auto& from : slots) {
      for (const auto& to : slots) {
        if (&from == &to) continue;
        bool all = true;
        for (std::size_t a : from.members) {
          for (std::size_t b : to.members) {
            if (!rel.test(a, b)) {
              all = false;
              break;
            }
          }
          if (!all) break;
        }
        if (all) nv.edges.emplace_back(from.id, to.id);
      }
    }
    out.push_back(std::move(nv));
  }
  return PotMultiset(m.shared_table(), std::move(out));
}

std::optional<ConflictGroup> conflict_partition(const PotMultiset& m) {
  std::map<std::string, std::size_t> label_index;
  for (NodeId n : m.universe())
    for (const auto& l : m.table().payload(n).label_list()) label_index.emplace(l, 0);
  std::size_t next = 0;
  std::vector<const std::string*> names;
  for (auto& [label, idx] : label_index) {
    idx = next++;
    names.push_back(&label);
  }
  if (names.size() < 2) return std::nullopt;

  UnionFind uf(names.size());
  for (const auto& v : m.variants()) {
    std::optional<std::size_t> anchor;
    for (NodeId n : v.nodes) {
      for (const auto& l : m.table().payload(n).label_list()) {
        const std::size_t i = label_index.at(l);
        if (anchor) {
          uf.unite(*anchor, i);
        } else {
          anchor = i;
        }
      }
    }
  }
  std::map<std::size_t, LabelSet> components;  // keyed by root = smallest label index
  for (std::size_t i = 0; i < names.size(); ++i) components[uf.find(i)].insert(*names[i]);
  if (components.size() < 2) return std::nullopt;
  ConflictGroup group;
  for (auto& [root, part] : components) group.parts.push_back(std::move(part));
  return group;
}

std::vector<std::vector<NodeId>> cooccurrence_partition(const PotMultiset& m) {
  std::vector<std::vector<std::size_t>> presence(m.table().size());
  for (std::size_t i = 0; i < m.variants().size(); ++i)
    for (NodeId n : m.variants()[i].nodes) presence[n].push_back(i);
  std::map<std::vector<std::size_t>, std::vector<NodeId>> blocks;
  for (NodeId n : m.universe()) blocks[presence[n]].push_back(n);  // universe is canonical
  std::vector<std::vector<NodeId>> out;
  out.reserve(blocks.size());
  for (auto& [profile, nodes] : blocks) out.push_back(std::move(nodes));
  const NodeTable& table = m.table();
  std::sort(out.begin(), out.end(),
            [&](const auto& a, const auto& b) { return table.before(a.front(), b.front()); });
  return out;
}

std::vector<std::vector<NodeId>> equivalence_classes(const NodeTable& table,
                                                     std::span<const NodeId> nodes) {
  std::map<std::string_view, std::vector<NodeId>> classes;
  for (NodeId n : nodes) classes[table.key(n)].push_back(n);
  std::vector<std::vector<NodeId>> out;
  out.reserve(classes.size());
  for (auto& [key, members] : classes) {
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

AggregatedOrder combine_orders(const PotMultiset& m) {
  if (m.empty()) throw DomainError("combine_orders: empty multiset");
  const auto& universe = m.universe();
  const std::size_t u = universe.size();
  const auto pos = positions(m);

  std::vector<std::size_t> together(u * u, 0);
  std::vector<std::size_t> support(u * u, 0);
  for (const auto& v : m.variants()) {
    for (NodeId a : v.nodes)
      for (NodeId b : v.nodes) together[pos[a] * u + pos[b]] += v.count;
    for (auto [a, b] : v.edges) support[pos[a] * u + pos[b]] += v.count;
  }

  BitMatrix base(u);
  for (std::size_t i = 0; i < u; ++i)
    for (std::size_t j = 0; j < u; ++j)
      if (i != j && support[i * u + j] >= 1 && support[i * u + j] == together[i * u + j])
        base.set(i, j);
  BitMatrix closure = base;
  closure.close_transitively();
  BitMatrix ext(u);
  for (std::size_t i = 0; i < u; ++i)
    for (std::size_t j = 0; j < u; ++j)
      if (i != j && closure.test(i, j) && support[i * u + j] == together[i * u + j])
        ext.set(i, j);

  AggregatedOrder result;
  result.nodes = universe;
  auto to_ids = [&](const BitMatrix& rel) {
    std::vector<std::pair<NodeId, NodeId>> out;
    for (auto [i, j] : rel.pairs()) out.emplace_back(universe[i], universe[j]);
    return out;
  };
  result.base_edges = to_ids(base);
  result.extended_edges = to_ids(ext);

  // Prune: one removal per round among the legs of all transitivity
  // violations (a->b, b->c, not a->c; c == a covers 2-cycles).
  const std::size_t words = (u + 63) / 64;
  while (true) {
    BitMatrix legs(u);
    bool any = false;
    for (std::size_t a = 0; a < u; ++a) {
      auto row_a = ext.row(a);
      for (std::size_t b = 0; b < u; ++b) {
        if (!ext.test(a, b)) continue;
        auto row_b = ext.row(b);
        for (std::size_t w = 0; w < words; ++w) {
          std::uint64_t missing = row_b[w] & ~row_a[w];
          while (missing) {
            const std::size_t c = w * 64 + static_cast<std::size_t>(std::countr_zero(missing));
            missing &= missing - 1;
            legs.set(a, b);
            legs.set(b, c);
            any = true;
          }
        }
      }
    }
    if (!any) break;
    std::optional<std::pair<std::size_t, std::size_t>> victim;
    for (auto [a, b] : legs.pairs()) {
      if (!victim) {
        victim = {a, b};
        continue;
      }
      auto [va, vb] = *victim;
      // Positions follow canonical node order, so comparing them compares
      // (canonical key, id) of source and target.
      if (std::tuple(support[a * u + b], a, b) < std::tuple(support[va * u + vb], va, vb))
        victim = {a, b};
    }
    ext.reset(victim->first, victim->second);
    ++result.pruned;
  }
  result.edges = to_ids(ext);
  return result;
}

namespace {

class Discoverer {
 public:
  explicit Discoverer(std::shared_ptr<NodeTable> table) : table_(std::move(table)) {}

  Model run(PotMultiset m) {
    if (m.empty()) throw DomainError("discover: empty multiset");
    if (m.universe().size() == 1) return table_->payload(m.universe().front());

    // Step 1: exclusive choice over label components.
    if (auto group = conflict_partition(m)) {
      std::vector<std::vector<NodeId>> branches(group->parts.size());
      for (NodeId n : m.universe()) {
        const auto& node_labels = table_->payload(n).label_list();
        std::size_t part = 0;
        if (!node_labels.empty()) {
          while (!group->parts[part].contains(node_labels.front())) ++part;
        }
        branches[part].push_back(n);
      }
      std::vector<Model> children;
      std::vector<NodeId> all;
      for (const auto& nodes : branches) {
        children.push_back(run(project(m, nodes)));
        all.insert(all.end(), nodes.begin(), nodes.end());
      }
      const NodeId xor_node = table_->add(Model::choice(std::move(children)));
      m = substitute(m, all, xor_node);
      if (m.universe().size() == 1) return table_->payload(m.universe().front());
    }

    // Step 2: co-occurring blocks. Blocks are disjoint, so projecting each
    // block before or after substituting the others gives the same result.
    auto blocks = cooccurrence_partition(m);
    if (blocks.size() > 1) {
      std::vector<Substitution> subs;
      for (auto& block : blocks) {
        if (block.size() < 2) continue;
        Model sub = run(project(m, block));
        subs.push_back({std::move(block), table_->add(std::move(sub))});
      }
      if (!subs.empty()) m = substitute_all(m, subs);
    }

    // Step 3: loops over equivalent nodes, body = canonically smallest member.
    {
      std::vector<Substitution> subs;
      for (auto& cls : equivalence_classes(*table_, m.universe())) {
        if (cls.size() < 2) continue;
        const Model& body = table_->payload(cls.front());
        subs.push_back({std::move(cls), table_->add(Model::loop(body, Model::silent()))});
      }
      if (!subs.empty()) m = substitute_all(m, subs);
    }

    // Step 4: skips for nodes missing from at least one variant.
    {
      std::vector<std::size_t> present(table_->size(), 0);
      for (const auto& v : m.variants())
        for (NodeId n : v.nodes) ++present[n];
      std::vector<Substitution> subs;
      for (NodeId n : m.universe()) {
        if (present[n] == m.variants().size()) continue;
        const NodeId wrapped = table_->add(Model::choice({table_->payload(n), Model::silent()}));
        subs.push_back({{n}, wrapped});
      }
      if (!subs.empty()) m = substitute_all(m, subs);
    }

    // Step 5: order aggregation.
    if (m.universe().size() == 1) return table_->payload(m.universe().front());
    const AggregatedOrder agg = combine_orders(m);
    std::vector<std::size_t> pos(table_->size(), 0);
    std::vector<Model> children;
    for (std::size_t i = 0; i < agg.nodes.size(); ++i) {
      pos[agg.nodes[i]] = i;
      children.push_back(table_->payload(agg.nodes[i]));
    }
    std::vector<Model::Edge> edges;
    for (auto [a, b] : agg.edges) edges.emplace_back(pos[a], pos[b]);
    return Model::partial_order(std::move(children), std::move(edges));
  }

 private:
  std::shared_ptr<NodeTable> table_;
};

}  // namespace

Model discover(const PotMultiset& m) {
  if (m.empty()) throw DomainError("discover: empty multiset");
  // Work on a private copy of the node table; the input stays untouched.
  auto table = std::make_shared<NodeTable>(m.table());
  return Discoverer(table).run(PotMultiset(table, m.variants()));
}

}  // namespace powlmine

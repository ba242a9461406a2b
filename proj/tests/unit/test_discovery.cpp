#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "powlmine/bit_matrix.hpp"
#include "powlmine/conformance.hpp"
#include "powlmine/discovery.hpp"
#include "powlmine/error.hpp"

using namespace powlmine;
using namespace testutil;

namespace {

NodeId id(const PotMultiset& m, const std::string& label, int index = 1) {
  for (NodeId n = 0; n < m.table().size(); ++n) {
    const Model& p = m.table().payload(n);
    if (p.kind() == Model::Kind::transition && p.label() == label && p.index() == index) return n;
  }
  FAIL("no node " << label << "#" << index);
  return 0;
}

using EdgeSet = std::set<std::pair<std::string, std::string>>;

// Edges as readable label pairs (leaf payloads only).
EdgeSet named(const PotMultiset& m, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  EdgeSet out;
  for (auto [a, b] : edges) out.emplace(describe(m.table().payload(a)), describe(m.table().payload(b)));
  return out;
}

bool is_strict_order(const Variant& v) {
  std::map<NodeId, std::size_t> pos;
  for (auto n : v.nodes) pos.emplace(n, pos.size());
  BitMatrix rel(v.nodes.size());
  for (auto [a, b] : v.edges) {
    if (!pos.count(a) || !pos.count(b)) return false;
    rel.set(pos[a], pos[b]);
  }
  return rel.is_strict_partial_order();
}

}  // namespace

TEST_CASE("projection") {
  const auto m = multiset({{pot({"a", "b"}, {{0, 1}}), 1}, {pot({"a"}), 1}});
  const std::vector<NodeId> keep_b{id(m, "b")};
  const auto pb = project(m, keep_b);
  REQUIRE(pb.variants().size() == 1);
  CHECK(pb.variants()[0].nodes == keep_b);
  CHECK(pb.variants()[0].edges.empty());
  CHECK(pb.variants()[0].count == 1);

  const auto same = project(m, m.universe());
  CHECK(same.variants().size() == m.variants().size());
  for (std::size_t i = 0; i < m.variants().size(); ++i) {
    CHECK(same.variants()[i].nodes == m.variants()[i].nodes);
    CHECK(same.variants()[i].edges == m.variants()[i].edges);
  }

  const auto chain = multiset({{pot({"a", "b", "c"}, {{0, 1}, {1, 2}}), 2}});
  const std::vector<NodeId> ac{id(chain, "a"), id(chain, "c")};
  const auto pac = project(chain, ac);
  REQUIRE(pac.variants().size() == 1);
  CHECK(pac.variants()[0].count == 2);
  CHECK(named(pac, pac.variants()[0].edges) == EdgeSet{{"a", "c"}});

  // Folding after projection sums counts.
  const auto two = multiset({{pot({"a", "b"}, {{0, 1}}), 1}, {pot({"a", "c"}), 2}});
  const std::vector<NodeId> only_a{id(two, "a")};
  const auto pa = project(two, only_a);
  REQUIRE(pa.variants().size() == 1);
  CHECK(pa.variants()[0].count == 3);

  const std::vector<NodeId> outside{99};
  CHECK_THROWS_AS(project(m, outside), DomainError);
}

TEST_CASE("substitution") {
  SUBCASE("singleton in a chain") {
    auto m = multiset({{pot({"a", "b", "c"}, {{0, 1}, {1, 2}}), 1}});
    const NodeId psi = m.shared_table()->add(tr("psi"));
    const std::vector<NodeId> old{id(m, "b")};
    const auto s = substitute(m, old, psi);
    CHECK(named(s, s.variants()[0].edges) == EdgeSet{{"a", "psi"}, {"psi", "c"}, {"a", "c"}});
  }
  SUBCASE("universal conditions") {
    auto m = multiset({{pot({"a", "b", "c"}, {{0, 2}, {1, 2}, {0, 1}}), 1}, {pot({"d"}), 1}});
    const NodeId psi = m.shared_table()->add(tr("psi"));
    const std::vector<NodeId> old{id(m, "a"), id(m, "b")};
    const auto s = substitute(m, old, psi);
    REQUIRE(s.variants().size() == 2);
    bool saw_d = false;
    for (std::size_t v = 0; v < s.variants().size(); ++v) {
      const auto& var = s.variants()[v];
      if (var.contains(id(m, "d"))) {
        saw_d = true;
        CHECK(var.nodes.size() == 1);
        CHECK(var.edges.empty());
      } else {
        CHECK(var.nodes.size() == 2);
        CHECK(named(s, var.edges) == EdgeSet{{"psi", "c"}});
      }
    }
    CHECK(saw_d);
  }
  SUBCASE("errors") {
    auto m = multiset({{pot({"a", "b"}), 1}});
    const std::vector<NodeId> old{id(m, "a")};
    CHECK_THROWS_AS(substitute(m, old, id(m, "b")), DomainError);
    CHECK_THROWS_AS(substitute(m, old, 1234), DomainError);
  }
}

TEST_CASE("property: substitution follows the unanimity definition") {
  std::mt19937_64 rng(77);
  for (int round = 0; round < 300; ++round) {
    auto m = random_multiset(rng, 5, 4, 4);
    const auto& uni = m.universe();
    std::vector<NodeId> old;
    for (auto n : uni)
      if (std::bernoulli_distribution(0.4)(rng)) old.push_back(n);
    if (old.empty()) old.push_back(uni.front());
    const NodeId psi = m.shared_table()->add(tr("psi"));
    const auto s = substitute(m, old, psi);
    const std::set<NodeId> olds(old.begin(), old.end());

    // Expected variants computed per input variant, folded by hand.
    std::map<std::pair<std::vector<NodeId>, std::vector<std::pair<NodeId, NodeId>>>, std::size_t>
        expected;
    for (const auto& v : m.variants()) {
      std::vector<NodeId> present_old;
      for (auto n : v.nodes)
        if (olds.count(n)) present_old.push_back(n);
      std::set<NodeId> nodes;
      std::set<std::pair<NodeId, NodeId>> edges;
      for (auto n : v.nodes)
        if (!olds.count(n)) nodes.insert(n);
      for (auto [a, b] : v.edges)
        if (!olds.count(a) && !olds.count(b)) edges.emplace(a, b);
      if (!present_old.empty()) {
        nodes.insert(psi);
        for (auto t : v.nodes) {
          if (olds.count(t)) continue;
          bool all_before = true;
          bool all_after = true;
          for (auto o : present_old) {
            all_before = all_before && v.has_edge(o, t);
            all_after = all_after && v.has_edge(t, o);
          }
          if (all_before) edges.emplace(psi, t);
          if (all_after) edges.emplace(t, psi);
        }
      }
      expected[{std::vector<NodeId>(nodes.begin(), nodes.end()),
                std::vector<std::pair<NodeId, NodeId>>(edges.begin(), edges.end())}] += v.count;
    }
    REQUIRE(s.variants().size() == expected.size());
    for (const auto& v : s.variants()) {
      CHECK(is_strict_order(v));
      auto it = expected.find({v.nodes, v.edges});
      REQUIRE(it != expected.end());
      CHECK(it->second == v.count);
    }
  }
}

TEST_CASE("conflict partition") {
  CHECK_FALSE(conflict_partition(multiset({{pot({"a", "b"}), 1}, {pot({"a", "c"}), 1}})));

  const auto ab = conflict_partition(multiset({{pot({"a"}), 1}, {pot({"b"}), 1}}));
  REQUIRE(ab);
  CHECK(ab->parts == std::vector<LabelSet>{{"a"}, {"b"}});

  const auto abcd =
      conflict_partition(multiset({{pot({"a", "b"}), 1}, {pot({"c", "d"}), 1}, {pot({"c"}), 1}}));
  REQUIRE(abcd);
  CHECK(abcd->parts == std::vector<LabelSet>{{"a", "b"}, {"c", "d"}});
}

TEST_CASE("co-occurrence partition") {
  auto blocks_of = [](const PotMultiset& m) {
    std::vector<std::vector<std::string>> out;
    for (const auto& block : cooccurrence_partition(m)) {
      out.emplace_back();
      for (auto n : block) out.back().push_back(describe(m.table().payload(n)));
    }
    return out;
  };
  using Blocks = std::vector<std::vector<std::string>>;
  CHECK(blocks_of(multiset({{pot({"a", "b"}), 2}})) == Blocks{{"a", "b"}});
  CHECK(blocks_of(multiset({{pot({"a", "b"}), 1}, {pot({"a"}), 1}})) == Blocks{{"a"}, {"b"}});
  CHECK(blocks_of(multiset({{pot({"a", "b", "c"}), 1}, {pot({"a", "b"}), 1}, {pot({"c"}), 1}})) ==
        Blocks{{"a", "b"}, {"c"}});
}

TEST_CASE("equivalence classes") {
  const auto m = multiset({{pot({"a", "a", "b"}, {{0, 1}}), 1}});
  const auto classes = equivalence_classes(m.table(), m.universe());
  REQUIRE(classes.size() == 2);
  CHECK(classes[0] == std::vector<NodeId>{id(m, "a", 1), id(m, "a", 2)});
  CHECK(classes[1] == std::vector<NodeId>{id(m, "b")});

  NodeTable table;
  const NodeId x1 = table.add(Model::choice({tr("a"), tr("b")}));
  const NodeId x2 = table.add(Model::choice({tr("b"), tr("a")}));
  const NodeId c = table.add(tr("c"));
  const std::vector<NodeId> nodes{x1, c, x2};
  const auto cls = equivalence_classes(table, nodes);
  REQUIRE(cls.size() == 2);
  CHECK(std::find(cls.begin(), cls.end(), std::vector<NodeId>{x1, x2}) != cls.end());
}

TEST_CASE("order aggregation examples") {
  SUBCASE("closure extension") {
    const auto m = multiset({{pot({"a", "b"}, {{0, 1}}), 2}, {pot({"b", "c"}, {{0, 1}}), 1}});
    const auto agg = combine_orders(m);
    CHECK(named(m, agg.base_edges) == EdgeSet{{"a", "b"}, {"b", "c"}});
    CHECK(named(m, agg.edges) == EdgeSet{{"a", "b"}, {"b", "c"}, {"a", "c"}});
    CHECK(agg.pruned == 0);
  }
  SUBCASE("contradiction means concurrency") {
    const auto m = multiset({{pot({"a", "b"}, {{0, 1}}), 1}, {pot({"a", "b"}), 1}});
    const auto agg = combine_orders(m);
    CHECK(agg.edges.empty());
    CHECK(agg.base_edges.empty());
  }
  SUBCASE("pruning a cycle") {
    // c->a is observed once and never contradicted, so it is a base edge too:
    // the base relation is the cycle a->b->c->a. Each round removes the
    // smallest leg by (support, source, target): a->b, then b->c.
    const auto m = multiset({{pot({"a", "b"}, {{0, 1}}), 1},
                             {pot({"b", "c"}, {{0, 1}}), 1},
                             {pot({"c", "a"}, {{0, 1}}), 1}});
    const auto agg = combine_orders(m);
    CHECK(named(m, agg.base_edges) == EdgeSet{{"a", "b"}, {"b", "c"}, {"c", "a"}});
    CHECK(named(m, agg.extended_edges) == EdgeSet{{"a", "b"}, {"b", "c"}, {"c", "a"}});
    CHECK(named(m, agg.edges) == EdgeSet{{"c", "a"}});
    CHECK(agg.pruned == 2);
  }
}

TEST_CASE("property: aggregation against brute force") {
  std::mt19937_64 rng(4242);
  for (int round = 0; round < 300; ++round) {
    const auto m = random_multiset(rng, 5, 4, 4);
    const auto agg = combine_orders(m);
    const auto& uni = m.universe();
    std::set<std::pair<NodeId, NodeId>> base;
    for (auto u : uni) {
      for (auto v : uni) {
        if (u == v) continue;
        std::size_t n = 0;
        std::size_t e = 0;
        for (const auto& var : m.variants()) {
          if (var.contains(u) && var.contains(v)) n += var.count;
          if (var.has_edge(u, v)) e += var.count;
        }
        if (e >= 1 && e == n) base.emplace(u, v);
      }
    }
    CHECK(std::set<std::pair<NodeId, NodeId>>(agg.base_edges.begin(), agg.base_edges.end()) == base);

    std::map<NodeId, std::size_t> pos;
    for (auto n : uni) pos.emplace(n, pos.size());
    BitMatrix rel(uni.size());
    for (auto [a, b] : agg.edges) rel.set(pos[a], pos[b]);
    CHECK(rel.is_strict_partial_order());
    for (auto [a, b] : agg.edges)
      for (const auto& var : m.variants())
        if (var.contains(a) && var.contains(b)) CHECK(var.has_edge(a, b));
    // Pruning only removes edges.
    for (const auto& e : agg.edges)
      CHECK(std::find(agg.extended_edges.begin(), agg.extended_edges.end(), e) !=
            agg.extended_edges.end());
  }
}

TEST_CASE("discovery goldens") {
  CHECK(to_json(discover(multiset({{pot({"a"}), 1}, {pot({"b"}), 1}}))) ==
        R"({"kind":"xor","children":[{"kind":"transition","label":"a"},{"kind":"transition","label":"b"}]})");
  CHECK(to_json(discover(multiset({{pot({"a"}), 1}, {pot({"a", "a"}, {{0, 1}}), 1}}))) ==
        R"({"kind":"loop","do":{"kind":"transition","label":"a"},"redo":{"kind":"silent"}})");
  CHECK(to_json(discover(multiset({{pot({"a", "b"}, {{0, 1}}), 3}, {pot({"a"}), 1}}))) ==
        R"({"kind":"order","children":[{"kind":"transition","label":"a"},)"
        R"({"kind":"xor","children":[{"kind":"transition","label":"b"},{"kind":"silent"}]}],)"
        R"("edges":[[0,1]]})");
  CHECK(to_json(discover(multiset({{pot({"a", "b"}), 1}}))) ==
        R"({"kind":"order","children":[{"kind":"transition","label":"a"},{"kind":"transition","label":"b"}],"edges":[]})");
  CHECK_THROWS_AS(discover(PotMultiset{}), DomainError);
}

TEST_CASE("discovery leaves its input untouched") {
  const auto m = multiset({{pot({"a", "b"}, {{0, 1}}), 3}, {pot({"a"}), 1}});
  const std::size_t before = m.table().size();
  const Model first = discover(m);
  CHECK(m.table().size() == before);
  CHECK(to_json(discover(m)) == to_json(first));
}

TEST_CASE("property: discovery on arbitrary pots") {
  std::mt19937_64 rng(1234);
  for (int round = 0; round < 300; ++round) {
    const auto m = random_multiset(rng, 5, 4, 3);
    const Model model = discover(m);
    LabelSet expected;
    for (auto n : m.universe()) {
      const auto ls = labels(m.table().payload(n));
      expected.insert(ls.begin(), ls.end());
    }
    CHECK(labels(model) == expected);
    CHECK(to_json(discover(m)) == to_json(model));
  }
}

TEST_CASE("property: perfect fitness on sampled logs") {
  const std::vector<std::string> pool{"a", "b", "c", "d", "e", "f"};
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Model source = random_powl(seed, 3, 3, pool);
    const auto log = sample_pot_log(source, 20, seed + 1000);
    const Model found = discover(log);
    const auto report = verify_perfect_fitness(found, log, 300);
    CHECK_MESSAGE(report.failures.empty(), "seed " << seed << ": " << describe(found));
    LabelSet observed;
    for (auto n : log.universe()) observed.insert(log.table().payload(n).label());
    CHECK(labels(found) == observed);
  }
}

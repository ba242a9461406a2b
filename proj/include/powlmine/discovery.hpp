#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "powlmine/model.hpp"
#include "powlmine/pot.hpp"

namespace powlmine {

/// A partition of activity labels into >= 2 parts whose labels never occur in
/// the same variant. Parts are sorted and ordered by their smallest label.
struct ConflictGroup {
  std::vector<LabelSet> parts;
};

struct AggregatedOrder {
  std::vector<NodeId> nodes;  // canonical node order
  std::vector<std::pair<NodeId, NodeId>> edges;
  /// Edges observed at least once and never contradicted.
  std::vector<std::pair<NodeId, NodeId>> base_edges;
  /// Base closure minus contradicted pairs, before pruning.
  std::vector<std::pair<NodeId, NodeId>> extended_edges;
  std::size_t pruned = 0;
};

/// Restricts every variant to `keep`; variants left empty are dropped.
/// Throws DomainError unless keep ⊆ 𝒱(M).
PotMultiset project(const PotMultiset& m, std::span<const NodeId> keep);

/// Replaces the nodes `old` by `replacement` in every variant touching them.
/// The replacement precedes t iff every present old node precedes t, and s
/// precedes the replacement iff s precedes every present old node.
/// `replacement` must be a handle of m's table outside 𝒱(M).
PotMultiset substitute(const PotMultiset& m, std::span<const NodeId> old, NodeId replacement);

struct Substitution {
  std::vector<NodeId> old;
  NodeId replacement;
};

/// Applies pairwise disjoint substitutions in one pass. Equal to applying
/// them one after another in any order.
PotMultiset substitute_all(const PotMultiset& m, std::span<const Substitution> subs);

/// Connected components of the label co-occurrence graph when there are at
/// least two, else nullopt.
std::optional<ConflictGroup> conflict_partition(const PotMultiset& m);

/// Blocks of nodes with identical presence across variants, each block and
/// the block list in canonical node order.
std::vector<std::vector<NodeId>> cooccurrence_partition(const PotMultiset& m);

/// Nodes grouped by equivalent payloads, in canonical order.
std::vector<std::vector<NodeId>> equivalence_classes(const NodeTable& table,
                                                     std::span<const NodeId> nodes);

/// Aggregates the variants into one strict partial order over 𝒱(M).
///
/// With n(u,v) the number of variants holding both u and v and e(u,v) the
/// number holding the edge u->v (multiplicities counted), base edges satisfy
/// e = n >= 1, extended edges are base-closure pairs with e = n, and pruning
/// removes one edge per round until the relation is transitive: among all
/// legs of transitivity violations, the one with the least support e(u,v),
/// ties broken by the canonical order of (source, target).
AggregatedOrder combine_orders(const PotMultiset& m);

/// Recursive discovery of a POWL model: exclusive choices from label
/// conflicts, co-occurring blocks, loops over equivalent nodes, skips for
/// optional nodes, and finally order aggregation. Throws DomainError for an
/// empty multiset.
Model discover(const PotMultiset& m);

}  // namespace powlmine

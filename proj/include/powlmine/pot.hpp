#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "powlmine/interval_log.hpp"
#include "powlmine/model.hpp"

namespace powlmine {

/// A partially ordered trace. Node payloads start out as transitions
/// (label, index); edges are stored transitively closed.
struct Pot {
  std::vector<Model> nodes;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  bool is_strict_partial_order() const;
};

/// Intervals of one case to a Pot: u precedes v iff u ends strictly before v
/// starts. Same-label instances are indexed 1..m by (start, end, seq_no).
/// Throws EmptyInputError for an empty interval set.
Pot build_pot(std::span<const IntervalEvent> intervals);

/// Graphviz digraph showing the transitive reduction of the order.
std::string export_pot_dot(const Pot& pot);

using NodeId = std::uint32_t;

/// Registry of node handles shared by every multiset derived from one input
/// (projections, substitutions). Handles are never removed.
class NodeTable {
 public:
  NodeId add(Model payload);
  const Model& payload(NodeId id) const { return payloads_.at(id); }
  const std::string& key(NodeId id) const { return payloads_.at(id).key(); }
  std::size_t size() const noexcept { return payloads_.size(); }

  /// Canonical node order: canonical key, then handle id.
  bool before(NodeId a, NodeId b) const {
    const auto& ka = key(a);
    const auto& kb = key(b);
    return ka != kb ? ka < kb : a < b;
  }

 private:
  std::vector<Model> payloads_;
};

struct Variant {
  std::vector<NodeId> nodes;                     // sorted by id
  std::vector<std::pair<NodeId, NodeId>> edges;  // sorted, transitively closed
  std::size_t count = 1;

  bool contains(NodeId n) const;
  bool has_edge(NodeId from, NodeId to) const;
};

/// A multiset of partial orders over node handles, stored as distinct
/// variants with multiplicities.
class PotMultiset {
 public:
  PotMultiset() : table_(std::make_shared<NodeTable>()) {}

  /// Normalizes `variants` (sorting, folding equal ones, dropping empty ones).
  PotMultiset(std::shared_ptr<NodeTable> table, std::vector<Variant> variants);

  /// Folds `pots`. Transition payloads are unified by (label, index), other
  /// payloads by canonical key; handles are numbered in that order.
  static PotMultiset from_pots(std::span<const Pot> pots);

  const std::vector<Variant>& variants() const noexcept { return variants_; }
  /// 𝒱(M) in canonical node order.
  const std::vector<NodeId>& universe() const noexcept { return universe_; }
  const NodeTable& table() const noexcept { return *table_; }
  const std::shared_ptr<NodeTable>& shared_table() const noexcept { return table_; }

  bool empty() const noexcept { return variants_.empty(); }
  std::size_t total_count() const noexcept;

  /// Materializes one variant with nodes in canonical order.
  Pot pot(std::size_t variant) const;
  /// Deterministic text key of a variant: nodes as "label#index" in canonical
  /// order, then "|" and the edges as "u<v".
  std::string variant_key(std::size_t variant) const;

 private:
  std::shared_ptr<NodeTable> table_;
  std::vector<Variant> variants_;
  std::vector<NodeId> universe_;
};

/// One Pot per case, folded by canonical form.
PotMultiset build_pot_multiset(const IntervalLog& log);

}  // namespace powlmine

#pragma once

#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace powlmine {

using LabelSet = std::set<std::string>;

/// An immutable POWL model: a transition (label, index), a silent step, an
/// exclusive choice over >= 2 children, a loop (body, redo), or a strict partial
/// order over >= 2 children.
///
/// Models are cheap to copy (shared, immutable nodes). Children of choices and
/// partial orders are stored in canonical order, i.e. sorted by canonical key,
/// so two equivalent models have identical child sequences and edge lists.
class Model {
 public:
  enum class Kind : unsigned char { transition, silent, choice, loop, order };
  using Edge = std::pair<std::size_t, std::size_t>;

  static Model transition(std::string label, int index = 1);
  static Model silent(int index = 1);
  /// Throws FormatError with fewer than two children.
  static Model choice(std::vector<Model> children);
  static Model loop(Model body, Model redo);
  /// `edges` index into `children` and must form a strict partial order
  /// (irreflexive and transitively closed); otherwise FormatError.
  static Model partial_order(std::vector<Model> children, std::vector<Edge> edges);

  Kind kind() const noexcept;
  bool is_leaf() const noexcept {
    return kind() == Kind::transition || kind() == Kind::silent;
  }

  /// Transition label; empty for every other kind.
  const std::string& label() const noexcept;
  /// Instance index of a transition or silent step (1 for operators).
  int index() const noexcept;

  /// Choice/order children in canonical order; {body, redo} for loops.
  const std::vector<Model>& children() const noexcept;
  const Model& body() const;
  const Model& redo() const;
  /// Order edges over children(), sorted and transitively closed.
  const std::vector<Edge>& edges() const noexcept;
  bool has_edge(std::size_t from, std::size_t to) const;

  /// Canonical serialization: equal exactly for equivalent models.
  const std::string& key() const noexcept;
  /// Activity labels in the hierarchy, sorted; never contains the silent marker.
  const std::vector<std::string>& label_list() const noexcept;
  /// Number of nodes in the hierarchy (leaves and operators).
  std::size_t node_count() const noexcept;
  std::size_t leaf_count() const noexcept;

  /// Same node (pointer identity), not equivalence.
  bool same_node(const Model& other) const noexcept { return node_ == other.node_; }

 private:
  struct Node;
  explicit Model(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// All activity labels present in the model.
LabelSet labels(const Model& m);

/// Structural equivalence: leaves by label (indexes ignored), choices by a
/// child bijection, loops position-wise, orders by an edge-preserving
/// bijection. Computed directly, without canonical keys.
bool equivalent(const Model& a, const Model& b);

inline const std::string& canonical_key(const Model& m) { return m.key(); }

/// Compact JSON in the fixed model schema, e.g.
/// {"kind":"order","children":[...],"edges":[[0,1]]}.
std::string to_json(const Model& m);
/// Inverse of to_json; throws FormatError on syntax or schema violations.
Model model_from_json(std::string_view text);

/// Graphviz rendering of the model hierarchy.
std::string to_dot(const Model& m);

std::string describe(const Model& m);

}  // namespace powlmine

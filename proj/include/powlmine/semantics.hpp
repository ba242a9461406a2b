#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "powlmine/model.hpp"

namespace powlmine {

using Trace = std::vector<std::string>;

inline constexpr std::size_t kDefaultAcceptBudget = 100000;

/// A model compiled for repeated membership queries.
///
/// Execution states assign every leaf, choice and loop of the hierarchy a small
/// slot (leaf: fired or not; choice: selected branch; loop: in body or redo).
/// A partial-order child may move only while all its predecessors can finish
/// and none of its successors has started, which gives all-before-all
/// precedence. Silent steps are never materialised: a visible step applies the
/// silent steps it needs, and "final" means "final after silent steps". States
/// therefore only change on visible labels.
class Acceptor {
 public:
  explicit Acceptor(const Model& model);

  /// True iff `trace` is in the language of the model. Throws BudgetExceeded
  /// when more than `budget` execution states were visited without a verdict.
  bool accepts(std::span<const std::string> trace,
               std::size_t budget = kDefaultAcceptBudget) const;

 private:
  struct Node {
    Model::Kind kind;
    int label = -1;  // transitions only
    bool nullable = false;  // can finish silently from its initial state
    std::size_t slot = 0;
    std::size_t slot_end = 0;  // subtree slots are [slot, slot_end)
    std::vector<std::size_t> children;
    std::vector<std::uint64_t> labels;  // bit set of label ids in the subtree
    std::vector<std::vector<std::size_t>> preds;  // order only, child positions
    std::vector<std::vector<std::size_t>> succs;
  };
  using State = std::u16string;

  std::size_t compile(const Model& m, std::size_t& next_slot);
  using LabelBits = std::vector<std::uint64_t>;
  bool can_finish(std::size_t n, const State& s) const;
  void future_labels(std::size_t n, const State& s, LabelBits& acc) const;
  bool started(std::size_t n, const State& s) const;
  void reset(std::size_t n, State& s) const;
  void step(std::size_t n, const State& s, int label, std::vector<State>& out) const;

  std::vector<Node> nodes_;
  std::vector<std::string> labels_;
  std::size_t root_ = 0;
  std::size_t slots_ = 0;
};

bool accepts(const Model& m, std::span<const std::string> trace,
             std::size_t budget = kDefaultAcceptBudget);

/// Every trace of length <= max_length the model produces when each loop runs
/// its redo part at most `max_loop_iterations` times per execution. Throws
/// SizeLimitExceeded when an intermediate language grows beyond `cap`.
std::set<Trace> enumerate_language(const Model& m, std::size_t max_loop_iterations,
                                   std::size_t max_length, std::size_t cap = 1000000);

}  // namespace powlmine

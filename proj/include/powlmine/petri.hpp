#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "powlmine/model.hpp"
#include "powlmine/semantics.hpp"

namespace powlmine {

/// A labelled place/transition net with arc weight 1. Transitions without a
/// label are silent.
class WorkflowNet {
 public:
  struct Transition {
    std::optional<std::string> label;
    std::string name;
    std::vector<std::size_t> inputs;
    std::vector<std::size_t> outputs;
  };

  std::size_t add_place(std::string name = {});
  std::size_t add_transition(std::optional<std::string> label, std::string name,
                             std::vector<std::size_t> inputs,
                             std::vector<std::size_t> outputs);

  const std::vector<std::string>& places() const noexcept { return places_; }
  const std::vector<Transition>& transitions() const noexcept { return transitions_; }
  std::size_t arc_count() const noexcept;

  /// The unique place without incoming arcs and the unique place without
  /// outgoing arcs. Throws StructureError if either is missing or ambiguous.
  std::pair<std::size_t, std::size_t> source_and_sink() const;

 private:
  std::vector<std::string> places_;
  std::vector<Transition> transitions_;
};

/// Block-wise translation: every sub-model becomes a subnet between one entry
/// and one exit place. Places + transitions never exceed
/// kNetSizeFactor * (leaves + operators + order edges).
WorkflowNet to_workflow_net(const Model& m);

inline constexpr std::size_t kNetSizeFactor = 8;

enum class Verdict { sound, unsound, inconclusive };
std::string_view to_string(Verdict v);

struct SoundnessReport {
  Verdict verdict = Verdict::inconclusive;
  std::size_t explored_states = 0;
  std::vector<std::string> witnesses;
};

inline constexpr std::size_t kDefaultSoundnessBudget = 100000;

/// Explicit-state check from the marking [source]: option to complete, proper
/// completion, and no dead transitions. More than `state_budget` reachable
/// markings gives an inconclusive verdict.
SoundnessReport check_soundness(const WorkflowNet& net,
                                std::size_t state_budget = kDefaultSoundnessBudget);

/// Visible traces of length <= max_length leading from [source] to [sink].
/// Throws BudgetExceeded after visiting `budget` (marking, trace) pairs.
std::set<Trace> net_language(const WorkflowNet& net, std::size_t max_length,
                             std::size_t budget = 1000000);

std::string export_pnml(const WorkflowNet& net);
std::string export_net_dot(const WorkflowNet& net);

}  // namespace powlmine

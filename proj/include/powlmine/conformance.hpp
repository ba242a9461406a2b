#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "powlmine/model.hpp"
#include "powlmine/pot.hpp"
#include "powlmine/semantics.hpp"

namespace powlmine {

struct Linearizations {
  /// Distinct label sequences in order of first discovery.
  std::vector<Trace> sequences;
  /// Topological orderings visited; equals the number of linear extensions
  /// unless capped.
  std::size_t extensions = 0;
  bool capped = false;
};

/// Backtracking over the pot's nodes in their stored order, always trying
/// the lowest enabled position first. Stops after `cap` orderings. Silent
/// nodes are hidden; operator nodes raise DomainError.
Linearizations linearizations(const Pot& pot, std::size_t cap);

struct FitnessFailure {
  std::string variant_key;
  Trace trace;
};

struct FitnessReport {
  std::size_t variants_checked = 0;
  std::size_t linearizations_checked = 0;
  /// Traces whose acceptance check ran out of budget.
  std::size_t inconclusive = 0;
  bool capped = false;
  std::vector<FitnessFailure> failures;

  bool perfect() const noexcept { return failures.empty(); }
};

FitnessReport verify_perfect_fitness(const Model& model, const PotMultiset& m,
                                     std::size_t lin_cap = 1000,
                                     std::size_t accept_budget = kDefaultAcceptBudget);

std::string to_json(const FitnessReport& report);

/// A random model whose transitions carry pairwise distinct labels drawn from
/// `label_pool`; silent leaves appear only as loop redo parts or choice
/// branches. Throws ConfigError for an empty or duplicated pool.
Model random_powl(std::uint64_t seed, std::size_t max_depth, std::size_t max_children,
                  const std::vector<std::string>& label_pool);

/// Executes the model `traces` times. A choice takes a uniform branch, a loop
/// repeats its redo part while a coin with success `loop_geometric_p` fails
/// (at most 3 times), and every run is recorded as a pot whose edges are the
/// precedences the model imposes between emitted leaves.
PotMultiset sample_pot_log(const Model& model, std::size_t traces, std::uint64_t seed,
                           double loop_geometric_p = 0.5);

}  // namespace powlmine

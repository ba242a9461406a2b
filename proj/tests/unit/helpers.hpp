#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "powlmine/bit_matrix.hpp"
#include "powlmine/model.hpp"
#include "powlmine/pot.hpp"

namespace testutil {

using powlmine::Model;
using powlmine::Pot;
using powlmine::PotMultiset;

inline Model tr(const std::string& label, int index = 1) { return Model::transition(label, index); }
inline Model tau() { return Model::silent(); }

/// A pot over leaf labels; repeated labels get indexes 1, 2, ... in list
/// order. `edges` index into `labels` and are closed transitively here.
inline Pot pot(const std::vector<std::string>& labels,
               const std::vector<std::pair<std::size_t, std::size_t>>& edges = {}) {
  Pot p;
  std::map<std::string, int> next;
  for (const auto& l : labels) p.nodes.push_back(Model::transition(l, ++next[l]));
  powlmine::BitMatrix rel(labels.size());
  for (auto [u, v] : edges) rel.set(u, v);
  rel.close_transitively();
  p.edges = rel.pairs();
  return p;
}

/// Multiset from (pot, multiplicity) pairs.
inline PotMultiset multiset(const std::vector<std::pair<Pot, std::size_t>>& entries) {
  std::vector<Pot> pots;
  for (const auto& [p, count] : entries)
    for (std::size_t i = 0; i < count; ++i) pots.push_back(p);
  return PotMultiset::from_pots(pots);
}

/// Random pots over at most `max_nodes` leaves drawn from a small label pool;
/// each variant is a random DAG closed transitively.
inline PotMultiset random_multiset(std::mt19937_64& rng, std::size_t max_nodes,
                                   std::size_t max_variants, std::size_t pool = 3) {
  std::uniform_int_distribution<std::size_t> nvariants(1, max_variants);
  std::uniform_int_distribution<std::size_t> nnodes(1, max_nodes);
  std::uniform_int_distribution<std::size_t> label(0, pool - 1);
  std::uniform_int_distribution<std::size_t> count(1, 3);
  std::bernoulli_distribution edge(0.5);
  std::vector<std::pair<Pot, std::size_t>> entries;
  const std::size_t k = nvariants(rng);
  for (std::size_t v = 0; v < k; ++v) {
    std::vector<std::string> labels;
    const std::size_t n = nnodes(rng);
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::string(1, char('a' + label(rng))));
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (edge(rng)) edges.emplace_back(i, j);
    entries.emplace_back(pot(labels, edges), count(rng));
  }
  return multiset(entries);
}

/// Random model over a small label pool; labels may repeat.
inline Model random_model(std::mt19937_64& rng, int depth, std::size_t pool = 3,
                          std::size_t max_children = 3) {
  std::uniform_int_distribution<int> kind(0, depth > 0 ? 5 : 1);
  std::uniform_int_distribution<std::size_t> label(0, pool - 1);
  std::uniform_int_distribution<std::size_t> arity(2, max_children);
  std::bernoulli_distribution edge(0.4);
  switch (kind(rng)) {
    case 0:
    case 1:
      return std::bernoulli_distribution(0.1)(rng)
                 ? Model::silent()
                 : Model::transition(std::string(1, char('a' + label(rng))));
    case 2: {
      std::vector<Model> cs;
      for (std::size_t i = arity(rng); i > 0; --i) cs.push_back(random_model(rng, depth - 1, pool, max_children));
      return Model::choice(std::move(cs));
    }
    case 3:
      return Model::loop(random_model(rng, depth - 1, pool, max_children),
                         random_model(rng, depth - 1, pool, max_children));
    default: {
      const std::size_t k = arity(rng);
      std::vector<Model> cs;
      for (std::size_t i = 0; i < k; ++i) cs.push_back(random_model(rng, depth - 1, pool, max_children));
      powlmine::BitMatrix rel(k);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
          if (edge(rng)) rel.set(i, j);
      rel.close_transitively();
      return Model::partial_order(std::move(cs), rel.pairs());
    }
  }
}

/// Rebuilds `m` with children listed in a random order (edges remapped) and
/// fresh leaf indexes: an equivalent model built differently.
inline Model reshuffled(const Model& m, std::mt19937_64& rng) {
  switch (m.kind()) {
    case Model::Kind::transition:
      return Model::transition(m.label(), std::uniform_int_distribution<int>(1, 9)(rng));
    case Model::Kind::silent:
      return Model::silent(std::uniform_int_distribution<int>(1, 9)(rng));
    case Model::Kind::loop:
      return Model::loop(reshuffled(m.body(), rng), reshuffled(m.redo(), rng));
    case Model::Kind::choice:
    case Model::Kind::order: {
      const std::size_t k = m.children().size();
      std::vector<std::size_t> perm(k);  // new position of old child i
      for (std::size_t i = 0; i < k; ++i) perm[i] = i;
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<Model> cs(k, m.children()[0]);
      for (std::size_t i = 0; i < k; ++i) cs[perm[i]] = reshuffled(m.children()[i], rng);
      if (m.kind() == Model::Kind::choice) return Model::choice(std::move(cs));
      std::vector<Model::Edge> edges;
      for (auto [u, v] : m.edges()) edges.emplace_back(perm[u], perm[v]);
      return Model::partial_order(std::move(cs), std::move(edges));
    }
  }
  return m;
}

}  // namespace testutil

#include "powlmine/conformance.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "powlmine/bit_matrix.hpp"
#include "powlmine/error.hpp"

namespace powlmine {

namespace {

class ExtensionWalker {
 public:
  ExtensionWalker(const Pot& pot, std::size_t cap) : pot_(pot), cap_(cap) {
    const std::size_t n = pot.nodes.size();
    for (const auto& node : pot.nodes) {
      if (!node.is_leaf()) throw DomainError("cannot linearize a pot with operator nodes");
    }
    preds_.assign(n, 0);
    succs_.resize(n);
    for (auto [u, v] : pot.edges) {
      ++preds_[v];
      succs_[u].push_back(v);
    }
    used_.assign(n, 0);
  }

  Linearizations run() {
    walk();
    return std::move(out_);
  }

 private:
  // Returns false once the cap stops the search.
  bool walk() {
    if (current_.size() == pot_.nodes.size()) {
      if (out_.extensions == cap_) {
        out_.capped = true;
        return false;
      }
      ++out_.extensions;
      Trace t;
      for (auto i : current_) {
        if (pot_.nodes[i].kind() == Model::Kind::transition) t.push_back(pot_.nodes[i].label());
      }
      if (seen_.insert(t).second) out_.sequences.push_back(std::move(t));
      return true;
    }
    for (std::size_t i = 0; i < pot_.nodes.size(); ++i) {
      if (used_[i] || preds_[i] != 0) continue;
      used_[i] = 1;
      current_.push_back(i);
      for (auto s : succs_[i]) --preds_[s];
      const bool go_on = walk();
      for (auto s : succs_[i]) ++preds_[s];
      current_.pop_back();
      used_[i] = 0;
      if (!go_on) return false;
    }
    return true;
  }

  const Pot& pot_;
  std::size_t cap_;
  std::vector<std::size_t> preds_;
  std::vector<std::vector<std::size_t>> succs_;
  std::vector<char> used_;
  std::vector<std::size_t> current_;
  std::set<Trace> seen_;
  Linearizations out_;
};

}  // namespace

Linearizations linearizations(const Pot& pot, std::size_t cap) {
  if (cap == 0) throw DomainError("linearization cap must be at least 1");
  return ExtensionWalker(pot, cap).run();
}

FitnessReport verify_perfect_fitness(const Model& model, const PotMultiset& m,
                                     std::size_t lin_cap, std::size_t accept_budget) {
  if (lin_cap == 0 || accept_budget == 0) throw DomainError("caps must be at least 1");
  const Acceptor acceptor(model);
  FitnessReport report;
  for (std::size_t v = 0; v < m.variants().size(); ++v) {
    const Linearizations lin = linearizations(m.pot(v), lin_cap);
    ++report.variants_checked;
    report.capped = report.capped || lin.capped;
    for (const auto& trace : lin.sequences) {
      ++report.linearizations_checked;
      try {
        if (!acceptor.accepts(trace, accept_budget))
          report.failures.push_back({m.variant_key(v), trace});
      } catch (const BudgetExceeded&) {
        ++report.inconclusive;
      }
    }
  }
  return report;
}

std::string to_json(const FitnessReport& report) {
  nlohmann::ordered_json j;
  j["variants_checked"] = report.variants_checked;
  j["linearizations_checked"] = report.linearizations_checked;
  j["inconclusive"] = report.inconclusive;
  j["capped"] = report.capped;
  auto failures = nlohmann::ordered_json::array();
  for (const auto& f : report.failures) {
    nlohmann::ordered_json entry;
    entry["variant"] = f.variant_key;
    entry["trace"] = f.trace;
    failures.push_back(std::move(entry));
  }
  j["failures"] = std::move(failures);
  return j.dump(2) + "\n";
}

namespace {

class ModelGenerator {
 public:
  ModelGenerator(std::uint64_t seed, std::size_t max_depth, std::size_t max_children,
                 std::vector<std::string> pool)
      : rng_(seed), max_depth_(max_depth), max_children_(max_children), pool_(std::move(pool)) {
    std::shuffle(pool_.begin(), pool_.end(), rng_);
  }

  Model run() { return node(0, pool_.size()); }

 private:
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
  std::size_t uniform(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }

  Model leaf() { return Model::transition(pool_.at(next_label_++)); }

  // `budget` bounds the number of labels this subtree may consume (>= 1).
  Model node(std::size_t depth, std::size_t budget) {
    if (depth >= max_depth_ || budget < 2 || max_children_ < 2 || (depth > 0 && coin(0.3)))
      return leaf();
    switch (uniform(0, 2)) {
      case 0: {
        const std::size_t k = uniform(2, std::min(max_children_, budget));
        std::vector<Model> children;
        bool has_silent = false;
        for (auto b : split(budget, k)) {
          if (!has_silent && children.size() + 1 < k && coin(0.15)) {
            has_silent = true;
            children.push_back(Model::silent());
            continue;
          }
          children.push_back(node(depth + 1, b));
        }
        return Model::choice(std::move(children));
      }
      case 1: {
        auto parts = split(budget, 2);
        Model body = node(depth + 1, parts[0]);
        Model redo = coin(0.3) ? Model::silent() : node(depth + 1, parts[1]);
        return Model::loop(std::move(body), std::move(redo));
      }
      default: {
        const std::size_t k = uniform(2, std::min(max_children_, budget));
        std::vector<Model> children;
        for (auto b : split(budget, k)) children.push_back(node(depth + 1, b));
        std::vector<std::size_t> perm(k);
        for (std::size_t i = 0; i < k; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng_);
        BitMatrix rel(k);
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = i + 1; j < k; ++j)
            if (coin(0.4)) rel.set(perm[i], perm[j]);
        rel.close_transitively();
        return Model::partial_order(std::move(children), rel.pairs());
      }
    }
  }

  // k shares of at least 1 summing to budget.
  std::vector<std::size_t> split(std::size_t budget, std::size_t k) {
    std::vector<std::size_t> shares(k, 1);
    for (std::size_t rest = budget - k; rest > 0; --rest) ++shares[uniform(0, k - 1)];
    return shares;
  }

  std::mt19937_64 rng_;
  std::size_t max_depth_;
  std::size_t max_children_;
  std::vector<std::string> pool_;
  std::size_t next_label_ = 0;
};

struct Fragment {
  std::vector<std::string> labels;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  // Appends `other`, optionally after every event already present.
  void absorb(const Fragment& other, const std::vector<std::size_t>& before) {
    const std::size_t offset = labels.size();
    labels.insert(labels.end(), other.labels.begin(), other.labels.end());
    for (auto [u, v] : other.edges) edges.emplace_back(u + offset, v + offset);
    for (auto u : before)
      for (std::size_t v = 0; v < other.labels.size(); ++v) edges.emplace_back(u, v + offset);
  }
};

class Sampler {
 public:
  Sampler(std::uint64_t seed, double p) : rng_(seed), p_(p) {}

  // Events are produced in a linear extension of their precedence.
  Fragment run(const Model& m) {
    Fragment f;
    switch (m.kind()) {
      case Model::Kind::transition:
        f.labels.push_back(m.label());
        break;
      case Model::Kind::silent:
        break;
      case Model::Kind::choice: {
        const auto& cs = m.children();
        f = run(cs[std::uniform_int_distribution<std::size_t>(0, cs.size() - 1)(rng_)]);
        break;
      }
      case Model::Kind::loop: {
        f = run(m.body());
        std::bernoulli_distribution stop(p_);
        for (int r = 0; r < 3 && !stop(rng_); ++r) {
          f.absorb(run(m.redo()), all(f));
          f.absorb(run(m.body()), all(f));
        }
        break;
      }
      case Model::Kind::order: {
        const std::size_t k = m.children().size();
        std::vector<std::vector<std::size_t>> events(k);
        std::vector<std::size_t> indegree(k, 0);
        for (auto [u, v] : m.edges()) ++indegree[v];
        std::vector<char> done(k, 0);
        for (std::size_t round = 0; round < k; ++round) {
          std::size_t c = 0;
          while (done[c] || indegree[c] != 0) ++c;
          done[c] = 1;
          for (auto [u, v] : m.edges())
            if (u == c) --indegree[v];
          std::vector<std::size_t> before;
          for (auto [u, v] : m.edges())
            if (v == c) before.insert(before.end(), events[u].begin(), events[u].end());
          const Fragment child = run(m.children()[c]);
          const std::size_t offset = f.labels.size();
          f.absorb(child, before);
          for (std::size_t i = 0; i < child.labels.size(); ++i) events[c].push_back(offset + i);
        }
        break;
      }
    }
    return f;
  }

 private:
  static std::vector<std::size_t> all(const Fragment& f) {
    std::vector<std::size_t> ids(f.labels.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
    return ids;
  }

  std::mt19937_64 rng_;
  double p_;
};

}  // namespace

Model random_powl(std::uint64_t seed, std::size_t max_depth, std::size_t max_children,
                  const std::vector<std::string>& label_pool) {
  if (label_pool.empty()) throw ConfigError("random model generation needs a non-empty label pool");
  std::set<std::string> distinct(label_pool.begin(), label_pool.end());
  if (distinct.size() != label_pool.size())
    throw ConfigError("label pool contains duplicate labels");
  return ModelGenerator(seed, max_depth, max_children, label_pool).run();
}

PotMultiset sample_pot_log(const Model& model, std::size_t traces, std::uint64_t seed,
                           double loop_geometric_p) {
  if (traces == 0) throw ConfigError("number of sampled traces must be at least 1");
  if (!(loop_geometric_p > 0.0 && loop_geometric_p <= 1.0))
    throw ConfigError("loop probability must lie in (0, 1]");
  Sampler sampler(seed, loop_geometric_p);
  std::vector<Pot> pots;
  pots.reserve(traces);
  for (std::size_t i = 0; i < traces; ++i) {
    const Fragment f = sampler.run(model);
    if (f.labels.empty()) continue;
    Pot pot;
    std::map<std::string, int> next_index;
    for (const auto& l : f.labels) pot.nodes.push_back(Model::transition(l, ++next_index[l]));
    pot.edges = f.edges;
    std::sort(pot.edges.begin(), pot.edges.end());
    pot.edges.erase(std::unique(pot.edges.begin(), pot.edges.end()), pot.edges.end());
    pots.push_back(std::move(pot));
  }
  return PotMultiset::from_pots(pots);
}

}  // namespace powlmine

#include "powlmine/semantics.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

#include "powlmine/error.hpp"

namespace powlmine {

Acceptor::Acceptor(const Model& model) {
  std::size_t next_slot = 0;
  root_ = compile(model, next_slot);
  slots_ = next_slot;
  // Children have larger ids than their parent, so a reverse sweep sees every
  // child before the parent.
  const std::size_t words = (labels_.size() + 63) / 64;
  for (std::size_t n = nodes_.size(); n-- > 0;) {
    Node& node = nodes_[n];
    node.labels.assign(words, 0);
    if (node.label >= 0) node.labels[node.label / 64] |= std::uint64_t{1} << (node.label % 64);
    for (std::size_t c : node.children)
      for (std::size_t w = 0; w < words; ++w) node.labels[w] |= nodes_[c].labels[w];
  }
}

std::size_t Acceptor::compile(const Model& m, std::size_t& next_slot) {
  const std::size_t id = nodes_.size();
  nodes_.emplace_back();
  nodes_[id].kind = m.kind();
  nodes_[id].slot = next_slot;
  if (m.kind() != Model::Kind::order) ++next_slot;
  if (m.kind() == Model::Kind::transition) {
    auto it = std::find(labels_.begin(), labels_.end(), m.label());
    nodes_[id].label = static_cast<int>(it - labels_.begin());
    if (it == labels_.end()) labels_.push_back(m.label());
  }
  std::vector<std::size_t> children;
  for (const auto& c : m.children()) children.push_back(compile(c, next_slot));
  Node& node = nodes_[id];
  node.children = std::move(children);
  node.slot_end = next_slot;
  auto nullable = [&](std::size_t c) { return nodes_[c].nullable; };
  switch (m.kind()) {
    case Model::Kind::transition: node.nullable = false; break;
    case Model::Kind::silent: node.nullable = true; break;
    case Model::Kind::choice:
      node.nullable = std::any_of(node.children.begin(), node.children.end(), nullable);
      break;
    case Model::Kind::loop: node.nullable = nullable(node.children[0]); break;
    case Model::Kind::order:
      node.nullable = std::all_of(node.children.begin(), node.children.end(), nullable);
      break;
  }
  if (m.kind() == Model::Kind::order) {
    const std::size_t k = m.children().size();
    node.preds.resize(k);
    node.succs.resize(k);
    for (auto [u, v] : m.edges()) {
      node.preds[v].push_back(u);
      node.succs[u].push_back(v);
    }
  }
  return id;
}

bool Acceptor::can_finish(std::size_t n, const State& s) const {
  const Node& node = nodes_[n];
  switch (node.kind) {
    case Model::Kind::transition:
      return s[node.slot] == 1;
    case Model::Kind::silent:
      return true;
    case Model::Kind::choice:
      return s[node.slot] == 0 ? node.nullable : can_finish(node.children[s[node.slot] - 1], s);
    case Model::Kind::loop:
      switch (s[node.slot]) {
        case 0: return node.nullable;
        case 1: return can_finish(node.children[0], s);
        default: return can_finish(node.children[1], s) && nodes_[node.children[0]].nullable;
      }
    case Model::Kind::order:
      return std::all_of(node.children.begin(), node.children.end(),
                         [&](std::size_t c) { return can_finish(c, s); });
  }
  return false;
}

// Over-approximates the labels the subtree may still emit from `s`.
void Acceptor::future_labels(std::size_t n, const State& s, LabelBits& acc) const {
  const Node& node = nodes_[n];
  const auto all = [&] {
    for (std::size_t w = 0; w < acc.size(); ++w) acc[w] |= node.labels[w];
  };
  if (!started(n, s)) {
    all();
    return;
  }
  switch (node.kind) {
    case Model::Kind::transition:
    case Model::Kind::silent:
      return;
    case Model::Kind::choice:
      future_labels(node.children[s[node.slot] - 1], s, acc);
      return;
    case Model::Kind::loop: {
      all();  // the active part may finish later and restart either part
      return;
    }
    case Model::Kind::order:
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        const bool frozen = std::any_of(node.succs[i].begin(), node.succs[i].end(),
                                        [&](std::size_t q) { return started(node.children[q], s); });
        if (!frozen) future_labels(node.children[i], s, acc);
      }
      return;
  }
}

bool Acceptor::started(std::size_t n, const State& s) const {
  const Node& node = nodes_[n];
  for (std::size_t i = node.slot; i < node.slot_end; ++i)
    if (s[i] != 0) return true;
  return false;
}

void Acceptor::reset(std::size_t n, State& s) const {
  const Node& node = nodes_[n];
  std::fill(s.begin() + static_cast<std::ptrdiff_t>(node.slot),
            s.begin() + static_cast<std::ptrdiff_t>(node.slot_end), char16_t{0});
}

// Appends every state reachable from `s` by silent steps inside `n` followed by
// one step of `n` emitting `label`.
void Acceptor::step(std::size_t n, const State& s, int label, std::vector<State>& out) const {
  const Node& node = nodes_[n];
  if (!(node.labels[label / 64] >> (label % 64) & 1)) return;
  switch (node.kind) {
    case Model::Kind::transition:
      if (s[node.slot] == 0) {
        State t = s;
        t[node.slot] = 1;
        out.push_back(std::move(t));
      }
      return;
    case Model::Kind::silent:
      return;
    case Model::Kind::choice: {
      const auto chosen = s[node.slot];
      if (chosen != 0) {
        step(node.children[chosen - 1], s, label, out);
        return;
      }
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        const std::size_t first = out.size();
        step(node.children[i], s, label, out);
        for (std::size_t k = first; k < out.size(); ++k)
          out[k][node.slot] = static_cast<char16_t>(i + 1);
      }
      return;
    }
    case Model::Kind::loop: {
      const std::size_t body = node.children[0];
      const std::size_t redo = node.children[1];
      const auto phase = s[node.slot];
      // Continue the active part, or finish it silently and start the other
      // part afresh; finishing that one silently as well restarts the first.
      auto fresh = [&](char16_t part) {
        State t = s;
        reset(body, t);
        reset(redo, t);
        t[node.slot] = part;
        const std::size_t first = out.size();
        step(part == 1 ? body : redo, t, label, out);
        for (std::size_t k = first; k < out.size(); ++k) out[k][node.slot] = part;
      };
      if (phase == 0) {
        fresh(1);
        if (nodes_[body].nullable) fresh(2);
        return;
      }
      const std::size_t active = phase == 1 ? body : redo;
      const std::size_t other = phase == 1 ? redo : body;
      step(active, s, label, out);
      if (can_finish(active, s)) {
        fresh(phase == 1 ? 2 : 1);
        if (nodes_[other].nullable) fresh(phase);
      }
      return;
    }
    case Model::Kind::order: {
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        bool enabled = true;
        for (std::size_t q : node.succs[i])
          if (started(node.children[q], s)) enabled = false;
        for (std::size_t p : node.preds[i])
          if (enabled && !can_finish(node.children[p], s)) enabled = false;
        if (enabled) step(node.children[i], s, label, out);
      }
      return;
    }
  }
}

bool Acceptor::accepts(std::span<const std::string> trace, std::size_t budget) const {
  if (budget == 0) throw DomainError("accept budget must be at least 1");
  std::vector<int> symbols;
  symbols.reserve(trace.size());
  for (const auto& label : trace) {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return false;
    symbols.push_back(static_cast<int>(it - labels_.begin()));
  }

  // needed[i]: labels occurring in symbols[i..].
  const std::size_t words = (labels_.size() + 63) / 64;
  std::vector<LabelBits> needed(symbols.size() + 1, LabelBits(words, 0));
  for (std::size_t i = symbols.size(); i-- > 0;) {
    needed[i] = needed[i + 1];
    needed[i][symbols[i] / 64] |= std::uint64_t{1} << (symbols[i] % 64);
  }

  // Depth-first over (position, state) pairs: accepted traces usually have a
  // short witness path, rejected ones exhaust the same space a breadth-first
  // search would.
  const auto key = [](const State& st, std::size_t pos) {
    State k = st;
    k.push_back(static_cast<char16_t>(pos & 0xffff));
    k.push_back(static_cast<char16_t>(pos >> 16));
    return k;
  };
  std::unordered_set<State> seen;
  std::vector<std::pair<std::size_t, State>> stack;
  stack.emplace_back(0, State(slots_, char16_t{0}));
  seen.insert(key(stack.back().second, 0));
  std::vector<State> scratch;
  LabelBits reachable(words);
  while (!stack.empty()) {
    auto [i, s] = std::move(stack.back());
    stack.pop_back();
    if (i == symbols.size()) {
      if (can_finish(root_, s)) return true;
      continue;
    }
    scratch.clear();
    step(root_, s, symbols[i], scratch);
    for (auto it = scratch.rbegin(); it != scratch.rend(); ++it) {
      std::fill(reachable.begin(), reachable.end(), 0);
      future_labels(root_, *it, reachable);
      bool feasible = true;
      for (std::size_t w = 0; w < words; ++w)
        if (needed[i + 1][w] & ~reachable[w]) feasible = false;
      if (!feasible || !seen.insert(key(*it, i + 1)).second) continue;
      if (seen.size() > budget) throw BudgetExceeded("membership search exhausted", budget);
      stack.emplace_back(i + 1, std::move(*it));
    }
  }
  return false;
}

bool accepts(const Model& m, std::span<const std::string> trace, std::size_t budget) {
  return Acceptor(m).accepts(trace, budget);
}

namespace {

using Language = std::set<Trace>;

class Enumerator {
 public:
  Enumerator(std::size_t loops, std::size_t length, std::size_t cap)
      : loops_(loops), length_(length), cap_(cap) {}

  Language run(const Model& m) {
    switch (m.kind()) {
      case Model::Kind::transition:
        return length_ >= 1 ? Language{{m.label()}} : Language{};
      case Model::Kind::silent:
        return Language{{}};
      case Model::Kind::choice: {
        Language out;
        for (const auto& c : m.children()) {
          Language sub = run(c);
          out.insert(sub.begin(), sub.end());
          check(out);
        }
        return out;
      }
      case Model::Kind::loop: {
        const Language body = run(m.body());
        const Language redo = run(m.redo());
        Language out = body;
        Language frontier = body;
        for (std::size_t k = 0; k < loops_ && !frontier.empty(); ++k) {
          Language next;
          for (const auto& prefix : frontier)
            for (const auto& r : redo)
              for (const auto& b : body) {
                if (prefix.size() + r.size() + b.size() > length_) continue;
                Trace t = prefix;
                t.insert(t.end(), r.begin(), r.end());
                t.insert(t.end(), b.begin(), b.end());
                next.insert(std::move(t));
                check(next);
              }
          out.insert(next.begin(), next.end());
          check(out);
          frontier = std::move(next);
        }
        return out;
      }
      case Model::Kind::order:
        return run_order(m);
    }
    return {};
  }

 private:
  void check(const Language& l) const {
    if (l.size() > cap_) throw SizeLimitExceeded("language enumeration too large", cap_);
  }

  Language run_order(const Model& m) {
    const std::size_t k = m.children().size();
    std::vector<std::vector<Trace>> langs;
    for (const auto& c : m.children()) {
      Language l = run(c);
      langs.emplace_back(l.begin(), l.end());
    }
    Language out;
    std::vector<const Trace*> pick(k);
    // Cartesian product of one trace per child, then constrained shuffles.
    auto product = [&](auto&& self, std::size_t i, std::size_t total) -> void {
      if (i == k) {
        std::vector<std::size_t> pos(k, 0);
        Trace current;
        shuffle(m, pick, pos, current, out);
        return;
      }
      for (const auto& t : langs[i]) {
        if (total + t.size() > length_) continue;
        pick[i] = &t;
        self(self, i + 1, total + t.size());
      }
    };
    product(product, 0, 0);
    return out;
  }

  // Child u may emit once every predecessor has emitted its whole trace and
  // while no successor has emitted anything.
  void shuffle(const Model& m, const std::vector<const Trace*>& pick,
               std::vector<std::size_t>& pos, Trace& current, Language& out) {
    const std::size_t k = pick.size();
    bool complete = true;
    for (std::size_t i = 0; i < k; ++i) {
      if (pos[i] < pick[i]->size()) complete = false;
    }
    if (complete) {
      out.insert(current);
      check(out);
      return;
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (pos[i] == pick[i]->size()) continue;
      bool ok = true;
      for (std::size_t j = 0; j < k && ok; ++j) {
        if (m.has_edge(j, i) && pos[j] < pick[j]->size()) ok = false;
        if (m.has_edge(i, j) && pos[j] > 0) ok = false;
      }
      if (!ok) continue;
      current.push_back((*pick[i])[pos[i]]);
      ++pos[i];
      shuffle(m, pick, pos, current, out);
      --pos[i];
      current.pop_back();
    }
  }

  std::size_t loops_;
  std::size_t length_;
  std::size_t cap_;
};

}  // namespace

std::set<Trace> enumerate_language(const Model& m, std::size_t max_loop_iterations,
                                   std::size_t max_length, std::size_t cap) {
  return Enumerator(max_loop_iterations, max_length, cap).run(m);
}

}  // namespace powlmine

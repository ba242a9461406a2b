#include "powlmine/model.hpp"

#include <algorithm>
#include <numeric>

#include "powlmine/error.hpp"

namespace powlmine {

struct Model::Node {
  Kind kind = Kind::silent;
  std::string label;
  int index = 1;
  std::vector<Model> children;
  std::vector<Edge> edges;
  std::string key;
  std::vector<std::string> labels;
  std::size_t node_count = 1;
  std::size_t leaf_count = 0;
};

namespace {

std::string quote(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  out += '"';
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> merged_labels(const std::vector<Model>& children) {
  std::vector<std::string> all;
  for (const auto& c : children) {
    all.insert(all.end(), c.label_list().begin(), c.label_list().end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

std::string join_keys(const std::vector<Model>& children) {
  std::string out;
  for (std::size_t i = 0; i < children.size(); ++i) {
    if (i) out += ',';
    out += children[i].key();
  }
  return out;
}

std::string encode_edges(const std::vector<Model::Edge>& edges) {
  std::string out;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(edges[i].first) + '<' + std::to_string(edges[i].second);
  }
  return out;
}

// Relabels edges with `position[old] = new` and sorts them.
std::vector<Model::Edge> remap(const std::vector<Model::Edge>& edges,
                               const std::vector<std::size_t>& position) {
  std::vector<Model::Edge> out;
  out.reserve(edges.size());
  for (auto [u, v] : edges) out.emplace_back(position[u], position[v]);
  std::sort(out.begin(), out.end());
  return out;
}

// Upper bound on permutations tried when children of an order share a key.
constexpr std::size_t kMaxTiePermutations = 40320;

}  // namespace

Model Model::transition(std::string label, int index) {
  if (label.empty()) throw FormatError("transition label must be non-empty");
  if (index < 1) throw FormatError("transition index must be positive");
  auto n = std::make_shared<Node>();
  n->kind = Kind::transition;
  n->key = quote(label);
  n->labels = {label};
  n->label = std::move(label);
  n->index = index;
  n->leaf_count = 1;
  return Model(std::move(n));
}

Model Model::silent(int index) {
  if (index < 1) throw FormatError("silent index must be positive");
  auto n = std::make_shared<Node>();
  n->kind = Kind::silent;
  n->index = index;
  n->key = "silent";
  n->leaf_count = 1;
  return Model(std::move(n));
}

Model Model::choice(std::vector<Model> children) {
  if (children.size() < 2) throw FormatError("xor needs at least two children");
  std::stable_sort(children.begin(), children.end(),
                   [](const Model& a, const Model& b) { return a.key() < b.key(); });
  auto n = std::make_shared<Node>();
  n->kind = Kind::choice;
  n->key = "X(" + join_keys(children) + ")";
  n->labels = merged_labels(children);
  for (const auto& c : children) {
    n->node_count += c.node_count();
    n->leaf_count += c.leaf_count();
  }
  n->children = std::move(children);
  return Model(std::move(n));
}

Model Model::loop(Model body, Model redo) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::loop;
  n->key = "L(" + body.key() + "," + redo.key() + ")";
  n->children = {std::move(body), std::move(redo)};
  n->labels = merged_labels(n->children);
  for (const auto& c : n->children) {
    n->node_count += c.node_count();
    n->leaf_count += c.leaf_count();
  }
  return Model(std::move(n));
}

Model Model::partial_order(std::vector<Model> children, std::vector<Edge> edges) {
  const std::size_t k = children.size();
  if (k < 2) throw FormatError("partial order needs at least two children");
  std::vector<std::vector<char>> rel(k, std::vector<char>(k, 0));
  for (auto [u, v] : edges) {
    if (u >= k || v >= k) throw FormatError("partial order edge index out of range");
    if (u == v) throw FormatError("partial order edges must be irreflexive");
    rel[u][v] = 1;
  }
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      if (!rel[a][b]) continue;
      if (rel[b][a]) throw FormatError("partial order edges must be asymmetric");
      for (std::size_t c = 0; c < k; ++c) {
        if (rel[b][c] && !rel[a][c])
          throw FormatError("partial order edges must be transitively closed");
      }
    }
  }
  edges.clear();
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      if (rel[a][b]) edges.emplace_back(a, b);

  // Canonical child order: by key; within runs of equal keys, the permutation
  // giving the lexicographically smallest edge list.
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return children[a].key() < children[b].key();
  });
  std::vector<std::pair<std::size_t, std::size_t>> runs;  // [begin, end) in `order`
  std::size_t permutations = 1;
  for (std::size_t i = 0; i < k;) {
    std::size_t j = i + 1;
    while (j < k && children[order[j]].key() == children[order[i]].key()) ++j;
    if (j - i > 1) {
      runs.emplace_back(i, j);
      for (std::size_t f = 2; f <= j - i && permutations <= kMaxTiePermutations; ++f)
        permutations *= f;
    }
    i = j;
  }
  auto position_of = [&](const std::vector<std::size_t>& ord) {
    std::vector<std::size_t> pos(k);
    for (std::size_t p = 0; p < k; ++p) pos[ord[p]] = p;
    return pos;
  };
  std::vector<std::size_t> best = order;
  std::vector<Edge> best_edges = remap(edges, position_of(order));
  if (!runs.empty() && !edges.empty() && permutations <= kMaxTiePermutations) {
    for (auto [b, e] : runs) std::sort(order.begin() + b, order.begin() + e);
    // Odometer over the permutations of every run.
    while (true) {
      auto candidate = remap(edges, position_of(order));
      if (candidate < best_edges) {
        best_edges = std::move(candidate);
        best = order;
      }
      std::size_t r = 0;
      for (; r < runs.size(); ++r) {
        auto [b, e] = runs[r];
        if (std::next_permutation(order.begin() + b, order.begin() + e)) break;
      }
      if (r == runs.size()) break;
    }
  }

  auto n = std::make_shared<Node>();
  n->kind = Kind::order;
  n->children.reserve(k);
  for (std::size_t p = 0; p < k; ++p) n->children.push_back(std::move(children[best[p]]));
  n->edges = std::move(best_edges);
  n->key = "P(" + join_keys(n->children) + "|" + encode_edges(n->edges) + ")";
  n->labels = merged_labels(n->children);
  for (const auto& c : n->children) {
    n->node_count += c.node_count();
    n->leaf_count += c.leaf_count();
  }
  return Model(std::move(n));
}

Model::Kind Model::kind() const noexcept { return node_->kind; }
const std::string& Model::label() const noexcept { return node_->label; }
int Model::index() const noexcept { return node_->index; }
const std::vector<Model>& Model::children() const noexcept { return node_->children; }
const std::vector<Model::Edge>& Model::edges() const noexcept { return node_->edges; }
const std::string& Model::key() const noexcept { return node_->key; }
const std::vector<std::string>& Model::label_list() const noexcept { return node_->labels; }
std::size_t Model::node_count() const noexcept { return node_->node_count; }
std::size_t Model::leaf_count() const noexcept { return node_->leaf_count; }

const Model& Model::body() const {
  if (kind() != Kind::loop) throw DomainError("body() called on a non-loop model");
  return node_->children[0];
}

const Model& Model::redo() const {
  if (kind() != Kind::loop) throw DomainError("redo() called on a non-loop model");
  return node_->children[1];
}

bool Model::has_edge(std::size_t from, std::size_t to) const {
  return std::binary_search(node_->edges.begin(), node_->edges.end(), Edge{from, to});
}

LabelSet labels(const Model& m) {
  return LabelSet(m.label_list().begin(), m.label_list().end());
}

namespace {

bool match_children(const std::vector<Model>& a, const std::vector<Model>& b,
                    std::vector<std::size_t>& image, std::vector<char>& used, std::size_t i,
                    const Model* order_a, const Model* order_b) {
  if (i == a.size()) return true;
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (used[j] || !equivalent(a[i], b[j])) continue;
    if (order_a) {
      bool consistent = true;
      for (std::size_t p = 0; p < i && consistent; ++p) {
        consistent = order_a->has_edge(p, i) == order_b->has_edge(image[p], j) &&
                     order_a->has_edge(i, p) == order_b->has_edge(j, image[p]);
      }
      if (!consistent) continue;
    }
    used[j] = 1;
    image[i] = j;
    if (match_children(a, b, image, used, i + 1, order_a, order_b)) return true;
    used[j] = 0;
  }
  return false;
}

}  // namespace

bool equivalent(const Model& a, const Model& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Model::Kind::transition:
      return a.label() == b.label();
    case Model::Kind::silent:
      return true;
    case Model::Kind::loop:
      return equivalent(a.body(), b.body()) && equivalent(a.redo(), b.redo());
    case Model::Kind::choice:
    case Model::Kind::order: {
      if (a.children().size() != b.children().size()) return false;
      if (a.edges().size() != b.edges().size()) return false;
      std::vector<std::size_t> image(a.children().size());
      std::vector<char> used(b.children().size(), 0);
      bool ordered = a.kind() == Model::Kind::order;
      return match_children(a.children(), b.children(), image, used, 0, ordered ? &a : nullptr,
                            ordered ? &b : nullptr);
    }
  }
  return false;
}

std::string describe(const Model& m) {
  switch (m.kind()) {
    case Model::Kind::transition:
      return m.label();
    case Model::Kind::silent:
      return "tau";
    case Model::Kind::loop:
      return "*(" + describe(m.body()) + ", " + describe(m.redo()) + ")";
    case Model::Kind::choice: {
      std::string out = "X(";
      for (std::size_t i = 0; i < m.children().size(); ++i) {
        if (i) out += ", ";
        out += describe(m.children()[i]);
      }
      return out + ")";
    }
    case Model::Kind::order: {
      std::string out = "PO(";
      for (std::size_t i = 0; i < m.children().size(); ++i) {
        if (i) out += ", ";
        out += describe(m.children()[i]);
      }
      out += " |";
      for (auto [u, v] : m.edges()) out += " " + std::to_string(u) + "->" + std::to_string(v);
      return out + ")";
    }
  }
  return {};
}

}  // namespace powlmine

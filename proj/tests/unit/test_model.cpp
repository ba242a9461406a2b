#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "powlmine/error.hpp"
#include "powlmine/model.hpp"

using namespace powlmine;
using namespace testutil;

TEST_CASE("label extraction") {
  CHECK(labels(tr("a")) == LabelSet{"a"});
  CHECK(labels(Model::loop(Model::choice({tr("a", 1), tr("b", 1)}), tr("a", 2))) ==
        LabelSet{"a", "b"});
  CHECK(labels(Model::choice({tr("a"), tau()})) == LabelSet{"a"});
  CHECK(labels(tau()).empty());
}

TEST_CASE("structural equivalence") {
  CHECK(equivalent(tr("a", 1), tr("a", 7)));
  CHECK(equivalent(tau(), Model::silent(4)));
  CHECK_FALSE(equivalent(tr("a"), tau()));
  CHECK(equivalent(Model::choice({tr("a"), tr("b")}), Model::choice({tr("b"), tr("a")})));
  CHECK_FALSE(equivalent(Model::loop(tr("a"), tr("b")), Model::loop(tr("b"), tr("a"))));
  CHECK_FALSE(equivalent(Model::partial_order({tr("a"), tr("b")}, {{0, 1}}),
                         Model::partial_order({tr("a"), tr("b")}, {})));
  // Same children, reversed edge.
  CHECK_FALSE(equivalent(Model::partial_order({tr("a"), tr("b")}, {{0, 1}}),
                         Model::partial_order({tr("a"), tr("b")}, {{1, 0}})));
  // Duplicate children: the bijection must respect edges.
  const Model x = Model::partial_order({tr("a"), tr("a"), tr("b")}, {{0, 2}});
  const Model y = Model::partial_order({tr("a"), tr("b"), tr("a")}, {{2, 1}});
  CHECK(equivalent(x, y));
  CHECK(x.key() == y.key());
}

TEST_CASE("canonical keys") {
  CHECK(canonical_key(tr("a", 1)) == canonical_key(tr("a", 2)));
  CHECK(canonical_key(Model::choice({tr("a"), tr("b")})) ==
        canonical_key(Model::choice({tr("b"), tr("a")})));
  CHECK(canonical_key(Model::loop(tr("a"), tr("b"))) !=
        canonical_key(Model::loop(tr("b"), tr("a"))));
  // Labels that look like syntax stay distinct.
  CHECK(canonical_key(tr("a,b")) != canonical_key(Model::choice({tr("a"), tr("b")})));
  CHECK(canonical_key(tr("silent")) != canonical_key(tau()));
}

TEST_CASE("structural validation") {
  CHECK_THROWS_AS(Model::choice({tr("a")}), FormatError);
  CHECK_THROWS_AS(Model::partial_order({tr("a")}, {}), FormatError);
  CHECK_THROWS_AS(Model::partial_order({tr("a"), tr("b")}, {{0, 0}}), FormatError);
  CHECK_THROWS_AS(Model::partial_order({tr("a"), tr("b")}, {{0, 1}, {1, 0}}), FormatError);
  CHECK_THROWS_AS(Model::partial_order({tr("a"), tr("b"), tr("c")}, {{0, 1}, {1, 2}}),
                  FormatError);
  CHECK_THROWS_AS(Model::partial_order({tr("a"), tr("b")}, {{0, 2}}), FormatError);
  CHECK_NOTHROW(Model::partial_order({tr("a"), tr("b"), tr("c")}, {{0, 1}, {1, 2}, {0, 2}}));
}

TEST_CASE("JSON schema") {
  const Model m = Model::partial_order(
      {tr("b"), Model::loop(tr("a"), tau()), Model::choice({tr("d"), tr("c")})}, {{1, 0}});
  const std::string json = to_json(m);
  CHECK(json ==
        R"({"kind":"order","children":[)"
        R"({"kind":"transition","label":"b"},)"
        R"({"kind":"loop","do":{"kind":"transition","label":"a"},"redo":{"kind":"silent"}},)"
        R"({"kind":"xor","children":[{"kind":"transition","label":"c"},{"kind":"transition","label":"d"}]}],)"
        R"("edges":[[1,0]]})");
  const Model back = model_from_json(json);
  CHECK(to_json(back) == json);
  CHECK(equivalent(back, m));

  CHECK_THROWS_AS(model_from_json("{"), FormatError);
  CHECK_THROWS_AS(model_from_json(R"({"kind":"transition"})"), FormatError);
  CHECK_THROWS_AS(model_from_json(R"({"kind":"sequence","children":[]})"), FormatError);
  CHECK_THROWS_AS(model_from_json(R"({"kind":"xor","children":[{"kind":"silent"}]})"), FormatError);
  CHECK_THROWS_AS(model_from_json(
                      R"({"kind":"order","children":[{"kind":"silent"},{"kind":"silent"}],"edges":[[0,5]]})"),
                  FormatError);
}

TEST_CASE("property: equivalence is an equivalence relation and matches keys") {
  std::mt19937_64 rng(2024);
  std::vector<Model> models;
  for (int i = 0; i < 150; ++i) models.push_back(random_model(rng, 2, 2, 3));
  for (int i = 0; i < 50; ++i) models.push_back(reshuffled(models[static_cast<std::size_t>(i)], rng));
  std::size_t equal_pairs = 0;
  for (const auto& a : models) {
    CHECK(equivalent(a, a));
    for (const auto& b : models) {
      const bool eq = equivalent(a, b);
      CHECK(eq == equivalent(b, a));
      CHECK(eq == (a.key() == b.key()));
      equal_pairs += eq;
    }
  }
  // Transitivity on a sample of triples.
  for (std::size_t i = 0; i < 60; ++i)
    for (std::size_t j = 0; j < 60; ++j)
      for (std::size_t k = 0; k < 60; k += 7)
        if (equivalent(models[i], models[j]) && equivalent(models[j], models[k]))
          CHECK(equivalent(models[i], models[k]));
  CHECK(equal_pairs > models.size());  // the sample contains non-trivial matches
}

TEST_CASE("property: reshuffled construction keeps the key and JSON") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    const Model m = random_model(rng, 3, 4, 3);
    const Model s = reshuffled(m, rng);
    CHECK(equivalent(m, s));
    CHECK(m.key() == s.key());
    CHECK(to_json(m) == to_json(s));
    CHECK(to_json(model_from_json(to_json(m))) == to_json(m));
  }
}

TEST_CASE("descriptions and DOT") {
  const Model m = Model::partial_order({tr("a"), Model::choice({tr("b"), tau()})}, {{0, 1}});
  CHECK(describe(m) == "PO(a, X(b, tau) | 0->1)");
  CHECK(m.node_count() == 5);
  CHECK(m.leaf_count() == 3);
  const std::string dot = to_dot(m);
  CHECK(dot.rfind("digraph", 0) == 0);
  CHECK(dot.find("cluster_") != std::string::npos);
  CHECK(to_dot(m) == dot);
}

#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "powlmine/error.hpp"
#include "powlmine/interval_log.hpp"
#include "powlmine/pot.hpp"

using namespace powlmine;
using namespace testutil;

namespace {

Timestamp t(long long s) { return Timestamp{std::chrono::seconds{s}}; }

Event ev(const std::string& c, const std::string& label, long long s, Lifecycle lc,
         std::size_t seq) {
  return {c, label, t(s), lc, seq};
}

IntervalEvent iv(const std::string& label, long long st, long long et, std::size_t seq = 0,
                 const std::string& c = "c1") {
  return {label, c, t(st), t(et), IntervalOrigin::matched, seq};
}

bool has(const Pot& p, const std::string& a, const std::string& b) {
  for (auto [u, v] : p.edges)
    if (p.nodes[u].label() == a && p.nodes[v].label() == b) return true;
  return false;
}

// The interval behind pot node u: the index-th instance of its label in
// (start, end, seq_no) order.
const IntervalEvent& interval_of(const Pot& p, const std::vector<IntervalEvent>& ivs,
                                 std::size_t u) {
  std::vector<const IntervalEvent*> same;
  for (const auto& i : ivs)
    if (i.label == p.nodes[u].label()) same.push_back(&i);
  std::sort(same.begin(), same.end(), [](const IntervalEvent* a, const IntervalEvent* b) {
    return std::tie(a->start, a->end, a->seq_no) < std::tie(b->start, b->end, b->seq_no);
  });
  return *same.at(static_cast<std::size_t>(p.nodes[u].index() - 1));
}

}  // namespace

TEST_CASE("FIFO interval matching") {
  SUBCASE("single pair") {
    const auto log = build_interval_log(EventLog(
        {ev("c1", "A", 1, Lifecycle::start, 0), ev("c1", "A", 5, Lifecycle::complete, 1)}, {}));
    REQUIRE(log.intervals().size() == 1);
    const auto& i = log.intervals()[0];
    CHECK(i.start == t(1));
    CHECK(i.end == t(5));
    CHECK(i.origin == IntervalOrigin::matched);
  }
  SUBCASE("overlapping instances pair oldest first") {
    const auto log = build_interval_log(EventLog({ev("c1", "A", 1, Lifecycle::start, 0),
                                                  ev("c1", "A", 2, Lifecycle::start, 1),
                                                  ev("c1", "A", 3, Lifecycle::complete, 2),
                                                  ev("c1", "A", 4, Lifecycle::complete, 3)},
                                                 {}));
    REQUIRE(log.intervals().size() == 2);
    CHECK(log.intervals()[0].start == t(1));
    CHECK(log.intervals()[0].end == t(3));
    CHECK(log.intervals()[1].start == t(2));
    CHECK(log.intervals()[1].end == t(4));
  }
  SUBCASE("atomic fallbacks") {
    const auto log = build_interval_log(EventLog(
        {ev("c1", "A", 5, Lifecycle::complete, 0), ev("c2", "B", 7, Lifecycle::none, 1),
         ev("c2", "C", 9, Lifecycle::start, 2)},
        {}));
    REQUIRE(log.intervals().size() == 3);
    for (const auto& i : log.intervals()) {
      CHECK(i.origin == IntervalOrigin::atomic);
      CHECK(i.start == i.end);
    }
    CHECK(log.intervals()[0].start == t(5));
    CHECK(log.intervals()[1].label == "B");
    CHECK(log.stats().unmatched_starts == 1);
    CHECK(log.cases() == std::set<std::string>{"c1", "c2"});
  }
  SUBCASE("start and complete at the same instant match") {
    const auto log = build_interval_log(EventLog(
        {ev("c1", "A", 3, Lifecycle::start, 0), ev("c1", "A", 3, Lifecycle::complete, 1)}, {}));
    REQUIRE(log.intervals().size() == 1);
    CHECK(log.intervals()[0].origin == IntervalOrigin::matched);
  }
}

TEST_CASE("property: interval counts and bounds") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 100; ++round) {
    std::vector<Event> events;
    std::size_t completes = 0;
    std::size_t plain = 0;
    std::uniform_int_distribution<int> pick(0, 2);
    std::uniform_int_distribution<long long> time(0, 20);
    for (std::size_t i = 0; i < 30; ++i) {
      const auto lc = static_cast<Lifecycle>(pick(rng));
      completes += lc == Lifecycle::complete;
      plain += lc == Lifecycle::none;
      events.push_back(ev(pick(rng) ? "c1" : "c2", pick(rng) ? "A" : "B", time(rng), lc, i));
    }
    const auto log = build_interval_log(EventLog(events, {}));
    CHECK(log.intervals().size() == completes + plain + log.stats().unmatched_starts);
    for (const auto& i : log.intervals()) CHECK(i.start <= i.end);
    CHECK(std::is_sorted(log.intervals().begin(), log.intervals().end(),
                         [](const IntervalEvent& a, const IntervalEvent& b) {
                           return std::tie(a.case_id, a.start, a.end, a.label, a.seq_no) <
                                  std::tie(b.case_id, b.start, b.end, b.label, b.seq_no);
                         }));
  }
}

TEST_CASE("POT construction") {
  SUBCASE("overlap means concurrency") {
    const std::vector<IntervalEvent> ivs{iv("x", 0, 2), iv("y", 1, 3), iv("z", 4, 5)};
    const Pot p = build_pot(ivs);
    CHECK(p.edges.size() == 2);
    CHECK(has(p, "x", "z"));
    CHECK(has(p, "y", "z"));
    CHECK_FALSE(has(p, "x", "y"));
    CHECK_FALSE(has(p, "y", "x"));
  }
  SUBCASE("same-label instances indexed by start") {
    const std::vector<IntervalEvent> ivs{iv("a", 2, 6, 1), iv("a", 1, 3, 0)};
    const Pot p = build_pot(ivs);
    REQUIRE(p.nodes.size() == 2);
    CHECK(p.nodes[0].index() == 1);
    CHECK(p.nodes[1].index() == 2);
    CHECK(p.edges.empty());
  }
  SUBCASE("chain is stored closed") {
    const std::vector<IntervalEvent> ivs{iv("a", 0, 1), iv("b", 2, 3), iv("c", 4, 5)};
    const Pot p = build_pot(ivs);
    // Brute force over all ordered pairs: edge iff end < start.
    std::size_t expected = 0;
    for (const auto& u : ivs)
      for (const auto& v : ivs) expected += u.end < v.start;
    CHECK(p.edges.size() == expected);
    CHECK(has(p, "a", "c"));
    CHECK(p.is_strict_partial_order());
  }
  CHECK_THROWS_AS(build_pot({}), EmptyInputError);
}

TEST_CASE("property: pots are strict partial orders matching interval overlap") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<long long> time(0, 30);
  std::uniform_int_distribution<int> label(0, 2);
  for (int round = 0; round < 200; ++round) {
    std::vector<IntervalEvent> ivs;
    for (std::size_t i = 0; i < 6; ++i) {
      long long a = time(rng);
      long long b = time(rng);
      ivs.push_back(iv(std::string(1, char('a' + label(rng))), std::min(a, b), std::max(a, b), i));
    }
    const Pot p = build_pot(ivs);
    CHECK(p.is_strict_partial_order());
    std::map<std::string, int> max_index;
    for (const auto& n : p.nodes) max_index[n.label()] = std::max(max_index[n.label()], n.index());
    for (const auto& [l, m] : max_index)
      CHECK(m == std::count_if(ivs.begin(), ivs.end(),
                               [&](const IntervalEvent& e) { return e.label == l; }));
    // Incomparable iff the intervals overlap or touch.
    for (std::size_t u = 0; u < p.nodes.size(); ++u) {
      for (std::size_t v = 0; v < p.nodes.size(); ++v) {
        if (u == v) continue;
        const bool ordered = std::count(p.edges.begin(), p.edges.end(), std::pair{u, v}) +
                                 std::count(p.edges.begin(), p.edges.end(), std::pair{v, u}) >
                             0;
        CHECK(ordered == (interval_of(p, ivs, u).end < interval_of(p, ivs, v).start ||
                          interval_of(p, ivs, v).end < interval_of(p, ivs, u).start));
      }
    }
  }
}

TEST_CASE("variant folding") {
  std::vector<IntervalEvent> all{iv("a", 0, 1, 0, "c1"), iv("b", 2, 3, 1, "c1"),
                                 iv("a", 0, 1, 2, "c2"), iv("b", 2, 3, 3, "c2"),
                                 iv("a", 0, 5, 4, "c3"), iv("b", 2, 3, 5, "c3")};
  const auto m = build_pot_multiset(IntervalLog(all));
  REQUIRE(m.variants().size() == 2);
  std::vector<std::size_t> counts;
  for (const auto& v : m.variants()) counts.push_back(v.count);
  std::sort(counts.rbegin(), counts.rend());
  CHECK(counts == std::vector<std::size_t>{2, 1});
  CHECK(m.total_count() == 3);
  CHECK(m.universe().size() == 2);

  const auto single = build_pot_multiset(IntervalLog({iv("a", 0, 1)}));
  CHECK(single.variants().size() == 1);
  CHECK(single.variants()[0].count == 1);

  CHECK_THROWS_AS(build_pot_multiset(IntervalLog{}), EmptyInputError);
}

TEST_CASE("node handles are shared across variants") {
  const auto m = multiset({{pot({"a", "b"}, {{0, 1}}), 1}, {pot({"a", "c"}), 1}});
  CHECK(m.universe().size() == 3);
  std::set<NodeId> seen;
  for (const auto& v : m.variants())
    for (auto n : v.nodes) seen.insert(n);
  CHECK(seen.size() == 3);
  CHECK(m.variant_key(0).find('|') != std::string::npos);
}

TEST_CASE("POT DOT shows the transitive reduction") {
  auto edges_in = [](const std::string& dot) {
    return static_cast<std::size_t>(std::count(dot.begin(), dot.end(), '>'));
  };
  const std::string single = export_pot_dot(pot({"a"}));
  CHECK(single.find("n0 [label=\"a\"]") != std::string::npos);
  CHECK(single.find("->") == std::string::npos);

  const std::string chain = export_pot_dot(pot({"a", "b", "c"}, {{0, 1}, {1, 2}}));
  CHECK(edges_in(chain) == 2);
  CHECK(chain.find("n0 -> n2") == std::string::npos);

  const std::string diamond = export_pot_dot(pot({"a", "b", "c", "d"}, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}));
  CHECK(edges_in(diamond) == 4);

  const std::string repeated = export_pot_dot(pot({"a", "a"}, {{0, 1}}));
  CHECK(repeated.find("a#2") != std::string::npos);
}

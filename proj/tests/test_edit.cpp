#include <random>

#include <doctest.h>
#include <json.hpp>

#include "mcsg/edit.hpp"
#include "mcsg/serialization.hpp"
#include "mcsg/synthetic.hpp"
#include "mcsg/view.hpp"
#include "support/check.hpp"
#include "support/edits.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace mcsg;
using nlohmann::json;

namespace {

// Channels a1=0, a2=1, b1=2, c1=3, c2=4; A={a1,a2}, B={b1}, C={c1,c2}.
Mcsg abc_graph() {
  const ChannelGraph g(5, {{0, 1, 0.9}, {0, 2, 0.4}, {1, 2, 0.6}, {0, 3, 0.8}, {2, 4, 0.5}, {3, 4, 0.95}});
  return fixture::make_graph(g, fixture::flat_hierarchy({0, 0, 1, 2, 2}));
}

std::optional<double> community_weight(const Mcsg& m, int level, CommunityId a, CommunityId b) {
  for (const auto& e : m.community_edges(level))
    if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) return e.weight;
  return std::nullopt;
}

std::set<std::vector<ChannelIndex>> partition_at(const Mcsg& m, int level) {
  std::set<std::vector<ChannelIndex>> out;
  for (auto id : m.hierarchy().level(level)) out.insert(m.hierarchy().get(id).members);
  return out;
}

void check_invariants(const Mcsg& m) {
  const auto& h = m.hierarchy();
  CHECK_NOTHROW(h.validate(m.graph()));
  const auto w = oracle::dense(static_cast<int>(m.graph().node_count()), fixture::to_oracle(m.graph()));
  for (int l = 0; l < h.level_count(); ++l) {
    const auto ids = h.level(l);
    std::size_t expected_edges = 0;
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        std::vector<int> a, b;
        for (auto x : h.get(ids[i]).members) a.push_back(static_cast<int>(x));
        for (auto x : h.get(ids[j]).members) b.push_back(static_cast<int>(x));
        const auto [exists, mean] = oracle::cross_mean(w, a, b);
        const auto got = community_weight(m, l, ids[i], ids[j]);
        CHECK(got.has_value() == exists);
        if (exists && got) {
          CHECK(std::abs(*got - mean) <= 1e-12);
          ++expected_edges;
        }
      }
    CHECK(m.community_edges(l).size() == expected_edges);
  }
}

Mcsg synthetic_graph() {
  static const Mcsg m = build_mcsg(generate_synthetic().dataset, {});
  return m;
}

}  // namespace

TEST_CASE("merge combines members and recomputes edges") {
  const auto m = abc_graph();
  const auto r = apply_edit(m, EditCommand::merge({CommunityId{0}, CommunityId{1}}));
  CHECK(r.outcome.applied);
  REQUIRE(r.outcome.created == std::vector<CommunityId>{CommunityId{3}});
  const auto& g = r.graph;
  CHECK(g.hierarchy().get(CommunityId{3}).members == std::vector<ChannelIndex>{0, 1, 2});
  CHECK(g.hierarchy().find(CommunityId{0}) == nullptr);
  CHECK(g.hierarchy().find(CommunityId{1}) == nullptr);
  // Cross edges into C: a1-c1 0.8 and b1-c2 0.5.
  CHECK(community_weight(g, 0, CommunityId{3}, CommunityId{2}) == doctest::Approx(0.65).epsilon(1e-15));
  CHECK(g.community_edges(0).size() == 1);
  CHECK(g.edit_log().size() == 1);
  check_invariants(g);
}

TEST_CASE("split after merge restores the partition") {
  const auto m = abc_graph();
  const auto merged = apply_edit(m, EditCommand::merge({CommunityId{0}, CommunityId{1}})).graph;
  const auto split = apply_edit(merged, EditCommand::split(CommunityId{3}, {0, 1}, {2})).graph;
  CHECK(partition_at(split, 0) == partition_at(m, 0));
  std::multiset<double> w0, w1;
  for (const auto& e : m.community_edges(0)) w0.insert(e.weight);
  for (const auto& e : split.community_edges(0)) w1.insert(e.weight);
  CHECK(w0 == w1);
  check_invariants(split);
}

TEST_CASE("reassign moves a node and deletes emptied communities") {
  const auto m = abc_graph();
  const auto r = apply_edit(m, EditCommand::reassign(2, CommunityId{0}));
  CHECK(r.outcome.applied);
  CHECK(r.graph.hierarchy().find(CommunityId{1}) == nullptr);
  CHECK(r.graph.hierarchy().get(CommunityId{0}).members == std::vector<ChannelIndex>{0, 1, 2});
  check_invariants(r.graph);
}

TEST_CASE("edit errors") {
  const auto m = abc_graph();
  SUBCASE("invalid split partitions") {
    CHECK_ERROR_KIND(apply_edit(m, EditCommand::split(CommunityId{0}, {0}, {0, 1})), ErrorKind::validation);
    CHECK_ERROR_KIND(apply_edit(m, EditCommand::split(CommunityId{0}, {0}, {})), ErrorKind::validation);
    CHECK_ERROR_KIND(apply_edit(m, EditCommand::split(CommunityId{0}, {0}, {2})), ErrorKind::validation);
    CHECK_ERROR_KIND(apply_edit(m, EditCommand::split(CommunityId{0}, {0}, {0})), ErrorKind::validation);
  }
  SUBCASE("unknown ids") {
    CHECK_ERROR_KIND(apply_edit(m, EditCommand::merge({CommunityId{0}, CommunityId{9}})), ErrorKind::not_found);
    CHECK_ERROR_KIND(apply_edit(m, EditCommand::reassign(0, CommunityId{9})), ErrorKind::not_found);
    CHECK_ERROR_KIND(apply_edit(m, EditCommand::reassign(77, CommunityId{0})), ErrorKind::not_found);
  }
  SUBCASE("malformed merges") {
    CHECK_ERROR_KIND(apply_edit(m, EditCommand::merge({CommunityId{0}})), ErrorKind::validation);
    CHECK_ERROR_KIND(apply_edit(m, EditCommand::merge({CommunityId{0}, CommunityId{0}})), ErrorKind::validation);
  }
  SUBCASE("reassign into the same community is a no-op") {
    const auto r = apply_edit(m, EditCommand::reassign(0, CommunityId{0}));
    CHECK_FALSE(r.outcome.applied);
    CHECK_FALSE(r.outcome.warning.empty());
    CHECK(r.graph == m);
  }
  SUBCASE("isolated nodes cannot be reassigned") {
    const ChannelGraph g(3, {{0, 1, 0.9}});
    const auto with_isolated = fixture::make_graph(g, fixture::flat_hierarchy({0, 0, -1}));
    CHECK_ERROR_KIND(apply_edit(with_isolated, EditCommand::reassign(2, CommunityId{0})), ErrorKind::validation);
  }
}

TEST_CASE("edits act on the finest level and coarser levels follow") {
  const auto m = fixture::make_graph(fixture::nested_graph(), detect_communities(fixture::nested_graph(), {}));
  const auto& h = m.hierarchy();
  REQUIRE(h.level_count() >= 2);
  const auto coarse = h.level(0);
  CHECK_ERROR_KIND(apply_edit(m, EditCommand::merge({coarse[0], coarse[1]})), ErrorKind::validation);

  // Merge finest communities under different parents: the result hangs off
  // the first target's parent and the parents are rebuilt as unions.
  const auto fine = h.level(h.finest_level());
  std::optional<CommunityId> x, y;
  for (auto a : fine)
    for (auto b : fine)
      if (!x && h.get(a).parent != h.get(b).parent) {
        x = a;
        y = b;
      }
  REQUIRE(x);
  const auto r = apply_edit(m, EditCommand::merge({*x, *y}));
  const auto& h2 = r.graph.hierarchy();
  const auto& merged = h2.get(r.outcome.created.front());
  CHECK(merged.parent == h.get(*x).parent);
  check_invariants(r.graph);
  for (int l = 0; l + 1 < h2.level_count(); ++l)
    for (auto id : h2.level(l)) {
      std::vector<ChannelIndex> from_children;
      for (auto child : h2.children(id)) {
        const auto& cm = h2.get(child).members;
        from_children.insert(from_children.end(), cm.begin(), cm.end());
      }
      std::sort(from_children.begin(), from_children.end());
      CHECK(from_children == h2.get(id).members);
    }
}

TEST_CASE("fresh ids are never reused") {
  const auto m = abc_graph();
  auto g = apply_edit(m, EditCommand::merge({CommunityId{0}, CommunityId{1}})).graph;
  g = apply_edit(g, EditCommand::split(CommunityId{3}, {0}, {1, 2})).graph;
  for (const auto& [id, c] : g.hierarchy().communities()) CHECK((id.value == 2 || id.value >= 4));
}

TEST_CASE("undo and redo restore exact state") {
  GraphEditor editor(abc_graph());
  const auto original = export_string(editor.graph());
  CHECK_FALSE(editor.undo());
  CHECK_FALSE(editor.redo());
  editor.apply(EditCommand::merge({CommunityId{0}, CommunityId{1}}));
  const auto merged = export_string(editor.graph());
  CHECK(editor.undo());
  CHECK(export_string(editor.graph()) == original);
  CHECK(editor.redo());
  CHECK(export_string(editor.graph()) == merged);
  CHECK_FALSE(editor.redo());

  // A new edit clears the redo stack.
  CHECK(editor.undo());
  editor.apply(EditCommand::reassign(2, CommunityId{0}));
  CHECK(editor.redo_depth() == 0);
  CHECK_FALSE(editor.redo());
}

TEST_CASE("no-op edits are not recorded") {
  GraphEditor editor(abc_graph());
  const auto outcome = editor.apply(EditCommand::reassign(0, CommunityId{0}));
  CHECK_FALSE(outcome.applied);
  CHECK(editor.undo_depth() == 0);
  CHECK(editor.graph().edit_log().empty());
}

TEST_CASE("random edit sequences undo to the original") {
  std::mt19937_64 rng(31);
  const auto nested = fixture::nested_graph();
  const std::vector<Mcsg> starts{synthetic_graph(), fixture::make_graph(nested, detect_communities(nested, {}))};
  for (const auto& start : starts) {
    const auto original = export_string(start);
    for (int trial = 0; trial < 10; ++trial) {
      GraphEditor editor(start);
      std::vector<std::string> states{original};
      for (int k = 0; k < 30; ++k) {
        if (editor.apply(fixture::random_edit(rng, editor.graph())).applied)
          states.push_back(export_string(editor.graph()));
        check_invariants(editor.graph());
      }
      for (std::size_t k = states.size() - 1; k > 0; --k) {
        REQUIRE(editor.undo());
        CHECK(export_string(editor.graph()) == states[k - 1]);
      }
      CHECK_FALSE(editor.undo());
      while (editor.redo()) {
      }
      CHECK(export_string(editor.graph()) == states.back());
    }
  }
}

TEST_CASE("replaying the edit log reproduces the graph") {
  std::mt19937_64 rng(77);
  const auto start = synthetic_graph();
  GraphEditor editor(start);
  for (int k = 0; k < 25; ++k) editor.apply(fixture::random_edit(rng, editor.graph()));
  Mcsg replay = start;
  for (const auto& r : editor.graph().edit_log()) {
    auto applied = apply_edit(replay, r.command);
    REQUIRE(applied.outcome.applied);
    CHECK(applied.outcome.created == r.created);
    replay = std::move(applied.graph);
  }
  CHECK(replay == editor.graph());
}

TEST_CASE("edit log inverse reverts the edit") {
  const auto m = abc_graph();
  const auto r = apply_edit(m, EditCommand::merge({CommunityId{0}, CommunityId{1}}));
  const auto& inv = r.graph.edit_log().back().inverse;
  REQUIRE(inv.before.size() == 2);
  REQUIRE(inv.after.size() == 1);
  CHECK(inv.before[0] == m.hierarchy().get(CommunityId{0}));
  CHECK(inv.after[0] == r.graph.hierarchy().get(CommunityId{3}));
}

TEST_CASE("minimal document instance") {
  const ChannelGraph g(2, {{0, 1, 0.75}});
  const auto m = materialize_mcsg("tiny", {}, {{"a", 100.0}, {"b", 200.5}},
                                  std::make_shared<const ChannelGraph>(g), fixture::flat_hierarchy({0, 0}));
  const json expected = json::parse(R"({
    "mcsg_version": 2,
    "dataset_name": "tiny",
    "config": {"similarity": "pearson", "tau": 0.7, "seed": 42, "max_depth": 3,
               "min_split_size": 4, "hybrid_weight": 0.01},
    "hierarchy": 1,
    "nodes": [
      {"id": "a", "kind": "channel", "mz": 100.0},
      {"id": "b", "kind": "channel", "mz": 200.5},
      {"id": "community/0", "kind": "community", "level": 0, "members": ["a", "b"]}
    ],
    "edges": [{"source": "a", "target": "b", "kind": "channel", "weight": 0.75}],
    "edit_log": []
  })");
  CHECK(export_json(m) == expected);
  CHECK(import_json(expected) == m);
}

TEST_CASE("export and import round-trip") {
  std::mt19937_64 rng(90);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = fixture::random_graph(rng, 25, 0.15);
    HierarchyOptions opts;
    opts.seed = trial;
    auto m = fixture::make_graph(g, detect_communities(g, opts));
    if (!m.hierarchy().empty())
      for (int k = 0; k < 5; ++k) m = apply_edit(m, fixture::random_edit(rng, m)).graph;
    const auto text = export_string(m);
    const auto back = import_string(text);
    CHECK(back == m);
    CHECK(export_string(back) == text);
  }
}

TEST_CASE("hybrid edges are never persisted") {
  const auto doc = export_json(synthetic_graph());
  for (const auto& e : doc["edges"]) CHECK(e["kind"] != "hybrid");
}

TEST_CASE("import errors carry a path") {
  const auto good = export_json(abc_graph());
  auto expect_error = [](const json& doc, const std::string& needle) {
    const auto [kind, msg] = check::error_of([&] { import_json(doc); });
    CHECK(kind == ErrorKind::format);
    INFO(msg);
    CHECK(msg.find(needle) != std::string::npos);
  };
  json doc = good;
  doc["mcsg_version"] = 3;
  expect_error(doc, "/mcsg_version");

  doc = good;
  doc["nodes"][5]["members"][0] = "ghost";
  expect_error(doc, "ghost");
  expect_error(doc, "/nodes/5/members/0");

  doc = good;
  doc["edges"][0]["kind"] = "hybrid";
  expect_error(doc, "/edges/0/kind");

  doc = good;
  doc["edges"].back()["weight"] = 0.123;
  expect_error(doc, "/weight");

  doc = good;
  doc["nodes"][6]["parent"] = "community/99";
  expect_error(doc, "community/99");

  doc = good;
  doc.erase("nodes");
  expect_error(doc, "nodes");

  CHECK_ERROR_KIND(import_string("{not json"), ErrorKind::format);
}

TEST_CASE("partition violations in a document are rejected") {
  auto doc = export_json(abc_graph());
  doc["nodes"][5]["members"] = {"n00"};
  CHECK_ERROR_KIND(import_json(doc), ErrorKind::format);
}

TEST_CASE("edit commands round-trip through JSON") {
  const auto m = abc_graph();
  for (const auto& cmd : {EditCommand::merge({CommunityId{0}, CommunityId{2}}),
                          EditCommand::split(CommunityId{0}, {1}, {0}), EditCommand::reassign(3, CommunityId{1})}) {
    const auto doc = edit_command_to_json(cmd, m);
    CHECK(edit_command_from_json(doc, m) == cmd);
  }
  CHECK(edit_command_to_json(EditCommand::reassign(3, CommunityId{1}), m) ==
        json::parse(R"({"kind":"reassign","targets":["n03"],"destination":"community/1"})"));
}

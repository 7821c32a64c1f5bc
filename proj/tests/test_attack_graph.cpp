#include <algorithm>

#include "doctest.h"
#include "fixtures.hpp"
#include "tripwire/attack_graph.hpp"
#include "tripwire/serialize.hpp"

using namespace tripwire;

namespace {

dm::Placement make_placement(const std::string& id, const std::string& instance,
                             ComponentRole role, const std::string& target) {
  dm::Placement p;
  p.id = id;
  p.dm_id = "dm-x";
  p.tripwire_instance_id = instance;
  p.role = role;
  p.target_id = target;
  return p;
}

pool::TripwireInstance make_instance(const std::string& id) {
  pool::TripwireInstance inst;
  inst.instance_id = id;
  inst.definition_id = id.substr(0, id.find('#'));
  return inst;
}

}  // namespace

TEST_CASE("instance subgraphs carry the expected shape") {
  ag::AttackGraph g;
  auto bucket = make_instance("tw-bucket#1");
  auto decoy = make_placement("p-1", "tw-bucket#1", ComponentRole::Decoy, "c1");
  auto lure = make_placement("p-2", "tw-bucket#1", ComponentRole::Lure, "f1");

  auto nodes = g.add_instance_subgraph(bucket, {decoy, lure});
  CHECK(nodes.size() == 2);
  CHECK(g.node_count() == 4);  // 2 components + 2 targets
  CHECK(g.edge_count(ag::EdgeKind::PlacedOn) == 2);
  CHECK(g.edge_count(ag::EdgeKind::Unlocks) == 1);
  CHECK(g.node("p-1").instance_id == "tw-bucket#1");

  SUBCASE("zero-lure instances have no unlocks edges") {
    auto trap = make_instance("tw-endpoint#1");
    auto trap_decoy = make_placement("p-3", "tw-endpoint#1", ComponentRole::Decoy, "web1");
    g.add_instance_subgraph(trap, {trap_decoy});
    CHECK(g.edge_count(ag::EdgeKind::PlacedOn) == 3);
    CHECK(g.edge_count(ag::EdgeKind::Unlocks) == 1);
    CHECK(g.unlocks_sources("p-3").empty());
  }

  SUBCASE("re-adding the identical subgraph is a no-op") {
    auto again = g.add_instance_subgraph(bucket, {decoy, lure});
    CHECK(again.empty());
    CHECK(g.node_count() == 4);
    CHECK(g.edge_count(ag::EdgeKind::PlacedOn) == 2);
  }

  SUBCASE("conflicting shapes are rejected") {
    auto moved = make_placement("p-2", "tw-bucket#1", ComponentRole::Lure, "f2");
    CHECK_THROWS_AS(g.add_instance_subgraph(bucket, {decoy, moved}), Error);
  }

  SUBCASE("foreign placements are rejected") {
    auto foreign = make_placement("p-9", "tw-other#1", ComponentRole::Lure, "f1");
    CHECK_THROWS_AS(g.add_instance_subgraph(bucket, {decoy, foreign}), Error);
  }
}

TEST_CASE("unlocks sources and placements_on answer tracking queries") {
  ag::AttackGraph g;
  auto bucket = make_instance("tw-bucket#1");
  auto decoy = make_placement("p-1", "tw-bucket#1", ComponentRole::Decoy, "c1");
  auto lure = make_placement("p-2", "tw-bucket#1", ComponentRole::Lure, "f1");
  g.add_instance_subgraph(bucket, {decoy, lure});

  auto sources = g.unlocks_sources("p-1");
  REQUIRE(sources.size() == 1);
  CHECK(sources[0].placement_id == "p-2");
  CHECK_FALSE(sources[0].retired);

  auto on_f1 = g.placements_on("f1");
  REQUIRE(on_f1.size() == 1);
  CHECK(on_f1[0].placement_id == "p-2");

  CHECK(g.placements_on("h3").empty());
  CHECK_THROWS_AS(g.unlocks_sources("p-404"), Error);
  CHECK_THROWS_AS(g.unlocks_sources("f1"), Error);  // not a decoy component

  SUBCASE("retired components stay queryable, flagged") {
    g.retire_component("p-2");
    auto after = g.unlocks_sources("p-1");
    REQUIRE(after.size() == 1);
    CHECK(after[0].retired);
    CHECK(g.placements_on("f1")[0].retired);
    g.check_consistency();  // retirement never dangles edges
  }
}

TEST_CASE("instance growth extends the subgraph") {
  ag::AttackGraph g;
  auto bucket = make_instance("tw-bucket#1");
  auto decoy = make_placement("p-1", "tw-bucket#1", ComponentRole::Decoy, "c1");
  auto lure = make_placement("p-2", "tw-bucket#1", ComponentRole::Lure, "f1");
  g.add_instance_subgraph(bucket, {decoy, lure});

  auto grown = make_placement("p-3", "tw-bucket#1", ComponentRole::Lure, "f2");
  g.extend_instance(bucket, grown, "p-1");
  CHECK(g.edge_count(ag::EdgeKind::Unlocks) == 2);
  auto sources = g.unlocks_sources("p-1");
  REQUIRE(sources.size() == 2);
  CHECK(sources[0].placement_id == "p-2");
  CHECK(sources[1].placement_id == "p-3");
  g.check_consistency();
}

TEST_CASE("dot export lists every node with kind shapes") {
  auto d = fixtures::deploy_env_a();
  auto dot = d.graph.export_dot();

  // 5 environment targets + 3 components
  std::size_t nodes = 0;
  for (std::size_t pos = dot.find("shape="); pos != std::string::npos;
       pos = dot.find("shape=", pos + 1))
    ++nodes;
  CHECK(nodes == 8);
  CHECK(dot.find("style=dashed, label=\"unlocks\"") != std::string::npos);
  CHECK(dot.find("shape=diamond") != std::string::npos);  // decoys
  CHECK(dot.find("shape=ellipse") != std::string::npos);  // lures

  SUBCASE("empty graphs export a valid empty digraph") {
    ag::AttackGraph empty;
    CHECK(empty.export_dot() == "digraph attack_graph {\n}\n");
  }
}

TEST_CASE("json export round-trips isomorphically") {
  auto d = fixtures::deploy_env_a();
  auto text = d.graph.export_json();
  auto reparsed = ag::AttackGraph::import_json(text);
  CHECK(reparsed.export_json() == text);
  reparsed.check_consistency();

  SUBCASE("unsupported formats are rejected") {
    CHECK_THROWS_AS(io::export_graph(d.graph, "graphml"), Error);
  }
}

#include "doctest.h"
#include "fixtures.hpp"
#include "tripwire/environment.hpp"

using namespace tripwire;

TEST_CASE("env-A builds with five targets") {
  auto environment = env::Environment::build(fixtures::env_a_spec());
  CHECK(environment.targets().size() == 5);
  CHECK(environment.has_target("web1"));
  CHECK(environment.has_target("f1"));
  CHECK(environment.has_target("app2"));
  CHECK(environment.has_target("f2"));
  CHECK(environment.has_target("c1"));
  CHECK(environment.target("web1").parent_host == "h1");
  CHECK(environment.target("c1").kind == TargetKind::CloudService);
  CHECK_FALSE(environment.target("c1").parent_host.has_value());
}

TEST_CASE("empty spec builds an empty environment") {
  auto environment = env::Environment::build({});
  CHECK(environment.targets().empty());
  CHECK(environment.injection_points().empty());
  // coverage over an empty environment is vacuous, so injectable is empty
  CHECK(environment.injectable_targets().empty());
}

TEST_CASE("duplicate ids are rejected") {
  env::EnvironmentSpec spec;
  env::HostSpec h1a{"h1", {{"t1", TargetKind::Process, {Capability::InjectCookie}}}};
  env::HostSpec h1b{"h1", {}};
  spec.hosts = {h1a, h1b};
  CHECK_THROWS_WITH_AS(env::Environment::build(spec),
                       "environment: duplicate target id 'h1'", Error);

  env::EnvironmentSpec dup_target;
  env::HostSpec h{"h", {{"t1", TargetKind::Process, {Capability::InjectCookie}},
                        {"t1", TargetKind::HostFilesystem, {}}}};
  dup_target.hosts = {h};
  CHECK_THROWS_AS(env::Environment::build(dup_target), Error);
}

TEST_CASE("dangling reachability endpoints are rejected") {
  auto spec = fixtures::env_a_spec();
  spec.reachability.push_back({"web1", "ghost"});
  CHECK_THROWS_AS(env::Environment::build(spec), Error);
}

TEST_CASE("unknown capability names fail at parse time") {
  CHECK_THROWS_AS(parse_capability("inject-quantum-token"), Error);
}

TEST_CASE("env-A exposes seven injection points in lexicographic order") {
  auto environment = env::Environment::build(fixtures::env_a_spec());
  auto points = environment.injection_points();
  REQUIRE(points.size() == 7);
  CHECK(points[0] == std::pair<std::string, Capability>{"app2", Capability::InjectEnvVar});
  CHECK(points[1] == std::pair<std::string, Capability>{"c1", Capability::CreateBucketDecoy});
  CHECK(points[2] == std::pair<std::string, Capability>{"f1", Capability::InjectFileToken});
  CHECK(points[3] == std::pair<std::string, Capability>{"f2", Capability::InjectFileToken});
  CHECK(points[4] == std::pair<std::string, Capability>{"web1", Capability::InjectCookie});
  CHECK(points[5] == std::pair<std::string, Capability>{"web1", Capability::InjectHttpEndpoint});
  CHECK(points[6] == std::pair<std::string, Capability>{"web1", Capability::InjectHttpHeader});
}

TEST_CASE("host removal drops its injection points") {
  auto environment = env::Environment::build(fixtures::env_a_spec());
  env::EnvironmentEvent ev;
  ev.kind = env::EventKind::HostRemoved;
  ev.target_id = "h2";
  ev.timestamp = 10;
  auto result = environment.apply_event(ev, {});
  CHECK(result.environment.injection_points().size() == 5);  // app2 + f2 gone
  CHECK_FALSE(result.environment.has_target("app2"));
  CHECK_FALSE(result.environment.has_target("f2"));
}

TEST_CASE("events invalidate exactly the placements on dead targets") {
  auto environment = env::Environment::build(fixtures::env_a_spec());
  std::map<std::string, std::string> placements{
      {"p-1", "web1"}, {"p-2", "web1"}, {"p-3", "f1"}, {"p-4", "c1"}};

  SUBCASE("app-redeployed wipes the process") {
    env::EnvironmentEvent ev{env::EventKind::AppRedeployed, "web1", 5, std::nullopt};
    auto result = environment.apply_event(ev, placements);
    CHECK(result.invalidated_placements == std::vector<std::string>{"p-1", "p-2"});
    CHECK(result.environment.has_target("web1"));  // target survives, contents do not
  }

  SUBCASE("host-removed takes host children with it") {
    env::EnvironmentEvent ev{env::EventKind::HostRemoved, "h1", 5, std::nullopt};
    auto result = environment.apply_event(ev, placements);
    CHECK(result.invalidated_placements == std::vector<std::string>{"p-1", "p-2", "p-3"});
    CHECK_FALSE(result.environment.has_target("web1"));
    CHECK(result.environment.has_target("c1"));
  }

  SUBCASE("host-added never invalidates") {
    env::EnvironmentEvent ev;
    ev.kind = env::EventKind::HostAdded;
    ev.target_id = "h3";
    ev.timestamp = 5;
    env::HostSpec h3;
    h3.id = "h3";
    h3.targets.push_back({"f3", TargetKind::HostFilesystem, {Capability::InjectFileToken}});
    ev.host = h3;
    auto result = environment.apply_event(ev, placements);
    CHECK(result.invalidated_placements.empty());
    CHECK(result.environment.has_target("f3"));
    CHECK(result.environment.injection_points().size() == 8);
  }

  SUBCASE("unknown targets are errors") {
    env::EnvironmentEvent ev{env::EventKind::AppRedeployed, "ghost", 5, std::nullopt};
    CHECK_THROWS_AS(environment.apply_event(ev, placements), Error);
    env::EnvironmentEvent rm{env::EventKind::HostRemoved, "ghost", 5, std::nullopt};
    CHECK_THROWS_AS(environment.apply_event(rm, placements), Error);
  }

  SUBCASE("app-redeployed must target a process") {
    env::EnvironmentEvent ev{env::EventKind::AppRedeployed, "f1", 5, std::nullopt};
    CHECK_THROWS_AS(environment.apply_event(ev, placements), Error);
  }
}

TEST_CASE("building and replaying events is deterministic") {
  auto spec = fixtures::env_a_spec();
  auto a = env::Environment::build(spec);
  auto b = env::Environment::build(spec);
  CHECK(a.injection_points() == b.injection_points());

  env::EnvironmentEvent ev{env::EventKind::HostRemoved, "h2", 7, std::nullopt};
  auto ra = a.apply_event(ev, {});
  auto rb = b.apply_event(ev, {});
  CHECK(ra.environment.injection_points() == rb.environment.injection_points());
  // the original snapshots are untouched
  CHECK(a.targets().size() == 5);
}

TEST_CASE("locations resolve to hosts") {
  auto environment = env::Environment::build(fixtures::env_a_spec());
  CHECK(environment.location_of("web1") == "h1");
  CHECK(environment.location_of("f2") == "h2");
  CHECK(environment.location_of("c1") == "c1");
  CHECK(environment.location_of("h1") == "h1");
  CHECK(environment.location_of("external") == "external");
}

TEST_CASE("reachability is interpreted at host granularity") {
  auto environment = env::Environment::build(fixtures::env_a_spec());
  CHECK(environment.reachable("web1", "app2"));
  CHECK(environment.reachable("h1", "h2"));  // via the (web1, app2) pair
  CHECK_FALSE(environment.reachable("app2", "c1"));
}

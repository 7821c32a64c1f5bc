#pragma once

// Shared fixtures: the small reference environment env-A, its deploy module
// set, catalog subsets and the three-step intrusion S1 used across suites.

#include <memory>
#include <string>
#include <vector>

#include "tripwire/adversary.hpp"
#include "tripwire/attack_graph.hpp"
#include "tripwire/controller.hpp"
#include "tripwire/deploy_modules.hpp"
#include "tripwire/environment.hpp"
#include "tripwire/rng.hpp"
#include "tripwire/tripwire_pool.hpp"

namespace fixtures {

using namespace tripwire;

// env-A: two hosts and one cloud service, five injectable targets.
//   h1: web1 (process: http endpoint/header/cookie), f1 (fs: file token)
//   h2: app2 (process: env var),                     f2 (fs: file token)
//   c1: cloud service accepting decoy buckets
inline env::EnvironmentSpec env_a_spec() {
  env::EnvironmentSpec spec;
  env::HostSpec h1;
  h1.id = "h1";
  h1.targets.push_back({"web1",
                        TargetKind::Process,
                        {Capability::InjectHttpEndpoint, Capability::InjectHttpHeader,
                         Capability::InjectCookie}});
  h1.targets.push_back({"f1", TargetKind::HostFilesystem, {Capability::InjectFileToken}});
  env::HostSpec h2;
  h2.id = "h2";
  h2.targets.push_back({"app2", TargetKind::Process, {Capability::InjectEnvVar}});
  h2.targets.push_back({"f2", TargetKind::HostFilesystem, {Capability::InjectFileToken}});
  spec.hosts = {h1, h2};
  spec.cloud_services.push_back({"c1", {Capability::CreateBucketDecoy}});
  spec.reachability = {{"web1", "app2"}, {"app2", "web1"}, {"web1", "c1"}};
  return spec;
}

inline dm::DeployModuleDescriptor make_dm(const std::string& id, Capability cap,
                                          std::vector<std::string> ids,
                                          bool alarm_capable = true) {
  dm::DeployModuleDescriptor d;
  d.id = id;
  d.capability = cap;
  d.target_selector.ids = std::move(ids);
  d.alarm_capable = alarm_capable;
  return d;
}

// One DM per injection point of env-A, all alarm-capable.
inline void register_env_a_dms(dm::DeployModuleRegistry& registry) {
  registry.register_module(make_dm("dm-cloud", Capability::CreateBucketDecoy, {"c1"}));
  registry.register_module(make_dm("dm-cookie", Capability::InjectCookie, {"web1"}));
  registry.register_module(make_dm("dm-env", Capability::InjectEnvVar, {"app2"}));
  registry.register_module(make_dm("dm-fs1", Capability::InjectFileToken, {"f1"}));
  registry.register_module(make_dm("dm-fs2", Capability::InjectFileToken, {"f2"}));
  registry.register_module(make_dm("dm-hdr", Capability::InjectHttpHeader, {"web1"}));
  registry.register_module(make_dm("dm-web", Capability::InjectHttpEndpoint, {"web1"}));
}

inline std::vector<pool::TripwireDefinition> catalog_bucket_endpoint() {
  std::vector<pool::TripwireDefinition> defs;
  for (const auto& def : pool::builtin_catalog()) {
    if (def.id == "tw-bucket" || def.id == "tw-endpoint") defs.push_back(def);
  }
  return defs;
}

// The builtin catalog plus a fixture-only definition whose lure rides in an
// environment variable, so env-A's app2 is coverable at all.
inline std::vector<pool::TripwireDefinition> catalog_env_a_full() {
  auto defs = pool::builtin_catalog();
  pool::TripwireDefinition envkey;
  envkey.id = "tw-envkey";
  envkey.name = "decoy bucket with env-var api key";
  envkey.decoy_role = {ComponentRole::Decoy, Capability::CreateBucketDecoy, 1, 1};
  envkey.lure_roles = {{ComponentRole::Lure, Capability::InjectEnvVar, 1, 2}};
  envkey.secret_kind = pool::SecretKind::AccessToken;
  envkey.description = "api key planted in process environments unlocking a decoy bucket";
  defs.push_back(envkey);
  return defs;
}

// Everything deployed for the S1 walkthrough: env-A, catalog subset
// {tw-bucket, tw-endpoint}, budget (2 components/target, 1 instance/def).
struct DeployedEnvA {
  env::Environment environment;
  pool::TripwirePool pool;
  dm::DeployModuleRegistry registry;
  ag::AttackGraph graph;
  std::unique_ptr<ctl::Controller> controller;
  ctl::Budget budget{2, 1};
  std::vector<dm::Placement> placements;

  std::string bucket_decoy;    // on c1
  std::string bucket_lure;     // on f1
  std::string endpoint_decoy;  // on web1
  std::string bucket_secret;
};

inline DeployedEnvA deploy_env_a(std::uint64_t seed = 42) {
  DeployedEnvA d;
  d.environment = env::Environment::build(env_a_spec());
  register_env_a_dms(d.registry);
  d.pool.load(catalog_bucket_endpoint());
  d.controller = std::make_unique<ctl::Controller>(d.pool, d.registry, d.graph,
                                                   Rng::derive(seed, 1));
  auto plan = d.controller->plan(d.environment, d.budget);
  d.placements = d.controller->execute(plan, d.environment, 0);
  for (const auto& p : d.placements) {
    if (p.role == ComponentRole::Decoy && p.tripwire_instance_id == "tw-bucket#1")
      d.bucket_decoy = p.id;
    if (p.role == ComponentRole::Lure && p.tripwire_instance_id == "tw-bucket#1")
      d.bucket_lure = p.id;
    if (p.tripwire_instance_id == "tw-endpoint#1") d.endpoint_decoy = p.id;
  }
  if (d.controller->instances().count("tw-bucket#1"))
    d.bucket_secret = d.controller->instance("tw-bucket#1").instance.secret;
  return d;
}

inline std::vector<adversary::DeployedTripwire> tripwire_views(const ctl::Controller& controller) {
  std::vector<adversary::DeployedTripwire> views;
  for (const auto& [iid, state] : controller.instances()) {
    if (!state.active) continue;
    adversary::DeployedTripwire tw;
    tw.instance_id = iid;
    tw.secret = state.instance.secret;
    tw.decoy_placement = state.decoy_placement;
    tw.lure_placements = state.lure_placements;
    views.push_back(tw);
  }
  return views;
}

// S1: probe the hidden endpoint, harvest the bucket token, spend it.
inline adversary::Scenario scenario_s1() {
  adversary::Scenario s;
  adversary::ScenarioStep probe;
  probe.kind = adversary::StepKind::Probe;
  probe.target = "web1";
  probe.at = 100;
  adversary::ScenarioStep harvest;
  harvest.kind = adversary::StepKind::Harvest;
  harvest.target = "f1";
  harvest.at = 200;
  adversary::ScenarioStep use;
  use.kind = adversary::StepKind::UseSecret;
  use.secret_ref = "tw-bucket#1";
  use.at = 300;
  s.steps = {probe, harvest, use};
  return s;
}

}  // namespace fixtures

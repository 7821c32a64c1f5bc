#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tripwire/attack_graph.hpp"
#include "tripwire/deploy_modules.hpp"
#include "tripwire/environment.hpp"
#include "tripwire/rng.hpp"
#include "tripwire/tripwire_pool.hpp"

namespace tripwire::ctl {

struct Budget {
  int max_components_per_target = 3;
  int max_instances_per_definition = 5;
};

struct PlanAction {
  std::string definition_id;
  ComponentRole role = ComponentRole::Decoy;
  std::string dm_id;
  std::string target_id;
  // Set when the action grows an instance that existed before planning;
  // empty actions belong to the new instance opened by the nearest
  // preceding decoy action.
  std::string instance_id;
};

struct DeploymentPlan {
  std::vector<PlanAction> actions;
  Budget budget;
};

struct CoverageReport {
  std::set<std::string> covered_targets;
  std::set<std::string> injectable_targets;
  double ratio = 1.0;
};

struct InstanceState {
  pool::TripwireInstance instance;
  bool active = true;
  std::string decoy_placement;
  std::vector<std::string> lure_placements;  // active only
};

struct ReconcileOutcome {
  std::vector<std::string> retracted_placements;
  std::vector<std::string> retired_instances;
  std::vector<std::string> redeployed_placements;
  std::vector<std::string> new_instances;

  std::size_t action_count() const {
    return retracted_placements.size() + retired_instances.size() +
           redeployed_placements.size() + new_instances.size();
  }
};

/// Planning is strategy-pluggable; greedy coverage maximization is the
/// shipped strategy (see GreedyCoverageStrategy).
class PlanningStrategy;

/// The deployment controller: decides which DMs deploy which tripwire roles
/// onto which targets, keeps the attack graph in sync and reconciles after
/// environment changes.
class Controller {
 public:
  Controller(pool::TripwirePool& pool, dm::DeployModuleRegistry& registry, ag::AttackGraph& graph,
             Rng secret_stream);

  /// Greedy maximization of coverage: repeatedly take the candidate action
  /// covering the most currently uncovered injectable targets, ties broken
  /// lexicographically by (definition-id, target-id, dm-id). New instances
  /// are opened at minimum role cardinality; instances that already existed
  /// before the call may grow lure placements up to their role maximum.
  DeploymentPlan plan(const env::Environment& environment, const Budget& budget) const;

  /// Deploys a plan. Atomic per instance: a deploy failure rolls back the
  /// instance's partial placements and leaves other instances untouched.
  std::vector<dm::Placement> execute(const DeploymentPlan& plan, env::Environment& environment,
                                     TimeMs now);

  ReconcileOutcome handle_event(const env::EnvironmentEvent& event, env::Environment& environment,
                                const Budget& budget);

  /// One reconcile cycle without an event: restores lure-role minima,
  /// retires unrestorable instances and re-plans onto the current
  /// environment. Quiescent systems reach a fixed point in one cycle.
  ReconcileOutcome reconcile(env::Environment& environment, const Budget& budget, TimeMs now);

  CoverageReport coverage(const env::Environment& environment) const;

  const std::map<std::string, InstanceState>& instances() const { return instances_; }
  const InstanceState& instance(const std::string& instance_id) const;
  std::optional<std::string> instance_by_secret(const std::string& secret) const;
  std::set<std::string> placements_of_instance(const std::string& instance_id) const;

  /// Mirrors every current environment target into the attack graph.
  void sync_graph_targets(const env::Environment& environment);

 private:
  struct Candidate;
  std::vector<PlanAction> choose_candidate(const env::Environment& environment,
                                           const Budget& budget,
                                           std::map<std::string, int>& components_per_target,
                                           std::map<std::string, int>& instances_per_definition,
                                           std::map<std::string, std::map<Capability, int>>&
                                               existing_lure_counts,
                                           std::set<std::string>& covered) const;

  void retire_instance(InstanceState& state, std::vector<std::string>* retracted);
  std::string payload_for(const pool::TripwireDefinition& def,
                          const pool::TripwireInstance& inst, ComponentRole role,
                          Capability capability) const;

  pool::TripwirePool& pool_;
  dm::DeployModuleRegistry& registry_;
  ag::AttackGraph& graph_;
  Rng secrets_;
  std::map<std::string, InstanceState> instances_;
};

}  // namespace tripwire::ctl

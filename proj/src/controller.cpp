#include "tripwire/controller.hpp"

#include <algorithm>
#include <tuple>

namespace tripwire::ctl {

namespace {

struct LurePick {
  std::string dm_id;
  std::string target_id;
};

// Sorted (target, dm) options for one role capability, eligibility already
// checked against the current environment.
std::vector<LurePick> role_options(const dm::DeployModuleRegistry& registry,
                                   const env::Environment& environment, Capability capability) {
  std::vector<LurePick> options;
  for (const auto& entry : registry.query(capability, environment)) {
    for (const auto& target : entry.eligible_targets)
      options.push_back({entry.dm_id, target});
  }
  std::sort(options.begin(), options.end(), [](const LurePick& a, const LurePick& b) {
    if (a.target_id != b.target_id) return a.target_id < b.target_id;
    return a.dm_id < b.dm_id;
  });
  return options;
}

}  // namespace

struct Controller::Candidate {
  std::vector<PlanAction> actions;
  int gain = 0;
  // (definition-id, target-id, dm-id) with a trailing new/extension flag.
  std::tuple<std::string, std::string, std::string, int> key;
  std::vector<std::string> covered_targets;
  std::string new_instance_definition;  // empty for extensions
};

Controller::Controller(pool::TripwirePool& pool, dm::DeployModuleRegistry& registry,
                       ag::AttackGraph& graph, Rng secret_stream)
    : pool_(pool), registry_(registry), graph_(graph), secrets_(secret_stream) {}

const InstanceState& Controller::instance(const std::string& instance_id) const {
  auto it = instances_.find(instance_id);
  if (it == instances_.end()) throw Error("controller", "unknown instance '" + instance_id + "'");
  return it->second;
}

std::optional<std::string> Controller::instance_by_secret(const std::string& secret) const {
  if (secret.empty()) return std::nullopt;
  for (const auto& [id, state] : instances_) {
    if (state.instance.secret == secret) return id;
  }
  return std::nullopt;
}

std::set<std::string> Controller::placements_of_instance(const std::string& instance_id) const {
  std::set<std::string> out;
  for (const auto& [pid, p] : registry_.placements()) {
    if (p.tripwire_instance_id == instance_id) out.insert(pid);
  }
  return out;
}

void Controller::sync_graph_targets(const env::Environment& environment) {
  for (const auto& [id, t] : environment.targets()) graph_.add_target(id);
}

DeploymentPlan Controller::plan(const env::Environment& environment, const Budget& budget) const {
  DeploymentPlan result;
  result.budget = budget;

  const std::set<std::string> injectable = environment.injectable_targets();
  std::set<std::string> covered;
  std::map<std::string, int> components_per_target;
  std::map<std::string, int> instances_per_definition;
  // instance id -> capability -> active lure count, and lure targets in use
  std::map<std::string, std::map<Capability, int>> lure_counts;
  std::map<std::string, std::set<std::string>> lure_targets;

  for (const auto& [pid, p] : registry_.placements()) {
    if (!p.active) continue;
    ++components_per_target[p.target_id];
    if (injectable.count(p.target_id)) covered.insert(p.target_id);
  }
  for (const auto& [iid, state] : instances_) {
    if (!state.active) continue;
    ++instances_per_definition[state.instance.definition_id];
    for (const auto& lure_pid : state.lure_placements) {
      const dm::Placement& p = registry_.placement(lure_pid);
      ++lure_counts[iid][registry_.module(p.dm_id).capability];
      lure_targets[iid].insert(p.target_id);
    }
  }

  auto uncovered_gain = [&](const std::string& target, const std::set<std::string>& local) {
    return injectable.count(target) && !covered.count(target) && !local.count(target) ? 1 : 0;
  };
  auto room_on = [&](const std::string& target, const std::map<std::string, int>& local) {
    int used = components_per_target.count(target) ? components_per_target.at(target) : 0;
    auto it = local.find(target);
    if (it != local.end()) used += it->second;
    return used < budget.max_components_per_target;
  };

  while (true) {
    std::optional<Candidate> best;
    // gain descending, then lexicographic key ascending
    auto consider = [&](Candidate&& c) {
      if (!best || c.gain > best->gain || (c.gain == best->gain && c.key < best->key))
        best = std::move(c);
    };

    // New instances at minimum role cardinality.
    for (const pool::TripwireDefinition* def : pool_.definitions()) {
      int active = instances_per_definition.count(def->id) ? instances_per_definition[def->id] : 0;
      if (active >= budget.max_instances_per_definition) continue;
      const bool creates_host = def->decoy_role.capability == Capability::CreateSshDecoy;

      for (const auto& anchor : role_options(registry_, environment, def->decoy_role.capability)) {
        std::map<std::string, int> local_counts;
        std::set<std::string> local_covered;
        if (creates_host) {
          if (budget.max_components_per_target < 1) continue;  // the fresh host needs room
        } else {
          if (!room_on(anchor.target_id, local_counts)) continue;
          ++local_counts[anchor.target_id];
        }

        Candidate c;
        c.gain = creates_host ? 0 : uncovered_gain(anchor.target_id, {});
        if (!creates_host && c.gain) local_covered.insert(anchor.target_id);
        c.actions.push_back({def->id, ComponentRole::Decoy, anchor.dm_id, anchor.target_id, ""});
        c.key = {def->id, anchor.target_id, anchor.dm_id, 0};
        c.new_instance_definition = def->id;

        bool feasible = true;
        for (const auto& role : def->lure_roles) {
          auto options = role_options(registry_, environment, role.capability);
          // Prefer placements that cover something new; ties fall back to
          // the (target, dm) order of the option list.
          std::stable_sort(options.begin(), options.end(),
                           [&](const LurePick& a, const LurePick& b) {
                             return uncovered_gain(a.target_id, local_covered) >
                                    uncovered_gain(b.target_id, local_covered);
                           });
          std::set<std::string> used;
          int placed = 0;
          for (const auto& pick : options) {
            if (placed == role.min_placements) break;
            if (used.count(pick.target_id)) continue;
            if (!room_on(pick.target_id, local_counts)) continue;
            c.actions.push_back({def->id, ComponentRole::Lure, pick.dm_id, pick.target_id, ""});
            used.insert(pick.target_id);
            ++local_counts[pick.target_id];
            if (uncovered_gain(pick.target_id, local_covered)) {
              local_covered.insert(pick.target_id);
              ++c.gain;
            }
            ++placed;
          }
          if (placed < role.min_placements) {
            feasible = false;  // no partial instances
            break;
          }
        }
        if (!feasible) continue;
        c.covered_targets.assign(local_covered.begin(), local_covered.end());
        consider(std::move(c));
      }
    }

    // Growth of instances that existed before this planning pass.
    for (const auto& [iid, state] : instances_) {
      if (!state.active) continue;
      const pool::TripwireDefinition& def = pool_.definition(state.instance.definition_id);
      for (const auto& role : def.lure_roles) {
        int have = 0;
        if (lure_counts.count(iid) && lure_counts.at(iid).count(role.capability))
          have = lure_counts.at(iid).at(role.capability);
        if (have >= role.max_placements) continue;
        for (const auto& pick : role_options(registry_, environment, role.capability)) {
          if (lure_targets[iid].count(pick.target_id)) continue;
          if (!room_on(pick.target_id, {})) continue;
          Candidate c;
          c.gain = uncovered_gain(pick.target_id, {});
          c.actions.push_back({def.id, ComponentRole::Lure, pick.dm_id, pick.target_id, iid});
          c.key = {def.id, pick.target_id, pick.dm_id, 1};
          if (c.gain) c.covered_targets.push_back(pick.target_id);
          consider(std::move(c));
        }
      }
    }

    if (!best || best->gain <= 0) break;

    for (const auto& action : best->actions) {
      result.actions.push_back(action);
      if (!(action.role == ComponentRole::Decoy &&
            pool_.definition(action.definition_id).decoy_role.capability ==
                Capability::CreateSshDecoy))
        ++components_per_target[action.target_id];
      if (!action.instance_id.empty()) {
        ++lure_counts[action.instance_id]
                     [registry_.module(action.dm_id).capability];
        lure_targets[action.instance_id].insert(action.target_id);
      }
    }
    for (const auto& t : best->covered_targets) covered.insert(t);
    if (!best->new_instance_definition.empty())
      ++instances_per_definition[best->new_instance_definition];
  }

  return result;
}

std::string Controller::payload_for(const pool::TripwireDefinition& def,
                                    const pool::TripwireInstance& inst, ComponentRole role,
                                    Capability capability) const {
  const std::string& secret = inst.secret;
  if (role == ComponentRole::Decoy) {
    switch (capability) {
      case Capability::CreateBucketDecoy:
        return "bucket:" + inst.instance_id + ":" + secret;
      case Capability::CreateSshDecoy:
        return "sshd:" + inst.instance_id + ":" + secret;
      case Capability::InjectHttpEndpoint:
        return "endpoint:/trap/" + inst.instance_id;
      default:
        return std::string("decoy:") + capability_name(capability) + ":" + inst.instance_id + ":" +
               secret;
    }
  }
  switch (capability) {
    case Capability::InjectFileToken:
      return "file-token:" + inst.instance_id + ":" + secret;
    case Capability::InjectEnvVar:
      return "env-var:TW_SECRET=" + secret;
    case Capability::InjectHttpHeader:
      return "header:X-Tw-Token=" + secret;
    case Capability::InjectCookie:
      return "cookie:tw_token=" + secret;
    default:
      return std::string("lure:") + capability_name(capability) + ":" + inst.instance_id + ":" +
             secret;
  }
  (void)def;
}

std::vector<dm::Placement> Controller::execute(const DeploymentPlan& plan,
                                               env::Environment& environment, TimeMs now) {
  std::vector<dm::Placement> deployed;

  // Group consecutive actions into per-instance batches; extensions carry
  // their instance id and run as single-action batches.
  struct Batch {
    std::string definition_id;
    std::string existing_instance;  // empty for new instances
    std::vector<PlanAction> actions;
  };
  std::vector<Batch> batches;
  for (const auto& action : plan.actions) {
    if (!action.instance_id.empty()) {
      batches.push_back({action.definition_id, action.instance_id, {action}});
    } else if (action.role == ComponentRole::Decoy) {
      batches.push_back({action.definition_id, "", {action}});
    } else {
      if (batches.empty() || batches.back().definition_id != action.definition_id ||
          !batches.back().existing_instance.empty())
        throw Error("controller", "plan has a lure action without its instance's decoy");
      batches.back().actions.push_back(action);
    }
  }

  for (const auto& batch : batches) {
    const pool::TripwireDefinition& def = pool_.definition(batch.definition_id);

    if (!batch.existing_instance.empty()) {
      // Growth of an existing instance by one lure placement.
      InstanceState& state = instances_.at(batch.existing_instance);
      const PlanAction& action = batch.actions.front();
      Capability capability = registry_.module(action.dm_id).capability;
      dm::DeployResult r = registry_.deploy(action.dm_id, state.instance, def, ComponentRole::Lure,
                                            action.target_id,
                                            payload_for(def, state.instance, ComponentRole::Lure,
                                                        capability),
                                            environment, now);
      state.lure_placements.push_back(r.placement.id);
      state.instance.lure_placements.push_back(r.placement.id);
      graph_.extend_instance(state.instance, r.placement, state.decoy_placement);
      deployed.push_back(r.placement);
      continue;
    }

    pool::TripwireInstance inst = pool_.instantiate(def.id, secrets_, now);
    std::vector<dm::Placement> batch_placements;
    env::Environment env_before = environment;
    bool ok = true;
    for (const auto& action : batch.actions) {
      try {
        Capability capability = registry_.module(action.dm_id).capability;
        dm::DeployResult r =
            registry_.deploy(action.dm_id, inst, def, action.role, action.target_id,
                             payload_for(def, inst, action.role, capability), environment, now);
        if (r.created_target) environment = environment.with_runtime_target(*r.created_target);
        batch_placements.push_back(r.placement);
      } catch (const Error&) {
        ok = false;
        break;
      }
    }
    if (!ok) {
      for (const auto& p : batch_placements) registry_.retract(p.id);
      environment = env_before;  // drop any decoy host created for the failed instance
      continue;
    }

    InstanceState state;
    state.instance = inst;
    for (const auto& p : batch_placements) {
      if (p.role == ComponentRole::Decoy) {
        state.decoy_placement = p.id;
        state.instance.decoy_placement = p.id;
      } else {
        state.lure_placements.push_back(p.id);
        state.instance.lure_placements.push_back(p.id);
      }
    }
    graph_.add_instance_subgraph(state.instance, batch_placements);
    instances_.emplace(inst.instance_id, state);
    deployed.insert(deployed.end(), batch_placements.begin(), batch_placements.end());
  }

  sync_graph_targets(environment);
  return deployed;
}

void Controller::retire_instance(InstanceState& state, std::vector<std::string>* retracted) {
  for (const auto& pid : placements_of_instance(state.instance.instance_id)) {
    if (registry_.placement(pid).active) {
      registry_.retract(pid);
      if (retracted) retracted->push_back(pid);
    }
    if (graph_.has_node(pid)) graph_.retire_component(pid);
  }
  state.active = false;
  state.lure_placements.clear();
}

ReconcileOutcome Controller::handle_event(const env::EnvironmentEvent& event,
                                          env::Environment& environment, const Budget& budget) {
  ReconcileOutcome outcome;

  auto applied = environment.apply_event(event, registry_.active_placement_targets());
  environment = applied.environment;

  std::set<std::string> dead_decoy_instances;
  for (const auto& pid : applied.invalidated_placements) {
    registry_.retract(pid);
    if (graph_.has_node(pid)) graph_.retire_component(pid);
    outcome.retracted_placements.push_back(pid);
    const dm::Placement& p = registry_.placement(pid);
    auto it = instances_.find(p.tripwire_instance_id);
    if (it == instances_.end() || !it->second.active) continue;
    InstanceState& state = it->second;
    if (state.decoy_placement == pid) {
      dead_decoy_instances.insert(it->first);
    } else {
      state.lure_placements.erase(
          std::remove(state.lure_placements.begin(), state.lure_placements.end(), pid),
          state.lure_placements.end());
    }
  }

  // An instance without its decoy is pointless: retire it entirely; the
  // re-plan below replaces it with a fresh instance and a fresh secret.
  for (const auto& iid : dead_decoy_instances) {
    retire_instance(instances_.at(iid), &outcome.retracted_placements);
    outcome.retired_instances.push_back(iid);
  }

  sync_graph_targets(environment);

  ReconcileOutcome repair = reconcile(environment, budget, event.timestamp);
  outcome.retracted_placements.insert(outcome.retracted_placements.end(),
                                      repair.retracted_placements.begin(),
                                      repair.retracted_placements.end());
  outcome.retired_instances.insert(outcome.retired_instances.end(),
                                   repair.retired_instances.begin(),
                                   repair.retired_instances.end());
  outcome.redeployed_placements = repair.redeployed_placements;
  outcome.new_instances = repair.new_instances;
  return outcome;
}

ReconcileOutcome Controller::reconcile(env::Environment& environment, const Budget& budget,
                                       TimeMs now) {
  ReconcileOutcome outcome;

  // Restore lure-role minima of surviving instances first.
  std::vector<std::string> below_min;
  for (auto& [iid, state] : instances_) {
    if (!state.active) continue;
    const pool::TripwireDefinition& def = pool_.definition(state.instance.definition_id);
    std::map<Capability, int> have;
    std::set<std::string> used_targets;
    for (const auto& pid : state.lure_placements) {
      const dm::Placement& p = registry_.placement(pid);
      ++have[registry_.module(p.dm_id).capability];
      used_targets.insert(p.target_id);
    }
    std::map<std::string, int> counts;
    for (const auto& [pid, p] : registry_.placements())
      if (p.active) ++counts[p.target_id];

    bool restorable = true;
    for (const auto& role : def.lure_roles) {
      int need = role.min_placements - (have.count(role.capability) ? have[role.capability] : 0);
      while (need > 0) {
        std::optional<LurePick> pick;
        for (const auto& option : role_options(registry_, environment, role.capability)) {
          if (used_targets.count(option.target_id)) continue;
          int used = counts.count(option.target_id) ? counts[option.target_id] : 0;
          if (used >= budget.max_components_per_target) continue;
          pick = option;
          break;
        }
        if (!pick) {
          restorable = false;
          break;
        }
        dm::DeployResult r = registry_.deploy(
            pick->dm_id, state.instance, def, ComponentRole::Lure, pick->target_id,
            payload_for(def, state.instance, ComponentRole::Lure,
                        registry_.module(pick->dm_id).capability),
            environment, now);
        state.lure_placements.push_back(r.placement.id);
        state.instance.lure_placements.push_back(r.placement.id);
        graph_.extend_instance(state.instance, r.placement, state.decoy_placement);
        outcome.redeployed_placements.push_back(r.placement.id);
        used_targets.insert(pick->target_id);
        ++counts[pick->target_id];
        --need;
      }
      if (!restorable) break;
    }
    if (!restorable) below_min.push_back(iid);
  }
  for (const auto& iid : below_min) {
    retire_instance(instances_.at(iid), &outcome.retracted_placements);
    outcome.retired_instances.push_back(iid);
  }

  // Re-plan on the new environment: replaces retired instances and grows
  // surviving ones onto fresh coverage.
  std::set<std::string> before;
  for (const auto& [iid, state] : instances_) before.insert(iid);
  DeploymentPlan repair = plan(environment, budget);
  std::vector<dm::Placement> added = execute(repair, environment, now);
  for (const auto& p : added) outcome.redeployed_placements.push_back(p.id);
  for (const auto& [iid, state] : instances_) {
    if (!before.count(iid)) outcome.new_instances.push_back(iid);
  }
  return outcome;
}

CoverageReport Controller::coverage(const env::Environment& environment) const {
  CoverageReport report;
  report.injectable_targets = environment.injectable_targets();
  for (const auto& [pid, p] : registry_.placements()) {
    if (p.active && report.injectable_targets.count(p.target_id))
      report.covered_targets.insert(p.target_id);
  }
  report.ratio = report.injectable_targets.empty()
                     ? 1.0
                     : static_cast<double>(report.covered_targets.size()) /
                           static_cast<double>(report.injectable_targets.size());
  return report;
}

}  // namespace tripwire::ctl

#include "tripwire/adversary.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "tripwire/rng.hpp"

namespace tripwire::adversary {

namespace {

struct SecretInfo {
  std::string secret;
  std::string instance_id;
  std::string decoy_placement;
  std::vector<std::string> lure_placements;
};

// Lookup tables over the deployed tripwires, keyed every way the simulated
// attacker needs.
struct TripwireIndex {
  std::map<std::string, SecretInfo> by_instance;
  std::map<std::string, std::string> instance_of_placement;

  explicit TripwireIndex(const std::vector<DeployedTripwire>& tripwires) {
    for (const auto& tw : tripwires) {
      SecretInfo info{tw.secret, tw.instance_id, tw.decoy_placement, tw.lure_placements};
      by_instance.emplace(tw.instance_id, info);
      instance_of_placement.emplace(tw.decoy_placement, tw.instance_id);
      for (const auto& lure : tw.lure_placements)
        instance_of_placement.emplace(lure, tw.instance_id);
    }
  }
};

bool placement_alarms(const dm::DeployModuleRegistry& registry, const std::string& placement_id) {
  const dm::Placement& p = registry.placement(placement_id);
  return p.active && registry.module(p.dm_id).alarm_capable;
}

// Active placements of one role on a target, sorted by placement id.
std::vector<const dm::Placement*> placements_on_target(const dm::DeployModuleRegistry& registry,
                                                       const std::string& target,
                                                       ComponentRole role) {
  std::vector<const dm::Placement*> out;
  for (const auto& [pid, p] : registry.placements()) {
    if (p.active && p.target_id == target && p.role == role) out.push_back(&p);
  }
  return out;  // std::map iteration is already id-ordered
}

}  // namespace

RunResult run_scenario(const env::Environment& environment,
                       const dm::DeployModuleRegistry& registry,
                       const std::vector<DeployedTripwire>& tripwires, const Scenario& scenario,
                       const NoiseConfig& noise) {
  TripwireIndex index(tripwires);
  RunResult result;

  std::string location = kExternalAccessor;
  std::set<std::string> harvested_secrets;
  std::vector<std::string> harvest_order;            // instance ids, for "$n" refs
  std::map<std::string, int> harvest_step_of_secret;  // secret -> step index

  // Footprints of alarm-producing steps, used to derive the observable
  // causal edges the reconstruction is judged against.
  struct AlarmStepInfo {
    int step_index;
    std::set<std::string> footprint;  // locations the step's alarms tie it to
  };
  std::vector<AlarmStepInfo> alarm_steps;

  TimeMs last_at = 0;
  for (std::size_t i = 0; i < scenario.steps.size(); ++i) {
    const ScenarioStep& step = scenario.steps[i];
    if (step.at < last_at)
      throw Error("adversary", "scenario steps must carry non-decreasing timestamps");
    last_at = step.at;

    TraceStep trace_step;
    trace_step.step_index = static_cast<int>(i);
    std::vector<TouchRecord> touches;
    std::optional<int> forced_edge_from;  // harvest step of a used secret

    auto touch = [&](const std::string& placement_id) {
      TouchRecord t;
      t.placement_id = placement_id;
      t.accessor = location;
      t.timestamp = step.at;
      t.alarming = placement_alarms(registry, placement_id);
      touches.push_back(t);
      dm::AccessEvent ev;
      ev.placement_id = placement_id;
      ev.accessor = location;
      ev.timestamp = step.at;
      return ev;
    };

    switch (step.kind) {
      case StepKind::Probe: {
        if (!environment.has_target(step.target))
          throw Error("adversary", "probe targets unknown target '" + step.target + "'");
        for (const auto* p : placements_on_target(registry, step.target, ComponentRole::Decoy)) {
          dm::AccessEvent ev = touch(p->id);
          ev.observables["action"] = "probe";
          result.events.push_back(ev);
        }
        // A probed hidden endpoint doubles as the foothold.
        location = environment.location_of(step.target);
        break;
      }
      case StepKind::Compromise: {
        if (!environment.has_target(step.target) && !environment.hosts().count(step.target))
          throw Error("adversary", "compromise targets unknown target '" + step.target + "'");
        location = environment.location_of(step.target);
        break;
      }
      case StepKind::Harvest: {
        if (!environment.has_target(step.target))
          throw Error("adversary", "harvest targets unknown target '" + step.target + "'");
        for (const auto* p : placements_on_target(registry, step.target, ComponentRole::Lure)) {
          dm::AccessEvent ev = touch(p->id);
          ev.observables["action"] = "harvest";
          result.events.push_back(ev);
          auto inst = index.instance_of_placement.find(p->id);
          if (inst != index.instance_of_placement.end()) {
            const SecretInfo& info = index.by_instance.at(inst->second);
            if (!info.secret.empty() && !harvested_secrets.count(info.secret)) {
              harvested_secrets.insert(info.secret);
              harvest_order.push_back(info.instance_id);
            }
            harvest_step_of_secret[info.secret] = static_cast<int>(i);
          }
        }
        break;
      }
      case StepKind::UseSecret: {
        std::string instance_id = step.secret_ref;
        if (!step.secret_ref.empty() && step.secret_ref[0] == '$') {
          std::size_t ordinal = std::stoul(step.secret_ref.substr(1));
          if (ordinal == 0 || ordinal > harvest_order.size())
            throw Error("adversary", "use-secret ordinal '" + step.secret_ref + "' out of range");
          instance_id = harvest_order[ordinal - 1];
        }
        auto it = index.by_instance.find(instance_id);
        if (it == index.by_instance.end())
          throw Error("adversary", "use-secret references unknown instance '" + instance_id + "'");
        const SecretInfo& info = it->second;
        if (info.secret.empty())
          throw Error("adversary", "instance '" + instance_id + "' has no linking secret");
        if (!harvested_secrets.count(info.secret))
          throw Error("adversary", "secret of '" + instance_id + "' used before it was harvested");
        dm::AccessEvent ev = touch(info.decoy_placement);
        ev.observables["action"] = "use-secret";
        ev.observables["secret"] = info.secret;
        result.events.push_back(ev);
        if (harvest_step_of_secret.count(info.secret))
          forced_edge_from = harvest_step_of_secret[info.secret];
        // Logging into a decoy ssh host moves the attacker onto it; using a
        // stolen bucket token does not relocate anyone.
        const dm::Placement& decoy = registry.placement(info.decoy_placement);
        if (environment.has_target(decoy.target_id) &&
            environment.target(decoy.target_id).kind == TargetKind::DecoyHost)
          location = decoy.target_id;
        break;
      }
      case StepKind::Pivot: {
        if (!environment.reachable(step.from, step.to))
          throw Error("adversary",
                      "pivot " + step.from + " -> " + step.to + " is not reachable");
        location = environment.location_of(step.to);
        break;
      }
      case StepKind::Noise:
        // Accesses to non-deceptive surfaces: invisible to every alarm
        // system, so nothing is emitted.
        break;
    }

    trace_step.touches = touches;
    result.trace.steps.push_back(trace_step);

    bool alarming = std::any_of(touches.begin(), touches.end(),
                                [](const TouchRecord& t) { return t.alarming; });
    if (alarming) {
      AlarmStepInfo info;
      info.step_index = static_cast<int>(i);
      for (const auto& t : touches) {
        if (!t.alarming) continue;
        info.footprint.insert(environment.location_of(registry.placement(t.placement_id).target_id));
        if (t.accessor != kExternalAccessor)
          info.footprint.insert(environment.location_of(t.accessor));
      }

      std::optional<int> edge_from;
      if (forced_edge_from) {
        // True cause of a secret use is the harvest, when that harvest was
        // observable at all.
        for (const auto& prior : alarm_steps)
          if (prior.step_index == *forced_edge_from) edge_from = *forced_edge_from;
      }
      if (!edge_from) {
        const std::string issuing = touches.front().accessor;
        if (issuing != kExternalAccessor) {
          const std::string loc = environment.location_of(issuing);
          for (const auto& prior : alarm_steps) {
            if (prior.footprint.count(loc)) edge_from = prior.step_index;  // keeps most recent
          }
        }
      }
      if (edge_from) result.trace.causal_edges.emplace_back(*edge_from, static_cast<int>(i));

      result.trace.alarm_steps.push_back(static_cast<int>(i));
      alarm_steps.push_back(info);
    }
  }

  if (noise.forged_count > 0) {
    Rng rng = Rng::derive(noise.seed, 0xF0F0);
    std::vector<std::string> placement_pool;
    for (const auto& [pid, p] : registry.placements())
      if (p.active) placement_pool.push_back(pid);
    std::vector<std::string> accessor_pool;
    for (const auto& [tid, t] : environment.targets()) accessor_pool.push_back(tid);
    for (const auto& host : environment.hosts()) accessor_pool.push_back(host);
    std::sort(accessor_pool.begin(), accessor_pool.end());
    if (!placement_pool.empty() && !accessor_pool.empty()) {
      const TimeMs horizon = noise.horizon_ms > 0 ? noise.horizon_ms : last_at;
      for (int i = 0; i < noise.forged_count; ++i) {
        dm::RawAlarm forged;
        forged.placement_id = placement_pool[rng.below(placement_pool.size())];
        forged.dm_id = registry.placement(forged.placement_id).dm_id;
        forged.accessor = accessor_pool[rng.below(accessor_pool.size())];
        forged.observables["action"] = "access";
        forged.timestamp = static_cast<TimeMs>(rng.below(static_cast<std::uint64_t>(horizon) + 1));
        result.trace.forged.push_back(forged);
      }
    }
  }

  return result;
}

Scenario generate_random_scenario(const env::Environment& environment,
                                  const dm::DeployModuleRegistry& registry,
                                  const std::vector<DeployedTripwire>& tripwires, int length,
                                  std::uint64_t seed, TimeMs start_at) {
  if (length < 1) throw Error("adversary", "scenario length must be >= 1");
  TripwireIndex index(tripwires);
  Rng rng = Rng::derive(seed, 0x5CE0);

  Scenario scenario;
  std::string location = kExternalAccessor;
  TimeMs at = start_at;

  // Bookkeeping that mirrors how tracking will see the alarms: how many
  // prior alarms are tied to each location / exact target, so every step we
  // emit leaves exactly one backward candidate (the previous alarm).
  std::map<std::string, int> loc_alarms;
  std::map<std::string, int> target_alarms;
  std::set<std::string> used_placements;
  std::set<std::string> footprint_of_last;  // locations of the previous alarm step
  bool any_alarm = false;
  bool used_secret_emitted = false;

  struct PendingSecret {
    std::string instance_id;
    std::vector<std::string> lure_targets;
    std::string decoy_placement;
  };
  std::optional<PendingSecret> pending;  // harvested by the immediately previous alarm step

  auto bump = [&](const std::set<std::string>& locations) {
    for (const auto& l : locations) ++loc_alarms[l];
  };

  auto single_active_decoy = [&](const std::string& target) -> const dm::Placement* {
    auto decoys = placements_on_target(registry, target, ComponentRole::Decoy);
    decoys.erase(std::remove_if(decoys.begin(), decoys.end(),
                                [&](const dm::Placement* p) {
                                  return used_placements.count(p->id) ||
                                         !placement_alarms(registry, p->id);
                                }),
                 decoys.end());
    return decoys.size() == 1 ? decoys.front() : nullptr;
  };

  for (int emitted = 0; emitted < length; ++emitted) {
    struct Option {
      ScenarioStep step;
      std::function<void()> apply;
    };
    std::vector<Option> options;

    const bool linked_here =
        location != kExternalAccessor && loc_alarms[environment.location_of(location)] == 1 &&
        footprint_of_last.count(environment.location_of(location)) > 0;

    // probe: either the very first alarm (from outside) or a remote hop from
    // a location holding exactly the previous alarm.
    if (location == kExternalAccessor ? !any_alarm : linked_here) {
      for (const auto& [tid, t] : environment.targets()) {
        if (environment.location_of(tid) == environment.location_of(location)) continue;
        if (loc_alarms.count(environment.location_of(tid)) &&
            loc_alarms[environment.location_of(tid)] > 0)
          continue;  // never revisit an alarmed site
        const dm::Placement* decoy = single_active_decoy(tid);
        if (!decoy) continue;
        if (environment.has_target(decoy->target_id) &&
            environment.target(decoy->target_id).kind == TargetKind::DecoyHost)
          continue;  // ssh decoys are entered with their key, not probed
        ScenarioStep s;
        s.kind = StepKind::Probe;
        s.target = tid;
        std::string pid = decoy->id;
        std::string placement_target = decoy->target_id;
        options.push_back({s, [&, tid, pid, placement_target]() {
                             std::set<std::string> fp{environment.location_of(placement_target)};
                             if (location != kExternalAccessor)
                               fp.insert(environment.location_of(location));
                             bump(fp);
                             ++target_alarms[placement_target];
                             used_placements.insert(pid);
                             footprint_of_last = fp;
                             any_alarm = true;
                             pending.reset();
                             location = environment.location_of(tid);
                           }});
      }
    }

    // harvest: local lure pickup right after arriving somewhere.
    if (linked_here && !pending) {
      for (const auto& [tid, t] : environment.targets()) {
        if (environment.location_of(tid) != environment.location_of(location)) continue;
        auto lures = placements_on_target(registry, tid, ComponentRole::Lure);
        lures.erase(std::remove_if(lures.begin(), lures.end(),
                                   [&](const dm::Placement* p) {
                                     return used_placements.count(p->id) ||
                                            !placement_alarms(registry, p->id);
                                   }),
                    lures.end());
        if (lures.size() != 1) continue;
        const dm::Placement* lure = lures.front();
        if (target_alarms.count(tid) && target_alarms[tid] > 0) continue;
        auto inst = index.instance_of_placement.find(lure->id);
        if (inst == index.instance_of_placement.end()) continue;
        const SecretInfo& info = index.by_instance.at(inst->second);
        if (info.secret.empty()) continue;
        if (used_placements.count(info.decoy_placement)) continue;
        if (!placement_alarms(registry, info.decoy_placement)) continue;
        // All of the instance's lure hosts must be alarm-free or the later
        // use-secret hop would see more than one candidate.
        bool clean = true;
        std::vector<std::string> lure_targets;
        for (const auto& lp : info.lure_placements) {
          const std::string& lt = registry.placement(lp).target_id;
          lure_targets.push_back(lt);
          if (lp != lure->id && target_alarms.count(lt) && target_alarms[lt] > 0) clean = false;
        }
        if (!clean) continue;
        ScenarioStep s;
        s.kind = StepKind::Harvest;
        s.target = tid;
        std::string pid = lure->id;
        std::string instance_id = info.instance_id;
        std::string decoy_placement = info.decoy_placement;
        options.push_back({s, [&, tid, pid, instance_id, decoy_placement, lure_targets]() {
                             std::set<std::string> fp{environment.location_of(tid)};
                             bump(fp);
                             ++target_alarms[tid];
                             used_placements.insert(pid);
                             footprint_of_last = fp;
                             any_alarm = true;
                             pending = PendingSecret{instance_id, lure_targets, decoy_placement};
                           }});
      }
    }

    // use-secret: immediately spend what the previous step harvested.
    if (pending) {
      ScenarioStep s;
      s.kind = StepKind::UseSecret;
      s.secret_ref = pending->instance_id;
      PendingSecret info = *pending;
      options.push_back({s, [&, info]() {
                           const dm::Placement& decoy = registry.placement(info.decoy_placement);
                           std::set<std::string> fp{
                               environment.location_of(decoy.target_id),
                               environment.location_of(location)};
                           bump(fp);
                           ++target_alarms[decoy.target_id];
                           used_placements.insert(info.decoy_placement);
                           footprint_of_last = fp;
                           pending.reset();
                           if (environment.has_target(decoy.target_id) &&
                               environment.target(decoy.target_id).kind == TargetKind::DecoyHost)
                             location = decoy.target_id;
                         }});
    }

    std::optional<Option> chosen;
    // When the remaining budget barely fits a first secret use, stop
    // rolling dice and push the chain forward.
    const int remaining = length - emitted;
    if (!used_secret_emitted && !options.empty() && remaining <= 3) {
      auto preferred = [&](StepKind kind) -> std::optional<Option> {
        std::vector<Option> subset;
        for (const auto& o : options)
          if (o.step.kind == kind) subset.push_back(o);
        if (subset.empty()) return std::nullopt;
        return subset[rng.below(subset.size())];
      };
      chosen = preferred(StepKind::UseSecret);
      if (!chosen) chosen = preferred(StepKind::Harvest);
      if (!chosen && remaining >= 3) chosen = preferred(StepKind::Probe);
    }
    // Noise is filler: prefer chain progress with a small chance of noise
    // in between.
    if (!chosen && !options.empty() && rng.unit() >= 0.15) {
      chosen = options[rng.below(options.size())];
    }
    if (!chosen) {
      ScenarioStep s;
      s.kind = StepKind::Noise;
      s.count = static_cast<int>(rng.range(1, 3));
      chosen = Option{s, []() {}};
    }
    if (chosen->step.kind == StepKind::UseSecret) used_secret_emitted = true;

    chosen->step.at = at;
    scenario.steps.push_back(chosen->step);
    chosen->apply();
    at += 100;
  }

  return scenario;
}

}  // namespace tripwire::adversary

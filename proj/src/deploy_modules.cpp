#include "tripwire/deploy_modules.hpp"

#include <algorithm>

namespace tripwire::dm {

std::string DeployModuleRegistry::register_module(const DeployModuleDescriptor& descriptor) {
  if (descriptor.id.empty()) throw Error("deploy-modules", "deploy module has empty id");
  if (modules_.count(descriptor.id))
    throw Error("deploy-modules", "duplicate deploy module id '" + descriptor.id + "'");
  modules_.emplace(descriptor.id, descriptor);
  return descriptor.id;
}

const DeployModuleDescriptor& DeployModuleRegistry::module(const std::string& dm_id) const {
  auto it = modules_.find(dm_id);
  if (it == modules_.end()) throw Error("deploy-modules", "unknown deploy module '" + dm_id + "'");
  return it->second;
}

std::vector<std::string> DeployModuleRegistry::module_ids() const {
  std::vector<std::string> ids;
  ids.reserve(modules_.size());
  for (const auto& [id, m] : modules_) ids.push_back(id);
  return ids;
}

bool DeployModuleRegistry::eligible(const DeployModuleDescriptor& descriptor,
                                    const env::Target& target) const {
  return descriptor.target_selector.matches(target) &&
         target.capabilities.count(descriptor.capability) > 0;
}

std::vector<DeployModuleRegistry::QueryEntry> DeployModuleRegistry::query(
    Capability capability, const env::Environment& environment) const {
  std::vector<QueryEntry> out;
  for (const auto& [id, descriptor] : modules_) {  // std::map keeps dm-id order stable
    if (descriptor.capability != capability) continue;
    QueryEntry entry;
    entry.dm_id = id;
    for (const auto& [tid, target] : environment.targets()) {
      if (eligible(descriptor, target)) entry.eligible_targets.push_back(tid);
    }
    out.push_back(std::move(entry));
  }
  return out;
}

DeployResult DeployModuleRegistry::deploy(const std::string& dm_id,
                                          const pool::TripwireInstance& instance,
                                          const pool::TripwireDefinition& definition,
                                          ComponentRole role, const std::string& target_id,
                                          const std::string& payload,
                                          const env::Environment& environment, TimeMs now) {
  const DeployModuleDescriptor& descriptor = module(dm_id);

  bool capability_ok = false;
  if (role == ComponentRole::Decoy) {
    capability_ok = descriptor.capability == definition.decoy_role.capability;
  } else {
    for (const auto& lure : definition.lure_roles)
      capability_ok = capability_ok || descriptor.capability == lure.capability;
  }
  if (!capability_ok)
    throw Error("deploy-modules", "capability mismatch: dm '" + dm_id + "' cannot deploy the " +
                                      std::string(role_name(role)) + " role of '" +
                                      definition.id + "'");

  if (!environment.has_target(target_id))
    throw Error("deploy-modules", "target '" + target_id + "' does not exist");
  const env::Target& target = environment.target(target_id);
  if (!eligible(descriptor, target))
    throw Error("deploy-modules",
                "target '" + target_id + "' not eligible for dm '" + dm_id + "'");

  DeployResult result;
  Placement p;
  p.id = "p-" + std::to_string(++placement_serial_);
  p.dm_id = dm_id;
  p.tripwire_instance_id = instance.instance_id;
  p.role = role;
  p.payload = payload;
  p.created_at = now;
  p.active = true;

  if (descriptor.capability == Capability::CreateSshDecoy && role == ComponentRole::Decoy) {
    // The DM creates a concrete decoy host anchored next to the selected
    // target; the placement lives on the new target.
    env::Target decoy_host;
    decoy_host.id = "decoy-" + instance.instance_id;
    decoy_host.kind = TargetKind::DecoyHost;
    result.created_target = decoy_host;
    p.target_id = decoy_host.id;
  } else {
    p.target_id = target_id;
  }

  placements_.emplace(p.id, p);
  result.placement = p;
  return result;
}

void DeployModuleRegistry::retract(const std::string& placement_id) {
  auto it = placements_.find(placement_id);
  if (it == placements_.end())
    throw Error("deploy-modules", "unknown placement '" + placement_id + "'");
  it->second.active = false;
}

std::optional<RawAlarm> DeployModuleRegistry::observe_access(const AccessEvent& event) const {
  auto it = placements_.find(event.placement_id);
  if (it == placements_.end()) {
    ++dropped_accesses_;
    return std::nullopt;
  }
  const Placement& p = it->second;
  const DeployModuleDescriptor& descriptor = module(p.dm_id);
  if (!p.active || !descriptor.alarm_capable) {
    ++dropped_accesses_;
    return std::nullopt;
  }
  RawAlarm alarm;
  alarm.placement_id = p.id;
  alarm.dm_id = p.dm_id;
  alarm.accessor = event.accessor;
  alarm.observables = event.observables;
  alarm.timestamp = event.timestamp;
  return alarm;
}

const Placement& DeployModuleRegistry::placement(const std::string& id) const {
  auto it = placements_.find(id);
  if (it == placements_.end()) throw Error("deploy-modules", "unknown placement '" + id + "'");
  return it->second;
}

std::map<std::string, std::string> DeployModuleRegistry::active_placement_targets() const {
  std::map<std::string, std::string> out;
  for (const auto& [id, p] : placements_) {
    if (p.active) out.emplace(id, p.target_id);
  }
  return out;
}

}  // namespace tripwire::dm

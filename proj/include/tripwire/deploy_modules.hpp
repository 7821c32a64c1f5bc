#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tripwire/environment.hpp"
#include "tripwire/tripwire_pool.hpp"
#include "tripwire/types.hpp"

namespace tripwire::dm {

/// Selector over environment targets: either an explicit id list or a kind
/// filter. A selector may match nothing today and something after the next
/// host-added event.
struct TargetSelector {
  std::vector<std::string> ids;            // empty unless id-based
  std::optional<TargetKind> kind_filter;   // set for kind-based selectors

  bool matches(const env::Target& t) const {
    if (kind_filter) return t.kind == *kind_filter;
    for (const auto& id : ids)
      if (id == t.id) return true;
    return false;
  }
};

struct DeployModuleDescriptor {
  std::string id;
  Capability capability = Capability::InjectFileToken;
  TargetSelector target_selector;
  bool alarm_capable = true;
};

struct Placement {
  std::string id;
  std::string dm_id;
  std::string tripwire_instance_id;
  ComponentRole role = ComponentRole::Lure;
  std::string target_id;
  std::string payload;
  TimeMs created_at = 0;
  bool active = true;
};

struct AccessEvent {
  std::string placement_id;
  std::string accessor;  // acting target/host id, or "external"
  std::map<std::string, std::string> observables;  // "secret" present when one was shown
  TimeMs timestamp = 0;
};

struct RawAlarm {
  std::string placement_id;
  std::string dm_id;
  std::string accessor;
  std::map<std::string, std::string> observables;
  TimeMs timestamp = 0;
};

struct DeployResult {
  Placement placement;
  // create-* capabilities materialize a concrete decoy instance which then
  // becomes a target of its own.
  std::optional<env::Target> created_target;
};

/// DM registry plus the placement table the rest of the system keys on.
class DeployModuleRegistry {
 public:
  std::string register_module(const DeployModuleDescriptor& descriptor);
  bool has_module(const std::string& dm_id) const { return modules_.count(dm_id) > 0; }
  const DeployModuleDescriptor& module(const std::string& dm_id) const;
  std::size_t module_count() const { return modules_.size(); }
  std::vector<std::string> module_ids() const;

  struct QueryEntry {
    std::string dm_id;
    std::vector<std::string> eligible_targets;
  };
  /// All DMs holding `capability` with their currently eligible targets
  /// (selector hit, target exists, target supports the capability).
  std::vector<QueryEntry> query(Capability capability, const env::Environment& environment) const;

  bool eligible(const DeployModuleDescriptor& descriptor, const env::Target& target) const;

  DeployResult deploy(const std::string& dm_id, const pool::TripwireInstance& instance,
                      const pool::TripwireDefinition& definition, ComponentRole role,
                      const std::string& target_id, const std::string& payload,
                      const env::Environment& environment, TimeMs now);

  /// Idempotent on already-inactive placements.
  void retract(const std::string& placement_id);

  std::optional<RawAlarm> observe_access(const AccessEvent& event) const;

  bool has_placement(const std::string& id) const { return placements_.count(id) > 0; }
  const Placement& placement(const std::string& id) const;
  const std::map<std::string, Placement>& placements() const { return placements_; }
  std::map<std::string, std::string> active_placement_targets() const;

  /// Accesses that hit retracted or non-alarming placements, kept for audit.
  std::int64_t dropped_accesses() const { return dropped_accesses_; }

 private:
  std::map<std::string, DeployModuleDescriptor> modules_;
  std::map<std::string, Placement> placements_;
  int placement_serial_ = 0;
  mutable std::int64_t dropped_accesses_ = 0;
};

}  // namespace tripwire::dm

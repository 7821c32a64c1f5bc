#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tripwire/types.hpp"

namespace tripwire::env {

struct TargetSpec {
  std::string id;
  TargetKind kind = TargetKind::Process;
  std::vector<Capability> capabilities;
};

struct HostSpec {
  std::string id;
  std::vector<TargetSpec> targets;
};

struct CloudServiceSpec {
  std::string id;
  std::vector<Capability> capabilities;
};

struct EnvironmentSpec {
  std::vector<HostSpec> hosts;
  std::vector<CloudServiceSpec> cloud_services;
  std::vector<std::pair<std::string, std::string>> reachability;
};

struct Target {
  std::string id;
  TargetKind kind = TargetKind::Process;
  std::set<Capability> capabilities;
  std::optional<std::string> parent_host;
};

enum class EventKind { AppRedeployed, HostAdded, HostRemoved };

inline const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::AppRedeployed: return "app-redeployed";
    case EventKind::HostAdded: return "host-added";
    case EventKind::HostRemoved: return "host-removed";
  }
  return "unknown";
}

inline EventKind parse_event_kind(const std::string& name) {
  if (name == "app-redeployed") return EventKind::AppRedeployed;
  if (name == "host-added") return EventKind::HostAdded;
  if (name == "host-removed") return EventKind::HostRemoved;
  throw Error("environment", "unknown event kind '" + name + "'");
}

struct EnvironmentEvent {
  EventKind kind = EventKind::AppRedeployed;
  std::string target_id;
  TimeMs timestamp = 0;
  std::optional<HostSpec> host;  // declared targets for host-added
};

/// Immutable snapshot of the modeled cloud environment. apply_event returns
/// a new value; snapshots already handed out never change.
class Environment {
 public:
  Environment() = default;

  static Environment build(const EnvironmentSpec& spec);

  bool has_target(const std::string& id) const { return targets_.count(id) > 0; }
  const Target& target(const std::string& id) const;
  const std::map<std::string, Target>& targets() const { return targets_; }
  const std::set<std::string>& hosts() const { return hosts_; }
  const std::set<std::pair<std::string, std::string>>& reachability() const { return reachability_; }

  /// Location of an id for tracking purposes: a target with a parent host
  /// resolves to that host; hosts, cloud services, decoy hosts and
  /// "external" resolve to themselves.
  std::string location_of(const std::string& id) const;

  bool reachable(const std::string& from, const std::string& to) const;

  std::vector<std::pair<std::string, Capability>> injection_points() const;

  /// Targets that can receive a deceptive component (non-empty capability set).
  std::set<std::string> injectable_targets() const;

  /// Used by deploy modules that create concrete decoy instances.
  Environment with_runtime_target(const Target& t) const;

  struct ApplyResult {
    Environment environment;
    std::vector<std::string> invalidated_placements;
  };

  /// `placements` maps active placement id -> hosting target id; the event
  /// decides which of them die with the change.
  ApplyResult apply_event(const EnvironmentEvent& event,
                          const std::map<std::string, std::string>& placements) const;

 private:
  void insert_target(Target t);

  std::map<std::string, Target> targets_;
  std::set<std::string> hosts_;
  std::set<std::pair<std::string, std::string>> reachability_;
};

}  // namespace tripwire::env

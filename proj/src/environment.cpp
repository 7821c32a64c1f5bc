#include "tripwire/environment.hpp"

#include <algorithm>

namespace tripwire::env {

namespace {

Target make_target(const TargetSpec& spec, const std::optional<std::string>& parent) {
  Target t;
  t.id = spec.id;
  t.kind = spec.kind;
  t.capabilities.insert(spec.capabilities.begin(), spec.capabilities.end());
  t.parent_host = parent;
  if (t.kind == TargetKind::Process && !t.parent_host)
    throw Error("environment", "process target '" + t.id + "' has no parent host");
  return t;
}

}  // namespace

void Environment::insert_target(Target t) {
  if (targets_.count(t.id) || hosts_.count(t.id))
    throw Error("environment", "duplicate target id '" + t.id + "'");
  targets_.emplace(t.id, std::move(t));
}

Environment Environment::build(const EnvironmentSpec& spec) {
  Environment e;
  for (const auto& host : spec.hosts) {
    if (e.hosts_.count(host.id) || e.targets_.count(host.id))
      throw Error("environment", "duplicate target id '" + host.id + "'");
    e.hosts_.insert(host.id);
    for (const auto& ts : host.targets) e.insert_target(make_target(ts, host.id));
  }
  for (const auto& svc : spec.cloud_services) {
    TargetSpec ts{svc.id, TargetKind::CloudService, svc.capabilities};
    e.insert_target(make_target(ts, std::nullopt));
  }
  for (const auto& [from, to] : spec.reachability) {
    for (const auto& endpoint : {from, to}) {
      if (!e.targets_.count(endpoint) && !e.hosts_.count(endpoint))
        throw Error("environment", "reachability references unknown target '" + endpoint + "'");
    }
    e.reachability_.emplace(from, to);
  }
  return e;
}

const Target& Environment::target(const std::string& id) const {
  auto it = targets_.find(id);
  if (it == targets_.end()) throw Error("environment", "unknown target '" + id + "'");
  return it->second;
}

std::string Environment::location_of(const std::string& id) const {
  auto it = targets_.find(id);
  if (it != targets_.end() && it->second.parent_host) return *it->second.parent_host;
  return id;
}

bool Environment::reachable(const std::string& from, const std::string& to) const {
  if (reachability_.count({from, to})) return true;
  // Reachability pairs are declared on targets; pivots happen between
  // locations, so compare at host granularity as well.
  const std::string lf = location_of(from);
  const std::string lt = location_of(to);
  for (const auto& [a, b] : reachability_) {
    if (location_of(a) == lf && location_of(b) == lt) return true;
  }
  return false;
}

std::vector<std::pair<std::string, Capability>> Environment::injection_points() const {
  std::vector<std::pair<std::string, Capability>> points;
  for (const auto& [id, t] : targets_) {
    for (Capability c : t.capabilities) points.emplace_back(id, c);
  }
  std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return std::string(capability_name(a.second)) < capability_name(b.second);
  });
  return points;
}

std::set<std::string> Environment::injectable_targets() const {
  std::set<std::string> out;
  for (const auto& [id, t] : targets_) {
    if (!t.capabilities.empty()) out.insert(id);
  }
  return out;
}

Environment Environment::with_runtime_target(const Target& t) const {
  Environment e = *this;
  e.insert_target(t);
  return e;
}

Environment::ApplyResult Environment::apply_event(
    const EnvironmentEvent& event, const std::map<std::string, std::string>& placements) const {
  ApplyResult result;
  result.environment = *this;
  auto invalidate_on = [&](const std::set<std::string>& dead_targets) {
    for (const auto& [pid, tid] : placements) {
      if (dead_targets.count(tid)) result.invalidated_placements.push_back(pid);
    }
  };

  switch (event.kind) {
    case EventKind::AppRedeployed: {
      const Target& t = target(event.target_id);  // throws on unknown target
      if (t.kind != TargetKind::Process)
        throw Error("environment", "app-redeployed targets non-process '" + event.target_id + "'");
      // Fresh container image: everything injected into the process is gone.
      invalidate_on({event.target_id});
      break;
    }
    case EventKind::HostAdded: {
      if (!event.host) throw Error("environment", "host-added event carries no host spec");
      const HostSpec& spec = *event.host;
      if (result.environment.hosts_.count(spec.id) || result.environment.targets_.count(spec.id))
        throw Error("environment", "duplicate target id '" + spec.id + "'");
      result.environment.hosts_.insert(spec.id);
      for (const auto& ts : spec.targets)
        result.environment.insert_target(make_target(ts, spec.id));
      break;
    }
    case EventKind::HostRemoved: {
      if (!hosts_.count(event.target_id))
        throw Error("environment", "unknown host '" + event.target_id + "'");
      std::set<std::string> dead;
      for (const auto& [id, t] : targets_) {
        if (t.parent_host == event.target_id) dead.insert(id);
      }
      invalidate_on(dead);
      result.environment.hosts_.erase(event.target_id);
      for (const auto& id : dead) result.environment.targets_.erase(id);
      // Reachability entries naming removed ids become inert; historical
      // alarms keep referencing the removed ids.
      break;
    }
  }
  std::sort(result.invalidated_placements.begin(), result.invalidated_placements.end());
  return result;
}

}  // namespace tripwire::env

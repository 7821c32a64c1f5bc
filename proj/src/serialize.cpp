#include "tripwire/serialize.hpp"

#include <fstream>
#include <sstream>

namespace tripwire::io {

using nlohmann::json;

namespace {

json parse_text(const std::string& text, const char* stage) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(stage, std::string("document does not parse: ") + e.what());
  }
}

std::vector<Capability> parse_capabilities(const json& j) {
  std::vector<Capability> out;
  for (const auto& name : j) out.push_back(parse_capability(name.get<std::string>()));
  return out;
}

}  // namespace

env::EnvironmentSpec parse_environment_spec(const std::string& text) {
  json doc = parse_text(text, "environment");
  env::EnvironmentSpec spec;
  try {
    for (const auto& jh : doc.value("hosts", json::array())) {
      env::HostSpec host;
      host.id = jh.at("id").get<std::string>();
      for (const auto& jt : jh.value("targets", json::array())) {
        env::TargetSpec target;
        target.id = jt.at("id").get<std::string>();
        target.kind = parse_target_kind(jt.at("kind").get<std::string>());
        target.capabilities = parse_capabilities(jt.value("capabilities", json::array()));
        host.targets.push_back(target);
      }
      spec.hosts.push_back(host);
    }
    for (const auto& js : doc.value("cloud_services", json::array())) {
      env::CloudServiceSpec svc;
      svc.id = js.at("id").get<std::string>();
      svc.capabilities = parse_capabilities(js.value("capabilities", json::array()));
      spec.cloud_services.push_back(svc);
    }
    for (const auto& jr : doc.value("reachability", json::array())) {
      spec.reachability.emplace_back(jr.at(0).get<std::string>(), jr.at(1).get<std::string>());
    }
  } catch (const json::exception& e) {
    throw Error("environment", std::string("invalid spec: ") + e.what());
  }
  return spec;
}

namespace {

pool::RoleSpec parse_role_spec(const json& j) {
  pool::RoleSpec role;
  role.role = parse_role(j.at("role").get<std::string>());
  role.capability = parse_capability(j.at("capability").get<std::string>());
  role.min_placements = j.value("min_placements", 1);
  role.max_placements = j.value("max_placements", role.min_placements);
  return role;
}

json role_spec_to_json(const pool::RoleSpec& role) {
  return json{{"role", role_name(role.role)},
              {"capability", capability_name(role.capability)},
              {"min_placements", role.min_placements},
              {"max_placements", role.max_placements}};
}

}  // namespace

std::vector<pool::TripwireDefinition> parse_catalog(const std::string& text) {
  json doc = parse_text(text, "tripwire-pool");
  std::vector<pool::TripwireDefinition> defs;
  try {
    for (const auto& jd : doc.value("definitions", json::array())) {
      pool::TripwireDefinition def;
      def.id = jd.at("id").get<std::string>();
      def.name = jd.value("name", def.id);
      def.decoy_role = parse_role_spec(jd.at("decoy_role"));
      for (const auto& jl : jd.value("lure_roles", json::array()))
        def.lure_roles.push_back(parse_role_spec(jl));
      def.secret_kind = pool::parse_secret_kind(jd.value("secret_kind", "none"));
      def.description = jd.value("description", "");
      defs.push_back(def);
    }
  } catch (const json::exception& e) {
    throw Error("tripwire-pool", std::string("invalid catalog: ") + e.what());
  }
  return defs;
}

std::string serialize_catalog(const std::vector<pool::TripwireDefinition>& definitions) {
  json out = json::array();
  for (const auto& def : definitions) {
    json lures = json::array();
    for (const auto& lure : def.lure_roles) lures.push_back(role_spec_to_json(lure));
    out.push_back(json{{"id", def.id},
                       {"name", def.name},
                       {"decoy_role", role_spec_to_json(def.decoy_role)},
                       {"lure_roles", lures},
                       {"secret_kind", pool::secret_kind_name(def.secret_kind)},
                       {"description", def.description}});
  }
  return json{{"definitions", out}}.dump(2);
}

adversary::Scenario parse_scenario(const std::string& text) {
  json doc = parse_text(text, "adversary");
  adversary::Scenario scenario;
  try {
    for (const auto& js : doc.value("steps", json::array())) {
      adversary::ScenarioStep step;
      step.kind = adversary::parse_step_kind(js.at("kind").get<std::string>());
      step.target = js.value("target", "");
      step.secret_ref = js.value("secret_ref", "");
      step.from = js.value("from", "");
      step.to = js.value("to", "");
      step.count = js.value("count", 0);
      step.at = js.at("at").get<TimeMs>();
      scenario.steps.push_back(step);
    }
  } catch (const json::exception& e) {
    throw Error("adversary", std::string("invalid scenario: ") + e.what());
  }
  return scenario;
}

std::vector<env::EnvironmentEvent> parse_scenario_events(const std::string& text) {
  json doc = parse_text(text, "adversary");
  std::vector<env::EnvironmentEvent> events;
  try {
    for (const auto& je : doc.value("events", json::array())) {
      env::EnvironmentEvent event = parse_environment_event(je);
      events.push_back(event);
    }
  } catch (const json::exception& e) {
    throw Error("environment", std::string("invalid events: ") + e.what());
  }
  return events;
}

std::string serialize_scenario(const adversary::Scenario& scenario) {
  json steps = json::array();
  for (const auto& s : scenario.steps) {
    json js{{"kind", adversary::step_kind_name(s.kind)}, {"at", s.at}};
    if (!s.target.empty()) js["target"] = s.target;
    if (!s.secret_ref.empty()) js["secret_ref"] = s.secret_ref;
    if (!s.from.empty()) js["from"] = s.from;
    if (!s.to.empty()) js["to"] = s.to;
    if (s.count > 0) js["count"] = s.count;
    steps.push_back(js);
  }
  return json{{"steps", steps}}.dump(2);
}

dm::DeployModuleDescriptor parse_deploy_module(const json& j) {
  dm::DeployModuleDescriptor d;
  try {
    d.id = j.at("id").get<std::string>();
    d.capability = parse_capability(j.at("capability").get<std::string>());
    const json& selector = j.at("target_selector");
    if (selector.contains("kind")) {
      d.target_selector.kind_filter = parse_target_kind(selector.at("kind").get<std::string>());
    } else {
      d.target_selector.ids = selector.value("ids", std::vector<std::string>{});
    }
    d.alarm_capable = j.value("alarm_capable", true);
  } catch (const json::exception& e) {
    throw Error("deploy-modules", std::string("invalid descriptor: ") + e.what());
  }
  return d;
}

json deploy_module_to_json(const dm::DeployModuleDescriptor& descriptor) {
  json selector;
  if (descriptor.target_selector.kind_filter) {
    selector["kind"] = target_kind_name(*descriptor.target_selector.kind_filter);
  } else {
    selector["ids"] = descriptor.target_selector.ids;
  }
  return json{{"id", descriptor.id},
              {"capability", capability_name(descriptor.capability)},
              {"target_selector", selector},
              {"alarm_capable", descriptor.alarm_capable}};
}

dm::RawAlarm parse_raw_alarm(const json& j) {
  dm::RawAlarm raw;
  try {
    raw.placement_id = j.at("placement_id").get<std::string>();
    raw.dm_id = j.value("dm_id", "");
    raw.accessor = j.at("accessor").get<std::string>();
    if (j.contains("observables"))
      raw.observables = j.at("observables").get<std::map<std::string, std::string>>();
    raw.timestamp = j.at("timestamp").get<TimeMs>();
  } catch (const json::exception& e) {
    throw Error("alarm-store", std::string("invalid raw alarm: ") + e.what());
  }
  return raw;
}

json raw_alarm_to_json(const dm::RawAlarm& raw) {
  return json{{"placement_id", raw.placement_id},
              {"dm_id", raw.dm_id},
              {"accessor", raw.accessor},
              {"observables", raw.observables},
              {"timestamp", raw.timestamp}};
}

json condensed_alarm_to_json(const alarms::CondensedAlarm& alarm) {
  return json{{"alarm_id", alarm.alarm_id},
              {"placement_id", alarm.placement_id},
              {"accessor", alarm.accessor},
              {"time_bucket", alarm.time_bucket},
              {"count", alarm.count},
              {"first_ts", alarm.first_ts},
              {"last_ts", alarm.last_ts},
              {"observables", alarm.observables}};
}

env::EnvironmentEvent parse_environment_event(const json& j) {
  env::EnvironmentEvent event;
  try {
    event.kind = env::parse_event_kind(j.at("kind").get<std::string>());
    event.target_id = j.at("target_id").get<std::string>();
    event.timestamp = j.contains("at") ? j.at("at").get<TimeMs>()
                                       : j.value("timestamp", static_cast<TimeMs>(0));
    if (j.contains("host")) {
      env::HostSpec host;
      const json& jh = j.at("host");
      host.id = jh.at("id").get<std::string>();
      for (const auto& jt : jh.value("targets", json::array())) {
        env::TargetSpec target;
        target.id = jt.at("id").get<std::string>();
        target.kind = parse_target_kind(jt.at("kind").get<std::string>());
        target.capabilities = parse_capabilities(jt.value("capabilities", json::array()));
        host.targets.push_back(target);
      }
      event.host = host;
    }
  } catch (const json::exception& e) {
    throw Error("environment", std::string("invalid event: ") + e.what());
  }
  return event;
}

json plan_to_json(const ctl::DeploymentPlan& plan) {
  json actions = json::array();
  for (const auto& a : plan.actions) {
    json ja{{"definition_id", a.definition_id},
            {"role", role_name(a.role)},
            {"dm_id", a.dm_id},
            {"target_id", a.target_id}};
    if (!a.instance_id.empty()) ja["instance_id"] = a.instance_id;
    actions.push_back(ja);
  }
  return json{{"actions", actions},
              {"budget",
               {{"max_components_per_target", plan.budget.max_components_per_target},
                {"max_instances_per_definition", plan.budget.max_instances_per_definition}}}};
}

json coverage_to_json(const ctl::CoverageReport& report) {
  return json{{"covered_targets", report.covered_targets},
              {"injectable_targets", report.injectable_targets},
              {"ratio", report.ratio}};
}

json path_to_json(const recon::AttackPath& path) {
  json edges = json::array();
  for (const auto& e : path.hop_edges)
    edges.push_back(json{{"from", e.from}, {"to", e.to}, {"via", e.via}});
  return json{{"hops", path.hops}, {"edges", edges}, {"score", path.score}, {"root", path.root}};
}

json metrics_to_json(const recon::EvaluationMetrics& metrics) {
  return json{{"precision", metrics.precision},
              {"recall", metrics.recall},
              {"f1", metrics.f1},
              {"top1_exact", metrics.top1_exact},
              {"truth_edges", metrics.truth_edge_count},
              {"reconstructed_edges", metrics.reconstructed_edge_count},
              {"matched_edges", metrics.matched_edge_count}};
}

std::string export_graph(const ag::AttackGraph& graph, const std::string& format) {
  if (format == "dot") return graph.export_dot();
  if (format == "json") return graph.export_json();
  throw Error("attack-graph", "unsupported export format '" + format + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io", "cannot write '" + path + "'");
  out << content;
}

}  // namespace tripwire::io

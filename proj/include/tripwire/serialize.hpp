#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "tripwire/adversary.hpp"
#include "tripwire/alarm_store.hpp"
#include "tripwire/attack_graph.hpp"
#include "tripwire/controller.hpp"
#include "tripwire/environment.hpp"
#include "tripwire/reconstruction.hpp"
#include "tripwire/tripwire_pool.hpp"

// JSON codecs for every external document: environment specs, tripwire
// catalogs, scenarios, deploy module descriptors, alarms, plans and report
// fragments. Field names are part of the wire contract.
namespace tripwire::io {

env::EnvironmentSpec parse_environment_spec(const std::string& text);

std::vector<pool::TripwireDefinition> parse_catalog(const std::string& text);
std::string serialize_catalog(const std::vector<pool::TripwireDefinition>& definitions);

adversary::Scenario parse_scenario(const std::string& text);
std::vector<env::EnvironmentEvent> parse_scenario_events(const std::string& text);
std::string serialize_scenario(const adversary::Scenario& scenario);

dm::DeployModuleDescriptor parse_deploy_module(const nlohmann::json& j);
nlohmann::json deploy_module_to_json(const dm::DeployModuleDescriptor& descriptor);

dm::RawAlarm parse_raw_alarm(const nlohmann::json& j);
nlohmann::json raw_alarm_to_json(const dm::RawAlarm& raw);
nlohmann::json condensed_alarm_to_json(const alarms::CondensedAlarm& alarm);

env::EnvironmentEvent parse_environment_event(const nlohmann::json& j);

nlohmann::json plan_to_json(const ctl::DeploymentPlan& plan);
nlohmann::json coverage_to_json(const ctl::CoverageReport& report);
nlohmann::json path_to_json(const recon::AttackPath& path);
nlohmann::json metrics_to_json(const recon::EvaluationMetrics& metrics);

/// format is "dot" or "json"; anything else is an error.
std::string export_graph(const ag::AttackGraph& graph, const std::string& format);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace tripwire::io

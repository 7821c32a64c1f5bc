#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tripwire/deploy_modules.hpp"
#include "tripwire/environment.hpp"
#include "tripwire/types.hpp"

namespace tripwire::adversary {

enum class StepKind { Probe, Compromise, Harvest, UseSecret, Pivot, Noise };

inline const char* step_kind_name(StepKind k) {
  switch (k) {
    case StepKind::Probe: return "probe";
    case StepKind::Compromise: return "compromise";
    case StepKind::Harvest: return "harvest";
    case StepKind::UseSecret: return "use-secret";
    case StepKind::Pivot: return "pivot";
    case StepKind::Noise: return "noise";
  }
  return "unknown";
}

inline StepKind parse_step_kind(const std::string& name) {
  if (name == "probe") return StepKind::Probe;
  if (name == "compromise") return StepKind::Compromise;
  if (name == "harvest") return StepKind::Harvest;
  if (name == "use-secret") return StepKind::UseSecret;
  if (name == "pivot") return StepKind::Pivot;
  if (name == "noise") return StepKind::Noise;
  throw Error("adversary", "unknown step kind '" + name + "'");
}

struct ScenarioStep {
  StepKind kind = StepKind::Noise;
  std::string target;      // probe / compromise / harvest
  std::string secret_ref;  // use-secret: instance id or "$<n>" harvest ordinal
  std::string from;        // pivot
  std::string to;          // pivot
  int count = 0;           // noise
  TimeMs at = 0;
};

struct Scenario {
  std::vector<ScenarioStep> steps;
};

/// What the simulated attacker can stumble into: one deployed tripwire
/// instance with its linking secret.
struct DeployedTripwire {
  std::string instance_id;
  std::string secret;
  std::string decoy_placement;
  std::vector<std::string> lure_placements;
};

struct TouchRecord {
  std::string placement_id;
  std::string accessor;
  TimeMs timestamp = 0;
  bool alarming = false;  // placement active and its DM alarm-capable
};

struct TraceStep {
  int step_index = 0;
  std::vector<TouchRecord> touches;
};

/// The evaluation oracle: what the adversary actually did, which alarms it
/// caused, and the causal edges that are observable in principle.
struct GroundTruthTrace {
  std::vector<TraceStep> steps;
  std::vector<int> alarm_steps;  // indices of alarm-producing steps, in order
  std::vector<std::pair<int, int>> causal_edges;  // (earlier, later) step indices
  std::vector<dm::RawAlarm> forged;  // labeled-false injections, not part of truth
};

struct RunResult {
  std::vector<dm::AccessEvent> events;
  GroundTruthTrace trace;
};

struct NoiseConfig {
  int forged_count = 0;
  TimeMs horizon_ms = 0;  // forged timestamps sampled uniformly over [0, horizon]
  std::uint64_t seed = 0;
};

/// Replays a scripted multi-step attack over the deployed tripwires.
/// Deterministic per (inputs, seed); access events are returned in time
/// order together with the ground-truth trace.
RunResult run_scenario(const env::Environment& environment,
                       const dm::DeployModuleRegistry& registry,
                       const std::vector<DeployedTripwire>& tripwires, const Scenario& scenario,
                       const NoiseConfig& noise = {});

/// Seeded scenario sampler. Generated scenarios always validate, respect
/// harvest-before-use and leave a reconstructible single-chain footprint;
/// steps are spaced 100 ms apart starting at `start_at`.
Scenario generate_random_scenario(const env::Environment& environment,
                                  const dm::DeployModuleRegistry& registry,
                                  const std::vector<DeployedTripwire>& tripwires, int length,
                                  std::uint64_t seed, TimeMs start_at = 100);

}  // namespace tripwire::adversary

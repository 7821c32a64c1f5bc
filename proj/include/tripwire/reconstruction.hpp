#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tripwire/alarm_store.hpp"
#include "tripwire/attack_graph.hpp"
#include "tripwire/deploy_modules.hpp"
#include "tripwire/types.hpp"

namespace tripwire::recon {

struct ReconstructionConfig {
  // Max lookback per hop; <= 0 means the full run duration.
  TimeMs window_ms = 0;
  int max_depth = 16;
  int max_candidates_per_hop = 8;  // pruned by recency
};

inline const std::string kSameTargetVia = "same-target";

struct HopEdge {
  std::string from;  // earlier alarm
  std::string to;    // later alarm
  std::string via;   // lure placement id, or "same-target"
};

struct AttackPath {
  std::vector<std::string> hops;  // alarm ids with strictly increasing timestamps
  std::vector<HopEdge> hop_edges;
  double score = 1.0;  // product of per-hop confidences, in (0, 1]
  std::string root;    // alarm the backward tracking started from
};

struct ForwardHit {
  std::string alarm_id;
  std::string via;
};

/// Read-only tracking over an alarm-store/attack-graph snapshot.
///
/// Backward expansion of an alarm: a decoy alarm first follows the graph's
/// UNLOCKS edges to its lures and collects earlier alarms on the lure hosts;
/// when that route is empty (or the alarm is not on a decoy) it falls back
/// to earlier alarms tied to the location the access came from. Hop
/// confidence is 1/k over the k candidates considered at the expansion.
class Tracker {
 public:
  Tracker(const alarms::AlarmStore& store, const ag::AttackGraph& graph,
          const dm::DeployModuleRegistry& registry,
          std::map<std::string, std::string> locations, ReconstructionConfig config);

  struct Candidate {
    std::string alarm_id;
    std::string via;
  };

  /// Predecessor candidates of one alarm, pruned to the most recent
  /// max_candidates_per_hop, ordered oldest first.
  std::vector<Candidate> candidates_of(const std::string& alarm_id) const;

  std::vector<AttackPath> backward_track(const std::string& alarm_id) const;

  /// Exact dual of backward candidacy, followed transitively: every alarm
  /// this alarm could be a predecessor of, directly or further down.
  std::vector<ForwardHit> forward_track(const std::string& alarm_id) const;

  /// Backward-tracks every maximal alarm (empty forward reach), drops paths
  /// that are prefixes of longer ones, ranks by (score desc, length desc,
  /// earliest start).
  std::vector<AttackPath> reconstruct_all() const;

  /// Asserts the soundness contract on an output path: lure-via edges map to
  /// existing UNLOCKS edges and hop timestamps strictly increase.
  void validate_path(const AttackPath& path) const;

 private:
  std::string location_of(const std::string& id) const;
  std::vector<Candidate> compute_candidates(const std::string& alarm_id) const;

  const alarms::AlarmStore& store_;
  const ag::AttackGraph& graph_;
  const dm::DeployModuleRegistry& registry_;
  std::map<std::string, std::string> locations_;
  ReconstructionConfig config_;
  std::vector<const alarms::CondensedAlarm*> ordered_;  // by (first_ts, id)
  mutable std::map<std::string, std::vector<Candidate>> candidate_cache_;
};

struct EvaluationMetrics {
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
  bool top1_exact = true;
  std::size_t truth_edge_count = 0;
  std::size_t reconstructed_edge_count = 0;
  std::size_t matched_edge_count = 0;
};

/// Compares reconstruction output against the ground-truth oracle. The
/// reconstructed edge set is the union of hop edges of the top-ranked
/// campaign per maximal alarm; top1-exact compares the globally top-ranked
/// campaign with the truth chain.
EvaluationMetrics evaluate(const std::vector<AttackPath>& campaigns,
                           const std::set<std::pair<std::string, std::string>>& truth_edges,
                           const std::vector<std::string>& truth_chain);

}  // namespace tripwire::recon

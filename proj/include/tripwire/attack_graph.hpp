#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tripwire/deploy_modules.hpp"
#include "tripwire/types.hpp"

namespace tripwire::ag {

enum class NodeKind { Target, LureComponent, DecoyComponent };

inline const char* node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Target: return "target";
    case NodeKind::LureComponent: return "lure-component";
    case NodeKind::DecoyComponent: return "decoy-component";
  }
  return "unknown";
}

enum class EdgeKind { PlacedOn, Unlocks };

inline const char* edge_kind_name(EdgeKind k) {
  return k == EdgeKind::PlacedOn ? "PLACED_ON" : "UNLOCKS";
}

struct AgNode {
  std::string id;    // target id or placement id
  NodeKind kind = NodeKind::Target;
  std::string ref;   // same as id; kept explicit for exports
  bool retired = false;
  // Instance membership: components carry their tripwire instance as an
  // attribute instead of a dedicated grouping node, which keeps tracking
  // queries two-hop.
  std::string instance_id;
};

struct AgEdge {
  EdgeKind kind = EdgeKind::PlacedOn;
  std::string from;
  std::string to;
  std::string instance_id;

  bool operator<(const AgEdge& other) const {
    auto key = [](const AgEdge& e) { return std::tie(e.kind, e.from, e.to, e.instance_id); };
    return key(*this) < key(other);
  }
  bool operator==(const AgEdge& other) const {
    return kind == other.kind && from == other.from && to == other.to &&
           instance_id == other.instance_id;
  }
};

struct SourceRef {
  std::string placement_id;
  bool retired = false;
};

/// Deployment topology of deceptive components: which component sits on
/// which target and which lure unlocks which decoy. Append-only; nodes are
/// retired, never deleted, so historical alarms stay reconstructible.
class AttackGraph {
 public:
  void add_target(const std::string& target_id);

  /// Adds component nodes, PLACED_ON edges and lure->decoy UNLOCKS edges for
  /// one tripwire instance. Idempotent per instance id; re-adding with a
  /// different shape is an error.
  std::vector<std::string> add_instance_subgraph(const pool::TripwireInstance& instance,
                                                 const std::vector<dm::Placement>& placements);

  /// Grows an existing instance subgraph by one lure component.
  void extend_instance(const pool::TripwireInstance& instance, const dm::Placement& lure,
                       const std::string& decoy_placement_id);

  void retire_component(const std::string& placement_id);

  bool has_node(const std::string& id) const { return nodes_.count(id) > 0; }
  const AgNode& node(const std::string& id) const;

  /// UNLOCKS predecessors of a decoy component, retired ones flagged.
  std::vector<SourceRef> unlocks_sources(const std::string& decoy_placement_id) const;

  /// PLACED_ON in-neighbors of a target node, retired ones flagged.
  std::vector<SourceRef> placements_on(const std::string& target_id) const;

  std::vector<std::string> components_of_instance(const std::string& instance_id) const;

  std::string export_dot() const;
  std::string export_json() const;
  static AttackGraph import_json(const std::string& document);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count(EdgeKind kind) const;
  const std::map<std::string, AgNode>& nodes() const { return nodes_; }
  const std::vector<AgEdge>& edges() const { return edges_; }

  /// Every edge endpoint must exist (retired allowed) and satisfy the
  /// endpoint-kind constraint of its edge kind.
  void check_consistency() const;

 private:
  void add_edge(const AgEdge& edge);

  std::map<std::string, AgNode> nodes_;
  std::vector<AgEdge> edges_;
  std::map<std::string, std::vector<AgEdge>> instance_shapes_;
};

}  // namespace tripwire::ag

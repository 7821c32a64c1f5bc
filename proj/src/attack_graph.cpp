#include "tripwire/attack_graph.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace tripwire::ag {

using nlohmann::json;

void AttackGraph::add_target(const std::string& target_id) {
  if (nodes_.count(target_id)) return;
  AgNode n;
  n.id = target_id;
  n.kind = NodeKind::Target;
  n.ref = target_id;
  nodes_.emplace(target_id, n);
}

void AttackGraph::add_edge(const AgEdge& edge) {
  const AgNode& from = node(edge.from);
  const AgNode& to = node(edge.to);
  switch (edge.kind) {
    case EdgeKind::PlacedOn:
      if (from.kind == NodeKind::Target || to.kind != NodeKind::Target)
        throw Error("attack-graph", "PLACED_ON must go component -> target");
      break;
    case EdgeKind::Unlocks:
      if (from.kind != NodeKind::LureComponent || to.kind != NodeKind::DecoyComponent)
        throw Error("attack-graph", "UNLOCKS must go lure-component -> decoy-component");
      if (from.instance_id != to.instance_id)
        throw Error("attack-graph", "UNLOCKS endpoints must share one tripwire instance");
      break;
  }
  if (std::find(edges_.begin(), edges_.end(), edge) == edges_.end()) edges_.push_back(edge);
}

std::vector<std::string> AttackGraph::add_instance_subgraph(
    const pool::TripwireInstance& instance, const std::vector<dm::Placement>& placements) {
  std::vector<AgEdge> shape;
  std::vector<std::string> node_ids;
  std::string decoy_id;
  for (const auto& p : placements) {
    if (p.tripwire_instance_id != instance.instance_id)
      throw Error("attack-graph", "placement '" + p.id + "' belongs to another instance");
    if (p.role == ComponentRole::Decoy) decoy_id = p.id;
  }
  if (decoy_id.empty())
    throw Error("attack-graph", "instance '" + instance.instance_id + "' has no decoy placement");

  for (const auto& p : placements) {
    shape.push_back({EdgeKind::PlacedOn, p.id, p.target_id, instance.instance_id});
    if (p.role == ComponentRole::Lure)
      shape.push_back({EdgeKind::Unlocks, p.id, decoy_id, instance.instance_id});
  }
  std::sort(shape.begin(), shape.end());

  auto known = instance_shapes_.find(instance.instance_id);
  if (known != instance_shapes_.end()) {
    if (known->second != shape)
      throw Error("attack-graph", "instance '" + instance.instance_id +
                                      "' re-added with a conflicting shape");
    return {};
  }

  for (const auto& p : placements) {
    add_target(p.target_id);
    AgNode n;
    n.id = p.id;
    n.kind = p.role == ComponentRole::Decoy ? NodeKind::DecoyComponent : NodeKind::LureComponent;
    n.ref = p.id;
    n.instance_id = instance.instance_id;
    nodes_.emplace(n.id, n);
    node_ids.push_back(n.id);
  }
  for (const auto& e : shape) add_edge(e);
  instance_shapes_.emplace(instance.instance_id, shape);
  return node_ids;
}

void AttackGraph::extend_instance(const pool::TripwireInstance& instance,
                                  const dm::Placement& lure,
                                  const std::string& decoy_placement_id) {
  auto shape = instance_shapes_.find(instance.instance_id);
  if (shape == instance_shapes_.end())
    throw Error("attack-graph", "unknown instance '" + instance.instance_id + "'");
  if (lure.role != ComponentRole::Lure)
    throw Error("attack-graph", "extend_instance only adds lure components");

  add_target(lure.target_id);
  AgNode n;
  n.id = lure.id;
  n.kind = NodeKind::LureComponent;
  n.ref = lure.id;
  n.instance_id = instance.instance_id;
  nodes_.emplace(n.id, n);

  AgEdge placed{EdgeKind::PlacedOn, lure.id, lure.target_id, instance.instance_id};
  AgEdge unlocks{EdgeKind::Unlocks, lure.id, decoy_placement_id, instance.instance_id};
  add_edge(placed);
  add_edge(unlocks);
  shape->second.push_back(placed);
  shape->second.push_back(unlocks);
  std::sort(shape->second.begin(), shape->second.end());
}

void AttackGraph::retire_component(const std::string& placement_id) {
  auto it = nodes_.find(placement_id);
  if (it == nodes_.end()) throw Error("attack-graph", "unknown node '" + placement_id + "'");
  it->second.retired = true;
}

const AgNode& AttackGraph::node(const std::string& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error("attack-graph", "unknown node '" + id + "'");
  return it->second;
}

std::vector<SourceRef> AttackGraph::unlocks_sources(const std::string& decoy_placement_id) const {
  const AgNode& decoy = node(decoy_placement_id);
  if (decoy.kind != NodeKind::DecoyComponent)
    throw Error("attack-graph", "node '" + decoy_placement_id + "' is not a decoy component");
  std::vector<SourceRef> out;
  for (const auto& e : edges_) {
    if (e.kind == EdgeKind::Unlocks && e.to == decoy_placement_id)
      out.push_back({e.from, node(e.from).retired});
  }
  std::sort(out.begin(), out.end(),
            [](const SourceRef& a, const SourceRef& b) { return a.placement_id < b.placement_id; });
  return out;
}

std::vector<SourceRef> AttackGraph::placements_on(const std::string& target_id) const {
  std::vector<SourceRef> out;
  for (const auto& e : edges_) {
    if (e.kind == EdgeKind::PlacedOn && e.to == target_id)
      out.push_back({e.from, node(e.from).retired});
  }
  std::sort(out.begin(), out.end(),
            [](const SourceRef& a, const SourceRef& b) { return a.placement_id < b.placement_id; });
  return out;
}

std::vector<std::string> AttackGraph::components_of_instance(const std::string& instance_id) const {
  std::vector<std::string> out;
  for (const auto& [id, n] : nodes_) {
    if (n.instance_id == instance_id) out.push_back(id);
  }
  return out;
}

std::size_t AttackGraph::edge_count(EdgeKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [&](const AgEdge& e) { return e.kind == kind; }));
}

std::string AttackGraph::export_dot() const {
  std::ostringstream os;
  os << "digraph attack_graph {\n";
  for (const auto& [id, n] : nodes_) {
    const char* shape = "box";
    if (n.kind == NodeKind::LureComponent) shape = "ellipse";
    if (n.kind == NodeKind::DecoyComponent) shape = "diamond";
    os << "  \"" << id << "\" [shape=" << shape;
    if (!n.instance_id.empty()) os << ", label=\"" << id << "\\n" << n.instance_id << "\"";
    if (n.retired) os << ", style=dashed";
    os << "];\n";
  }
  std::vector<AgEdge> sorted = edges_;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& e : sorted) {
    os << "  \"" << e.from << "\" -> \"" << e.to << "\"";
    if (e.kind == EdgeKind::Unlocks) os << " [style=dashed, label=\"unlocks\"]";
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

std::string AttackGraph::export_json() const {
  json nodes = json::array();
  for (const auto& [id, n] : nodes_) {
    json jn{{"id", n.id}, {"kind", node_kind_name(n.kind)}, {"ref", n.ref}, {"retired", n.retired}};
    if (!n.instance_id.empty()) jn["instance_id"] = n.instance_id;
    nodes.push_back(jn);
  }
  json edges = json::array();
  std::vector<AgEdge> sorted = edges_;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& e : sorted) {
    edges.push_back(json{{"kind", edge_kind_name(e.kind)},
                         {"from", e.from},
                         {"to", e.to},
                         {"instance_id", e.instance_id}});
  }
  return json{{"nodes", nodes}, {"edges", edges}}.dump(2);
}

AttackGraph AttackGraph::import_json(const std::string& document) {
  json doc = json::parse(document);
  AttackGraph g;
  for (const auto& jn : doc.at("nodes")) {
    AgNode n;
    n.id = jn.at("id").get<std::string>();
    std::string kind = jn.at("kind").get<std::string>();
    if (kind == "target") n.kind = NodeKind::Target;
    else if (kind == "lure-component") n.kind = NodeKind::LureComponent;
    else if (kind == "decoy-component") n.kind = NodeKind::DecoyComponent;
    else throw Error("attack-graph", "unknown node kind '" + kind + "'");
    n.ref = jn.at("ref").get<std::string>();
    n.retired = jn.at("retired").get<bool>();
    if (jn.contains("instance_id")) n.instance_id = jn.at("instance_id").get<std::string>();
    g.nodes_.emplace(n.id, n);
  }
  for (const auto& je : doc.at("edges")) {
    AgEdge e;
    std::string kind = je.at("kind").get<std::string>();
    if (kind == "PLACED_ON") e.kind = EdgeKind::PlacedOn;
    else if (kind == "UNLOCKS") e.kind = EdgeKind::Unlocks;
    else throw Error("attack-graph", "unknown edge kind '" + kind + "'");
    e.from = je.at("from").get<std::string>();
    e.to = je.at("to").get<std::string>();
    e.instance_id = je.at("instance_id").get<std::string>();
    g.add_edge(e);
  }
  return g;
}

void AttackGraph::check_consistency() const {
  for (const auto& e : edges_) {
    if (!nodes_.count(e.from) || !nodes_.count(e.to))
      throw Error("attack-graph", "dangling edge " + e.from + " -> " + e.to);
    const AgNode& from = nodes_.at(e.from);
    const AgNode& to = nodes_.at(e.to);
    if (e.kind == EdgeKind::PlacedOn &&
        (from.kind == NodeKind::Target || to.kind != NodeKind::Target))
      throw Error("attack-graph", "PLACED_ON endpoint kinds violated");
    if (e.kind == EdgeKind::Unlocks &&
        (from.kind != NodeKind::LureComponent || to.kind != NodeKind::DecoyComponent ||
         from.instance_id != to.instance_id))
      throw Error("attack-graph", "UNLOCKS endpoint constraint violated");
  }
}

}  // namespace tripwire::ag

#include "tripwire/reconstruction.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace tripwire::recon {

namespace {

bool path_rank_less(const AttackPath& a, const AttackPath& b,
                    const std::map<std::string, TimeMs>& first_ts) {
  if (a.score != b.score) return a.score > b.score;
  if (a.hops.size() != b.hops.size()) return a.hops.size() > b.hops.size();
  const TimeMs sa = first_ts.at(a.hops.front());
  const TimeMs sb = first_ts.at(b.hops.front());
  if (sa != sb) return sa < sb;  // earliest start first
  return a.hops < b.hops;
}

}  // namespace

Tracker::Tracker(const alarms::AlarmStore& store, const ag::AttackGraph& graph,
                 const dm::DeployModuleRegistry& registry,
                 std::map<std::string, std::string> locations, ReconstructionConfig config)
    : store_(store), graph_(graph), registry_(registry), locations_(std::move(locations)),
      config_(config) {
  if (config_.max_depth <= 0 || config_.max_candidates_per_hop <= 0)
    throw Error("reconstruction", "max_depth and max_candidates_per_hop must be positive");
  for (const auto* rec : store_.all()) ordered_.push_back(rec);
  std::sort(ordered_.begin(), ordered_.end(),
            [](const alarms::CondensedAlarm* a, const alarms::CondensedAlarm* b) {
              if (a->first_ts != b->first_ts) return a->first_ts < b->first_ts;
              return a->alarm_id < b->alarm_id;
            });
}

std::string Tracker::location_of(const std::string& id) const {
  auto it = locations_.find(id);
  return it == locations_.end() ? id : it->second;
}

std::vector<Tracker::Candidate> Tracker::candidates_of(const std::string& alarm_id) const {
  auto cached = candidate_cache_.find(alarm_id);
  if (cached != candidate_cache_.end()) return cached->second;
  auto computed = compute_candidates(alarm_id);
  candidate_cache_.emplace(alarm_id, computed);
  return computed;
}

std::vector<Tracker::Candidate> Tracker::compute_candidates(const std::string& alarm_id) const {
  const alarms::CondensedAlarm& alarm = store_.alarm(alarm_id);

  auto in_window = [&](const alarms::CondensedAlarm& b) {
    if (b.first_ts >= alarm.first_ts) return false;
    if (config_.window_ms > 0 && alarm.first_ts - b.first_ts > config_.window_ms) return false;
    return true;
  };

  std::vector<Candidate> found;
  std::set<std::string> seen;

  // Lure route: who touched the lures that unlock this decoy.
  if (registry_.has_placement(alarm.placement_id)) {
    const dm::Placement& p = registry_.placement(alarm.placement_id);
    if (p.role == ComponentRole::Decoy && graph_.has_node(p.id)) {
      for (const auto& lure : graph_.unlocks_sources(p.id)) {
        const std::string lure_target = registry_.placement(lure.placement_id).target_id;
        for (const auto* b : ordered_) {
          if (!in_window(*b) || seen.count(b->alarm_id)) continue;
          const bool on_lure_target = registry_.has_placement(b->placement_id) &&
                                      registry_.placement(b->placement_id).target_id == lure_target;
          if (on_lure_target || b->accessor == lure_target) {
            found.push_back({b->alarm_id, lure.placement_id});
            seen.insert(b->alarm_id);
          }
        }
      }
    }
  }

  // Same-target fallback: earlier alarms tied to the location the access
  // came from, at host granularity.
  if (found.empty() && alarm.accessor != kExternalAccessor) {
    const std::string here = location_of(alarm.accessor);
    for (const auto* b : ordered_) {
      if (!in_window(*b) || seen.count(b->alarm_id)) continue;
      std::string b_target_loc;
      if (registry_.has_placement(b->placement_id))
        b_target_loc = location_of(registry_.placement(b->placement_id).target_id);
      const bool accessor_match =
          b->accessor != kExternalAccessor && location_of(b->accessor) == here;
      if (b_target_loc == here || accessor_match) {
        found.push_back({b->alarm_id, kSameTargetVia});
        seen.insert(b->alarm_id);
      }
    }
  }

  // Prune by recency, then report oldest first.
  std::sort(found.begin(), found.end(), [&](const Candidate& a, const Candidate& b) {
    const auto& ra = store_.alarm(a.alarm_id);
    const auto& rb = store_.alarm(b.alarm_id);
    if (ra.first_ts != rb.first_ts) return ra.first_ts > rb.first_ts;
    return ra.alarm_id < rb.alarm_id;
  });
  if (found.size() > static_cast<std::size_t>(config_.max_candidates_per_hop))
    found.resize(static_cast<std::size_t>(config_.max_candidates_per_hop));
  std::reverse(found.begin(), found.end());
  return found;
}

std::vector<AttackPath> Tracker::backward_track(const std::string& alarm_id) const {
  store_.alarm(alarm_id);  // throws on unknown alarm

  std::vector<AttackPath> paths;
  constexpr std::size_t kPathCap = 4096;  // cycle-free by strict ts order; cap is a safety net

  struct Frame {
    std::string alarm;
    std::string via;    // edge from this alarm to the previous frame's alarm
    double confidence;  // of that edge
  };
  std::vector<Frame> stack;

  std::map<std::string, TimeMs> first_ts;
  auto emit = [&]() {
    if (paths.size() >= kPathCap) return;
    AttackPath path;
    path.root = alarm_id;
    path.score = 1.0;
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) path.hops.push_back(it->alarm);
    for (std::size_t i = 0; i + 1 < stack.size(); ++i) {
      // stack runs newest -> oldest; edges point old -> new
      const Frame& newer = stack[i];
      const Frame& older = stack[i + 1];
      path.hop_edges.push_back({older.alarm, newer.alarm, older.via});
      path.score *= older.confidence;
    }
    std::reverse(path.hop_edges.begin(), path.hop_edges.end());
    validate_path(path);
    paths.push_back(std::move(path));
  };

  std::function<void(const std::string&, int)> expand = [&](const std::string& current,
                                                            int depth) {
    if (paths.size() >= kPathCap) return;
    std::vector<Candidate> candidates;
    if (depth < config_.max_depth) candidates = candidates_of(current);
    if (candidates.empty()) {
      emit();
      return;
    }
    const double confidence = 1.0 / static_cast<double>(candidates.size());
    for (const auto& c : candidates) {
      stack.push_back({c.alarm_id, c.via, confidence});
      expand(c.alarm_id, depth + 1);
      stack.pop_back();
    }
  };

  stack.push_back({alarm_id, "", 1.0});
  expand(alarm_id, 0);
  stack.pop_back();

  for (const auto* rec : ordered_) first_ts.emplace(rec->alarm_id, rec->first_ts);
  std::sort(paths.begin(), paths.end(), [&](const AttackPath& a, const AttackPath& b) {
    return path_rank_less(a, b, first_ts);
  });
  return paths;
}

std::vector<ForwardHit> Tracker::forward_track(const std::string& alarm_id) const {
  store_.alarm(alarm_id);

  // Successor relation is the exact dual of candidates_of, so backward and
  // forward tracking agree on what is reachable.
  std::map<std::string, std::vector<Candidate>> inbound;
  for (const auto* rec : ordered_) inbound.emplace(rec->alarm_id, candidates_of(rec->alarm_id));

  std::vector<ForwardHit> hits;
  std::set<std::string> visited{alarm_id};
  std::deque<std::pair<std::string, int>> frontier{{alarm_id, 0}};
  while (!frontier.empty()) {
    auto [current, depth] = frontier.front();
    frontier.pop_front();
    if (depth >= config_.max_depth) continue;
    for (const auto* rec : ordered_) {
      if (visited.count(rec->alarm_id)) continue;
      for (const auto& c : inbound.at(rec->alarm_id)) {
        if (c.alarm_id != current) continue;
        visited.insert(rec->alarm_id);
        hits.push_back({rec->alarm_id, c.via});
        frontier.emplace_back(rec->alarm_id, depth + 1);
        break;
      }
    }
  }
  std::sort(hits.begin(), hits.end(), [&](const ForwardHit& a, const ForwardHit& b) {
    const auto& ra = store_.alarm(a.alarm_id);
    const auto& rb = store_.alarm(b.alarm_id);
    if (ra.first_ts != rb.first_ts) return ra.first_ts < rb.first_ts;
    return ra.alarm_id < rb.alarm_id;
  });
  return hits;
}

std::vector<AttackPath> Tracker::reconstruct_all() const {
  std::vector<AttackPath> campaigns;
  for (const auto* rec : ordered_) {
    if (forward_track(rec->alarm_id).empty()) {
      auto paths = backward_track(rec->alarm_id);
      campaigns.insert(campaigns.end(), paths.begin(), paths.end());
    }
  }

  // Drop paths that are prefixes of longer paths.
  std::vector<AttackPath> kept;
  for (const auto& p : campaigns) {
    bool prefix = false;
    for (const auto& q : campaigns) {
      if (p.hops.size() >= q.hops.size()) continue;
      if (std::equal(p.hops.begin(), p.hops.end(), q.hops.begin())) {
        prefix = true;
        break;
      }
    }
    if (!prefix) kept.push_back(p);
  }

  std::map<std::string, TimeMs> first_ts;
  for (const auto* rec : ordered_) first_ts.emplace(rec->alarm_id, rec->first_ts);
  std::sort(kept.begin(), kept.end(), [&](const AttackPath& a, const AttackPath& b) {
    return path_rank_less(a, b, first_ts);
  });
  return kept;
}

void Tracker::validate_path(const AttackPath& path) const {
  TimeMs previous = -1;
  for (const auto& hop : path.hops) {
    const TimeMs ts = store_.alarm(hop).first_ts;
    if (ts <= previous && previous >= 0)
      throw Error("reconstruction", "path hop timestamps must strictly increase");
    previous = ts;
  }
  for (const auto& edge : path.hop_edges) {
    if (edge.via == kSameTargetVia) continue;
    // A lure-via edge must be backed by an UNLOCKS edge from that lure to
    // the decoy placement the 'to' alarm fired on.
    const alarms::CondensedAlarm& to = store_.alarm(edge.to);
    bool backed = false;
    if (graph_.has_node(to.placement_id)) {
      for (const auto& src : graph_.unlocks_sources(to.placement_id))
        backed = backed || src.placement_id == edge.via;
    }
    if (!backed)
      throw Error("reconstruction",
                  "hop edge via '" + edge.via + "' has no matching UNLOCKS edge");
  }
}

EvaluationMetrics evaluate(const std::vector<AttackPath>& campaigns,
                           const std::set<std::pair<std::string, std::string>>& truth_edges,
                           const std::vector<std::string>& truth_chain) {
  EvaluationMetrics m;

  std::set<std::pair<std::string, std::string>> reconstructed;
  std::set<std::string> roots_taken;
  for (const auto& c : campaigns) {  // campaigns arrive ranked
    if (roots_taken.count(c.root)) continue;
    roots_taken.insert(c.root);
    for (const auto& e : c.hop_edges) reconstructed.emplace(e.from, e.to);
  }

  std::size_t matched = 0;
  for (const auto& e : reconstructed)
    if (truth_edges.count(e)) ++matched;

  m.truth_edge_count = truth_edges.size();
  m.reconstructed_edge_count = reconstructed.size();
  m.matched_edge_count = matched;

  if (truth_edges.empty() && reconstructed.empty()) {
    m.precision = m.recall = m.f1 = 1.0;
  } else {
    m.precision = reconstructed.empty()
                      ? 0.0
                      : static_cast<double>(matched) / static_cast<double>(reconstructed.size());
    m.recall = truth_edges.empty()
                   ? 0.0
                   : static_cast<double>(matched) / static_cast<double>(truth_edges.size());
    m.f1 = (m.precision + m.recall) == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  }

  if (campaigns.empty()) {
    m.top1_exact = truth_chain.empty();
  } else {
    m.top1_exact = campaigns.front().hops == truth_chain;
  }
  return m;
}

}  // namespace tripwire::recon

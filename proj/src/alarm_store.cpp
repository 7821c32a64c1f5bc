#include "tripwire/alarm_store.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace tripwire::alarms {

using nlohmann::json;

AlarmStore::AlarmStore(TimeMs bucket_width_ms) : bucket_width_(bucket_width_ms) {
  if (bucket_width_ <= 0) throw Error("alarm-store", "bucket width must be positive");
}

void AlarmStore::set_validator(std::function<bool(const dm::RawAlarm&)> validator) {
  validator_ = std::move(validator);
}

std::optional<std::string> AlarmStore::ingest(const dm::RawAlarm& raw) {
  ++stats_.raw_ingested;
  bool malformed = raw.placement_id.empty() || raw.accessor.empty() || raw.timestamp < 0;
  if (!malformed && validator_ && !validator_(raw)) malformed = true;
  if (malformed) {
    ++stats_.dead_lettered;
    dead_letters_.push_back(raw);
    return std::nullopt;
  }
  raw_log_.push_back(raw);

  const std::int64_t bucket = raw.timestamp / bucket_width_;
  auto key = std::make_tuple(raw.placement_id, raw.accessor, bucket);
  auto it = merge_index_.find(key);
  if (it != merge_index_.end()) {
    CondensedAlarm& rec = by_id_.at(it->second);
    ++rec.count;
    rec.first_ts = std::min(rec.first_ts, raw.timestamp);
    rec.last_ts = std::max(rec.last_ts, raw.timestamp);
    return it->second;
  }

  CondensedAlarm rec;
  std::ostringstream id;
  id << "al-";
  id.width(6);
  id.fill('0');
  id << ++serial_;
  rec.alarm_id = id.str();
  rec.placement_id = raw.placement_id;
  rec.accessor = raw.accessor;
  rec.time_bucket = bucket;
  rec.count = 1;
  rec.first_ts = raw.timestamp;
  rec.last_ts = raw.timestamp;
  rec.observables = raw.observables;
  merge_index_.emplace(key, rec.alarm_id);
  ingestion_order_.push_back(rec.alarm_id);
  by_id_.emplace(rec.alarm_id, rec);
  ++stats_.condensed_stored;
  return rec.alarm_id;
}

std::vector<CondensedAlarm> AlarmStore::query(TimeMs t0, TimeMs t1,
                                              const QueryFilter& filter) const {
  if (t0 > t1) throw Error("alarm-store", "invalid query range");
  std::vector<CondensedAlarm> out;
  for (const auto& [id, rec] : by_id_) {
    if (rec.first_ts < t0 || rec.first_ts > t1) continue;
    if (filter.placement_id && rec.placement_id != *filter.placement_id) continue;
    if (filter.accessor && rec.accessor != *filter.accessor) continue;
    if (filter.placement_set && !filter.placement_set->count(rec.placement_id)) continue;
    out.push_back(rec);
  }
  std::sort(out.begin(), out.end(), [](const CondensedAlarm& a, const CondensedAlarm& b) {
    if (a.first_ts != b.first_ts) return a.first_ts < b.first_ts;
    return a.alarm_id < b.alarm_id;
  });
  return out;
}

const CondensedAlarm& AlarmStore::alarm(const std::string& alarm_id) const {
  auto it = by_id_.find(alarm_id);
  if (it == by_id_.end()) throw Error("alarm-store", "unknown alarm '" + alarm_id + "'");
  return it->second;
}

std::vector<const CondensedAlarm*> AlarmStore::all() const {
  std::vector<const CondensedAlarm*> out;
  out.reserve(ingestion_order_.size());
  for (const auto& id : ingestion_order_) out.push_back(&by_id_.at(id));
  return out;
}

std::string AlarmStore::serialize_raw_log() const {
  std::ostringstream os;
  for (const auto& raw : raw_log_) {
    os << json{{"placement_id", raw.placement_id},
               {"dm_id", raw.dm_id},
               {"accessor", raw.accessor},
               {"observables", raw.observables},
               {"timestamp", raw.timestamp}}
              .dump()
       << "\n";
  }
  return os.str();
}

void AlarmStore::replay_raw_log(const std::string& log) {
  std::istringstream is(log);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    dm::RawAlarm raw;
    raw.placement_id = j.at("placement_id").get<std::string>();
    raw.dm_id = j.at("dm_id").get<std::string>();
    raw.accessor = j.at("accessor").get<std::string>();
    raw.observables = j.at("observables").get<std::map<std::string, std::string>>();
    raw.timestamp = j.at("timestamp").get<TimeMs>();
    ingest(raw);
  }
}

}  // namespace tripwire::alarms

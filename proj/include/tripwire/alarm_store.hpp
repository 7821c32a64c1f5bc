#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tripwire/deploy_modules.hpp"
#include "tripwire/types.hpp"

namespace tripwire::alarms {

struct CondensedAlarm {
  std::string alarm_id;
  std::string placement_id;
  std::string accessor;
  std::int64_t time_bucket = 0;  // floor(timestamp / bucket_width)
  std::int64_t count = 1;
  TimeMs first_ts = 0;
  TimeMs last_ts = 0;
  std::map<std::string, std::string> observables;  // of the first raw alarm
};

struct StoreStats {
  std::int64_t raw_ingested = 0;
  std::int64_t condensed_stored = 0;
  std::int64_t dead_lettered = 0;
};

struct QueryFilter {
  std::optional<std::string> placement_id;
  std::optional<std::string> accessor;
  // Instance filters are resolved to placement sets by the caller, which
  // owns the placement table.
  std::optional<std::set<std::string>> placement_set;
};

/// Append-only store of condensed alarms. Raw alarms merge into one record
/// per (placement, accessor, time bucket); later observables are dropped,
/// only the count grows.
class AlarmStore {
 public:
  explicit AlarmStore(TimeMs bucket_width_ms = 1000);

  /// Returns the id of the condensed record the raw alarm landed in, or
  /// nothing if it was quarantined to the dead-letter list.
  std::optional<std::string> ingest(const dm::RawAlarm& raw);

  std::vector<CondensedAlarm> query(TimeMs t0, TimeMs t1, const QueryFilter& filter = {}) const;

  bool has_alarm(const std::string& alarm_id) const { return by_id_.count(alarm_id) > 0; }
  const CondensedAlarm& alarm(const std::string& alarm_id) const;
  std::vector<const CondensedAlarm*> all() const;

  StoreStats stats() const { return stats_; }
  const std::vector<dm::RawAlarm>& dead_letters() const { return dead_letters_; }
  TimeMs bucket_width() const { return bucket_width_; }

  /// One raw alarm per line, replayable to rebuild identical state.
  std::string serialize_raw_log() const;
  void replay_raw_log(const std::string& log);

  /// Optional guard wired in by the embedding engine: raw alarms that fail
  /// it are dead-lettered (e.g. unknown placement ids from the service API).
  void set_validator(std::function<bool(const dm::RawAlarm&)> validator);

 private:
  TimeMs bucket_width_;
  std::map<std::tuple<std::string, std::string, std::int64_t>, std::string> merge_index_;
  std::map<std::string, CondensedAlarm> by_id_;
  std::vector<std::string> ingestion_order_;
  std::vector<dm::RawAlarm> raw_log_;
  std::vector<dm::RawAlarm> dead_letters_;
  StoreStats stats_;
  int serial_ = 0;
  std::function<bool(const dm::RawAlarm&)> validator_;
};

}  // namespace tripwire::alarms

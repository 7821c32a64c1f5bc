#include "doctest.h"
#include "tripwire/alarm_store.hpp"

using namespace tripwire;

namespace {

dm::RawAlarm raw(const std::string& placement, const std::string& accessor, TimeMs ts) {
  dm::RawAlarm r;
  r.placement_id = placement;
  r.dm_id = "dm-x";
  r.accessor = accessor;
  r.observables = {{"action", "access"}};
  r.timestamp = ts;
  return r;
}

}  // namespace

TEST_CASE("same-key raw alarms condense into one record") {
  alarms::AlarmStore store(1000);
  std::string id;
  for (TimeMs ts = 100; ts <= 140; ts += 10) id = *store.ingest(raw("p-1", "h1", ts));

  auto all = store.all();
  REQUIRE(all.size() == 1);
  CHECK(all[0]->alarm_id == id);
  CHECK(all[0]->count == 5);
  CHECK(all[0]->first_ts == 100);
  CHECK(all[0]->last_ts == 140);
  CHECK(all[0]->time_bucket == 0);
  CHECK(store.stats().raw_ingested == 5);
  CHECK(store.stats().condensed_stored == 1);
}

TEST_CASE("bucket boundaries and accessors split records") {
  alarms::AlarmStore store(1000);

  SUBCASE("straddling a bucket boundary") {
    store.ingest(raw("p-1", "h1", 900));
    store.ingest(raw("p-1", "h1", 1100));
    CHECK(store.all().size() == 2);
  }

  SUBCASE("two accessors in one bucket") {
    store.ingest(raw("p-1", "h1", 100));
    store.ingest(raw("p-1", "h2", 150));
    CHECK(store.all().size() == 2);
  }
}

TEST_CASE("query filters and orders") {
  alarms::AlarmStore store(1000);
  auto a1 = *store.ingest(raw("p-3", "external", 100));
  auto a2 = *store.ingest(raw("p-2", "h1", 200));
  auto a3 = *store.ingest(raw("p-1", "h1", 300));

  auto in_range = store.query(0, 250);
  REQUIRE(in_range.size() == 2);
  CHECK(in_range[0].alarm_id == a1);
  CHECK(in_range[1].alarm_id == a2);

  SUBCASE("placement filter") {
    alarms::QueryFilter f;
    f.placement_id = "p-1";
    auto hits = store.query(0, 1000, f);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].alarm_id == a3);
  }

  SUBCASE("accessor filter") {
    alarms::QueryFilter f;
    f.accessor = "h1";
    CHECK(store.query(0, 1000, f).size() == 2);
  }

  SUBCASE("instance filter arrives as a placement set") {
    alarms::QueryFilter f;
    f.placement_set = std::set<std::string>{"p-1", "p-2"};  // tw-bucket#1's components
    auto hits = store.query(0, 1000, f);
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].alarm_id == a2);
    CHECK(hits[1].alarm_id == a3);
  }

  SUBCASE("empty store yields empty results") {
    alarms::AlarmStore fresh(1000);
    CHECK(fresh.query(0, 1000).empty());
    CHECK(fresh.stats().raw_ingested == 0);
    CHECK(fresh.stats().condensed_stored == 0);
    CHECK(fresh.stats().dead_lettered == 0);
  }

  SUBCASE("inverted ranges are errors") {
    CHECK_THROWS_AS(store.query(10, 5), Error);
  }

  SUBCASE("identical queries return identical results") {
    CHECK(store.query(0, 250).size() == store.query(0, 250).size());
    auto x = store.query(0, 1000);
    auto y = store.query(0, 1000);
    REQUIRE(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i].alarm_id == y[i].alarm_id);
  }
}

TEST_CASE("malformed alarms go to the dead-letter list") {
  alarms::AlarmStore store(1000);
  store.ingest(raw("p-1", "h1", 100));
  CHECK_FALSE(store.ingest(raw("", "h1", 100)).has_value());
  CHECK_FALSE(store.ingest(raw("p-1", "", 100)).has_value());
  CHECK_FALSE(store.ingest(raw("p-1", "h1", -5)).has_value());

  auto stats = store.stats();
  CHECK(stats.raw_ingested == 4);
  CHECK(stats.dead_lettered == 3);
  CHECK(stats.condensed_stored == 1);
  CHECK(store.dead_letters().size() == 3);

  SUBCASE("a wired-in validator quarantines unknown placements") {
    alarms::AlarmStore guarded(1000);
    guarded.set_validator([](const dm::RawAlarm& r) { return r.placement_id == "p-known"; });
    CHECK(guarded.ingest(raw("p-known", "h1", 10)).has_value());
    CHECK_FALSE(guarded.ingest(raw("p-unknown", "h1", 10)).has_value());
    CHECK(guarded.stats().dead_lettered == 1);
  }
}

TEST_CASE("count conservation holds under seeded load") {
  alarms::AlarmStore store(1000);
  Rng rng(99);
  const int total = 2000;
  for (int i = 0; i < total; ++i) {
    std::string placement = rng.below(20) == 0 ? "" : "p-" + std::to_string(rng.below(5));
    std::string accessor = "h" + std::to_string(rng.below(3));
    store.ingest(raw(placement, accessor, static_cast<TimeMs>(rng.below(10'000))));
  }
  auto stats = store.stats();
  CHECK(stats.raw_ingested == total);
  std::int64_t count_sum = 0;
  for (const auto* rec : store.all()) count_sum += rec->count;
  CHECK(count_sum == stats.raw_ingested - stats.dead_lettered);
}

TEST_CASE("the raw log replays to identical state") {
  alarms::AlarmStore store(1000);
  store.ingest(raw("p-1", "h1", 100));
  store.ingest(raw("p-1", "h1", 150));
  store.ingest(raw("p-2", "h2", 1100));
  store.ingest(raw("", "h1", 5));  // dead-lettered, absent from the log

  alarms::AlarmStore replayed(1000);
  replayed.replay_raw_log(store.serialize_raw_log());
  CHECK(replayed.stats().condensed_stored == store.stats().condensed_stored);
  CHECK(replayed.stats().raw_ingested == store.stats().raw_ingested - 1);

  auto a = store.query(0, 10'000);
  auto b = replayed.query(0, 10'000);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].alarm_id == b[i].alarm_id);
    CHECK(a[i].count == b[i].count);
    CHECK(a[i].first_ts == b[i].first_ts);
    CHECK(a[i].last_ts == b[i].last_ts);
  }
}

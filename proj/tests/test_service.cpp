#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include "http.hpp"
#include "service.hpp"

namespace socact::service {
namespace {

const Instant kT0 = require_utc("2014-08-10T02:00:00Z");
const Instant kT1 = require_utc("2014-08-10T03:00:00Z");
const std::vector<ActionMode> kModes = {ActionMode::CollectiveForce, ActionMode::All};

Json clusters_export(const std::string& label, Instant start, Instant end) {
  Cluster c;
  c.member_ids = {"a", "b", "c"};
  c.centroid = {38.7, -90.3};
  c.radius_m = 12.5;
  c.count = 3;
  c.positive_fraction[index_of(ActionMode::CollectiveForce)] = 2.0 / 3.0;
  const std::vector<Cluster> clusters = {c};
  const std::vector<std::string> noise = {"d"};
  return clusters_to_json(clusters, noise, label, start, end, ClusterParams{100.0, 3}, kModes);
}

Json series_export() {
  std::vector<TimeBin> bins(2);
  bins[0].start = kT0;
  bins[0].tweet_count = 2;
  bins[0].presence[index_of(ActionMode::CollectiveForce)] = 0.25;
  bins[0].presence[index_of(ActionMode::All)] = 1.5;
  bins[1].start = kT0 + 3600;
  return series_to_json(bins, kModes, kT0, kT0 + 7200);
}

Json shift_export(const std::string& label) {
  PhraseShift s;
  s.mode = ActionMode::CollectiveForce;
  s.entries = {{"tear gas", 1.5, 2}};
  s.total = 1.5;
  return shift_to_json(s, 10, Json{{"label", label}});
}

Json counties_export() {
  CountyTable t;
  t.counties.push_back({"c1", 4, 1, 25.0, {}});
  t.unassigned.county_id = "<unassigned>";
  return counties_to_json(t, kT0, kT1);
}

ArtifactStore full_store() {
  ArtifactStore s;
  s.add(clusters_export("late", kT1, kT1 + 3600));
  s.add(clusters_export("early", kT0, kT1));
  s.add(series_export());
  s.add(shift_export("early"));
  s.add(counties_export());
  return s;
}

Json body(const Response& r) { return Json::parse(r.body); }

TEST(ArtifactStore, WindowsListSortedByStart) {
  const auto s = full_store();
  EXPECT_EQ(s.size(), 5u);
  const auto r = s.handle("/v1/windows", {});
  ASSERT_EQ(r.status, 200);
  const auto w = body(r)["windows"];
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(w[0]["label"], "early");
  EXPECT_EQ(w[0]["cluster_count"], 1);
  EXPECT_EQ(w[0]["tweet_count"], 4);
  EXPECT_EQ(w[0]["shift_modes"], Json::array({"collective_force"}));
  EXPECT_EQ(w[1]["label"], "late");
  EXPECT_TRUE(w[1]["shift_modes"].empty());
}

TEST(ArtifactStore, ServesStoredExportsVerbatim) {
  const auto s = full_store();
  auto r = s.handle("/v1/clusters", {{"window", "early"}});
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body, clusters_export("early", kT0, kT1).dump());
  r = s.handle("/v1/shift", {{"window", "early"}, {"mode", "collective_force"}});
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body, shift_export("early").dump());
  r = s.handle("/v1/counties", {{"from", "2014-08-10T02:00:00Z"}, {"to", "2014-08-10T03:00:00Z"}});
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body, counties_export().dump());
  r = s.handle("/v1/series", {{"from", "2014-08-10T02:00:00Z"}, {"to", "2014-08-10T04:00:00Z"}});
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body, series_export().dump());
}

TEST(ArtifactStore, SeriesProjectsToOneMode) {
  const auto s = full_store();
  const auto r = s.handle("/v1/series", {{"from", "2014-08-10T02:00:00Z"}, {"to", "2014-08-10T04:00:00Z"}, {"mode", "all"}});
  ASSERT_EQ(r.status, 200);
  const auto b = body(r);
  EXPECT_EQ(b["modes"], Json::array({"all"}));
  EXPECT_EQ(b["bins"][0]["presence"], (Json{{"all", 1.5}}));
  EXPECT_EQ(b["bins"][0]["tweet_count"], 2);
  const auto missing = s.handle("/v1/series", {{"from", "2014-08-10T02:00:00Z"}, {"to", "2014-08-10T04:00:00Z"},
                                               {"mode", "peace"}});
  EXPECT_EQ(missing.status, 404);
}

TEST(ArtifactStore, ErrorsAreJson) {
  const auto s = full_store();
  const auto code = [&](std::string_view path, const Params& p) {
    const auto r = s.handle(path, p);
    return std::make_pair(r.status, body(r)["error"]["code"].get<std::string>());
  };
  EXPECT_EQ(code("/v1/clusters", {{"window", "nope"}}), std::make_pair(404, std::string("not-found")));
  EXPECT_EQ(code("/v1/clusters", {}), std::make_pair(400, std::string("missing-parameter")));
  EXPECT_EQ(code("/v1/shift", {{"window", "early"}, {"mode", "xyz"}}), std::make_pair(400, std::string("unknown-mode")));
  EXPECT_EQ(code("/v1/shift", {{"window", "early"}, {"mode", "peace"}}), std::make_pair(404, std::string("not-found")));
  EXPECT_EQ(code("/v1/counties", {{"from", "yesterday"}, {"to", "2014-08-10T03:00:00Z"}}).first, 400);
  EXPECT_EQ(code("/v2/anything", {}), std::make_pair(404, std::string("unknown-endpoint")));
}

TEST(ArtifactStore, RejectsDuplicatesAndVersionMismatch) {
  ArtifactStore s;
  s.add(clusters_export("early", kT0, kT1));
  EXPECT_THROW(s.add(clusters_export("early", kT0, kT1)), Error);
  auto future = series_export();
  future["version"] = 9;
  try {
    s.add(future);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "schema-version-mismatch");
  }
  s.add(Json{{"format", "socact.meta"}, {"version", 1}});
  EXPECT_EQ(s.size(), 1u);
}

TEST(ArtifactStore, LoadsDirectorySkippingForeignFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "socact_test_service";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir / "nested");
  std::ofstream(dir / "a.json") << clusters_export("early", kT0, kT1).dump();
  std::ofstream(dir / "nested" / "b.json") << series_export().dump();
  std::ofstream(dir / "broken.json") << "{";
  std::ofstream(dir / "notes.txt") << "hello";
  const auto s = ArtifactStore::load(dir);
  EXPECT_EQ(s.size(), 2u);
  std::filesystem::remove_all(dir);
  EXPECT_THROW(ArtifactStore::load(dir), Error);
}

TEST(Http, RoundTrip) {
  const auto store = full_store();
  httplib::Server server;
  mount(server, store);
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/v1/clusters?window=early");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->body, clusters_export("early", kT0, kT1).dump());
  res = client.Get("/v1/nothing");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
  EXPECT_EQ(Json::parse(res->body)["error"]["code"], "unknown-endpoint");
  res = client.Get("/v1/shift?window=early");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  server.stop();
  t.join();
}

}  // namespace
}  // namespace socact::service

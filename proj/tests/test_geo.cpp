#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "socact/geo.hpp"

namespace socact {
namespace {

constexpr double kDegPerM = 180.0 / (std::numbers::pi * kEarthRadiusM);

TEST(Haversine, KnownDistances) {
  EXPECT_NEAR(haversine({0, 0}, {0, 90}), 10'007'543.0, 1.0);
  EXPECT_EQ(haversine({38.7, -90.3}, {38.7, -90.3}), 0.0);
  EXPECT_NEAR(haversine({0, 179.9}, {0, -179.9}), haversine({0, 0}, {0, 0.2}), 1e-6);
  EXPECT_NEAR(haversine({90, 0}, {-90, 0}), std::numbers::pi * kEarthRadiusM, 1e-6);
}

TEST(Haversine, MetricProperties) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lat(-89.0, 89.0), lon(-179.0, 180.0);
  for (int i = 0; i < 5000; ++i) {
    const GeoPoint a{lat(rng), lon(rng)}, b{lat(rng), lon(rng)}, c{lat(rng), lon(rng)};
    EXPECT_DOUBLE_EQ(haversine(a, b), haversine(b, a));
    EXPECT_LE(haversine(a, c), haversine(a, b) + haversine(b, c) + 1e-6);
  }
}

GeoTagged at(std::string id, double lat, double lon, Instant ts = 0) { return {std::move(id), ts, {lat, lon}}; }

std::vector<std::vector<std::string>> ids_of(const Clustering& c, std::span<const GeoTagged> pts) {
  std::vector<std::vector<std::string>> out;
  for (const auto& cl : c.clusters) {
    std::vector<std::string> ids;
    for (auto i : cl) ids.push_back(pts[i].id);
    out.push_back(ids);
  }
  return out;
}

TEST(ClusterWindow, ThreeCloseOneFar) {
  const std::vector<GeoTagged> pts = {at("a", 40.0, -74.0, 1), at("b", 40.0 + 50 * kDegPerM, -74.0, 2),
                                      at("c", 40.0 + 100 * kDegPerM, -74.0, 3), at("d", 40.1, -74.0, 4)};
  const auto c = cluster_window(pts, {150.0, 3});
  EXPECT_EQ(ids_of(c, pts), (std::vector<std::vector<std::string>>{{"a", "b", "c"}}));
  EXPECT_EQ(c.noise, std::vector<std::size_t>{3});
}

TEST(ClusterWindow, TooFewPointsAreNoise) {
  const std::vector<GeoTagged> pts = {at("a", 40.0, -74.0), at("b", 40.0 + 50 * kDegPerM, -74.0)};
  const auto c = cluster_window(pts, {150.0, 3});
  EXPECT_TRUE(c.clusters.empty());
  EXPECT_EQ(c.noise.size(), 2u);
  EXPECT_TRUE(cluster_window(std::vector<GeoTagged>{}, {}).clusters.empty());
}

TEST(ClusterWindow, InvalidParameters) {
  const std::vector<GeoTagged> pts = {at("a", 0, 0)};
  EXPECT_THROW(cluster_window(pts, {0.0, 3}), Error);
  EXPECT_THROW(cluster_window(pts, {-1.0, 3}), Error);
  EXPECT_THROW(cluster_window(pts, {150.0, 0}), Error);
}

TEST(ClusterWindow, NoClusterAcrossAntimeridian) {
  const std::vector<GeoTagged> pts = {at("a", 0, 179.9995), at("b", 0, 179.9999), at("c", 0, -179.9999),
                                      at("d", 0, -179.9995)};
  const auto c = cluster_window(pts, {150.0, 2});
  EXPECT_EQ(ids_of(c, pts), (std::vector<std::vector<std::string>>{{"a", "b"}, {"c", "d"}}));
}

// Independent oracle: all-pairs adjacency, core components by transitive
// closure, border points to the earliest discovered component.
std::vector<std::vector<std::string>> oracle(const std::vector<GeoTagged>& pts, double eps, std::size_t min_pts) {
  const std::size_t n = pts.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    return std::tie(pts[a].timestamp, pts[a].id) < std::tie(pts[b].timestamp, pts[b].id);
  });
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      adj[i][j] = std::abs(pts[i].point.lon - pts[j].point.lon) <= 180.0 &&
                  haversine(pts[i].point, pts[j].point) <= eps;
    }
  }
  std::vector<bool> core(n);
  for (std::size_t i = 0; i < n; ++i) core[i] = std::count(adj[i].begin(), adj[i].end(), true) >= (long)min_pts;
  // Reachability among cores (Floyd-Warshall style closure).
  auto reach = adj;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) reach[i][j] = reach[i][j] && core[i] && core[j];
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) reach[i][j] = reach[i][j] || (reach[i][k] && reach[k][j]);
  std::vector<int> comp(n, -1);
  std::vector<std::size_t> reps;
  for (auto i : order) {
    if (!core[i] || comp[i] >= 0) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (j == i || reach[i][j]) comp[j] = static_cast<int>(reps.size());
    reps.push_back(i);
  }
  for (auto i : order) {
    if (core[i]) continue;
    for (std::size_t c = 0; c < reps.size() && comp[i] < 0; ++c) {
      for (std::size_t j = 0; j < n; ++j) {
        if (core[j] && comp[j] == static_cast<int>(c) && adj[i][j]) {
          comp[i] = static_cast<int>(c);
          break;
        }
      }
    }
  }
  std::vector<std::vector<std::string>> out(reps.size());
  for (auto i : order)
    if (comp[i] >= 0) out[comp[i]].push_back(pts[i].id);
  return out;
}

TEST(ClusterWindow, MatchesBruteForceOracle) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<GeoTagged> pts;
    const int n = static_cast<int>(rng() % 13);
    std::uniform_real_distribution<double> off(0.0, 400.0 * kDegPerM);
    for (int i = 0; i < n; ++i) {
      pts.push_back(at("p" + std::to_string(i), 10.0 + off(rng), 20.0 + off(rng), static_cast<Instant>(rng() % 5)));
    }
    const double eps = 60.0 + static_cast<double>(rng() % 120);
    const std::size_t min_pts = 1 + rng() % 4;
    const auto got = cluster_window(pts, {eps, min_pts});
    ASSERT_EQ(ids_of(got, pts), oracle(pts, eps, min_pts)) << "trial " << trial;
  }
}

TEST(ClusterWindow, InvariantUnderInputPermutation) {
  std::mt19937_64 rng(3);
  std::vector<GeoTagged> pts;
  std::uniform_real_distribution<double> off(0.0, 2000.0 * kDegPerM);
  for (int i = 0; i < 300; ++i) {
    pts.push_back(at("p" + std::to_string(i), 38.7 + off(rng), -90.3 + off(rng), static_cast<Instant>(rng() % 50)));
  }
  const auto base = ids_of(cluster_window(pts, {}), pts);
  for (int s = 0; s < 20; ++s) {
    std::shuffle(pts.begin(), pts.end(), rng);
    EXPECT_EQ(ids_of(cluster_window(pts, {}), pts), base);
  }
}

TEST(ClusterWindow, LargerEpsNeverSplitsAClusterOfCores) {
  std::mt19937_64 rng(4);
  std::vector<GeoTagged> pts;
  std::uniform_real_distribution<double> off(0.0, 1500.0 * kDegPerM);
  for (int i = 0; i < 200; ++i) pts.push_back(at("p" + std::to_string(i), 51.5 + off(rng), -0.1 + off(rng), i));
  for (double eps : {60.0, 100.0, 140.0}) {
    const auto small = cluster_window(pts, {eps, 3});
    const auto large = cluster_window(pts, {eps * 1.5, 3});
    std::vector<std::size_t> label(pts.size(), SIZE_MAX);
    for (std::size_t c = 0; c < large.clusters.size(); ++c)
      for (auto i : large.clusters[c]) label[i] = c;
    auto is_core = [&](std::size_t i) {
      std::size_t k = 0;
      for (const auto& q : pts) k += haversine(pts[i].point, q.point) <= eps;
      return k >= 3;
    };
    for (const auto& cl : small.clusters) {
      std::size_t first_core = SIZE_MAX;
      for (auto i : cl) {
        EXPECT_NE(label[i], SIZE_MAX);
        if (!is_core(i)) continue;
        if (first_core == SIZE_MAX) first_core = i;
        EXPECT_EQ(label[i], label[first_core]);
      }
    }
  }
}

TEST(ClusterSummary, CentroidRadiusAndFractions) {
  ModeScores thresholds;
  thresholds.fill(0.5);
  ModeScores hi{}, lo{};
  hi.fill(0.9);
  lo.fill(0.1);
  const std::vector<ClusterMember> members = {{"a", {10.0, 20.0}, hi}, {"b", {10.002, 20.0}, lo},
                                              {"c", {10.001, 20.001}, hi}};
  const Cluster c = cluster_summary(members, thresholds);
  EXPECT_EQ(c.count, 3u);
  EXPECT_NEAR(c.centroid.lat, 10.001, 1e-12);
  EXPECT_NEAR(c.centroid.lon, 20.000333333333333, 1e-12);
  double r = 0;
  for (const auto& m : members) r = std::max(r, haversine(c.centroid, m.point));
  EXPECT_EQ(c.radius_m, r);
  EXPECT_NEAR(c.positive_fraction[0], 2.0 / 3.0, 1e-15);

  const std::vector<ClusterMember> one = {{"z", {1.5, 2.5}, hi}};
  const Cluster s = cluster_summary(one, thresholds);
  EXPECT_EQ(s.radius_m, 0.0);
  EXPECT_EQ(s.centroid, (GeoPoint{1.5, 2.5}));
}

}  // namespace
}  // namespace socact

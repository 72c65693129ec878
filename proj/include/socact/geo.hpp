#ifndef SOCACT_GEO_HPP
#define SOCACT_GEO_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "socact/common.hpp"
#include "socact/modes.hpp"

namespace socact {

inline constexpr double kEarthRadiusM = 6'371'000.0;

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

inline bool valid_point(const GeoPoint& p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lon > -180.0 && p.lon <= 180.0;
}

/// Great-circle distance in meters on a sphere of mean Earth radius.
inline double haversine(const GeoPoint& a, const GeoPoint& b) {
  constexpr double kRad = std::numbers::pi / 180.0;
  const double dlat = (b.lat - a.lat) * kRad;
  const double dlon = (b.lon - a.lon) * kRad;
  const double s1 = std::sin(dlat / 2.0);
  const double s2 = std::sin(dlon / 2.0);
  double h = s1 * s1 + std::cos(a.lat * kRad) * std::cos(b.lat * kRad) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

// ---------------------------------------------------------------------------
// Density clustering

/// One point handed to the clusterer. Points are processed in
/// (timestamp, id) order regardless of the order they arrive in.
struct GeoTagged {
  std::string id;
  Instant timestamp = 0;
  GeoPoint point;
};

struct ClusterParams {
  double eps_m = 150.0;
  std::size_t min_pts = 3;
};

/// Cluster membership as indices into the input span. `clusters` is in
/// discovery order; members within a cluster are in processing order.
struct Clustering {
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::size_t> noise;
};

/// Processing order of the input: indices sorted by (timestamp, id).
inline std::vector<std::size_t> processing_order(std::span<const GeoTagged> pts) {
  std::vector<std::size_t> order(pts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pts[a].timestamp != pts[b].timestamp) return pts[a].timestamp < pts[b].timestamp;
    return pts[a].id < pts[b].id;
  });
  return order;
}

/// Neighbor predicate used by the clusterer. Pairs on opposite sides of the
/// antimeridian are never adjacent, so no cluster straddles it and the
/// mean-of-coordinates centroid stays meaningful.
inline bool eps_adjacent(const GeoPoint& a, const GeoPoint& b, double eps_m) {
  if (std::abs(a.lon - b.lon) > 180.0) return false;
  return haversine(a, b) <= eps_m;
}

/// DBSCAN over haversine distance. A point is core when at least `min_pts`
/// points (itself included) lie within eps_m. Clusters are connected
/// components of core points plus their border points; a border point
/// reachable from several clusters joins the first one discovered.
inline Clustering cluster_window(std::span<const GeoTagged> pts, const ClusterParams& params) {
  if (!(params.eps_m > 0.0)) throw Error("invalid-parameter", "eps_m must be positive");
  if (params.min_pts < 1) throw Error("invalid-parameter", "min_pts must be at least 1");

  const std::size_t n = pts.size();
  const std::vector<std::size_t> order = processing_order(pts);

  // Latitude-sorted sweep: two points farther apart in latitude than
  // eps/R radians cannot be within eps on the sphere.
  std::vector<std::size_t> by_lat(order);
  std::stable_sort(by_lat.begin(), by_lat.end(),
                   [&](std::size_t a, std::size_t b) { return pts[a].point.lat < pts[b].point.lat; });
  const double lat_window = params.eps_m / kEarthRadiusM * 180.0 / std::numbers::pi * (1.0 + 1e-9);

  std::vector<std::vector<std::size_t>> neighbors(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = by_lat[i];
    neighbors[a].push_back(a);
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t b = by_lat[j];
      if (pts[b].point.lat - pts[a].point.lat > lat_window) break;
      if (eps_adjacent(pts[a].point, pts[b].point, params.eps_m)) {
        neighbors[a].push_back(b);
        neighbors[b].push_back(a);
      }
    }
  }

  // Neighbor lists in processing order so expansion is order-independent.
  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;
  for (auto& nb : neighbors) {
    std::sort(nb.begin(), nb.end(), [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });
  }

  constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);
  std::vector<std::size_t> label(n, kUnassigned);
  auto is_core = [&](std::size_t i) { return neighbors[i].size() >= params.min_pts; };

  Clustering out;
  for (const std::size_t seed : order) {
    if (label[seed] != kUnassigned || !is_core(seed)) continue;
    const std::size_t cid = out.clusters.size();
    std::vector<std::size_t> members;
    std::vector<std::size_t> frontier{seed};
    label[seed] = cid;
    while (!frontier.empty()) {
      const std::size_t p = frontier.back();
      frontier.pop_back();
      members.push_back(p);
      if (!is_core(p)) continue;
      for (const std::size_t q : neighbors[p]) {
        if (label[q] != kUnassigned) continue;
        label[q] = cid;
        frontier.push_back(q);
      }
    }
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });
    out.clusters.push_back(std::move(members));
  }
  for (const std::size_t i : order) {
    if (label[i] == kUnassigned) out.noise.push_back(i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cluster summaries

using ModeScores = std::array<double, kModeCount>;

struct ClusterMember {
  std::string id;
  GeoPoint point;
  ModeScores posteriors{};
};

struct Cluster {
  std::vector<std::string> member_ids;
  GeoPoint centroid;
  double radius_m = 0.0;
  std::size_t count = 0;
  /// Fraction of members at or above each mode's threshold.
  ModeScores positive_fraction{};
};

/// Centroid is the arithmetic mean of coordinates, adequate for city-scale
/// clusters; radius is the farthest member from it.
inline Cluster cluster_summary(std::span<const ClusterMember> members,
                               const ModeScores& thresholds) {
  if (members.empty()) throw Error("empty-cluster", "cluster_summary needs members");
  Cluster c;
  c.count = members.size();
  double lat = 0.0, lon = 0.0;
  std::array<std::size_t, kModeCount> positives{};
  for (const auto& m : members) {
    c.member_ids.push_back(m.id);
    lat += m.point.lat;
    lon += m.point.lon;
    for (std::size_t k = 0; k < kModeCount; ++k) {
      if (m.posteriors[k] >= thresholds[k]) ++positives[k];
    }
  }
  c.centroid = {lat / static_cast<double>(c.count), lon / static_cast<double>(c.count)};
  if (c.count == 1) c.centroid = members.front().point;
  for (const auto& m : members) c.radius_m = std::max(c.radius_m, haversine(c.centroid, m.point));
  for (std::size_t k = 0; k < kModeCount; ++k) {
    c.positive_fraction[k] = static_cast<double>(positives[k]) / static_cast<double>(c.count);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Export

inline constexpr int kClustersVersion = 1;

/// Cluster export for one time window. `modes` selects which per-mode
/// positive fractions are written.
inline nlohmann::ordered_json clusters_to_json(std::span<const Cluster> clusters,
                                               std::span<const std::string> noise_ids, const std::string& label,
                                               Instant start, Instant end, const ClusterParams& params,
                                               std::span<const ActionMode> modes) {
  nlohmann::ordered_json obj;
  obj["format"] = "socact.clusters";
  obj["version"] = kClustersVersion;
  obj["window"] = {{"label", label}, {"start", format_utc(start)}, {"end", format_utc(end)}};
  obj["eps_m"] = params.eps_m;
  obj["min_pts"] = params.min_pts;
  std::size_t members = 0;
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const auto& c = clusters[i];
    members += c.count;
    nlohmann::ordered_json frac = nlohmann::ordered_json::object();
    for (auto m : modes) frac[std::string(mode_name(m))] = c.positive_fraction[index_of(m)];
    rows.push_back({{"id", i},
                    {"centroid", {{"lat", c.centroid.lat}, {"lon", c.centroid.lon}}},
                    {"radius_m", c.radius_m},
                    {"count", c.count},
                    {"positive_fraction", std::move(frac)},
                    {"member_ids", c.member_ids}});
  }
  obj["tweet_count"] = members + noise_ids.size();
  obj["clusters"] = std::move(rows);
  obj["noise_ids"] = std::vector<std::string>(noise_ids.begin(), noise_ids.end());
  return obj;
}

}  // namespace socact

#endif  // SOCACT_GEO_HPP

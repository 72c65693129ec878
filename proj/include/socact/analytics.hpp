#ifndef SOCACT_ANALYTICS_HPP
#define SOCACT_ANALYTICS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "socact/classified.hpp"
#include "socact/common.hpp"
#include "socact/geo.hpp"
#include "socact/modes.hpp"

namespace socact {

// ---------------------------------------------------------------------------
// Hourly presence

struct TimeBin {
  Instant start = 0;
  /// Sum of posteriors per mode over the bin's tweets.
  ModeScores presence{};
  std::size_t tweet_count = 0;
};

/// Processing order shared by the aggregations: (timestamp, id).
inline std::vector<std::size_t> time_order(std::span<const ClassifiedTweet> tweets) {
  std::vector<std::size_t> order(tweets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ta = tweets[a].tweet;
    const auto& tb = tweets[b].tweet;
    if (ta.timestamp != tb.timestamp) return ta.timestamp < tb.timestamp;
    return ta.id < tb.id;
  });
  return order;
}

/// One UTC-aligned bin per hour overlapping [from, to), empty hours
/// included. Tweets outside [from, to) are ignored.
inline std::vector<TimeBin> hourly_presence(std::span<const ClassifiedTweet> tweets, Instant from, Instant to) {
  if (to < from) throw Error("invalid-span", "series span ends before it starts");
  std::vector<TimeBin> bins;
  if (to == from) return bins;
  const Instant first = floor_hour(from);
  const auto count = static_cast<std::size_t>((floor_hour(to - 1) - first) / kSecondsPerHour + 1);
  bins.resize(count);
  for (std::size_t i = 0; i < count; ++i) bins[i].start = first + static_cast<Instant>(i) * kSecondsPerHour;
  for (const std::size_t i : time_order(tweets)) {
    const auto& c = tweets[i];
    if (c.tweet.timestamp < from || c.tweet.timestamp >= to) continue;
    auto& bin = bins[static_cast<std::size_t>((c.tweet.timestamp - first) / kSecondsPerHour)];
    ++bin.tweet_count;
    for (std::size_t k = 0; k < kModeCount; ++k) bin.presence[k] += c.posteriors[k];
  }
  return bins;
}

// ---------------------------------------------------------------------------
// Polygons (x = lon, y = lat)

using Ring = std::vector<GeoPoint>;

/// First ring is the exterior; the rest are holes.
struct Polygon {
  std::vector<Ring> rings;
};

inline void validate_polygon(const Polygon& poly) {
  if (poly.rings.empty()) throw Error("degenerate-ring", "polygon without rings");
  for (const auto& r : poly.rings) {
    if (r.size() < 4) throw Error("degenerate-ring", "ring needs at least 4 vertices including closure");
    if (!(r.front() == r.back())) throw Error("degenerate-ring", "ring is not closed");
  }
}

namespace detail {

inline bool on_segment(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
  const double cross = (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
  const double scale = std::max({std::abs(b.lon - a.lon), std::abs(b.lat - a.lat), 1.0});
  if (std::abs(cross) > 1e-12 * scale) return false;
  return p.lon >= std::min(a.lon, b.lon) && p.lon <= std::max(a.lon, b.lon) &&
         p.lat >= std::min(a.lat, b.lat) && p.lat <= std::max(a.lat, b.lat);
}

}  // namespace detail

/// Even-odd rule over all rings; points on any ring edge count as inside.
inline bool point_in_polygon(const GeoPoint& p, const Polygon& poly) {
  validate_polygon(poly);
  bool inside = false;
  for (const auto& ring : poly.rings) {
    for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
      const GeoPoint& a = ring[j];
      const GeoPoint& b = ring[i];
      if (detail::on_segment(p, a, b)) return true;
      if ((a.lat > p.lat) != (b.lat > p.lat)) {
        const double x = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
        if (p.lon < x) inside = !inside;
      }
    }
  }
  return inside;
}

struct BoundingBox {
  double min_lat = std::numeric_limits<double>::infinity();
  double max_lat = -std::numeric_limits<double>::infinity();
  double min_lon = std::numeric_limits<double>::infinity();
  double max_lon = -std::numeric_limits<double>::infinity();

  void extend(const GeoPoint& p) {
    min_lat = std::min(min_lat, p.lat);
    max_lat = std::max(max_lat, p.lat);
    min_lon = std::min(min_lon, p.lon);
    max_lon = std::max(max_lon, p.lon);
  }
  bool contains(const GeoPoint& p) const {
    return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon && p.lon <= max_lon;
  }
};

struct County {
  std::string id;
  std::vector<Polygon> polygons;
  BoundingBox bbox;

  bool contains(const GeoPoint& p) const {
    if (!bbox.contains(p)) return false;
    for (const auto& poly : polygons) {
      if (point_in_polygon(p, poly)) return true;
    }
    return false;
  }
};

namespace detail {

inline Ring ring_from_json(const nlohmann::json& coords) {
  Ring r;
  for (const auto& pt : coords) r.push_back({pt.at(1).get<double>(), pt.at(0).get<double>()});
  return r;
}

inline Polygon polygon_from_json(const nlohmann::json& coords) {
  Polygon p;
  for (const auto& ring : coords) p.rings.push_back(ring_from_json(ring));
  validate_polygon(p);
  return p;
}

}  // namespace detail

/// Reads a GeoJSON FeatureCollection of Polygon/MultiPolygon features, each
/// carrying a `county_id` property. Counties keep file order.
inline std::vector<County> load_counties(std::istream& in) {
  std::vector<County> out;
  try {
    const auto doc = nlohmann::json::parse(in);
    if (doc.at("type").get<std::string>() != "FeatureCollection") {
      throw Error("unreadable-boundaries", "boundary file is not a FeatureCollection");
    }
    for (const auto& feature : doc.at("features")) {
      County c;
      const auto& id = feature.at("properties").at("county_id");
      c.id = id.is_string() ? id.get<std::string>() : id.dump();
      const auto& geom = feature.at("geometry");
      const auto type = geom.at("type").get<std::string>();
      if (type == "Polygon") {
        c.polygons.push_back(detail::polygon_from_json(geom.at("coordinates")));
      } else if (type == "MultiPolygon") {
        for (const auto& poly : geom.at("coordinates")) c.polygons.push_back(detail::polygon_from_json(poly));
      } else {
        throw Error("unreadable-boundaries", "unsupported geometry type " + type);
      }
      for (const auto& poly : c.polygons) {
        for (const auto& p : poly.rings.front()) c.bbox.extend(p);
      }
      out.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("unreadable-boundaries", e.what());
  } catch (const Error& e) {
    if (e.code() == "unreadable-boundaries") throw;
    throw Error("unreadable-boundaries", e.what());
  }
  return out;
}

// ---------------------------------------------------------------------------
// County activity

inline constexpr std::string_view kUnassignedCounty = "<unassigned>";

struct CountyStat {
  std::string county_id;
  std::size_t tweet_count = 0;
  /// Tweets positive for the All classifier.
  std::size_t political = 0;
  /// 100 * political / tweet_count; undefined for counties without tweets.
  std::optional<double> political_pct;
  std::array<std::size_t, kModeCount> positives{};
};

struct CountyTable {
  std::vector<CountyStat> counties;
  CountyStat unassigned;

  std::size_t total() const {
    std::size_t n = unassigned.tweet_count;
    for (const auto& c : counties) n += c.tweet_count;
    return n;
  }
};

/// Assigns each tweet in [from, to) to the first county (file order) that
/// contains it, or to the `<unassigned>` bucket.
inline CountyTable county_activity(std::span<const ClassifiedTweet> tweets, std::span<const County> counties,
                                   Instant from, Instant to) {
  if (to < from) throw Error("invalid-span", "county range ends before it starts");
  CountyTable table;
  table.counties.resize(counties.size());
  for (std::size_t i = 0; i < counties.size(); ++i) table.counties[i].county_id = counties[i].id;
  table.unassigned.county_id = std::string(kUnassignedCounty);
  for (const std::size_t i : time_order(tweets)) {
    const auto& c = tweets[i];
    if (c.tweet.timestamp < from || c.tweet.timestamp >= to) continue;
    CountyStat* stat = &table.unassigned;
    for (std::size_t k = 0; k < counties.size(); ++k) {
      if (counties[k].contains(c.tweet.point())) {
        stat = &table.counties[k];
        break;
      }
    }
    ++stat->tweet_count;
    if (c.positives.contains(ActionMode::All)) ++stat->political;
    for (auto mode : kAllModes) {
      if (c.positives.contains(mode)) ++stat->positives[index_of(mode)];
    }
  }
  auto finish = [](CountyStat& s) {
    if (s.tweet_count) {
      s.political_pct = 100.0 * static_cast<double>(s.political) / static_cast<double>(s.tweet_count);
    }
  };
  for (auto& s : table.counties) finish(s);
  finish(table.unassigned);
  return table;
}

// ---------------------------------------------------------------------------
// Exports

inline constexpr int kSeriesVersion = 1;
inline constexpr int kCountiesVersion = 1;

inline nlohmann::ordered_json series_to_json(std::span<const TimeBin> bins, std::span<const ActionMode> modes,
                                             Instant from, Instant to) {
  nlohmann::ordered_json obj;
  obj["format"] = "socact.series";
  obj["version"] = kSeriesVersion;
  obj["from"] = format_utc(from);
  obj["to"] = format_utc(to);
  auto names = nlohmann::ordered_json::array();
  for (auto m : modes) names.push_back(std::string(mode_name(m)));
  obj["modes"] = std::move(names);
  auto rows = nlohmann::ordered_json::array();
  for (const auto& b : bins) {
    nlohmann::ordered_json presence = nlohmann::ordered_json::object();
    for (auto m : modes) presence[std::string(mode_name(m))] = b.presence[index_of(m)];
    rows.push_back({{"start", format_utc(b.start)}, {"tweet_count", b.tweet_count}, {"presence", presence}});
  }
  obj["bins"] = std::move(rows);
  return obj;
}

/// One row per bin per mode.
inline std::string series_to_csv(std::span<const TimeBin> bins, std::span<const ActionMode> modes) {
  std::ostringstream out;
  out << "start,mode,presence,tweet_count\n";
  for (const auto& b : bins) {
    for (auto m : modes) {
      out << format_utc(b.start) << ',' << mode_name(m) << ',' << format_double17(b.presence[index_of(m)]) << ','
          << b.tweet_count << '\n';
    }
  }
  return out.str();
}

inline nlohmann::ordered_json county_to_json(const CountyStat& s) {
  nlohmann::ordered_json row;
  row["county_id"] = s.county_id;
  row["tweet_count"] = s.tweet_count;
  row["political"] = s.political;
  row["political_pct"] = s.political_pct ? nlohmann::ordered_json(*s.political_pct) : nlohmann::ordered_json(nullptr);
  row["political_pct_defined"] = s.political_pct.has_value();
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (auto m : kAllModes) per[std::string(mode_name(m))] = s.positives[index_of(m)];
  row["positives"] = std::move(per);
  return row;
}

inline nlohmann::ordered_json counties_to_json(const CountyTable& t, Instant from, Instant to) {
  nlohmann::ordered_json obj;
  obj["format"] = "socact.counties";
  obj["version"] = kCountiesVersion;
  obj["from"] = format_utc(from);
  obj["to"] = format_utc(to);
  auto rows = nlohmann::ordered_json::array();
  for (const auto& s : t.counties) rows.push_back(county_to_json(s));
  obj["counties"] = std::move(rows);
  obj["unassigned"] = county_to_json(t.unassigned);
  obj["total"] = t.total();
  return obj;
}

inline std::string counties_to_csv(const CountyTable& t) {
  std::ostringstream out;
  out << "county_id,tweet_count,political,political_pct";
  for (auto m : kAllModes) out << ",positive_" << mode_name(m);
  out << '\n';
  auto row = [&](const CountyStat& s) {
    out << s.county_id << ',' << s.tweet_count << ',' << s.political << ','
        << (s.political_pct ? format_double17(*s.political_pct) : std::string("undefined"));
    for (auto m : kAllModes) out << ',' << s.positives[index_of(m)];
    out << '\n';
  };
  for (const auto& s : t.counties) row(s);
  row(t.unassigned);
  return out.str();
}

}  // namespace socact

#endif  // SOCACT_ANALYTICS_HPP

#ifndef SOCACT_INGEST_HPP
#define SOCACT_INGEST_HPP

#include <array>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "socact/common.hpp"
#include "socact/geo.hpp"
#include "socact/modes.hpp"
#include "socact/text.hpp"

namespace socact {

/// One geo-tagged, timestamped message. `text` is kept as received;
/// normalization happens when the message is featurized.
struct Tweet {
  std::string id;
  Instant timestamp = 0;
  double lat = 0.0;
  double lon = 0.0;
  std::string text;
  /// Atomic modes coded by a human; absent for uncoded data.
  std::optional<ModeSet> labels;
  /// Labels of the event windows that admitted this tweet.
  std::vector<std::string> windows;

  GeoPoint point() const { return {lat, lon}; }

  friend bool operator==(const Tweet&, const Tweet&) = default;
};

enum class RejectReason : std::uint8_t {
  MalformedRecord = 0,
  MissingField,
  InvalidFieldType,
  BadTimestamp,
  CoordinateOutOfRange,
  EmptyText,
  InvalidLabel,
};

inline constexpr std::size_t kRejectReasonCount = 7;

inline constexpr std::array<std::string_view, kRejectReasonCount> kRejectCodes = {
    "malformed-record",        "missing-field", "invalid-field-type", "bad-timestamp",
    "coordinate-out-of-range", "empty-text",    "invalid-label"};

constexpr std::string_view reject_code(RejectReason r) {
  return kRejectCodes[static_cast<std::size_t>(r)];
}

struct Rejection {
  RejectReason reason;
  std::string detail;
};

using ParseResult = std::variant<Tweet, Rejection>;

/// Counts of accepted and rejected records; accepted + rejected == seen.
struct IngestTally {
  std::size_t accepted = 0;
  std::array<std::size_t, kRejectReasonCount> rejected{};

  void add(const Rejection& r) { ++rejected[static_cast<std::size_t>(r.reason)]; }
  std::size_t rejected_total() const {
    std::size_t n = 0;
    for (auto c : rejected) n += c;
    return n;
  }
  std::size_t seen() const { return accepted + rejected_total(); }
};

namespace detail {

inline Rejection reject(RejectReason r, std::string detail) { return {r, std::move(detail)}; }

}  // namespace detail

/// Parses one newline-delimited record into a validated Tweet.
inline ParseResult parse_tweet_record(std::string_view line) {
  using nlohmann::json;
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    return detail::reject(RejectReason::MalformedRecord, e.what());
  }
  if (!obj.is_object()) return detail::reject(RejectReason::MalformedRecord, "record is not an object");

  for (const char* key : {"id", "ts", "lat", "lon", "text"}) {
    if (!obj.contains(key)) return detail::reject(RejectReason::MissingField, key);
  }
  const auto& id = obj["id"];
  const auto& ts = obj["ts"];
  const auto& lat = obj["lat"];
  const auto& lon = obj["lon"];
  const auto& text = obj["text"];
  if (!id.is_string()) return detail::reject(RejectReason::InvalidFieldType, "id");
  if (!ts.is_string()) return detail::reject(RejectReason::InvalidFieldType, "ts");
  if (!lat.is_number()) return detail::reject(RejectReason::InvalidFieldType, "lat");
  if (!lon.is_number()) return detail::reject(RejectReason::InvalidFieldType, "lon");
  if (!text.is_string()) return detail::reject(RejectReason::InvalidFieldType, "text");

  Tweet t;
  t.id = id.get<std::string>();
  const auto instant = parse_utc(ts.get_ref<const std::string&>());
  if (!instant) return detail::reject(RejectReason::BadTimestamp, ts.get<std::string>());
  t.timestamp = *instant;
  t.lat = lat.get<double>();
  t.lon = lon.get<double>();
  if (!valid_point(t.point())) {
    return detail::reject(RejectReason::CoordinateOutOfRange,
                          format_double17(t.lat) + "," + format_double17(t.lon));
  }
  t.text = text.get<std::string>();
  if (normalize_text(t.text).empty()) return detail::reject(RejectReason::EmptyText, t.id);

  if (auto it = obj.find("labels"); it != obj.end()) {
    if (!it->is_array()) return detail::reject(RejectReason::InvalidFieldType, "labels");
    ModeSet labels;
    for (const auto& v : *it) {
      if (!v.is_string()) return detail::reject(RejectReason::InvalidLabel, v.dump());
      const auto mode = parse_mode(v.get_ref<const std::string&>());
      if (!mode || !is_atomic(*mode)) {
        return detail::reject(RejectReason::InvalidLabel, v.get<std::string>());
      }
      labels.insert(*mode);
    }
    t.labels = labels;
  }
  if (auto it = obj.find("windows"); it != obj.end()) {
    if (!it->is_array()) return detail::reject(RejectReason::InvalidFieldType, "windows");
    for (const auto& v : *it) {
      if (!v.is_string()) return detail::reject(RejectReason::InvalidFieldType, "windows");
      t.windows.push_back(v.get<std::string>());
    }
  }
  return t;
}

/// Record object in the input schema; key order id, ts, lat, lon, text,
/// then the optional labels and windows.
inline nlohmann::ordered_json tweet_to_json(const Tweet& t) {
  nlohmann::ordered_json obj;
  obj["id"] = t.id;
  obj["ts"] = format_utc(t.timestamp);
  obj["lat"] = t.lat;
  obj["lon"] = t.lon;
  obj["text"] = t.text;
  if (t.labels) {
    auto arr = nlohmann::ordered_json::array();
    for (auto m : t.labels->to_vector()) arr.push_back(std::string(mode_name(m)));
    obj["labels"] = std::move(arr);
  }
  if (!t.windows.empty()) obj["windows"] = t.windows;
  return obj;
}

inline std::string serialize_tweet(const Tweet& t) { return tweet_to_json(t).dump(); }

/// Streams records from `in`, handing each accepted Tweet to `on_tweet` and
/// each rejection (with its 1-based line number) to `on_reject`. Blank lines
/// are not records.
template <class OnTweet, class OnReject>
IngestTally read_tweets(std::istream& in, OnTweet&& on_tweet, OnReject&& on_reject) {
  IngestTally tally;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto parsed = parse_tweet_record(line);
    if (auto* t = std::get_if<Tweet>(&parsed)) {
      ++tally.accepted;
      on_tweet(std::move(*t));
    } else {
      auto& r = std::get<Rejection>(parsed);
      tally.add(r);
      on_reject(line_no, r);
    }
  }
  return tally;
}

template <class OnTweet>
IngestTally read_tweets(std::istream& in, OnTweet&& on_tweet) {
  return read_tweets(in, std::forward<OnTweet>(on_tweet), [](std::size_t, const Rejection&) {});
}

// ---------------------------------------------------------------------------
// Event windows and the spatiotemporal protest filter

struct EventWindow {
  std::string label;
  GeoPoint center;
  double radius_m = 0.0;
  Instant start = 0;
  Instant end = 0;

  /// Closed on both ends in time and space.
  bool contains(const Tweet& t) const {
    return t.timestamp >= start && t.timestamp <= end && haversine(t.point(), center) <= radius_m;
  }
};

/// Parses one event-window record; throws Error on any invalid field.
inline EventWindow parse_event_window(std::string_view line) {
  using nlohmann::json;
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error("malformed-record", std::string("event window: ") + e.what());
  }
  auto field = [&](const char* key) -> const json& {
    if (!obj.is_object() || !obj.contains(key)) {
      throw Error("missing-field", std::string("event window lacks ") + key);
    }
    return obj[key];
  };
  EventWindow w;
  try {
    w.label = field("label").get<std::string>();
    w.center = {field("lat").get<double>(), field("lon").get<double>()};
    w.radius_m = field("radius_m").get<double>();
    w.start = require_utc(field("start").get<std::string>());
    w.end = require_utc(field("end").get<std::string>());
  } catch (const json::type_error& e) {
    throw Error("invalid-field-type", std::string("event window: ") + e.what());
  }
  if (!valid_point(w.center)) throw Error("coordinate-out-of-range", "event window " + w.label);
  if (!(w.radius_m > 0.0)) throw Error("invalid-window", "radius_m must be positive: " + w.label);
  if (!(w.start < w.end)) throw Error("invalid-window", "start must precede end: " + w.label);
  return w;
}

inline std::vector<EventWindow> read_event_windows(std::istream& in) {
  std::vector<EventWindow> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_event_window(line));
  }
  return out;
}

/// Admits tweets that fall inside at least one event window and tags them
/// with every matching window label, in window-list order.
class ProtestFilter {
 public:
  explicit ProtestFilter(std::vector<EventWindow> windows) : windows_(std::move(windows)) {
    if (windows_.empty()) throw Error("empty-windows", "protest filter needs at least one window");
  }

  std::vector<std::string> matches(const Tweet& t) const {
    std::vector<std::string> out;
    for (const auto& w : windows_) {
      if (w.contains(t)) out.push_back(w.label);
    }
    return out;
  }

  /// Tags `t` and returns true when it is admitted. Re-applying is a no-op.
  bool apply(Tweet& t) const {
    auto m = matches(t);
    if (m.empty()) return false;
    t.windows = std::move(m);
    return true;
  }

  const std::vector<EventWindow>& windows() const { return windows_; }

 private:
  std::vector<EventWindow> windows_;
};

inline std::vector<Tweet> protest_filter(std::span<const Tweet> tweets,
                                         std::span<const EventWindow> windows) {
  const ProtestFilter filter({windows.begin(), windows.end()});
  std::vector<Tweet> out;
  for (Tweet t : tweets) {
    if (filter.apply(t)) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace socact

#endif  // SOCACT_INGEST_HPP

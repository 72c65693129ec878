#ifndef SOCACT_TOOLS_SERVICE_HPP
#define SOCACT_TOOLS_SERVICE_HPP

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"
#include "socact/analytics.hpp"
#include "socact/common.hpp"
#include "socact/explain.hpp"
#include "socact/geo.hpp"
#include "socact/model_io.hpp"
#include "socact/modes.hpp"

namespace socact::service {

using Json = nlohmann::ordered_json;
using Params = std::map<std::string, std::string, std::less<>>;

struct Response {
  int status = 200;
  std::string body;
};

inline Response error_response(int status, std::string_view code, std::string_view message) {
  Json e;
  e["error"] = {{"code", code}, {"message", message}};
  return {status, e.dump()};
}

/// Immutable index over a directory of exports written by the CLI. Files
/// are recognized by their `format` field; anything else is ignored.
class ArtifactStore {
 public:
  static ArtifactStore load(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw Error("unreadable-file", "artifact directory not found");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    ArtifactStore store;
    for (const auto& f : files) {
      Json obj;
      try {
        std::ifstream in(f);
        obj = Json::parse(in);
      } catch (const nlohmann::json::exception&) {
        continue;
      }
      store.add(std::move(obj));
    }
    return store;
  }

  /// Indexes one export object. Throws on schema mismatch or duplicate key.
  void add(Json obj) {
    if (!obj.is_object() || !obj.contains("format") || !obj["format"].is_string()) return;
    const auto format = obj["format"].get<std::string>();
    if (format == "socact.clusters") {
      check_schema(to_plain(obj), format, kClustersVersion);
      const auto label = obj["window"]["label"].get<std::string>();
      if (!clusters_.emplace(label, std::move(obj)).second) {
        throw Error("duplicate-artifact", "two cluster exports for window " + label);
      }
    } else if (format == "socact.series") {
      check_schema(to_plain(obj), format, kSeriesVersion);
      insert_span(series_, std::move(obj), "series");
    } else if (format == "socact.counties") {
      check_schema(to_plain(obj), format, kCountiesVersion);
      insert_span(counties_, std::move(obj), "county");
    } else if (format == "socact.shift") {
      check_schema(to_plain(obj), format, kShiftVersion);
      if (!obj["window"].is_object()) throw Error("schema-mismatch", "shift export without a window");
      auto key = std::make_pair(obj["window"]["label"].get<std::string>(), obj["mode"].get<std::string>());
      if (!shifts_.emplace(key, std::move(obj)).second) {
        throw Error("duplicate-artifact", "two shift exports for window " + key.first + " mode " + key.second);
      }
    }
  }

  Response handle(std::string_view path, const Params& params) const {
    try {
      if (path == "/v1/windows") return {200, windows().dump()};
      if (path == "/v1/clusters") {
        const auto it = clusters_.find(require(params, "window"));
        if (it == clusters_.end()) return error_response(404, "not-found", "no clusters for that window");
        return {200, it->second.dump()};
      }
      if (path == "/v1/series") return series(params);
      if (path == "/v1/shift") {
        const auto window = require(params, "window");
        const auto mode = std::string(mode_name(require_mode(require(params, "mode"))));
        const auto it = shifts_.find({window, mode});
        if (it == shifts_.end()) return error_response(404, "not-found", "no shift for that window and mode");
        return {200, it->second.dump()};
      }
      if (path == "/v1/counties") {
        const auto it = counties_.find(span_key(params));
        if (it == counties_.end()) return error_response(404, "not-found", "no county table for that range");
        return {200, it->second.dump()};
      }
      return error_response(404, "unknown-endpoint", std::string(path));
    } catch (const Error& e) {
      return error_response(400, e.code(), e.what());
    }
  }

  std::size_t size() const { return clusters_.size() + series_.size() + counties_.size() + shifts_.size(); }

 private:
  using SpanKey = std::pair<Instant, Instant>;

  static nlohmann::json to_plain(const Json& obj) {
    return nlohmann::json{{"format", obj["format"]}, {"version", obj.value("version", Json())}};
  }

  static std::string require(const Params& params, std::string_view name) {
    const auto it = params.find(name);
    if (it == params.end() || it->second.empty()) {
      throw Error("missing-parameter", "query parameter '" + std::string(name) + "' is required");
    }
    return it->second;
  }

  static SpanKey span_key(const Params& params) {
    return {require_utc(require(params, "from")), require_utc(require(params, "to"))};
  }

  static void insert_span(std::map<SpanKey, Json>& into, Json obj, std::string_view what) {
    const SpanKey key{require_utc(obj["from"].get<std::string>()), require_utc(obj["to"].get<std::string>())};
    if (!into.emplace(key, std::move(obj)).second) {
      throw Error("duplicate-artifact", "two " + std::string(what) + " exports for the same range");
    }
  }

  Json windows() const {
    struct Row {
      Instant start, end;
      std::string label;
      const Json* clusters;
    };
    std::vector<Row> rows;
    for (const auto& [label, obj] : clusters_) {
      rows.push_back({require_utc(obj["window"]["start"].get<std::string>()),
                      require_utc(obj["window"]["end"].get<std::string>()), label, &obj});
    }
    std::sort(rows.begin(), rows.end(),
              [](const Row& a, const Row& b) { return std::tie(a.start, a.label) < std::tie(b.start, b.label); });
    Json obj;
    obj["format"] = "socact.windows";
    obj["version"] = 1;
    auto list = Json::array();
    for (const auto& r : rows) {
      auto modes = Json::array();
      for (const auto& [key, shift] : shifts_) {
        if (key.first == r.label) modes.push_back(key.second);
      }
      list.push_back({{"label", r.label},
                      {"start", format_utc(r.start)},
                      {"end", format_utc(r.end)},
                      {"cluster_count", (*r.clusters)["clusters"].size()},
                      {"tweet_count", (*r.clusters)["tweet_count"]},
                      {"shift_modes", std::move(modes)}});
    }
    obj["windows"] = std::move(list);
    return obj;
  }

  // Without `mode` the export is returned as stored; with it, the same
  // export restricted to that one mode.
  Response series(const Params& params) const {
    const auto it = series_.find(span_key(params));
    if (it == series_.end()) return error_response(404, "not-found", "no series for that span");
    const auto mode_it = params.find("mode");
    if (mode_it == params.end() || mode_it->second.empty()) return {200, it->second.dump()};
    const auto mode = std::string(mode_name(require_mode(mode_it->second)));
    const auto& modes = it->second["modes"];
    if (std::find(modes.begin(), modes.end(), Json(mode)) == modes.end()) {
      return error_response(404, "not-found", "series export lacks mode " + mode);
    }
    Json out = it->second;
    out["modes"] = Json::array({mode});
    for (auto& bin : out["bins"]) bin["presence"] = Json{{mode, bin["presence"][mode]}};
    return {200, out.dump()};
  }

  std::map<std::string, Json> clusters_;
  std::map<SpanKey, Json> series_;
  std::map<SpanKey, Json> counties_;
  std::map<std::pair<std::string, std::string>, Json> shifts_;
};

}  // namespace socact::service

#endif  // SOCACT_TOOLS_SERVICE_HPP

#ifndef SOCACT_CLASSIFIED_HPP
#define SOCACT_CLASSIFIED_HPP

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "socact/classify.hpp"
#include "socact/geo.hpp"
#include "socact/ingest.hpp"
#include "socact/model_io.hpp"

namespace socact {

// ---------------------------------------------------------------------------
// Classified stream: the input record plus per-mode posteriors and the
// modes whose posterior reached the threshold.

struct ClassifiedTweet {
  Tweet tweet;
  ModeScores posteriors{};
  ModeSet positives;
  /// Modes the producing bundle scored; others carry no posterior.
  ModeSet scored;
};

inline ClassifiedTweet classify_tweet(const ModelBundle& bundle, Tweet tweet) {
  ClassifiedTweet c;
  const Document doc = featurize(tweet.text, bundle.lexicon);
  for (auto mode : kAllModes) {
    const auto& m = bundle.models[index_of(mode)];
    if (!m) continue;
    const double p = posterior(*m, doc);
    c.posteriors[index_of(mode)] = p;
    c.scored.insert(mode);
    if (p >= m->threshold) c.positives.insert(mode);
  }
  c.tweet = std::move(tweet);
  return c;
}

inline std::string serialize_classified(const ClassifiedTweet& c) {
  auto obj = tweet_to_json(c.tweet);
  nlohmann::ordered_json post = nlohmann::ordered_json::object();
  for (auto mode : kAllModes) {
    if (c.scored.contains(mode)) post[std::string(mode_name(mode))] = c.posteriors[index_of(mode)];
  }
  obj["posteriors"] = std::move(post);
  auto pos = nlohmann::ordered_json::array();
  for (auto mode : c.positives.to_vector()) pos.push_back(std::string(mode_name(mode)));
  obj["positives"] = std::move(pos);
  return obj.dump();
}

/// Parses one classified record; throws Error on anything malformed.
inline ClassifiedTweet parse_classified(std::string_view line) {
  auto parsed = parse_tweet_record(line);
  if (auto* r = std::get_if<Rejection>(&parsed)) {
    throw Error(std::string(reject_code(r->reason)), "classified record: " + r->detail);
  }
  ClassifiedTweet c;
  c.tweet = std::move(std::get<Tweet>(parsed));
  const auto obj = nlohmann::json::parse(line);
  const auto post = obj.find("posteriors");
  const auto pos = obj.find("positives");
  if (post == obj.end() || !post->is_object() || pos == obj.end() || !pos->is_array()) {
    throw Error("schema-mismatch", "classified record lacks posteriors/positives: " + c.tweet.id);
  }
  for (const auto& [name, p] : post->items()) {
    const ActionMode mode = require_mode(name);
    if (!p.is_number()) throw Error("invalid-field-type", "posterior for " + name);
    c.posteriors[index_of(mode)] = p.get<double>();
    c.scored.insert(mode);
  }
  for (const auto& name : *pos) {
    if (!name.is_string()) throw Error("invalid-field-type", "positives");
    c.positives.insert(require_mode(name.get<std::string>()));
  }
  return c;
}

inline std::vector<ClassifiedTweet> read_classified(std::istream& in) {
  std::vector<ClassifiedTweet> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_classified(line));
  }
  return out;
}

}  // namespace socact

#endif  // SOCACT_CLASSIFIED_HPP

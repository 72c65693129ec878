#ifndef SOCACT_MODEL_IO_HPP
#define SOCACT_MODEL_IO_HPP

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "socact/classify.hpp"
#include "socact/common.hpp"
#include "socact/geo.hpp"
#include "socact/ingest.hpp"
#include "socact/modes.hpp"
#include "socact/segment.hpp"

namespace socact {

inline constexpr int kModelVersion = 1;
inline constexpr int kBundleVersion = 1;

/// Rejects objects whose `format`/`version` pair is not the expected one.
inline void check_schema(const nlohmann::json& obj, std::string_view format, int version) {
  if (!obj.is_object() || !obj.contains("format") || !obj["format"].is_string() ||
      obj["format"].get<std::string>() != format) {
    throw Error("schema-mismatch", "expected a " + std::string(format) + " document");
  }
  if (!obj.contains("version") || !obj["version"].is_number_integer() || obj["version"].get<int>() != version) {
    throw Error("schema-version-mismatch", std::string(format) + " version " +
                                               (obj.contains("version") ? obj["version"].dump() : "?") +
                                               " is not supported (expected " + std::to_string(version) + ")");
  }
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("unreadable-file", "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("malformed-file", path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Model file: every real number as a 17-significant-digit decimal string so a
// reload reproduces the model bit for bit.

inline nlohmann::ordered_json model_to_json(const BayesModel& m) {
  nlohmann::ordered_json obj;
  obj["format"] = "socact.model";
  obj["version"] = kModelVersion;
  obj["mode"] = std::string(mode_name(m.mode));
  obj["alpha"] = format_double17(m.alpha);
  obj["log_prior_pos"] = format_double17(m.log_prior_pos);
  obj["log_prior_neg"] = format_double17(m.log_prior_neg);
  obj["unseen_pos"] = format_double17(m.unseen_pos);
  obj["unseen_neg"] = format_double17(m.unseen_neg);
  obj["threshold"] = format_double17(m.threshold);
  obj["vocab_size"] = m.vocab_size;
  obj["docs_pos"] = m.docs_pos;
  obj["docs_neg"] = m.docs_neg;
  std::vector<const std::pair<const std::string, LogLik>*> rows;
  rows.reserve(m.loglik.size());
  for (const auto& kv : m.loglik) rows.push_back(&kv);
  std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return a->first < b->first; });
  auto table = nlohmann::ordered_json::array();
  for (const auto* kv : rows) {
    table.push_back({kv->first, format_double17(kv->second.pos), format_double17(kv->second.neg)});
  }
  obj["loglik"] = std::move(table);
  return obj;
}

inline BayesModel model_from_json(const nlohmann::json& obj) {
  check_schema(obj, "socact.model", kModelVersion);
  BayesModel m;
  try {
    auto num = [&](const char* key) { return parse_double(obj.at(key).get<std::string>()); };
    m.mode = require_mode(obj.at("mode").get<std::string>());
    m.alpha = num("alpha");
    m.log_prior_pos = num("log_prior_pos");
    m.log_prior_neg = num("log_prior_neg");
    m.unseen_pos = num("unseen_pos");
    m.unseen_neg = num("unseen_neg");
    m.threshold = num("threshold");
    m.vocab_size = obj.at("vocab_size").get<std::size_t>();
    m.docs_pos = obj.at("docs_pos").get<std::uint64_t>();
    m.docs_neg = obj.at("docs_neg").get<std::uint64_t>();
    const auto& table = obj.at("loglik");
    m.loglik.reserve(table.size());
    for (const auto& row : table) {
      m.loglik.emplace(row.at(0).get<std::string>(),
                       LogLik{parse_double(row.at(1).get<std::string>()), parse_double(row.at(2).get<std::string>())});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed-model", e.what());
  }
  if (m.threshold < 0.0 || m.threshold > 1.0) throw Error("malformed-model", "threshold outside [0, 1]");
  if (m.loglik.size() != m.vocab_size) throw Error("malformed-model", "vocab_size does not match the table");
  return m;
}

inline void save_model(std::ostream& out, const BayesModel& m) { out << model_to_json(m).dump(1) << '\n'; }

inline BayesModel load_model(std::istream& in) {
  try {
    return model_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("malformed-model", e.what());
  }
}

// ---------------------------------------------------------------------------
// Bundle: the lexicon plus one model per mode.

struct ModelBundle {
  MweLexicon lexicon;
  std::array<std::optional<BayesModel>, kModeCount> models;

  const BayesModel& model(ActionMode mode) const {
    const auto& m = models[index_of(mode)];
    if (!m) throw Error("missing-model", "bundle has no model for " + std::string(mode_name(mode)));
    return *m;
  }

  ModeScores thresholds() const {
    ModeScores t;
    t.fill(1.0);
    for (auto mode : kAllModes) {
      if (const auto& m = models[index_of(mode)]) t[index_of(mode)] = m->threshold;
    }
    return t;
  }
};

inline std::string model_file_name(ActionMode mode) { return std::string(mode_name(mode)) + ".model.json"; }

/// Writes bundle.json, lexicon.txt and one model file per present mode into
/// `dir`. Returns the bundle file path. A non-null `provenance` is stored
/// verbatim in bundle.json.
inline std::filesystem::path save_bundle(const std::filesystem::path& dir, const ModelBundle& bundle,
                                         const nlohmann::ordered_json& provenance = nullptr) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream lex(dir / "lexicon.txt");
    write_lexicon(lex, bundle.lexicon);
  }
  nlohmann::ordered_json obj;
  obj["format"] = "socact.bundle";
  obj["version"] = kBundleVersion;
  obj["lexicon"] = "lexicon.txt";
  nlohmann::ordered_json models = nlohmann::ordered_json::object();
  for (auto mode : kAllModes) {
    const auto& m = bundle.models[index_of(mode)];
    if (!m) continue;
    std::ofstream out(dir / model_file_name(mode));
    save_model(out, *m);
    models[std::string(mode_name(mode))] = model_file_name(mode);
  }
  obj["models"] = std::move(models);
  if (!provenance.is_null()) obj["provenance"] = provenance;
  const auto path = dir / "bundle.json";
  std::ofstream out(path);
  out << obj.dump(1) << '\n';
  return path;
}

/// Accepts either the bundle file or the directory holding bundle.json.
inline ModelBundle load_bundle(std::filesystem::path path) {
  if (std::filesystem::is_directory(path)) path /= "bundle.json";
  const auto obj = read_json_file(path);
  check_schema(obj, "socact.bundle", kBundleVersion);
  const auto dir = path.parent_path();
  ModelBundle b;
  try {
    std::ifstream lex(dir / obj.at("lexicon").get<std::string>());
    if (!lex) throw Error("unreadable-file", "bundle lexicon is missing");
    b.lexicon = read_lexicon(lex);
    for (const auto& [name, file] : obj.at("models").items()) {
      const ActionMode mode = require_mode(name);
      std::ifstream in(dir / file.get<std::string>());
      if (!in) throw Error("unreadable-file", "missing model file " + file.get<std::string>());
      BayesModel m = load_model(in);
      if (m.mode != mode) throw Error("malformed-bundle", "model file for " + name + " holds another mode");
      b.models[index_of(mode)] = std::move(m);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed-bundle", e.what());
  }
  return b;
}

}  // namespace socact

#endif  // SOCACT_MODEL_IO_HPP

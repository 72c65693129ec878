#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <string>

#include "pipeline.hpp"
#include "socact/socact.hpp"

namespace socact {
namespace {

using namespace socact::testing;

class CliPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / "socact_test_cli";
    failure_ = run_pipeline(dir_, 7);
  }

  void SetUp() override { ASSERT_EQ(failure_, ""); }

  static nlohmann::json load(const fs::path& rel) { return read_json_file(dir_ / rel); }

  static std::vector<ClassifiedTweet> classified() {
    std::ifstream in(dir_ / "classified.jsonl");
    return read_classified(in);
  }

  static inline fs::path dir_;
  static inline std::string failure_;
};

TEST_F(CliPipeline, ExportsCarrySchemaAndProvenance) {
  const std::vector<std::pair<std::string, std::string>> exports = {
      {"artifacts/clusters.json", "socact.clusters"}, {"artifacts/shift.json", "socact.shift"},
      {"artifacts/series.json", "socact.series"},     {"artifacts/counties.json", "socact.counties"},
      {"eval.json", "socact.eval"},                   {"bundle/bundle.json", "socact.bundle"},
      {"classified.jsonl.meta.json", "socact.meta"},  {"series.csv.meta.json", "socact.meta"}};
  const std::regex digest("sha256:[0-9a-f]{64}");
  for (const auto& [file, format] : exports) {
    SCOPED_TRACE(file);
    const auto obj = load(file);
    EXPECT_NO_THROW(check_schema(obj, format, 1));
    ASSERT_TRUE(obj.contains("provenance"));
    const auto& prov = obj["provenance"];
    EXPECT_TRUE(prov["config"].is_object());
    ASSERT_FALSE(prov["inputs"].empty());
    for (const auto& [role, d] : prov["inputs"].items()) EXPECT_TRUE(std::regex_match(d.get<std::string>(), digest)) << role;
  }
  // No export mentions where its inputs lived.
  for (const auto& rel : tree(dir_)) {
    const auto text = slurp(dir_ / rel);
    EXPECT_EQ(text.find(kData.string()), std::string::npos) << rel;
    EXPECT_EQ(text.find(dir_.string()), std::string::npos) << rel;
  }
}

TEST_F(CliPipeline, SeriesConservesPosteriorMass) {
  const auto series = load("artifacts/series.json");
  const Instant from = require_utc(kSpanFrom), to = require_utc(kSpanTo);
  std::map<std::string, double> expected;
  std::size_t count = 0;
  for (const auto& t : classified()) {
    if (t.tweet.timestamp < from || t.tweet.timestamp >= to) continue;
    ++count;
    for (auto m : kAllModes) expected[std::string(mode_name(m))] += t.posteriors[index_of(m)];
  }
  ASSERT_GT(count, 0u);
  EXPECT_EQ(series["bins"].size(), 48u);
  EXPECT_EQ(series["modes"].size(), 9u);
  std::map<std::string, double> got;
  std::size_t got_count = 0;
  for (const auto& bin : series["bins"]) {
    got_count += bin["tweet_count"].get<std::size_t>();
    for (const auto& [mode, p] : bin["presence"].items()) {
      got[mode] += p.get<double>();
      EXPECT_LE(p.get<double>(), bin["tweet_count"].get<double>() + 1e-12);
    }
  }
  EXPECT_EQ(got_count, count);
  for (const auto& [mode, sum] : expected) EXPECT_NEAR(got[mode], sum, 1e-9) << mode;
  const auto csv = slurp(dir_ / "series.csv");
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), 1 + 48u * 9u);
}

TEST_F(CliPipeline, ClustersPartitionTheWindow) {
  const auto obj = load("artifacts/clusters.json");
  const Instant from = require_utc(kWindowFrom), to = require_utc(kWindowTo);
  const auto bundle = load_bundle(dir_ / "bundle");
  const auto thresholds = bundle.thresholds();
  std::map<std::string, ClassifiedTweet> in_window;
  for (auto& t : classified()) {
    if (t.tweet.timestamp >= from && t.tweet.timestamp < to) in_window.emplace(t.tweet.id, t);
  }
  std::multiset<std::string> seen;
  ASSERT_GE(obj["clusters"].size(), 1u);
  for (const auto& c : obj["clusters"]) {
    EXPECT_EQ(c["count"].get<std::size_t>(), c["member_ids"].size());
    for (const auto& [mode, frac] : c["positive_fraction"].items()) {
      std::size_t pos = 0;
      for (const auto& id : c["member_ids"]) pos += in_window.at(id).posteriors[index_of(require_mode(mode))] >=
                                                    thresholds[index_of(require_mode(mode))];
      EXPECT_DOUBLE_EQ(frac.get<double>(), static_cast<double>(pos) / static_cast<double>(c["count"].get<double>()));
    }
    for (const auto& id : c["member_ids"]) seen.insert(id.get<std::string>());
  }
  for (const auto& id : obj["noise_ids"]) seen.insert(id.get<std::string>());
  EXPECT_EQ(seen.size(), in_window.size());
  EXPECT_EQ(obj["tweet_count"].get<std::size_t>(), in_window.size());
  for (const auto& [id, t] : in_window) EXPECT_EQ(seen.count(id), 1u) << id;
}

TEST_F(CliPipeline, CountiesConserveTweets) {
  const auto obj = load("artifacts/counties.json");
  const Instant from = require_utc(kSpanFrom), to = require_utc(kSpanTo);
  std::size_t expected = 0;
  for (const auto& t : classified()) expected += t.tweet.timestamp >= from && t.tweet.timestamp < to;
  std::size_t sum = obj["unassigned"]["tweet_count"].get<std::size_t>();
  for (const auto& c : obj["counties"]) sum += c["tweet_count"].get<std::size_t>();
  EXPECT_EQ(sum, expected);
  EXPECT_EQ(obj["total"].get<std::size_t>(), expected);
  EXPECT_EQ(obj["counties"].size(), 16u);
}

TEST_F(CliPipeline, ShiftExportIsOrdered) {
  const auto obj = load("artifacts/shift.json");
  EXPECT_EQ(obj["mode"], "collective_force");
  EXPECT_EQ(obj["window"]["label"], kWindowFrom);
  const auto& e = obj["entries"];
  ASSERT_FALSE(e.empty());
  for (std::size_t i = 1; i < e.size(); ++i) {
    EXPECT_GE(std::abs(e[i - 1]["contribution"].get<double>()), std::abs(e[i]["contribution"].get<double>()));
  }
  // Default selection is the window's tweets positive for the mode.
  const Instant from = require_utc(kWindowFrom), to = require_utc(kWindowTo);
  std::size_t window = 0, positive = 0;
  for (const auto& t : classified()) {
    if (t.tweet.timestamp < from || t.tweet.timestamp >= to) continue;
    ++window;
    positive += t.positives.contains(ActionMode::CollectiveForce);
  }
  EXPECT_EQ(obj["selection"], "positive");
  EXPECT_EQ(obj["doc_count"].get<std::size_t>(), positive);
  const auto out = dir_ / "shift_all.json";
  const auto r = run_cli("explain --classified " + quote(dir_ / "classified.jsonl") + " --bundle " +
                             quote(dir_ / "bundle") + " --from " + kWindowFrom + " --to " + kWindowTo +
                             " --mode collective_force --selection all --out " + quote(out),
                         dir_);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto all = read_json_file(out);
  EXPECT_EQ(all["doc_count"].get<std::size_t>(), window);
  EXPECT_LT(positive, window);
  fs::remove(out);
  fs::remove(dir_ / "stderr.txt");
}

TEST_F(CliPipeline, EvalTableHasActionColumns) {
  std::istringstream in(slurp(dir_ / "eval.txt"));
  std::string header;
  std::getline(in, header);
  std::istringstream h(header);
  std::vector<std::string> cols;
  for (std::string c; h >> c;) cols.push_back(c);
  EXPECT_EQ(cols, (std::vector<std::string>{"Action", "Abundance", "Threshold", "P", "R", "F1"}));
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) rows += !line.empty();
  EXPECT_EQ(rows, 9u);
  const auto obj = load("eval.json");
  for (const auto& row : obj["modes"]) {
    const double p = row["pooled"]["precision"], r = row["pooled"]["recall"], f = row["pooled"]["f1"];
    if (p + r > 0) {
      EXPECT_NEAR(f, 2 * p * r / (p + r), 1e-9);
    }
    EXPECT_EQ(row["folds"].size(), 10u);
  }
}

TEST_F(CliPipeline, ServeIndexesArtifacts) {
  const auto out = dir_ / "serve_check.txt";
  const auto r = run_cli("serve --artifacts " + quote(dir_ / "artifacts") + " --check", dir_, out);
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(slurp(out), "{\"artifacts\":4}\n");
  fs::remove(out);
}

TEST_F(CliPipeline, EmptyClassifyInputGivesEmptyOutput) {
  const fs::path scratch = fs::temp_directory_path() / "socact_test_cli_empty";
  fs::create_directories(scratch);
  std::ofstream(scratch / "empty.jsonl").close();
  const auto r = run_cli("classify --input " + quote(scratch / "empty.jsonl") + " --bundle " + quote(dir_ / "bundle") +
                             " --out " + quote(scratch / "out.jsonl"),
                         scratch);
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_TRUE(fs::exists(scratch / "out.jsonl"));
  EXPECT_EQ(fs::file_size(scratch / "out.jsonl"), 0u);
  fs::remove_all(scratch);
}

nlohmann::json error_object(const RunResult& r) {
  EXPECT_NE(r.exit_code, 0);
  return nlohmann::json::parse(r.err);
}

TEST_F(CliPipeline, FailuresEmitMachineReadableErrors) {
  const fs::path scratch = fs::temp_directory_path() / "socact_test_cli_err";
  fs::remove_all(scratch);
  fs::create_directories(scratch);
  fs::copy(dir_ / "bundle", scratch / "bundle");
  const std::string window = std::string(" --from ") + kWindowFrom + " --to " + kWindowTo;
  const std::string base = "explain --classified " + quote(dir_ / "classified.jsonl") + " --bundle " +
                           quote(scratch / "bundle") + window;

  // Empty selection.
  auto r = run_cli("explain --classified " + quote(dir_ / "classified.jsonl") + " --bundle " + quote(dir_ / "bundle") +
                       " --from 2001-01-01T00:00:00Z --to 2001-01-01T01:00:00Z --mode all",
                   scratch);
  EXPECT_EQ(error_object(r)["error"]["code"], "empty-selection");

  // Missing model for the requested mode.
  auto bundle = read_json_file(scratch / "bundle" / "bundle.json");
  bundle["models"].erase("force");
  std::ofstream(scratch / "bundle" / "bundle.json") << bundle.dump();
  r = run_cli(base + " --mode force", scratch);
  EXPECT_EQ(error_object(r)["error"]["code"], "missing-model");

  // Schema version mismatch on a model file.
  auto model = read_json_file(scratch / "bundle" / "all.model.json");
  model["version"] = 2;
  std::ofstream(scratch / "bundle" / "all.model.json") << model.dump();
  r = run_cli(base + " --mode all", scratch);
  EXPECT_EQ(error_object(r)["error"]["code"], "schema-version-mismatch");

  // Usage errors.
  r = run_cli("explain --mode all", scratch);
  EXPECT_EQ(error_object(r)["error"]["code"], "usage");
  r = run_cli(base + " --mode nonsense", scratch);
  EXPECT_EQ(error_object(r)["error"]["code"], "unknown-mode");
  fs::remove_all(scratch);
}

TEST_F(CliPipeline, ClassifyIsDeterministic) {
  const fs::path scratch = fs::temp_directory_path() / "socact_test_cli_det";
  fs::create_directories(scratch);
  const auto r = run_cli("classify --input " + quote(kData / "corpus.jsonl") + " --bundle " + quote(dir_ / "bundle") +
                             " --windows " + quote(kData / "events.jsonl") + " --seed 7 --out " +
                             quote(scratch / "again.jsonl"),
                         scratch);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(slurp(scratch / "again.jsonl"), slurp(dir_ / "classified.jsonl"));
  EXPECT_EQ(slurp(scratch / "again.jsonl.meta.json"), slurp(dir_ / "classified.jsonl.meta.json"));
  fs::remove_all(scratch);
}

}  // namespace
}  // namespace socact

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "digest.hpp"
#include "http.hpp"
#include "service.hpp"
#include "socact/socact.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace socact::cli {
namespace {

// ---------------------------------------------------------------------------
// Shared plumbing

struct Common {
  std::uint64_t seed = 1;
  std::string out = "-";
};

/// Config plus input digests, embedded in every export.
class Provenance {
 public:
  void input(const std::string& role, const fs::path& path) { inputs_[role] = "sha256:" + sha256_file(path); }
  Json& config() { return config_; }
  Json to_json() const { return {{"tool", "socact"}, {"config", config_}, {"inputs", inputs_}}; }

 private:
  Json config_ = Json::object();
  Json inputs_ = Json::object();
};

bool to_stdout(const std::string& out) { return out.empty() || out == "-"; }

void write_output(const std::string& out, const std::string& text) {
  if (to_stdout(out)) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Error("unwritable-file", "cannot write " + fs::path(out).filename().string());
  f << text;
}

/// Tabular views cannot carry provenance inline; it goes to a sidecar.
void write_sidecar(const std::string& out, const Json& meta) {
  if (to_stdout(out)) return;
  write_output(out + ".meta.json", meta.dump(1) + "\n");
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("unreadable-file", "cannot open " + fs::path(path).filename().string());
  return in;
}

Json tally_to_json(const IngestTally& t) {
  Json rejected = Json::object();
  for (std::size_t i = 0; i < kRejectReasonCount; ++i) {
    if (t.rejected[i]) rejected[std::string(kRejectCodes[i])] = t.rejected[i];
  }
  return {{"seen", t.seen()}, {"accepted", t.accepted}, {"rejected", std::move(rejected)}};
}

struct Corpus {
  std::vector<Tweet> tweets;
  IngestTally tally;
};

Corpus load_tweets(const std::string& path) {
  Corpus c;
  auto in = open_input(path);
  c.tally = read_tweets(in, [&](Tweet t) { c.tweets.push_back(std::move(t)); });
  return c;
}

/// Coded documents from the labeled records of a corpus; records without a
/// `labels` field are skipped and counted.
std::vector<CodedDocument> code_corpus(const std::vector<Tweet>& tweets, const MweLexicon& lexicon,
                                       std::size_t& unlabeled) {
  std::vector<CodedDocument> out;
  unlabeled = 0;
  for (const auto& t : tweets) {
    if (!t.labels) {
      ++unlabeled;
      continue;
    }
    out.push_back({t.id, featurize(t.text, lexicon), *t.labels});
  }
  return out;
}

MweLexicon load_lexicon_file(const std::string& path) {
  auto in = open_input(path);
  return read_lexicon(in);
}

std::vector<ClassifiedTweet> load_classified(const std::string& path) {
  auto in = open_input(path);
  return read_classified(in);
}

/// Tweets in [from, to), optionally restricted to one event-window label,
/// in (timestamp, id) order.
std::vector<ClassifiedTweet> select(const std::vector<ClassifiedTweet>& all, Instant from, Instant to,
                                    const std::string& event) {
  std::vector<ClassifiedTweet> out;
  for (const auto i : time_order(all)) {
    const auto& c = all[i];
    if (c.tweet.timestamp < from || c.tweet.timestamp >= to) continue;
    if (!event.empty() &&
        std::find(c.tweet.windows.begin(), c.tweet.windows.end(), event) == c.tweet.windows.end()) {
      continue;
    }
    out.push_back(c);
  }
  return out;
}

struct Span {
  std::string from, to;

  std::pair<Instant, Instant> parse() const {
    const Instant a = require_utc(from), b = require_utc(to);
    if (b < a) throw Error("invalid-span", "--to precedes --from");
    return {a, b};
  }
};

std::vector<ActionMode> parse_modes(const std::vector<std::string>& names) {
  std::vector<ActionMode> out;
  for (const auto& n : names) {
    const ActionMode m = require_mode(n);
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  return out;
}

std::vector<std::string> mode_names(std::span<const ActionMode> modes) {
  std::vector<std::string> out;
  for (auto m : modes) out.emplace_back(mode_name(m));
  return out;
}

/// Modes the bundle can score, in report order.
std::vector<ActionMode> bundle_modes(const ModelBundle& b) {
  std::vector<ActionMode> out;
  for (auto m : kReportOrder) {
    if (b.models[index_of(m)]) out.push_back(m);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands

struct LexiconArgs {
  std::string corpus;
  InductionParams params;
};

void cmd_lexicon(const LexiconArgs& a, const Common& c) {
  Provenance prov;
  prov.config() = {{"command", "lexicon"},
                   {"seed", c.seed},
                   {"min_count", a.params.min_count},
                   {"min_score", a.params.min_score},
                   {"max_len", a.params.max_len}};
  prov.input("corpus", a.corpus);
  const Corpus corpus = load_tweets(a.corpus);
  std::vector<Tokens> docs;
  docs.reserve(corpus.tweets.size());
  for (const auto& t : corpus.tweets) docs.push_back(tokenize(normalize_text(t.text)));
  const MweLexicon lex = induce_lexicon(docs, a.params);
  std::ostringstream out;
  out << "# socact.lexicon 1\n";
  out << "# provenance " << prov.to_json().dump() << '\n';
  out << "# ingest " << tally_to_json(corpus.tally).dump() << '\n';
  write_lexicon(out, lex);
  write_output(c.out, out.str());
}

struct TrainArgs {
  std::string corpus;
  std::string lexicon;
  double alpha = 1.0;
  double tune_fraction = 0.2;
};

void cmd_train(const TrainArgs& a, const Common& c) {
  if (to_stdout(c.out)) throw Error("invalid-parameter", "train needs --out <bundle directory>");
  Provenance prov;
  prov.config() = {{"command", "train"}, {"seed", c.seed}, {"alpha", a.alpha}, {"tune_fraction", a.tune_fraction}};
  prov.input("corpus", a.corpus);
  prov.input("lexicon", a.lexicon);
  ModelBundle bundle;
  bundle.lexicon = load_lexicon_file(a.lexicon);
  const Corpus corpus = load_tweets(a.corpus);
  std::size_t unlabeled = 0;
  const auto coded = code_corpus(corpus.tweets, bundle.lexicon, unlabeled);
  Json training = Json::object();
  for (auto mode : kReportOrder) {
    const auto refs = project(coded, mode);
    std::size_t pos = 0;
    for (const auto& r : refs) pos += r.positive;
    Json info = {{"documents", refs.size()}, {"positives", pos}};
    if (pos == 0 || pos == refs.size()) {
      info["skipped"] = "degenerate-training-set";
    } else {
      const FitParams fit{a.alpha, derive_seed(c.seed, index_of(mode) + 1), a.tune_fraction};
      FitResult r = fit_tuned(refs, mode, fit);
      info["threshold"] = r.model.threshold;
      info["tuning_f1"] = r.tuning.f1;
      info["tuned_in_sample"] = r.tuned_in_sample;
      bundle.models[index_of(mode)] = std::move(r.model);
    }
    training[std::string(mode_name(mode))] = std::move(info);
  }
  Json p = prov.to_json();
  p["ingest"] = tally_to_json(corpus.tally);
  p["unlabeled"] = unlabeled;
  p["training"] = std::move(training);
  save_bundle(c.out, bundle, p);
}

struct EvalArgs {
  std::string corpus;
  std::string lexicon;
  std::string holdout;
  std::size_t k = 10;
  double alpha = 1.0;
  double tune_fraction = 0.2;
  std::vector<std::string> modes;
  std::string format = "table";
};

void cmd_eval(const EvalArgs& a, const Common& c) {
  Provenance prov;
  const auto modes = a.modes.empty() ? std::vector<ActionMode>(kReportOrder.begin(), kReportOrder.end())
                                     : parse_modes(a.modes);
  prov.config() = {{"command", "eval"},
                   {"seed", c.seed},
                   {"protocol", a.holdout.empty() ? "cross-validation" : "holdout"},
                   {"k", a.holdout.empty() ? Json(a.k) : Json(nullptr)},
                   {"alpha", a.alpha},
                   {"tune_fraction", a.tune_fraction},
                   {"modes", mode_names(modes)}};
  prov.input("corpus", a.corpus);
  prov.input("lexicon", a.lexicon);
  if (!a.holdout.empty()) prov.input("holdout", a.holdout);
  const MweLexicon lex = load_lexicon_file(a.lexicon);
  std::size_t unlabeled = 0;
  const auto coded = code_corpus(load_tweets(a.corpus).tweets, lex, unlabeled);
  std::vector<CodedDocument> test;
  if (!a.holdout.empty()) test = code_corpus(load_tweets(a.holdout).tweets, lex, unlabeled);

  const CvParams params{a.k, c.seed, a.alpha, a.tune_fraction};
  std::vector<EvalReport> reports;
  for (auto mode : modes) {
    reports.push_back(a.holdout.empty() ? cross_validate(coded, mode, params)
                                        : holdout_evaluate(coded, test, mode, params));
  }
  Json obj = eval_to_json(reports, a.holdout.empty() ? "cross-validation" : "holdout");
  obj["provenance"] = prov.to_json();
  if (a.format == "json") {
    write_output(c.out, obj.dump(1) + "\n");
  } else {
    write_output(c.out, a.format == "csv" ? eval_to_csv(reports) : eval_table(reports));
    write_sidecar(c.out, {{"format", "socact.meta"}, {"version", 1}, {"provenance", prov.to_json()}});
  }
}

struct ClassifyArgs {
  std::string input;
  std::string bundle;
  std::string windows;
  std::string meta;
};

void cmd_classify(const ClassifyArgs& a, const Common& c) {
  Provenance prov;
  prov.config() = {{"command", "classify"}, {"seed", c.seed}, {"protest_filter", !a.windows.empty()}};
  prov.input("input", a.input);
  const fs::path bundle_path = fs::is_directory(a.bundle) ? fs::path(a.bundle) / "bundle.json" : fs::path(a.bundle);
  prov.input("bundle", bundle_path);
  const ModelBundle bundle = load_bundle(bundle_path);
  for (auto mode : kAllModes) {
    if (bundle.models[index_of(mode)]) {
      prov.input("model." + std::string(mode_name(mode)), bundle_path.parent_path() / model_file_name(mode));
    }
  }
  std::optional<ProtestFilter> filter;
  if (!a.windows.empty()) {
    prov.input("windows", a.windows);
    auto in = open_input(a.windows);
    filter.emplace(read_event_windows(in));
  }

  std::ostringstream out;
  std::size_t written = 0, filtered = 0;
  auto in = open_input(a.input);
  const IngestTally tally = read_tweets(in, [&](Tweet t) {
    if (filter && !filter->apply(t)) {
      ++filtered;
      return;
    }
    out << serialize_classified(classify_tweet(bundle, std::move(t))) << '\n';
    ++written;
  });
  write_output(c.out, out.str());
  Json meta = {{"format", "socact.meta"}, {"version", 1}, {"provenance", prov.to_json()}};
  meta["ingest"] = tally_to_json(tally);
  meta["filtered_out"] = filtered;
  meta["written"] = written;
  if (!a.meta.empty()) {
    write_output(a.meta, meta.dump(1) + "\n");
  } else {
    write_sidecar(c.out, meta);
  }
}

struct WindowArgs {
  std::string classified;
  std::string bundle;
  Span span;
  std::string label;
  std::string event;
};

Json window_json(const WindowArgs& w, Instant from, Instant to) {
  return {{"label", w.label.empty() ? format_utc(from) : w.label},
          {"start", format_utc(from)},
          {"end", format_utc(to)},
          {"event", w.event.empty() ? Json(nullptr) : Json(w.event)}};
}

struct ExplainArgs {
  WindowArgs window;
  std::string mode;
  std::size_t top_k = 25;
  std::string selection = "positive";
};

void cmd_explain(const ExplainArgs& a, const Common& c) {
  const ActionMode mode = require_mode(a.mode);
  const auto [from, to] = a.window.span.parse();
  Provenance prov;
  prov.config() = {{"command", "explain"},
                   {"seed", c.seed},
                   {"mode", mode_name(mode)},
                   {"top_k", a.top_k},
                   {"selection", a.selection},
                   {"window", window_json(a.window, from, to)}};
  prov.input("classified", a.window.classified);
  prov.input("bundle", fs::is_directory(a.window.bundle) ? fs::path(a.window.bundle) / "bundle.json"
                                                         : fs::path(a.window.bundle));
  const ModelBundle bundle = load_bundle(a.window.bundle);
  const BayesModel& model = bundle.model(mode);
  const auto chosen = select(load_classified(a.window.classified), from, to, a.window.event);
  std::vector<Document> docs;
  docs.reserve(chosen.size());
  for (const auto& t : chosen) {
    if (a.selection == "positive" && !t.positives.contains(mode)) continue;
    docs.push_back(featurize(t.tweet.text, bundle.lexicon));
  }
  const PhraseShift shift = shift_aggregate(model, docs);
  Json obj = shift_to_json(shift, a.top_k, window_json(a.window, from, to));
  obj["selection"] = a.selection;
  obj["provenance"] = prov.to_json();
  write_output(c.out, obj.dump(1) + "\n");
}

struct ClusterArgs {
  WindowArgs window;
  ClusterParams params;
};

void cmd_cluster(const ClusterArgs& a, const Common& c) {
  const auto [from, to] = a.window.span.parse();
  Provenance prov;
  prov.config() = {{"command", "cluster"},
                   {"seed", c.seed},
                   {"eps_m", a.params.eps_m},
                   {"min_pts", a.params.min_pts},
                   {"window", window_json(a.window, from, to)}};
  prov.input("classified", a.window.classified);
  prov.input("bundle", fs::is_directory(a.window.bundle) ? fs::path(a.window.bundle) / "bundle.json"
                                                         : fs::path(a.window.bundle));
  const ModelBundle bundle = load_bundle(a.window.bundle);
  const auto chosen = select(load_classified(a.window.classified), from, to, a.window.event);
  std::vector<GeoTagged> pts;
  pts.reserve(chosen.size());
  for (const auto& t : chosen) pts.push_back({t.tweet.id, t.tweet.timestamp, t.tweet.point()});
  const Clustering clustering = cluster_window(pts, a.params);
  const ModeScores thresholds = bundle.thresholds();
  std::vector<Cluster> clusters;
  for (const auto& members : clustering.clusters) {
    std::vector<ClusterMember> m;
    for (auto i : members) m.push_back({chosen[i].tweet.id, chosen[i].tweet.point(), chosen[i].posteriors});
    clusters.push_back(cluster_summary(m, thresholds));
  }
  std::vector<std::string> noise;
  for (auto i : clustering.noise) noise.push_back(chosen[i].tweet.id);
  const auto label = window_json(a.window, from, to)["label"].get<std::string>();
  Json obj = clusters_to_json(clusters, noise, label, from, to, a.params, bundle_modes(bundle));
  obj["window"]["event"] = a.window.event.empty() ? Json(nullptr) : Json(a.window.event);
  obj["provenance"] = prov.to_json();
  write_output(c.out, obj.dump(1) + "\n");
}

struct SeriesArgs {
  std::string classified;
  Span span;
  std::vector<std::string> modes;
  std::string format = "json";
};

void cmd_series(const SeriesArgs& a, const Common& c) {
  const auto [from, to] = a.span.parse();
  const auto tweets = load_classified(a.classified);
  std::vector<ActionMode> modes;
  if (a.modes.empty()) {
    // Modes every record carries a posterior for.
    for (auto m : kReportOrder) {
      if (std::all_of(tweets.begin(), tweets.end(), [&](const auto& t) { return t.scored.contains(m); })) {
        modes.push_back(m);
      }
    }
  } else {
    modes = parse_modes(a.modes);
  }
  Provenance prov;
  prov.config() = {{"command", "series"},
                   {"seed", c.seed},
                   {"from", format_utc(from)},
                   {"to", format_utc(to)},
                   {"modes", mode_names(modes)}};
  prov.input("classified", a.classified);
  const auto bins = hourly_presence(tweets, from, to);
  if (a.format == "csv") {
    write_output(c.out, series_to_csv(bins, modes));
    write_sidecar(c.out, {{"format", "socact.meta"}, {"version", 1}, {"provenance", prov.to_json()}});
    return;
  }
  Json obj = series_to_json(bins, modes, from, to);
  obj["provenance"] = prov.to_json();
  write_output(c.out, obj.dump(1) + "\n");
}

struct CountiesArgs {
  std::string classified;
  std::string boundaries;
  Span span;
  std::string format = "json";
};

void cmd_counties(const CountiesArgs& a, const Common& c) {
  const auto [from, to] = a.span.parse();
  Provenance prov;
  prov.config() = {{"command", "counties"}, {"seed", c.seed}, {"from", format_utc(from)}, {"to", format_utc(to)}};
  prov.input("classified", a.classified);
  prov.input("boundaries", a.boundaries);
  auto in = open_input(a.boundaries);
  const auto counties = load_counties(in);
  const auto table = county_activity(load_classified(a.classified), counties, from, to);
  if (a.format == "csv") {
    write_output(c.out, counties_to_csv(table));
    write_sidecar(c.out, {{"format", "socact.meta"}, {"version", 1}, {"provenance", prov.to_json()}});
    return;
  }
  Json obj = counties_to_json(table, from, to);
  obj["provenance"] = prov.to_json();
  write_output(c.out, obj.dump(1) + "\n");
}

struct ServeArgs {
  std::string artifacts;
  std::string bind = "127.0.0.1:8080";
  bool check = false;
};

void cmd_serve(const ServeArgs& a) {
  const auto store = service::ArtifactStore::load(a.artifacts);
  const auto colon = a.bind.rfind(':');
  if (colon == std::string::npos) throw Error("invalid-parameter", "--bind expects host:port");
  const std::string host = a.bind.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(a.bind.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error("invalid-parameter", "--bind port is not a number");
  }
  if (a.check) {
    std::cout << Json{{"artifacts", store.size()}}.dump() << '\n';
    return;
  }
  httplib::Server server;
  service::mount(server, store);
  if (!server.bind_to_port(host, port)) throw Error("bind-failed", "cannot listen on " + a.bind);
  std::cerr << Json{{"listening", a.bind}, {"artifacts", store.size()}}.dump() << '\n';
  server.listen_after_bind();
}

// ---------------------------------------------------------------------------

void print_error(std::string_view code, std::string_view message) {
  std::cerr << Json{{"error", {{"code", code}, {"message", message}}}}.dump() << '\n';
}

int run(int argc, char** argv) {
  CLI::App app{"socact: social action detection pipeline"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option defaults; sections name subcommands");
  Common common;

  auto add_common = [&](CLI::App* sub, bool out_required = false) {
    sub->add_option("--seed", common.seed, "Seed for all randomness")->capture_default_str();
    auto* o = sub->add_option("--out", common.out, "Output file ('-' for stdout)");
    if (out_required) o->required();
  };
  auto add_span = [](CLI::App* sub, Span& s) {
    sub->add_option("--from", s.from, "Start instant, UTC (inclusive)")->required();
    sub->add_option("--to", s.to, "End instant, UTC (exclusive)")->required();
  };
  auto add_window = [&](CLI::App* sub, WindowArgs& w) {
    sub->add_option("--classified", w.classified, "Classified stream")->required()->check(CLI::ExistingFile);
    sub->add_option("--bundle", w.bundle, "Model bundle directory or bundle.json")->required()->check(CLI::ExistingPath);
    add_span(sub, w.span);
    sub->add_option("--label", w.label, "Window key (default: the --from instant)");
    sub->add_option("--event", w.event, "Restrict to tweets tagged with this event window");
  };

  LexiconArgs lexicon;
  auto* lex = app.add_subcommand("lexicon", "Induce a multiword-expression lexicon");
  lex->add_option("--corpus", lexicon.corpus, "Tweet stream (JSON lines)")->required()->check(CLI::ExistingFile);
  lex->add_option("--min-count", lexicon.params.min_count)->capture_default_str();
  lex->add_option("--min-score", lexicon.params.min_score)->capture_default_str();
  lex->add_option("--max-len", lexicon.params.max_len)->capture_default_str()->check(CLI::Range(2, 6));
  add_common(lex);

  TrainArgs train;
  auto* tr = app.add_subcommand("train", "Train and tune the nine per-mode classifiers");
  tr->add_option("--corpus", train.corpus, "Labeled tweet stream")->required()->check(CLI::ExistingFile);
  tr->add_option("--lexicon", train.lexicon)->required()->check(CLI::ExistingFile);
  tr->add_option("--alpha", train.alpha, "Additive smoothing")->capture_default_str()->check(CLI::PositiveNumber);
  tr->add_option("--tune-fraction", train.tune_fraction)->capture_default_str()->check(CLI::Range(0.0, 0.9));
  add_common(tr, true);

  EvalArgs eval;
  auto* ev = app.add_subcommand("eval", "Cross-validated or holdout evaluation");
  ev->add_option("--corpus", eval.corpus, "Labeled tweet stream")->required()->check(CLI::ExistingFile);
  ev->add_option("--lexicon", eval.lexicon)->required()->check(CLI::ExistingFile);
  ev->add_option("--holdout", eval.holdout, "Labeled test stream; replaces cross-validation")
      ->check(CLI::ExistingFile);
  ev->add_option("-k,--folds", eval.k)->capture_default_str()->check(CLI::Range(2, 1000));
  ev->add_option("--alpha", eval.alpha)->capture_default_str()->check(CLI::PositiveNumber);
  ev->add_option("--tune-fraction", eval.tune_fraction)->capture_default_str()->check(CLI::Range(0.0, 0.9));
  ev->add_option("--mode", eval.modes, "Modes to evaluate (default: all)");
  ev->add_option("--format", eval.format)->capture_default_str()->check(CLI::IsMember({"table", "json", "csv"}));
  add_common(ev);

  ClassifyArgs classify;
  auto* cl = app.add_subcommand("classify", "Score a tweet stream with a bundle");
  cl->add_option("--input", classify.input, "Tweet stream")->required()->check(CLI::ExistingFile);
  cl->add_option("--bundle", classify.bundle)->required()->check(CLI::ExistingPath);
  cl->add_option("--windows", classify.windows, "Event windows; keep only tweets inside one")
      ->check(CLI::ExistingFile);
  cl->add_option("--meta", classify.meta, "Run summary path (default: <out>.meta.json)");
  add_common(cl);

  ExplainArgs explain;
  auto* ex = app.add_subcommand("explain", "Phrase shift for the tweets of a window");
  add_window(ex, explain.window);
  ex->add_option("--mode", explain.mode)->required();
  ex->add_option("--top-k", explain.top_k)->capture_default_str();
  ex->add_option("--selection", explain.selection, "Tweets to aggregate: those positive for --mode, or all")
      ->capture_default_str()
      ->check(CLI::IsMember({"positive", "all"}));
  add_common(ex);

  ClusterArgs cluster;
  auto* cu = app.add_subcommand("cluster", "Density clusters of the tweets of a window");
  add_window(cu, cluster.window);
  cu->add_option("--eps-m", cluster.params.eps_m)->capture_default_str();
  cu->add_option("--min-pts", cluster.params.min_pts)->capture_default_str();
  add_common(cu);

  SeriesArgs series;
  auto* se = app.add_subcommand("series", "Hourly presence per mode");
  se->add_option("--classified", series.classified)->required()->check(CLI::ExistingFile);
  add_span(se, series.span);
  se->add_option("--mode", series.modes, "Modes to include (default: all scored)");
  se->add_option("--format", series.format)->capture_default_str()->check(CLI::IsMember({"json", "csv"}));
  add_common(se);

  CountiesArgs counties;
  auto* co = app.add_subcommand("counties", "Political activity by county");
  co->add_option("--classified", counties.classified)->required()->check(CLI::ExistingFile);
  co->add_option("--boundaries", counties.boundaries, "GeoJSON feature collection")
      ->required()
      ->check(CLI::ExistingFile);
  add_span(co, counties.span);
  co->add_option("--format", counties.format)->capture_default_str()->check(CLI::IsMember({"json", "csv"}));
  add_common(co);

  ServeArgs serve;
  auto* sv = app.add_subcommand("serve", "Read-only HTTP service over an export directory");
  sv->add_option("--artifacts", serve.artifacts)->required()->check(CLI::ExistingDirectory);
  sv->add_option("--bind", serve.bind)->capture_default_str();
  sv->add_flag("--check", serve.check, "Load and index the artifacts, then exit");
  add_common(sv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return 64;
  }

  try {
    if (*lex) cmd_lexicon(lexicon, common);
    if (*tr) cmd_train(train, common);
    if (*ev) cmd_eval(eval, common);
    if (*cl) cmd_classify(classify, common);
    if (*ex) cmd_explain(explain, common);
    if (*cu) cmd_cluster(cluster, common);
    if (*se) cmd_series(series, common);
    if (*co) cmd_counties(counties, common);
    if (*sv) cmd_serve(serve);
  } catch (const Error& e) {
    print_error(e.code(), e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 70;
  }
  return 0;
}

}  // namespace
}  // namespace socact::cli

int main(int argc, char** argv) { return socact::cli::run(argc, argv); }

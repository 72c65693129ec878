#ifndef SOCACT_CLASSIFY_HPP
#define SOCACT_CLASSIFY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "socact/common.hpp"
#include "socact/modes.hpp"
#include "socact/segment.hpp"

namespace socact {

enum class Class : std::uint8_t { Positive, Negative };

/// Base-10 log likelihoods of one phrase under each class.
struct LogLik {
  double pos = 0.0;
  double neg = 0.0;
};

/// Multinomial naive Bayes over phrase frequencies for one binary mode.
/// Likelihoods use additive smoothing:
///   L(w|c) = (count(w,c) + alpha) / (phrases(c) + alpha * V)
/// with V the vocabulary size over both classes.
struct BayesModel {
  ActionMode mode = ActionMode::All;
  double alpha = 1.0;
  double log_prior_pos = 0.0;
  double log_prior_neg = 0.0;
  std::unordered_map<std::string, LogLik> loglik;
  double unseen_pos = 0.0;
  double unseen_neg = 0.0;
  double threshold = 0.5;
  std::size_t vocab_size = 0;
  std::uint64_t docs_pos = 0;
  std::uint64_t docs_neg = 0;

  /// Log likelihoods for `phrase`, falling back to the unseen values.
  LogLik lookup(const std::string& phrase) const {
    auto it = loglik.find(phrase);
    return it == loglik.end() ? LogLik{unseen_pos, unseen_neg} : it->second;
  }
  bool in_vocab(const std::string& phrase) const { return loglik.count(phrase) != 0; }
};

/// A document with its binary label for one classifier. Non-owning.
struct LabeledRef {
  const Document* doc = nullptr;
  bool positive = false;
};

inline BayesModel train_mode(std::span<const LabeledRef> examples, ActionMode mode,
                             double alpha = 1.0) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error("invalid-parameter", "smoothing alpha must be positive");
  }
  struct Counts {
    std::uint64_t pos = 0;
    std::uint64_t neg = 0;
  };
  std::unordered_map<std::string, Counts> counts;
  std::uint64_t phrases_pos = 0, phrases_neg = 0;
  BayesModel m;
  m.mode = mode;
  m.alpha = alpha;
  for (const auto& ex : examples) {
    (ex.positive ? m.docs_pos : m.docs_neg) += 1;
    for (const auto& [phrase, f] : ex.doc->phrases()) {
      auto& c = counts[phrase];
      if (ex.positive) {
        c.pos += f;
        phrases_pos += f;
      } else {
        c.neg += f;
        phrases_neg += f;
      }
    }
  }
  if (m.docs_pos == 0 || m.docs_neg == 0) {
    throw Error("degenerate-training-set",
                "degenerate training set: both classes are required for " + std::string(mode_name(mode)));
  }
  if (counts.empty()) throw Error("degenerate-training-set", "training documents carry no phrases");

  m.vocab_size = counts.size();
  const double v = static_cast<double>(m.vocab_size);
  const double denom_pos = static_cast<double>(phrases_pos) + alpha * v;
  const double denom_neg = static_cast<double>(phrases_neg) + alpha * v;
  const double log_denom_pos = std::log10(denom_pos);
  const double log_denom_neg = std::log10(denom_neg);
  m.unseen_pos = std::log10(alpha) - log_denom_pos;
  m.unseen_neg = std::log10(alpha) - log_denom_neg;
  m.loglik.reserve(counts.size());
  for (const auto& [phrase, c] : counts) {
    m.loglik.emplace(phrase, LogLik{std::log10(static_cast<double>(c.pos) + alpha) - log_denom_pos,
                                    std::log10(static_cast<double>(c.neg) + alpha) - log_denom_neg});
  }
  const double n = static_cast<double>(m.docs_pos + m.docs_neg);
  m.log_prior_pos = std::log10(static_cast<double>(m.docs_pos) / n);
  m.log_prior_neg = std::log10(static_cast<double>(m.docs_neg) / n);
  return m;
}

/// log10 prior of `c` plus the frequency-weighted log likelihoods.
/// The entropic form used in explanations is the negation of the sum part.
inline double class_score(const BayesModel& m, const Document& doc, Class c) {
  double s = c == Class::Positive ? m.log_prior_pos : m.log_prior_neg;
  for (const auto& [phrase, f] : doc.phrases()) {
    const LogLik l = m.lookup(phrase);
    s += static_cast<double>(f) * (c == Class::Positive ? l.pos : l.neg);
  }
  return s;
}

/// Posterior log odds, log10(p / (1 - p)).
inline double log_odds(const BayesModel& m, const Document& doc) {
  double pos = m.log_prior_pos;
  double neg = m.log_prior_neg;
  for (const auto& [phrase, f] : doc.phrases()) {
    const LogLik l = m.lookup(phrase);
    pos += static_cast<double>(f) * l.pos;
    neg += static_cast<double>(f) * l.neg;
  }
  return pos - neg;
}

/// Maps base-10 log odds to a probability without overflow: the exponent is
/// always taken on the non-positive side.
inline double odds_to_probability(double lo) {
  if (lo >= 0.0) return 1.0 / (1.0 + std::pow(10.0, -lo));
  const double e = std::pow(10.0, lo);
  return e / (1.0 + e);
}

inline double posterior(const BayesModel& m, const Document& doc) {
  return odds_to_probability(log_odds(m, doc));
}

inline bool classify_positive(const BayesModel& m, const Document& doc) {
  return posterior(m, doc) >= m.threshold;
}

// ---------------------------------------------------------------------------
// Metrics and threshold tuning

struct Confusion {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;

  void add(bool predicted, bool actual) {
    if (predicted && actual) ++tp;
    else if (predicted) ++fp;
    else if (actual) ++fn;
    else ++tn;
  }
  Confusion& operator+=(const Confusion& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  std::uint64_t total() const { return tp + fp + fn + tn; }
};

/// Precision, recall and F1 in percent. An undefined ratio (0/0) is
/// reported as 0 and flagged.
struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;
  bool recall_undefined = false;
};

inline Metrics metrics_of(const Confusion& c) {
  Metrics m;
  const auto predicted = c.tp + c.fp;
  const auto actual = c.tp + c.fn;
  m.precision_undefined = predicted == 0;
  m.recall_undefined = actual == 0;
  if (predicted) m.precision = 100.0 * static_cast<double>(c.tp) / static_cast<double>(predicted);
  if (actual) m.recall = 100.0 * static_cast<double>(c.tp) / static_cast<double>(actual);
  const auto denom = 2 * c.tp + c.fp + c.fn;
  if (denom) m.f1 = 100.0 * static_cast<double>(2 * c.tp) / static_cast<double>(denom);
  return m;
}

struct Scored {
  double posterior = 0.0;
  bool positive = false;
};

struct ThresholdChoice {
  double threshold = 0.5;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  Confusion confusion;
};

/// Picks the threshold maximizing F1 among the distinct posteriors, with the
/// rule "positive iff p >= threshold". F1 ties go to the larger threshold.
inline ThresholdChoice tune_threshold(std::span<const Scored> scores) {
  std::uint64_t positives = 0;
  for (const auto& s : scores) positives += s.positive;
  if (positives == 0) throw Error("no-positives", "threshold tuning needs at least one positive example");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a].posterior > scores[b].posterior; });

  ThresholdChoice best;
  bool have = false;
  std::uint64_t tp = 0, fp = 0;
  // F1 = 2tp / (2tp + fp + fn); compared exactly by cross-multiplication.
  std::uint64_t best_num = 0, best_den = 1;
  std::size_t i = 0;
  while (i < order.size()) {
    const double p = scores[order[i]].posterior;
    while (i < order.size() && scores[order[i]].posterior == p) {
      (scores[order[i]].positive ? tp : fp) += 1;
      ++i;
    }
    const std::uint64_t num = 2 * tp;
    const std::uint64_t den = 2 * tp + fp + (positives - tp);
    if (!have || static_cast<unsigned __int128>(num) * best_den >
                     static_cast<unsigned __int128>(best_num) * den) {
      have = true;
      best_num = num;
      best_den = den;
      best.threshold = p;
      best.confusion = {tp, fp, positives - tp, scores.size() - tp - fp - (positives - tp)};
    }
  }
  const Metrics m = metrics_of(best.confusion);
  best.precision = m.precision;
  best.recall = m.recall;
  best.f1 = m.f1;
  return best;
}

// ---------------------------------------------------------------------------
// Seeded randomness: splitmix64-derived streams and an unbiased bounded draw,
// so fold assignment is identical across standard libraries.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (stream * 0xD1B54A32D192ED03ull);
  return splitmix64(s);
}

class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() { return splitmix64(state_); }
  /// Uniform in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    for (;;) {
      const std::uint64_t r = next();
      if (r < limit) return r % n;
    }
  }
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::uint64_t state_;
};

/// Stratified fold assignment: positives and negatives are shuffled
/// separately and dealt round-robin, so per-fold positive counts differ by
/// at most one and fold sizes differ by at most one.
inline std::vector<std::size_t> stratified_folds(std::span<const LabeledRef> examples, std::size_t k,
                                                 std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < examples.size(); ++i) (examples[i].positive ? pos : neg).push_back(i);
  SeededRng rng(seed);
  rng.shuffle(pos);
  rng.shuffle(neg);
  std::vector<std::size_t> fold(examples.size());
  std::size_t slot = 0;
  for (auto i : pos) fold[i] = slot++ % k;
  for (auto i : neg) fold[i] = slot++ % k;
  return fold;
}

struct FitParams {
  double alpha = 1.0;
  std::uint64_t seed = 0;
  /// Stratified share of the training data held out to tune the threshold.
  double tune_fraction = 0.2;
};

struct FitResult {
  BayesModel model;
  ThresholdChoice tuning;
  /// True when too few examples existed for a held-out slice and the
  /// threshold was tuned on training posteriors instead.
  bool tuned_in_sample = false;
};

/// Trains on all examples and sets the threshold tuned on a stratified
/// held-out slice scored by a model trained on the remainder.
inline FitResult fit_tuned(std::span<const LabeledRef> examples, ActionMode mode, const FitParams& params) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < examples.size(); ++i) (examples[i].positive ? pos : neg).push_back(i);
  SeededRng rng(params.seed);
  rng.shuffle(pos);
  rng.shuffle(neg);
  auto slice = [&](std::size_t n) {
    auto s = static_cast<std::size_t>(std::llround(params.tune_fraction * static_cast<double>(n)));
    return std::clamp<std::size_t>(s, 1, n - 1);
  };

  FitResult out;
  out.model = train_mode(examples, mode, params.alpha);
  if (pos.size() >= 2 && neg.size() >= 2 && params.tune_fraction > 0.0) {
    const std::size_t tp = slice(pos.size()), tn = slice(neg.size());
    std::vector<LabeledRef> fit_part, tune_part;
    for (std::size_t j = 0; j < pos.size(); ++j) (j < tp ? tune_part : fit_part).push_back(examples[pos[j]]);
    for (std::size_t j = 0; j < neg.size(); ++j) (j < tn ? tune_part : fit_part).push_back(examples[neg[j]]);
    const BayesModel inner = train_mode(fit_part, mode, params.alpha);
    std::vector<Scored> scored;
    scored.reserve(tune_part.size());
    for (const auto& ex : tune_part) scored.push_back({posterior(inner, *ex.doc), ex.positive});
    out.tuning = tune_threshold(scored);
  } else {
    std::vector<Scored> scored;
    for (const auto& ex : examples) scored.push_back({posterior(out.model, *ex.doc), ex.positive});
    out.tuning = tune_threshold(scored);
    out.tuned_in_sample = true;
  }
  out.model.threshold = out.tuning.threshold;
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

/// A coded message: id, featurized document and its atomic labels.
struct CodedDocument {
  std::string id;
  Document doc;
  ModeSet labels;
};

inline std::vector<LabeledRef> project(std::span<const CodedDocument> corpus, ActionMode mode) {
  std::vector<LabeledRef> out;
  out.reserve(corpus.size());
  for (const auto& c : corpus) out.push_back({&c.doc, label_for(c.labels, mode)});
  return out;
}

struct FoldReport {
  std::size_t index = 0;
  std::size_t size = 0;
  std::size_t positives = 0;
  double threshold = 0.0;
  Confusion confusion;
  Metrics metrics;
};

struct EvalReport {
  ActionMode mode = ActionMode::All;
  std::size_t abundance = 0;
  std::size_t documents = 0;
  /// Mean of the per-fold tuned thresholds.
  double threshold = 0.0;
  Confusion pooled;
  Metrics metrics;
  std::vector<FoldReport> folds;
};

struct CvParams {
  std::size_t k = 10;
  std::uint64_t seed = 0;
  double alpha = 1.0;
  double tune_fraction = 0.2;
};

namespace detail {

inline FoldReport evaluate_fold(std::span<const LabeledRef> train, std::span<const LabeledRef> test,
                                ActionMode mode, const FitParams& fit, std::size_t index) {
  const FitResult fitted = fit_tuned(train, mode, fit);
  FoldReport f;
  f.index = index;
  f.size = test.size();
  f.threshold = fitted.model.threshold;
  for (const auto& ex : test) {
    f.positives += ex.positive;
    f.confusion.add(classify_positive(fitted.model, *ex.doc), ex.positive);
  }
  f.metrics = metrics_of(f.confusion);
  return f;
}

inline void finish_report(EvalReport& r) {
  double thresholds = 0.0;
  for (const auto& f : r.folds) {
    r.pooled += f.confusion;
    thresholds += f.threshold;
  }
  r.threshold = r.folds.empty() ? 0.0 : thresholds / static_cast<double>(r.folds.size());
  r.metrics = metrics_of(r.pooled);
}

}  // namespace detail

/// Stratified k-fold cross-validation. Each fold trains on the other k-1
/// folds, tunes its threshold on a held-out slice of them, and is scored on
/// its own documents; the headline metrics pool the fold confusions.
inline EvalReport cross_validate(std::span<const LabeledRef> examples, ActionMode mode, const CvParams& params) {
  if (params.k < 2) throw Error("invalid-parameter", "cross-validation needs k >= 2");
  std::size_t positives = 0;
  for (const auto& e : examples) positives += e.positive;
  if (positives < params.k) {
    throw Error("insufficient-positives", "cross-validation of " + std::string(mode_name(mode)) + " needs at least " +
                                              std::to_string(params.k) + " positives, found " + std::to_string(positives));
  }
  EvalReport r;
  r.mode = mode;
  r.abundance = positives;
  r.documents = examples.size();
  const auto fold = stratified_folds(examples, params.k, params.seed);
  for (std::size_t f = 0; f < params.k; ++f) {
    std::vector<LabeledRef> train, test;
    for (std::size_t i = 0; i < examples.size(); ++i) (fold[i] == f ? test : train).push_back(examples[i]);
    const FitParams fit{params.alpha, derive_seed(params.seed, f + 1), params.tune_fraction};
    r.folds.push_back(detail::evaluate_fold(train, test, mode, fit, f));
  }
  detail::finish_report(r);
  return r;
}

inline EvalReport cross_validate(std::span<const CodedDocument> corpus, ActionMode mode, const CvParams& params) {
  const auto refs = project(corpus, mode);
  return cross_validate(std::span<const LabeledRef>(refs), mode, params);
}

/// Out-of-domain protocol: train (and tune) on one corpus, score another.
/// The corpora must not share ids.
inline EvalReport holdout_evaluate(std::span<const CodedDocument> train, std::span<const CodedDocument> test,
                                   ActionMode mode, const CvParams& params) {
  std::unordered_set<std::string> ids;
  for (const auto& d : train) ids.insert(d.id);
  for (const auto& d : test) {
    if (ids.count(d.id)) throw Error("id-overlap", "train and test corpora share id " + d.id);
  }
  const auto train_refs = project(train, mode);
  const auto test_refs = project(test, mode);
  EvalReport r;
  r.mode = mode;
  r.documents = test.size();
  for (const auto& e : test_refs) r.abundance += e.positive;
  const FitParams fit{params.alpha, derive_seed(params.seed, 1), params.tune_fraction};
  r.folds.push_back(detail::evaluate_fold(train_refs, test_refs, mode, fit, 0));
  detail::finish_report(r);
  return r;
}

}  // namespace socact

#endif  // SOCACT_CLASSIFY_HPP

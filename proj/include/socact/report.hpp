#ifndef SOCACT_REPORT_HPP
#define SOCACT_REPORT_HPP

#include <cstdio>
#include <span>
#include <sstream>
#include <string>

#include "json.hpp"
#include "socact/classify.hpp"

namespace socact {

// Evaluation exports: one row per mode with Abundance, Threshold, P, R, F1,
// followed by the per-fold breakdown.

inline constexpr int kEvalVersion = 1;

inline nlohmann::ordered_json metrics_to_json(const Confusion& c, const Metrics& m) {
  return {{"tp", c.tp},
          {"fp", c.fp},
          {"fn", c.fn},
          {"tn", c.tn},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1},
          {"precision_undefined", m.precision_undefined},
          {"recall_undefined", m.recall_undefined}};
}

inline nlohmann::ordered_json eval_to_json(std::span<const EvalReport> reports, std::string_view protocol) {
  nlohmann::ordered_json obj;
  obj["format"] = "socact.eval";
  obj["version"] = kEvalVersion;
  obj["protocol"] = std::string(protocol);
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json row;
    row["mode"] = std::string(mode_name(r.mode));
    row["abundance"] = r.abundance;
    row["documents"] = r.documents;
    row["threshold"] = r.threshold;
    row["pooled"] = metrics_to_json(r.pooled, r.metrics);
    auto folds = nlohmann::ordered_json::array();
    for (const auto& f : r.folds) {
      auto fo = metrics_to_json(f.confusion, f.metrics);
      fo["fold"] = f.index;
      fo["size"] = f.size;
      fo["positives"] = f.positives;
      fo["threshold"] = f.threshold;
      folds.push_back(std::move(fo));
    }
    row["folds"] = std::move(folds);
    rows.push_back(std::move(row));
  }
  obj["modes"] = std::move(rows);
  return obj;
}

namespace detail {

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace detail

/// Plain-text table. Undefined precision or recall is marked with '*'.
inline std::string eval_table(std::span<const EvalReport> reports) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-18s %9s %9s %7s %7s %7s\n", "Action", "Abundance", "Threshold", "P", "R", "F1");
  out << line;
  for (const auto& r : reports) {
    const auto p = detail::fixed(r.metrics.precision, 2) + (r.metrics.precision_undefined ? "*" : "");
    const auto rc = detail::fixed(r.metrics.recall, 2) + (r.metrics.recall_undefined ? "*" : "");
    std::snprintf(line, sizeof line, "%-18s %9zu %9s %7s %7s %7s\n", std::string(mode_title(r.mode)).c_str(),
                  r.abundance, detail::fixed(r.threshold, 4).c_str(), p.c_str(), rc.c_str(),
                  detail::fixed(r.metrics.f1, 2).c_str());
    out << line;
  }
  return out.str();
}

inline std::string eval_to_csv(std::span<const EvalReport> reports) {
  std::ostringstream out;
  out << "mode,fold,abundance,threshold,precision,recall,f1,tp,fp,fn,tn\n";
  auto row = [&](const EvalReport& r, const std::string& fold, std::size_t abundance, double threshold,
                 const Confusion& c, const Metrics& m) {
    out << mode_name(r.mode) << ',' << fold << ',' << abundance << ',' << format_double17(threshold) << ','
        << format_double17(m.precision) << ',' << format_double17(m.recall) << ',' << format_double17(m.f1) << ','
        << c.tp << ',' << c.fp << ',' << c.fn << ',' << c.tn << '\n';
  };
  for (const auto& r : reports) row(r, "pooled", r.abundance, r.threshold, r.pooled, r.metrics);
  for (const auto& r : reports) {
    for (const auto& f : r.folds) row(r, std::to_string(f.index), f.positives, f.threshold, f.confusion, f.metrics);
  }
  return out.str();
}

}  // namespace socact

#endif  // SOCACT_REPORT_HPP

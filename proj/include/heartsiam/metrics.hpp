#pragma once

// Challenge metrics: sensitivity, specificity, mean accuracy, overall and
// per-domain accuracy. Abnormal is the positive class. A metric whose
// denominator is empty is reported as undefined (null in JSON) rather than
// NaN.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "heartsiam/common.hpp"

namespace heartsiam {

struct EvalReport {
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> macc;
  double accuracy = 0.0;
  std::map<char, double> per_domain_accuracy;
  long tp = 0, tn = 0, fp = 0, fn = 0;
};

inline EvalReport evaluate(std::span<const Label> preds, std::span<const Label> labels,
                           std::span<const char> domains) {
  if (preds.size() != labels.size() || preds.size() != domains.size())
    throw ConfigError("evaluate: inputs must have equal length");
  if (preds.empty()) throw DataError("evaluate: no records");

  EvalReport r;
  std::map<char, std::pair<long, long>> domain_counts;  // correct, total
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (labels[i] == Label::Unknown)
      throw DataError("evaluate: record " + std::to_string(i) + " has an Unknown label");
    const bool truth = labels[i] == Label::Abnormal;
    const bool pred = preds[i] == Label::Abnormal;
    if (truth && pred) ++r.tp;
    if (truth && !pred) ++r.fn;
    if (!truth && !pred) ++r.tn;
    if (!truth && pred) ++r.fp;
    auto& [correct, total] = domain_counts[domains[i]];
    ++total;
    if (truth == pred) ++correct;
  }

  if (r.tp + r.fn > 0)
    r.sensitivity = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
  if (r.tn + r.fp > 0)
    r.specificity = static_cast<double>(r.tn) / static_cast<double>(r.tn + r.fp);
  if (r.sensitivity && r.specificity) r.macc = (*r.sensitivity + *r.specificity) / 2.0;
  r.accuracy = static_cast<double>(r.tp + r.tn) / static_cast<double>(preds.size());
  for (const auto& [domain, counts] : domain_counts)
    r.per_domain_accuracy[domain] =
        static_cast<double>(counts.first) / static_cast<double>(counts.second);
  return r;
}

inline nlohmann::json report_to_json(const EvalReport& r) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  nlohmann::json per_domain;
  for (const auto& [domain, acc] : r.per_domain_accuracy) per_domain[std::string(1, domain)] = acc;
  return {{"se", opt(r.sensitivity)},
          {"sp", opt(r.specificity)},
          {"macc", opt(r.macc)},
          {"acc", r.accuracy},
          {"per_domain", per_domain},
          {"confusion", {{"tp", r.tp}, {"tn", r.tn}, {"fp", r.fp}, {"fn", r.fn}}}};
}

}  // namespace heartsiam

#pragma once

// Branch and ensemble scoring: each branch embeds every cycle segment of a
// record and averages its KNN scores; the ensemble averages branch scores and
// thresholds at 0.5 (ties to Abnormal).

#include <string>
#include <vector>

#include "heartsiam/common.hpp"
#include "heartsiam/cycles.hpp"
#include "heartsiam/knn.hpp"
#include "heartsiam/net.hpp"

namespace heartsiam {

struct Branch {
  char anchor_domain = 'a';
  NetParams<float> params;
  KnnModel knn;
};

struct EnsembleModel {
  std::vector<Branch> branches;
  double threshold = 0.5;

  void validate() const {
    if (branches.empty()) throw ConfigError("ensemble: no branches");
    const int dim = branches.front().params.arch.embedding_dim;
    for (const auto& b : branches) {
      if (b.params.arch.embedding_dim != dim)
        throw ConfigError("ensemble: branches disagree on embedding_dim");
      if (b.knn.dim != static_cast<std::size_t>(dim))
        throw ConfigError("ensemble: KNN model dimension mismatch in branch " +
                          std::string(1, b.anchor_domain));
    }
  }
};

inline double branch_record_score(const Branch& branch, const std::vector<CycleSegment>& segments) {
  if (segments.empty()) throw DataError("branch_record_score: record has no segments");
  double total = 0.0;
  for (const auto& seg : segments) {
    const std::vector<float> e = forward(branch.params, seg);
    total += knn_score(branch.knn, e);
  }
  return total / static_cast<double>(segments.size());
}

struct Prediction {
  Label label = Label::Unknown;
  double score = 0.0;  // mean abnormal score in [0, 1]
};

inline Prediction ensemble_predict(const EnsembleModel& ens,
                                   const std::vector<CycleSegment>& segments) {
  ens.validate();
  double total = 0.0;
  for (const auto& branch : ens.branches) total += branch_record_score(branch, segments);
  Prediction p;
  p.score = total / static_cast<double>(ens.branches.size());
  p.label = p.score >= ens.threshold ? Label::Abnormal : Label::Normal;
  return p;
}

}  // namespace heartsiam

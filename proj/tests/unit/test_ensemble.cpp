#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "heartsiam/ensemble.hpp"

using namespace heartsiam;

namespace {

// A branch whose net has all-zero parameters maps every input to the e1
// convention vector, so every reference is equidistant from every query and
// the tie rule hands the k nearest to the lowest indices. Reference label
// order therefore dictates the branch score exactly.
Branch degenerate_branch(const std::vector<Label>& first_k_labels, char domain) {
  ArchConfig arch;  // cycle-segment input shape; small blocks keep it fast
  arch.blocks = {{2, 5, 16}};
  arch.embedding_dim = 4;
  Branch b;
  b.anchor_domain = domain;
  b.params = NetParams<float>::zeros_like(arch);

  std::vector<float> refs;
  std::vector<Label> labels = first_k_labels;
  labels.push_back(Label::Normal);  // one extra so k < n
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (int d = 0; d < 4; ++d) refs.push_back(d == 0 ? 1.0f : 0.0f);
  b.knn = knn_fit(refs, 4, labels, static_cast<int>(first_k_labels.size()));
  return b;
}

CycleSegment dummy_segment() {
  CycleSegment seg;
  seg.data.assign(kCycleBands * kCycleLength, 0.5f);
  return seg;
}

}  // namespace

TEST_CASE("unanimous branches give the extreme scores") {
  EnsembleModel ens;
  for (int i = 0; i < 5; ++i)
    ens.branches.push_back(degenerate_branch({Label::Abnormal, Label::Abnormal, Label::Abnormal},
                                             static_cast<char>('a' + i)));
  const auto p = ensemble_predict(ens, {dummy_segment()});
  REQUIRE(p.score == 1.0);
  REQUIRE(p.label == Label::Abnormal);

  EnsembleModel ens0;
  for (int i = 0; i < 5; ++i)
    ens0.branches.push_back(
        degenerate_branch({Label::Normal, Label::Normal, Label::Normal}, static_cast<char>('a' + i)));
  const auto p0 = ensemble_predict(ens0, {dummy_segment()});
  REQUIRE(p0.score == 0.0);
  REQUIRE(p0.label == Label::Normal);
}

TEST_CASE("a mean score at the threshold resolves to Abnormal") {
  // branch scores {1, 1, 0, 0} -> mean 0.5 -> Abnormal by the tie rule
  EnsembleModel ens;
  ens.branches.push_back(degenerate_branch({Label::Abnormal}, 'a'));
  ens.branches.push_back(degenerate_branch({Label::Abnormal}, 'b'));
  ens.branches.push_back(degenerate_branch({Label::Normal}, 'c'));
  ens.branches.push_back(degenerate_branch({Label::Normal}, 'd'));
  const auto p = ensemble_predict(ens, {dummy_segment()});
  REQUIRE(p.score == 0.5);
  REQUIRE(p.label == Label::Abnormal);
}

TEST_CASE("branch score is the mean over segments and raising one never flips to Normal") {
  const Branch b = degenerate_branch({Label::Abnormal, Label::Normal, Label::Abnormal}, 'a');
  const std::vector<CycleSegment> segs = {dummy_segment(), dummy_segment()};
  const double s = branch_record_score(b, segs);
  REQUIRE(s == Catch::Approx(2.0 / 3.0));

  // two ensembles differing only in one branch score: the higher one keeps
  // the Abnormal decision
  EnsembleModel low, high;
  low.branches = {degenerate_branch({Label::Abnormal}, 'a'),
                  degenerate_branch({Label::Normal}, 'b')};
  high.branches = {degenerate_branch({Label::Abnormal}, 'a'),
                   degenerate_branch({Label::Abnormal}, 'b')};
  const auto pl = ensemble_predict(low, {dummy_segment()});
  const auto ph = ensemble_predict(high, {dummy_segment()});
  REQUIRE(pl.score <= ph.score);
  REQUIRE(pl.label == Label::Abnormal);  // mean 0.5, tie -> Abnormal
  REQUIRE(ph.label == Label::Abnormal);
}

TEST_CASE("empty segment lists and empty ensembles are rejected") {
  const Branch b = degenerate_branch({Label::Normal}, 'a');
  REQUIRE_THROWS_AS(branch_record_score(b, {}), DataError);
  EnsembleModel empty;
  REQUIRE_THROWS_AS(ensemble_predict(empty, {dummy_segment()}), ConfigError);
}

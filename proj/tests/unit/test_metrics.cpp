#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "heartsiam/metrics.hpp"

using namespace heartsiam;

namespace {

// build prediction/label/domain vectors realizing given confusion counts
void fill_counts(std::vector<Label>& preds, std::vector<Label>& labels, std::vector<char>& domains,
                 long tp, long fn, long tn, long fp, char domain = 'a') {
  for (long i = 0; i < tp; ++i) {
    preds.push_back(Label::Abnormal);
    labels.push_back(Label::Abnormal);
    domains.push_back(domain);
  }
  for (long i = 0; i < fn; ++i) {
    preds.push_back(Label::Normal);
    labels.push_back(Label::Abnormal);
    domains.push_back(domain);
  }
  for (long i = 0; i < tn; ++i) {
    preds.push_back(Label::Normal);
    labels.push_back(Label::Normal);
    domains.push_back(domain);
  }
  for (long i = 0; i < fp; ++i) {
    preds.push_back(Label::Abnormal);
    labels.push_back(Label::Normal);
    domains.push_back(domain);
  }
}

}  // namespace

TEST_CASE("the published confusion ratios reproduce the headline row") {
  std::vector<Label> preds, labels;
  std::vector<char> domains;
  // Se = 8278/10000, Sp = 7534/10000
  fill_counts(preds, labels, domains, 8278, 1722, 7534, 2466);
  const EvalReport r = evaluate(preds, labels, domains);
  REQUIRE(r.sensitivity.has_value());
  REQUIRE(*r.sensitivity == Catch::Approx(0.8278).margin(1e-12));
  REQUIRE(*r.specificity == Catch::Approx(0.7534).margin(1e-12));
  REQUIRE(*r.macc == Catch::Approx(0.7906).margin(5e-4));
  REQUIRE(*r.macc == (*r.sensitivity + *r.specificity) / 2.0);  // exact identity
  REQUIRE(r.tp + r.tn + r.fp + r.fn == static_cast<long>(preds.size()));
}

TEST_CASE("all-correct predictions score one everywhere") {
  std::vector<Label> preds, labels;
  std::vector<char> domains;
  fill_counts(preds, labels, domains, 5, 0, 5, 0);
  const EvalReport r = evaluate(preds, labels, domains);
  REQUIRE(*r.sensitivity == 1.0);
  REQUIRE(*r.specificity == 1.0);
  REQUIRE(*r.macc == 1.0);
  REQUIRE(r.accuracy == 1.0);
}

TEST_CASE("hand-counted confusion example") {
  std::vector<Label> preds, labels;
  std::vector<char> domains;
  fill_counts(preds, labels, domains, 1, 1, 3, 1);
  const EvalReport r = evaluate(preds, labels, domains);
  REQUIRE(*r.sensitivity == Catch::Approx(0.5));
  REQUIRE(*r.specificity == Catch::Approx(0.75));
  REQUIRE(*r.macc == Catch::Approx(0.625));
  REQUIRE(r.accuracy == Catch::Approx(4.0 / 6.0));
}

TEST_CASE("single-class inputs flag the undefined metrics instead of NaN") {
  std::vector<Label> preds, labels;
  std::vector<char> domains;
  fill_counts(preds, labels, domains, 3, 1, 0, 0);  // abnormal only
  const EvalReport r = evaluate(preds, labels, domains);
  REQUIRE(r.sensitivity.has_value());
  REQUIRE_FALSE(r.specificity.has_value());
  REQUIRE_FALSE(r.macc.has_value());

  const auto j = report_to_json(r);
  REQUIRE(j.at("sp").is_null());
  REQUIRE(j.at("macc").is_null());
  REQUIRE(j.at("se").get<double>() == Catch::Approx(0.75));
}

TEST_CASE("per-domain accuracies are computed over each domain's records") {
  std::vector<Label> preds, labels;
  std::vector<char> domains;
  fill_counts(preds, labels, domains, 4, 0, 4, 0, 'a');  // domain a perfect
  fill_counts(preds, labels, domains, 1, 1, 1, 1, 'b');  // domain b half right
  const EvalReport r = evaluate(preds, labels, domains);
  REQUIRE(r.per_domain_accuracy.at('a') == 1.0);
  REQUIRE(r.per_domain_accuracy.at('b') == 0.5);

  const auto j = report_to_json(r);
  REQUIRE(j.at("per_domain").at("a").get<double>() == 1.0);
  REQUIRE(j.at("per_domain").at("b").get<double>() == 0.5);
  REQUIRE(j.at("confusion").at("tp").get<long>() == r.tp);
}

TEST_CASE("mismatched input lengths and unknown labels are rejected") {
  std::vector<Label> preds = {Label::Normal};
  std::vector<Label> labels = {Label::Normal, Label::Abnormal};
  std::vector<char> domains = {'a', 'a'};
  REQUIRE_THROWS_AS(evaluate(preds, labels, domains), ConfigError);

  preds = {Label::Normal};
  labels = {Label::Unknown};
  domains = {'a'};
  REQUIRE_THROWS_AS(evaluate(preds, labels, domains), DataError);
}

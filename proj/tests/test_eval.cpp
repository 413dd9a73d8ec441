#include <gtest/gtest.h>

#include <random>

#include "factshap/error.hpp"
#include "factshap/eval.hpp"
#include "factshap/synthetic.hpp"
#include "support/oracles.hpp"

using namespace factshap;

namespace {

std::size_t evaluated(const MetricsReport& r) {
  std::size_t n = 0;
  for (const auto& f : r.folds) n += f.confusion.total();
  return n;
}

MetricsReport sample_report(std::string name, bool augmented) {
  MetricsReport r;
  r.model_name = std::move(name);
  r.dataset_name = "toy";
  r.augmented = augmented;
  r.augmentation_scope = "train_folds_only";
  r.k = 2;
  r.seed = 4;
  const std::vector<double> s1 = {0.9, 0.4, 0.2, 0.6}, s2 = {0.8, 0.7, 0.1, 0.3};
  const std::vector<int> y = {1, 1, 0, 0};
  r.folds = {classification_metrics(s1, y), classification_metrics(s2, y)};
  r.mean = r.folds[0];
  r.mean.accuracy = 0.1 + 0.2;
  return r;
}

}  // namespace

TEST(Metrics, PerfectPredictions) {
  const std::vector<double> s = {0.9, 0.8, 0.1, 0.3};
  const std::vector<int> y = {1, 1, 0, 0};
  const auto m = classification_metrics(s, y);
  EXPECT_EQ(m.accuracy, 1.0);
  for (const auto* c : {&m.fake, &m.truth}) {
    EXPECT_EQ(c->precision, 1.0);
    EXPECT_EQ(c->recall, 1.0);
    EXPECT_EQ(c->f1, 1.0);
  }
  EXPECT_EQ(m.auc, 1.0);
}

TEST(Metrics, HandCountedConfusion) {
  const std::vector<double> s = {0.9, 0.4, 0.2, 0.6};
  const std::vector<int> y = {1, 1, 0, 0};
  const auto m = classification_metrics(s, y);
  // Predicted true: rows 0 and 3. TP = 1 (row 0), FP = 1 (row 3),
  // FN = 1 (row 1), TN = 1 (row 2).
  EXPECT_EQ(m.confusion, (Confusion{1, 1, 1, 1}));
  EXPECT_EQ(m.accuracy, 0.5);
  EXPECT_EQ(m.truth.precision, 0.5);
  EXPECT_EQ(m.truth.recall, 0.5);
  EXPECT_EQ(m.accuracy, double(m.confusion.true_positive + m.confusion.true_negative) / 4.0);
}

TEST(Metrics, NoPredictedPositivesIsDegenerate) {
  const std::vector<double> s = {0.1, 0.2, 0.3};
  const std::vector<int> y = {1, 0, 0};
  const auto m = classification_metrics(s, y);
  EXPECT_EQ(m.truth.precision, 0.0);
  EXPECT_TRUE(m.truth.degenerate);
  EXPECT_FALSE(m.fake.degenerate);
}

TEST(Metrics, ThresholdIsInclusive) {
  const std::vector<double> s = {0.5, 0.49};
  const std::vector<int> y = {1, 0};
  EXPECT_EQ(classification_metrics(s, y).accuracy, 1.0);
}

TEST(Auc, PerfectAndReversed) {
  const std::vector<int> y = {0, 0, 1, 1};
  EXPECT_EQ(roc_auc(std::vector<double>{0.1, 0.2, 0.3, 0.4}, y), 1.0);
  EXPECT_EQ(roc_auc(std::vector<double>{0.4, 0.3, 0.2, 0.1}, y), 0.0);
  EXPECT_EQ(roc_auc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, y), 0.5);
  EXPECT_THROW(roc_auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), ValidationError);
}

TEST(Auc, MatchesPairwiseOracleWithTies) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 50;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = double(rng() % 7) / 6.0;
      y[i] = static_cast<int>(rng() % 2);
    }
    y[0] = 0;
    y[1] = 1;
    EXPECT_EQ(roc_auc(s, y), oracle::pairwise_auc(s, y));
  }
}

TEST(Auc, InvariantToMonotoneTransform) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> s(40), t(40);
  std::vector<int> y(40);
  for (std::size_t i = 0; i < 40; ++i) {
    s[i] = std::round(u(rng) * 10) / 10;
    t[i] = std::exp(3 * s[i]) - 2;
    y[i] = i % 3 == 0;
  }
  EXPECT_EQ(roc_auc(s, y), roc_auc(t, y));
}

TEST(CrossValidate, PlantedCorpusIsLearnable) {
  const auto corpus = planted_corpus();
  PipelineSpec spec;
  const auto r = cross_validate(spec, corpus.dataset, 10, 0);
  EXPECT_GE(r.mean.accuracy, 0.9);
  EXPECT_EQ(r.folds.size(), 10u);
  EXPECT_EQ(evaluated(r), 200u);
}

TEST(CrossValidate, Deterministic) {
  const auto corpus = planted_corpus({.claims = 80});
  PipelineSpec spec;
  spec.model = ModelKind::forest;
  spec.forest.n_trees = 10;
  EXPECT_EQ(cross_validate(spec, corpus.dataset, 4, 9), cross_validate(spec, corpus.dataset, 4, 9));
}

TEST(CrossValidate, ConstantModelGivesPrevalence) {
  auto cfg = PlantedCorpusConfig{};
  cfg.claims = 100;
  cfg.true_fraction = 0.7;
  const auto corpus = planted_corpus(cfg);
  PipelineSpec spec;
  spec.model = ModelKind::tree;
  spec.tree.max_depth = 0;
  const auto r = cross_validate(spec, corpus.dataset, 5, 1);
  EXPECT_NEAR(r.mean.accuracy, 0.7, 1.0 / 100);
}

TEST(CrossValidate, ProductsStayOutOfTestFolds) {
  const auto corpus = planted_corpus({.claims = 60});
  FixtureClient client(
      [&] {
        std::map<std::string, std::string, std::less<>> m;
        for (const auto& [id, text] : planted_paraphrases(corpus.dataset, 1)) m.emplace(id, text);
        return m;
      }());
  const auto augmented = augment_dataset(client, corpus.dataset).dataset;
  ASSERT_EQ(augmented.size(), 120u);

  PipelineSpec spec;
  const auto folds_only = cross_validate(spec, augmented, 5, 3);
  EXPECT_EQ(evaluated(folds_only), 60u);
  EXPECT_TRUE(folds_only.augmented);

  spec.scope = AugmentScope::whole_dataset;
  EXPECT_EQ(evaluated(cross_validate(spec, augmented, 5, 3)), 120u);

  PipelineSpec on_the_fly;
  on_the_fly.augment = true;
  CvResources res;
  res.translator = &client;
  const auto r = cross_validate(on_the_fly, corpus.dataset, 5, 3, res);
  EXPECT_EQ(evaluated(r), 60u);
  EXPECT_TRUE(r.augmented);
}

TEST(CrossValidate, DistilledNeedsTeacher) {
  const auto corpus = planted_corpus({.claims = 40});
  PipelineSpec spec;
  spec.model = ModelKind::distilled;
  EXPECT_THROW(cross_validate(spec, corpus.dataset, 2, 0), ValidationError);

  TeacherTargets t;
  for (const auto& r : corpus.dataset.records()) t.by_id[r.id] = {double(label_value(r.label)), std::nullopt};
  CvResources res;
  res.teacher = &t;
  const auto distilled = cross_validate(spec, corpus.dataset, 4, 0, res);
  spec.model = ModelKind::logistic;
  const auto hard = cross_validate(spec, corpus.dataset, 4, 0);
  EXPECT_NEAR(distilled.mean.accuracy, hard.mean.accuracy, 1e-12);
}

TEST(Report, EmptyListIsHeaderOnly) {
  const auto md = render_report({}, ReportFormat::markdown);
  EXPECT_EQ(md,
            "| Model | Precision (False/True) | Recall (False/True) | F1 (False/True) | Accuracy | AUC |\n"
            "|---|---|---|---|---|---|\n");
}

TEST(Report, TwoRowsInTableOrder) {
  const std::vector<MetricsReport> reports = {sample_report("Logistic Regression", false),
                                              sample_report("DistilBERT (Logistic)", true)};
  const auto md = render_report(reports, ReportFormat::markdown);
  const auto first = md.find("| Logistic Regression |");
  const auto second = md.find("| Aug-DistilBERT (Logistic) |");
  ASSERT_NE(first, std::string::npos);
  ASSERT_NE(second, std::string::npos);
  EXPECT_LT(first, second);
  EXPECT_NE(md.find("| 0.500/0.500 |"), std::string::npos);
}

TEST(Report, JsonAndCsvRoundTrip) {
  const std::vector<MetricsReport> reports = {sample_report("a", false), sample_report("b", true)};
  for (const auto& r : reports) EXPECT_EQ(report_from_json(report_to_json(r)), r);
  const auto csv = render_report(reports, ReportFormat::csv);
  const auto back = reports_from_csv(csv);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].mean.accuracy, reports[i].mean.accuracy);
    EXPECT_EQ(back[i].mean.truth, reports[i].mean.truth);
    EXPECT_EQ(back[i].mean.auc, reports[i].mean.auc);
  }
}

TEST(Pipeline, JsonRoundTrip) {
  PipelineSpec s;
  s.name = "forest-aug";
  s.model = ModelKind::forest;
  s.forest.n_trees = 12;
  s.augment = true;
  s.scope = AugmentScope::whole_dataset;
  s.pivot = "fr";
  s.vectorizer.min_document_frequency = 2;
  const auto back = pipeline_from_json(to_json(s));
  EXPECT_EQ(to_json(back), to_json(s));
}

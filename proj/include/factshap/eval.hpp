#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "factshap/augment.hpp"
#include "factshap/corpus.hpp"
#include "factshap/models.hpp"
#include "factshap/teacher.hpp"
#include "factshap/textprep.hpp"

namespace factshap {

inline constexpr double kDecisionThreshold = 0.5;

struct Confusion {
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t true_negative = 0;
  std::size_t false_negative = 0;

  std::size_t total() const { return true_positive + false_positive + true_negative + false_negative; }
  bool operator==(const Confusion&) const = default;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Set when a ratio had a zero denominator and was reported as 0.
  bool degenerate = false;

  bool operator==(const ClassMetrics&) const = default;
};

struct Metrics {
  ClassMetrics fake;   // negative class
  ClassMetrics truth;  // positive class
  double accuracy = 0.0;
  // Absent when only one class was evaluated.
  std::optional<double> auc;
  Confusion confusion;

  bool operator==(const Metrics&) const = default;
};

// Label 1 = true claim. A score >= threshold predicts true. 0/0 ratios are
// reported as 0 with the degenerate flag set.
Metrics classification_metrics(std::span<const double> scores, std::span<const int> labels,
                               double threshold = kDecisionThreshold);

// Probability that a random positive outranks a random negative, ties
// counting one half. Throws when a class is missing.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

struct MetricsReport {
  std::string model_name;
  std::string dataset_name;
  bool augmented = false;
  std::string augmentation_scope;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  // Fold means; confusion is summed over folds.
  Metrics mean;
  std::vector<Metrics> folds;

  bool operator==(const MetricsReport&) const = default;
};

enum class ModelKind { logistic, distilled, tree, forest };
std::string_view model_kind_name(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

enum class FeatureSpace { tfidf, embeddings };

struct PipelineSpec {
  std::string name;
  FeatureSpace features = FeatureSpace::tfidf;
  VectorizerConfig vectorizer;
  ModelKind model = ModelKind::logistic;
  TrainConfig train;
  TreeConfig tree;
  ForestConfig forest;
  // Back-translate training data through `translator` (see CvResources).
  bool augment = false;
  AugmentScope scope = AugmentScope::train_folds_only;
  std::string pivot = kDefaultPivot;
};

nlohmann::json to_json(const PipelineSpec& spec);
PipelineSpec pipeline_from_json(const nlohmann::json& j);

struct CvResources {
  const TeacherTargets* teacher = nullptr;
  TranslationClient* translator = nullptr;
  const EmbeddingTable* embeddings = nullptr;
};

// Stratified k-fold evaluation. Featurizer and model are fitted on the
// training folds only. Records carrying a parent_id (augmentation products)
// follow their parent into training folds and are never evaluated under
// train_folds_only; under whole_dataset they are split like any record.
MetricsReport cross_validate(const PipelineSpec& spec, const Dataset& dataset, std::size_t k,
                             std::uint64_t seed, const CvResources& resources = {});

enum class ReportFormat { markdown, csv, json };
ReportFormat parse_report_format(std::string_view name);

// One row per report, paired False/True columns.
std::string render_report(std::span<const MetricsReport> reports, ReportFormat format);

nlohmann::json report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const nlohmann::json& j);
std::vector<MetricsReport> reports_from_csv(std::string_view csv);

}  // namespace factshap

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "factshap/features.hpp"

namespace factshap {

// Probabilities are clamped to [kProbabilityEpsilon, 1 - kProbabilityEpsilon]
// before every log.
inline constexpr double kProbabilityEpsilon = 1e-12;

double sigmoid(double z);
double clamp_probability(double p);
// ln(p / (1 - p)) of the clamped probability.
double logit(double p);

// Two-class cross-entropy of student probability `s` against teacher
// probability `t`, both softened by `temperature` through their logits:
//   -[t' ln s' + (1 - t') ln(1 - s')]
// With temperature 1 the probabilities are used as given.
double distill_loss(double teacher, double student, double temperature = 1.0);

// Hard-label cross-entropy; identical to distill_loss(label, s, 1).
double cross_entropy(int label, double student);

enum class Optimizer { gd, adam };

struct TrainConfig {
  double learning_rate = 0.5;
  int epochs = 500;
  double l2_penalty = 1e-4;
  Optimizer optimizer = Optimizer::gd;
  // Weight of the distillation term; 1 = teacher only, 0 = labels only.
  double distill_weight = 1.0;
  double temperature = 1.0;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  // Throws ValidationError on out-of-range values.
  void validate() const;
};

struct TrainingMeta {
  std::string objective;  // "hard" or "distilled"
  TrainConfig config;
  // Objective at the initial point followed by one value per epoch.
  std::vector<double> loss_curve;
};

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;
  TrainingMeta meta;

  std::size_t dimension() const { return weights.size(); }
};

struct TreeNode {
  // Internal nodes: feature >= 0, rows with x[feature] <= threshold go left.
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  // Leaves: fraction of true claims among training rows reaching the leaf.
  double p_true = 0.0;
  double weight = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct TreeConfig {
  int max_depth = 8;
  std::size_t min_leaf = 1;
};

struct TreeModel {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::size_t dimension = 0;
  TreeConfig config;

  // Index of the leaf reached by a dense row.
  std::size_t leaf_for(std::span<const double> x) const;
  std::size_t leaf_for(const FeatureVector& x) const;
  std::size_t depth() const;
};

struct ForestConfig {
  std::size_t n_trees = 100;
  TreeConfig tree;
  // Fraction of features examined at each split; <= 0 selects sqrt(V)/V.
  double feature_fraction = 0.0;
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

struct ForestModel {
  std::vector<TreeModel> trees;
  ForestConfig config;
  std::size_t dimension() const { return trees.empty() ? 0 : trees.front().dimension; }
};

using Model = std::variant<LogisticModel, TreeModel, ForestModel>;

std::string_view model_kind(const Model& model);
std::size_t model_dimension(const Model& model);

// Probability of the true class. Logistic: sigmoid(w.x + b); tree: leaf
// p_true; forest: mean of tree leaf probabilities.
double predict_proba(const Model& model, const FeatureVector& x);
double predict_proba(const Model& model, std::span<const double> x);

// The additive output that attributions decompose. Logistic: w.x + b;
// tree: logit of the leaf probability; forest: mean of the per-tree leaf
// logits. For a forest this is not logit(predict_proba) in general.
double predict_log_odds(const Model& model, const FeatureVector& x);
double predict_log_odds(const Model& model, std::span<const double> x);
double tree_log_odds(const TreeModel& tree, std::span<const double> x);

// Objective of the logistic student and its gradient. `teacher` is empty
// for hard-label training; otherwise one probability per row blended with
// weight cfg.distill_weight.
struct ObjectiveValue {
  double loss = 0.0;
  std::vector<double> grad_weights;
  double grad_bias = 0.0;
};
ObjectiveValue logistic_objective(std::span<const double> weights, double bias, const FeatureMatrix& X,
                                  std::span<const int> labels, std::span<const double> teacher,
                                  const TrainConfig& cfg);

LogisticModel train_logistic(const FeatureMatrix& X, std::span<const int> labels, const TrainConfig& cfg);
LogisticModel train_distilled(const FeatureMatrix& X, std::span<const int> labels,
                              std::span<const double> teacher, const TrainConfig& cfg);

TreeModel train_tree(const FeatureMatrix& X, std::span<const int> labels, const TreeConfig& cfg);
ForestModel train_forest(const FeatureMatrix& X, std::span<const int> labels, const ForestConfig& cfg);

// A single leaf with the given probability.
TreeModel constant_tree(std::size_t dimension, double p_true);

nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ForestConfig& cfg);
ForestConfig forest_config_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& j);
void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(const std::filesystem::path& path);

// Dense per-claim vectors supplied instead of TF-IDF features; JSONL of
// {"id": str, "vector": [numbers]}. All vectors share one dimension.
using EmbeddingTable = std::map<std::string, std::vector<double>, std::less<>>;
EmbeddingTable load_embeddings(const std::filesystem::path& path);

}  // namespace factshap

#include "factshap/models.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <string>
#include <thread>

#include "factshap/error.hpp"
#include "factshap/random.hpp"

namespace factshap {

using nlohmann::json;

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double clamp_probability(double p) {
  return std::clamp(p, kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
}

double logit(double p) {
  const double c = clamp_probability(p);
  return std::log(c) - std::log1p(-c);
}

namespace {

double soft_cross_entropy(double t, double s) {
  const double c = clamp_probability(s);
  return -(t * std::log(c) + (1.0 - t) * std::log(1.0 - c));
}

// Degenerate targets stay degenerate at every temperature.
double soften(double p, double temperature) {
  if (temperature == 1.0 || p == 0.0 || p == 1.0) return p;
  return sigmoid(logit(p) / temperature);
}

void require_labels(std::span<const int> labels, std::size_t rows, bool both_classes = true) {
  if (labels.size() != rows) throw ValidationError("label count does not match row count");
  bool seen[2] = {false, false};
  for (int y : labels) {
    if (y != 0 && y != 1) throw ValidationError("labels must be 0 or 1");
    seen[y] = true;
  }
  if (both_classes && (!seen[0] || !seen[1])) throw ValidationError("training data must contain both classes");
}

std::size_t common_dimension(const FeatureMatrix& X) {
  if (X.empty()) throw ValidationError("no training rows");
  const std::size_t dim = X.front().dimension();
  for (const auto& row : X) {
    if (row.dimension() != dim) throw ValidationError("training rows differ in dimension");
  }
  return dim;
}

const char* optimizer_name(Optimizer o) { return o == Optimizer::adam ? "adam" : "gd"; }

Optimizer parse_optimizer(const std::string& s) {
  if (s == "gd") return Optimizer::gd;
  if (s == "adam") return Optimizer::adam;
  throw ValidationError("unknown optimizer '" + s + "'");
}

LogisticModel fit_logistic(const FeatureMatrix& X, std::span<const int> labels,
                           std::span<const double> teacher, const TrainConfig& cfg) {
  cfg.validate();
  require_labels(labels, X.size());
  const std::size_t dim = common_dimension(X);

  LogisticModel model;
  model.weights.assign(dim, 0.0);
  model.meta.objective = teacher.empty() ? "hard" : "distilled";
  model.meta.config = cfg;
  model.meta.loss_curve.reserve(static_cast<std::size_t>(cfg.epochs) + 1);

  std::vector<double> m_w, v_w;
  double m_b = 0.0, v_b = 0.0;
  if (cfg.optimizer == Optimizer::adam) {
    m_w.assign(dim, 0.0);
    v_w.assign(dim, 0.0);
  }

  for (int epoch = 0;; ++epoch) {
    ObjectiveValue obj = logistic_objective(model.weights, model.bias, X, labels, teacher, cfg);
    if (!std::isfinite(obj.loss)) {
      throw DivergenceError("training diverged at iteration " + std::to_string(epoch), epoch);
    }
    model.meta.loss_curve.push_back(obj.loss);
    if (epoch == cfg.epochs) break;

    if (cfg.optimizer == Optimizer::gd) {
      for (std::size_t j = 0; j < dim; ++j) model.weights[j] -= cfg.learning_rate * obj.grad_weights[j];
      model.bias -= cfg.learning_rate * obj.grad_bias;
    } else {
      const double t = epoch + 1.0;
      const double c1 = 1.0 - std::pow(cfg.adam_beta1, t);
      const double c2 = 1.0 - std::pow(cfg.adam_beta2, t);
      auto step = [&](double& param, double& m, double& v, double g) {
        m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * g;
        v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * g * g;
        param -= cfg.learning_rate * (m / c1) / (std::sqrt(v / c2) + cfg.adam_epsilon);
      };
      for (std::size_t j = 0; j < dim; ++j) step(model.weights[j], m_w[j], v_w[j], obj.grad_weights[j]);
      step(model.bias, m_b, v_b, obj.grad_bias);
    }
  }
  return model;
}

// ---------------------------------------------------------------------------
// CART

struct ColumnEntry {
  std::size_t row;
  double value;
};

class TreeBuilder {
 public:
  // Candidate features for one split, ascending.
  using FeaturePicker = std::function<std::vector<std::size_t>()>;

  TreeBuilder(const FeatureMatrix& X, std::span<const int> labels, std::vector<double> row_weight,
              const TreeConfig& cfg, FeaturePicker picker)
      : labels_(labels), weight_(std::move(row_weight)), cfg_(cfg), picker_(std::move(picker)) {
    dim_ = common_dimension(X);
    columns_.resize(dim_);
    for (std::size_t r = 0; r < X.size(); ++r) {
      if (weight_[r] <= 0.0) continue;
      const auto& row = X[r];
      for (std::size_t k = 0; k < row.nnz(); ++k) {
        columns_[row.indices()[k]].push_back({r, row.values()[k]});
      }
    }
    stamp_.assign(X.size(), -1);
  }

  TreeModel build() {
    TreeModel tree;
    tree.dimension = dim_;
    tree.config = cfg_;
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < weight_.size(); ++r) {
      if (weight_[r] > 0.0) rows.push_back(r);
    }
    grow(tree, rows, 0);
    return tree;
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double decrease = -1.0;
  };

  struct Group {
    double value;
    double weight;
    double positive;
  };

  static double weighted_impurity(double w, double p) {
    if (w <= 0.0) return 0.0;
    return w - (p * p + (w - p) * (w - p)) / w;
  }

  int grow(TreeModel& tree, const std::vector<std::size_t>& rows, int depth) {
    double w = 0.0, p = 0.0;
    for (auto r : rows) {
      w += weight_[r];
      p += weight_[r] * labels_[r];
    }
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes[id].p_true = p / w;
    tree.nodes[id].weight = w;

    const bool pure = p == 0.0 || p == w;
    if (pure || depth >= cfg_.max_depth) return id;
    const Split split = best_split(rows, w, p, id);
    if (split.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto r : rows) {
      // Rows are not indexed by column here; look the value up directly.
      (value_of(r, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right).push_back(r);
    }
    tree.nodes[id].feature = split.feature;
    tree.nodes[id].threshold = split.threshold;
    const int l = grow(tree, left, depth + 1);
    const int rgt = grow(tree, right, depth + 1);
    tree.nodes[id].left = l;
    tree.nodes[id].right = rgt;
    return id;
  }

  double value_of(std::size_t row, std::size_t feature) const {
    const auto& col = columns_[feature];
    auto it = std::lower_bound(col.begin(), col.end(), row,
                               [](const ColumnEntry& e, std::size_t r) { return e.row < r; });
    return (it != col.end() && it->row == row) ? it->value : 0.0;
  }

  Split best_split(const std::vector<std::size_t>& rows, double w, double p, int node) {
    for (auto r : rows) stamp_[r] = node;
    const double parent = weighted_impurity(w, p);
    const double min_leaf = static_cast<double>(cfg_.min_leaf);
    Split best;
    std::vector<Group> groups;
    for (std::size_t f : picker_()) {
      groups.clear();
      double nz_w = 0.0, nz_p = 0.0;
      for (const auto& e : columns_[f]) {
        if (stamp_[e.row] != node) continue;
        const double wr = weight_[e.row];
        groups.push_back({e.value, wr, wr * labels_[e.row]});
        nz_w += wr;
        nz_p += wr * labels_[e.row];
      }
      if (w - nz_w > 0.0) groups.push_back({0.0, w - nz_w, p - nz_p});
      if (groups.size() < 2) continue;
      std::sort(groups.begin(), groups.end(),
                [](const Group& a, const Group& b) { return a.value < b.value; });

      double lw = 0.0, lp = 0.0;
      for (std::size_t i = 0; i + 1 < groups.size(); ++i) {
        lw += groups[i].weight;
        lp += groups[i].positive;
        const double a = groups[i].value;
        const double b = groups[i + 1].value;
        if (a == b) continue;
        const double rw = w - lw;
        if (lw < min_leaf || rw < min_leaf) continue;
        const double decrease =
            (parent - weighted_impurity(lw, lp) - weighted_impurity(rw, p - lp)) / w;
        if (decrease > best.decrease + 1e-12) {
          double threshold = a + (b - a) / 2.0;
          if (!(threshold < b)) threshold = a;
          best = {static_cast<int>(f), threshold, decrease};
        }
      }
    }
    return best;
  }

  std::span<const int> labels_;
  std::vector<double> weight_;
  TreeConfig cfg_;
  FeaturePicker picker_;
  std::size_t dim_ = 0;
  std::vector<std::vector<ColumnEntry>> columns_;
  std::vector<int> stamp_;
};

std::vector<std::size_t> all_features(std::size_t dim) {
  std::vector<std::size_t> f(dim);
  for (std::size_t j = 0; j < dim; ++j) f[j] = j;
  return f;
}

json tree_to_json(const TreeModel& tree) {
  json feature = json::array(), threshold = json::array(), left = json::array(),
       right = json::array(), p_true = json::array(), weight = json::array();
  for (const auto& n : tree.nodes) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    p_true.push_back(n.p_true);
    weight.push_back(n.weight);
  }
  return {{"dimension", tree.dimension},
          {"max_depth", tree.config.max_depth},
          {"min_leaf", tree.config.min_leaf},
          {"feature", feature},
          {"threshold", threshold},
          {"left", left},
          {"right", right},
          {"p_true", p_true},
          {"weight", weight}};
}

TreeModel tree_from_json(const json& j) {
  TreeModel tree;
  tree.dimension = j.at("dimension").get<std::size_t>();
  tree.config.max_depth = j.at("max_depth").get<int>();
  tree.config.min_leaf = j.at("min_leaf").get<std::size_t>();
  const auto feature = j.at("feature").get<std::vector<int>>();
  const auto threshold = j.at("threshold").get<std::vector<double>>();
  const auto left = j.at("left").get<std::vector<int>>();
  const auto right = j.at("right").get<std::vector<int>>();
  const auto p_true = j.at("p_true").get<std::vector<double>>();
  const auto weight = j.at("weight").get<std::vector<double>>();
  const std::size_t n = feature.size();
  if (n == 0 || threshold.size() != n || left.size() != n || right.size() != n ||
      p_true.size() != n || weight.size() != n) {
    throw ValidationError("tree node arrays are empty or differ in length");
  }
  const int count = static_cast<int>(n);
  for (std::size_t i = 0; i < n; ++i) {
    TreeNode node{feature[i], threshold[i], left[i], right[i], p_true[i], weight[i]};
    if (!node.is_leaf()) {
      // Children always follow their parent, which rules out cycles.
      const int self = static_cast<int>(i);
      if (node.feature >= static_cast<int>(tree.dimension) || node.left <= self ||
          node.right <= self || node.left >= count || node.right >= count) {
        throw ValidationError("tree node " + std::to_string(i) + " is malformed");
      }
    } else if (!(node.p_true >= 0.0 && node.p_true <= 1.0)) {
      throw ValidationError("tree leaf probability outside [0,1]");
    }
    tree.nodes.push_back(node);
  }
  return tree;
}

}  // namespace

double distill_loss(double teacher, double student, double temperature) {
  return soft_cross_entropy(soften(teacher, temperature), soften(clamp_probability(student), temperature));
}

double cross_entropy(int label, double student) {
  return soft_cross_entropy(static_cast<double>(label), student);
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ValidationError("learning_rate must be positive");
  if (epochs < 0) throw ValidationError("epochs must be non-negative");
  if (!(l2_penalty >= 0.0)) throw ValidationError("l2_penalty must be non-negative");
  if (!(distill_weight >= 0.0 && distill_weight <= 1.0)) {
    throw ValidationError("distill_weight must lie in [0,1]");
  }
  if (!(temperature > 0.0)) throw ValidationError("temperature must be positive");
}

ObjectiveValue logistic_objective(std::span<const double> weights, double bias, const FeatureMatrix& X,
                                  std::span<const int> labels, std::span<const double> teacher,
                                  const TrainConfig& cfg) {
  const std::size_t n = X.size();
  if (labels.size() != n) throw ValidationError("label count does not match row count");
  if (!teacher.empty() && teacher.size() != n) {
    throw ValidationError("teacher target count does not match row count");
  }
  const double alpha = cfg.distill_weight;
  const double tau = cfg.temperature;

  ObjectiveValue out;
  out.grad_weights.assign(weights.size(), 0.0);
  double loss_sum = 0.0;
  double residual_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = X[i];
    if (row.dimension() != weights.size()) throw ValidationError("row dimension mismatch");
    const double z = row.dot(weights) + bias;
    const double s = sigmoid(z);
    const int y = labels[i];
    double loss, residual;
    if (teacher.empty()) {
      loss = cross_entropy(y, s);
      residual = s - y;
    } else {
      const double t_soft = soften(teacher[i], tau);
      const double s_soft = tau == 1.0 ? s : sigmoid(z / tau);
      loss = alpha * soft_cross_entropy(t_soft, s_soft) + (1.0 - alpha) * cross_entropy(y, s);
      residual = alpha * (s_soft - t_soft) / tau + (1.0 - alpha) * (s - y);
    }
    loss_sum += loss;
    residual_sum += residual;
    for (std::size_t k = 0; k < row.nnz(); ++k) {
      out.grad_weights[row.indices()[k]] += residual * row.values()[k];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  double norm2 = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    norm2 += weights[j] * weights[j];
    out.grad_weights[j] = out.grad_weights[j] * inv_n + cfg.l2_penalty * weights[j];
  }
  out.loss = loss_sum * inv_n + 0.5 * cfg.l2_penalty * norm2;
  out.grad_bias = residual_sum * inv_n;
  return out;
}

LogisticModel train_logistic(const FeatureMatrix& X, std::span<const int> labels, const TrainConfig& cfg) {
  return fit_logistic(X, labels, {}, cfg);
}

LogisticModel train_distilled(const FeatureMatrix& X, std::span<const int> labels,
                              std::span<const double> teacher, const TrainConfig& cfg) {
  if (teacher.size() != X.size()) throw ValidationError("missing teacher targets for training rows");
  for (double t : teacher) {
    if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("teacher probability outside [0,1]");
  }
  return fit_logistic(X, labels, teacher, cfg);
}

TreeModel train_tree(const FeatureMatrix& X, std::span<const int> labels, const TreeConfig& cfg) {
  require_labels(labels, X.size(), false);
  if (cfg.max_depth < 0) throw ValidationError("max_depth must be non-negative");
  if (cfg.min_leaf < 1) throw ValidationError("min_leaf must be at least 1");
  const std::size_t dim = common_dimension(X);
  const auto features = all_features(dim);
  TreeBuilder builder(X, labels, std::vector<double>(X.size(), 1.0), cfg, [&] { return features; });
  return builder.build();
}

ForestModel train_forest(const FeatureMatrix& X, std::span<const int> labels, const ForestConfig& cfg) {
  require_labels(labels, X.size(), false);
  if (cfg.n_trees < 1) throw ValidationError("n_trees must be at least 1");
  if (cfg.tree.max_depth < 0) throw ValidationError("max_depth must be non-negative");
  if (cfg.tree.min_leaf < 1) throw ValidationError("min_leaf must be at least 1");
  if (cfg.feature_fraction > 1.0) throw ValidationError("feature_fraction must be at most 1");
  const std::size_t dim = common_dimension(X);
  const std::size_t per_split =
      cfg.feature_fraction > 0.0
          ? std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.feature_fraction * dim)))
          : std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(std::sqrt(double(dim)))));

  ForestModel forest;
  forest.config = cfg;
  forest.trees.resize(cfg.n_trees);

  auto build_one = [&](std::size_t t) {
    Rng rng(derive_seed(cfg.seed, t));
    std::vector<double> weight(X.size(), 1.0);
    if (cfg.bootstrap) {
      std::fill(weight.begin(), weight.end(), 0.0);
      for (std::size_t i = 0; i < X.size(); ++i) weight[uniform_index(rng, X.size())] += 1.0;
    }
    std::vector<std::size_t> pool = all_features(dim);
    TreeBuilder::FeaturePicker picker;
    if (per_split >= dim) {
      picker = [&pool] { return pool; };
    } else {
      picker = [&pool, &rng, per_split] {
        // Partial Fisher-Yates draw without replacement.
        for (std::size_t i = 0; i < per_split; ++i) {
          std::swap(pool[i], pool[i + uniform_index(rng, pool.size() - i)]);
        }
        std::vector<std::size_t> chosen(pool.begin(), pool.begin() + static_cast<long>(per_split));
        std::sort(chosen.begin(), chosen.end());
        return chosen;
      };
    }
    TreeBuilder builder(X, labels, std::move(weight), cfg.tree, picker);
    forest.trees[t] = builder.build();
  };

  const std::size_t workers =
      std::min<std::size_t>(cfg.n_trees, std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t t; (t = next.fetch_add(1)) < cfg.n_trees;) {
        try {
          build_one(t);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return forest;
}

TreeModel constant_tree(std::size_t dimension, double p_true) {
  TreeModel tree;
  tree.dimension = dimension;
  tree.config.max_depth = 0;
  TreeNode leaf;
  leaf.p_true = p_true;
  leaf.weight = 1.0;
  tree.nodes.push_back(leaf);
  return tree;
}

std::size_t TreeModel::leaf_for(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return i;
}

std::size_t TreeModel::leaf_for(const FeatureVector& x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(x.at(static_cast<std::size_t>(n.feature)) <= n.threshold ? n.left : n.right);
  }
  return i;
}

std::size_t TreeModel::depth() const {
  std::function<std::size_t(std::size_t)> walk = [&](std::size_t i) -> std::size_t {
    if (nodes[i].is_leaf()) return 0;
    return 1 + std::max(walk(static_cast<std::size_t>(nodes[i].left)),
                        walk(static_cast<std::size_t>(nodes[i].right)));
  };
  return nodes.empty() ? 0 : walk(0);
}

std::string_view model_kind(const Model& model) {
  switch (model.index()) {
    case 0: return "logistic";
    case 1: return "tree";
    default: return "forest";
  }
}

std::size_t model_dimension(const Model& model) {
  return std::visit(
      [](const auto& m) -> std::size_t {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, TreeModel>) {
          return m.dimension;
        } else {
          return m.dimension();
        }
      },
      model);
}

namespace {

template <typename Row>
void check_dimension(const Model& model, const Row& x, std::size_t dim) {
  if (dim != model_dimension(model)) {
    throw ValidationError("feature dimension " + std::to_string(dim) + " does not match model dimension " +
                          std::to_string(model_dimension(model)));
  }
  (void)x;
}

template <typename Row>
double proba_impl(const Model& model, const Row& x) {
  if (const auto* lm = std::get_if<LogisticModel>(&model)) {
    double z = lm->bias;
    if constexpr (std::is_same_v<Row, FeatureVector>) {
      z += x.dot(lm->weights);
    } else {
      for (std::size_t j = 0; j < x.size(); ++j) z += lm->weights[j] * x[j];
    }
    return sigmoid(z);
  }
  if (const auto* tm = std::get_if<TreeModel>(&model)) return tm->nodes[tm->leaf_for(x)].p_true;
  const auto& fm = std::get<ForestModel>(model);
  double sum = 0.0;
  for (const auto& t : fm.trees) sum += t.nodes[t.leaf_for(x)].p_true;
  return sum / static_cast<double>(fm.trees.size());
}

template <typename Row>
double log_odds_impl(const Model& model, const Row& x) {
  if (const auto* lm = std::get_if<LogisticModel>(&model)) {
    double z = lm->bias;
    if constexpr (std::is_same_v<Row, FeatureVector>) {
      z += x.dot(lm->weights);
    } else {
      for (std::size_t j = 0; j < x.size(); ++j) z += lm->weights[j] * x[j];
    }
    return z;
  }
  if (const auto* tm = std::get_if<TreeModel>(&model)) return logit(tm->nodes[tm->leaf_for(x)].p_true);
  const auto& fm = std::get<ForestModel>(model);
  double sum = 0.0;
  for (const auto& t : fm.trees) sum += logit(t.nodes[t.leaf_for(x)].p_true);
  return sum / static_cast<double>(fm.trees.size());
}

}  // namespace

double predict_proba(const Model& model, const FeatureVector& x) {
  check_dimension(model, x, x.dimension());
  return proba_impl(model, x);
}

double predict_proba(const Model& model, std::span<const double> x) {
  check_dimension(model, x, x.size());
  return proba_impl(model, x);
}

double predict_log_odds(const Model& model, const FeatureVector& x) {
  check_dimension(model, x, x.dimension());
  return log_odds_impl(model, x);
}

double predict_log_odds(const Model& model, std::span<const double> x) {
  check_dimension(model, x, x.size());
  return log_odds_impl(model, x);
}

double tree_log_odds(const TreeModel& tree, std::span<const double> x) {
  return logit(tree.nodes[tree.leaf_for(x)].p_true);
}

json to_json(const TrainConfig& cfg) {
  return {{"learning_rate", cfg.learning_rate},   {"epochs", cfg.epochs},
          {"l2_penalty", cfg.l2_penalty},         {"optimizer", optimizer_name(cfg.optimizer)},
          {"distill_weight", cfg.distill_weight}, {"temperature", cfg.temperature},
          {"seed", cfg.seed},                     {"adam_beta1", cfg.adam_beta1},
          {"adam_beta2", cfg.adam_beta2},         {"adam_epsilon", cfg.adam_epsilon}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.epochs = j.value("epochs", c.epochs);
  c.l2_penalty = j.value("l2_penalty", c.l2_penalty);
  c.optimizer = parse_optimizer(j.value("optimizer", std::string(optimizer_name(c.optimizer))));
  c.distill_weight = j.value("distill_weight", c.distill_weight);
  c.temperature = j.value("temperature", c.temperature);
  c.seed = j.value("seed", c.seed);
  c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
  c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
  c.adam_epsilon = j.value("adam_epsilon", c.adam_epsilon);
  return c;
}

json to_json(const ForestConfig& cfg) {
  return {{"n_trees", cfg.n_trees},
          {"max_depth", cfg.tree.max_depth},
          {"min_leaf", cfg.tree.min_leaf},
          {"feature_fraction", cfg.feature_fraction},
          {"bootstrap", cfg.bootstrap},
          {"seed", cfg.seed}};
}

ForestConfig forest_config_from_json(const json& j) {
  ForestConfig c;
  c.n_trees = j.value("n_trees", c.n_trees);
  c.tree.max_depth = j.value("max_depth", c.tree.max_depth);
  c.tree.min_leaf = j.value("min_leaf", c.tree.min_leaf);
  c.feature_fraction = j.value("feature_fraction", c.feature_fraction);
  c.bootstrap = j.value("bootstrap", c.bootstrap);
  c.seed = j.value("seed", c.seed);
  return c;
}

json model_to_json(const Model& model) {
  json j;
  j["kind"] = std::string(model_kind(model));
  j["format_version"] = 1;
  if (const auto* lm = std::get_if<LogisticModel>(&model)) {
    j["weights"] = lm->weights;
    j["bias"] = lm->bias;
    j["training_meta"] = {{"objective", lm->meta.objective},
                          {"config", to_json(lm->meta.config)},
                          {"loss_curve", lm->meta.loss_curve}};
  } else if (const auto* tm = std::get_if<TreeModel>(&model)) {
    j["tree"] = tree_to_json(*tm);
  } else {
    const auto& fm = std::get<ForestModel>(model);
    j["config"] = to_json(fm.config);
    j["trees"] = json::array();
    for (const auto& t : fm.trees) j["trees"].push_back(tree_to_json(t));
  }
  return j;
}

Model model_from_json(const json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "logistic") {
      LogisticModel lm;
      lm.weights = j.at("weights").get<std::vector<double>>();
      lm.bias = j.at("bias").get<double>();
      if (j.contains("training_meta")) {
        const auto& meta = j["training_meta"];
        lm.meta.objective = meta.value("objective", "");
        if (meta.contains("config")) lm.meta.config = train_config_from_json(meta["config"]);
        lm.meta.loss_curve = meta.value("loss_curve", std::vector<double>{});
      }
      for (double w : lm.weights) {
        if (!std::isfinite(w)) throw ValidationError("non-finite model weight");
      }
      if (!std::isfinite(lm.bias)) throw ValidationError("non-finite model bias");
      return lm;
    }
    if (kind == "tree") return tree_from_json(j.at("tree"));
    if (kind == "forest") {
      ForestModel fm;
      fm.config = forest_config_from_json(j.at("config"));
      for (const auto& t : j.at("trees")) fm.trees.push_back(tree_from_json(t));
      if (fm.trees.empty()) throw ValidationError("forest has no trees");
      return fm;
    }
    throw ValidationError("unknown model kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed model: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << model_to_json(model).dump() << '\n';
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("invalid model JSON in '" + path.string() + "': " + e.what());
  }
  return model_from_json(j);
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  EmbeddingTable table;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!obj.contains("id") || !obj["id"].is_string() || !obj.contains("vector") ||
        !obj["vector"].is_array()) {
      throw ParseError("expected {\"id\": str, \"vector\": [numbers]}", line_no);
    }
    std::vector<double> v;
    try {
      v = obj["vector"].get<std::vector<double>>();
    } catch (const json::exception&) {
      throw ParseError("vector must contain only numbers", line_no);
    }
    if (v.empty()) throw ParseError("empty vector", line_no);
    if (dim == 0) dim = v.size();
    if (v.size() != dim) throw ParseError("vector dimension differs from earlier lines", line_no);
    for (double x : v) {
      if (!std::isfinite(x)) throw ParseError("non-finite vector value", line_no);
    }
    if (!table.emplace(obj["id"].get<std::string>(), std::move(v)).second) {
      throw ParseError("duplicate id", line_no);
    }
  }
  if (table.empty()) throw ValidationError("no embeddings in '" + path.string() + "'");
  return table;
}

}  // namespace factshap

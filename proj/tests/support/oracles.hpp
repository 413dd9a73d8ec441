#pragma once

// Reference implementations used as test oracles. They deliberately avoid
// the library's own evaluation paths: model outputs are recomputed from the
// raw parameters and Shapley values come from the textbook subset formula.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "factshap/features.hpp"
#include "factshap/models.hpp"

namespace oracle {

using Row = std::vector<double>;
using ValueFn = std::function<double(const Row&)>;

inline double logistic_margin(const factshap::LogisticModel& m, const Row& x) {
  double z = m.bias;
  for (std::size_t i = 0; i < x.size(); ++i) z += m.weights[i] * x[i];
  return z;
}

inline double clamped_logit(double p) {
  const double eps = 1e-12;
  p = std::min(std::max(p, eps), 1.0 - eps);
  return std::log(p) - std::log(1.0 - p);
}

inline double tree_margin(const factshap::TreeModel& t, const Row& x) {
  int node = 0;
  while (t.nodes[node].feature >= 0) {
    const auto& n = t.nodes[node];
    node = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return clamped_logit(t.nodes[node].p_true);
}

inline double forest_margin(const factshap::ForestModel& f, const Row& x) {
  double s = 0.0;
  for (const auto& t : f.trees) s += tree_margin(t, x);
  return s / static_cast<double>(f.trees.size());
}

// phi_i = sum over S not containing i of |S|!(P-|S|-1)!/P! [v(S+i) - v(S)],
// v(S) = mean over background rows of f(x_S, z_rest). Every feature is a
// player, including ones where x equals the background.
inline std::vector<double> shapley(const ValueFn& f, const Row& x, const std::vector<Row>& background) {
  const std::size_t p = x.size();
  const std::size_t n = std::size_t{1} << p;
  std::vector<double> v(n, 0.0);
  for (std::size_t mask = 0; mask < n; ++mask) {
    double total = 0.0;
    for (const auto& z : background) {
      Row h = z;
      for (std::size_t i = 0; i < p; ++i) {
        if (mask & (std::size_t{1} << i)) h[i] = x[i];
      }
      total += f(h);
    }
    v[mask] = total / static_cast<double>(background.size());
  }
  std::vector<double> fact(p + 1, 1.0);
  for (std::size_t i = 1; i <= p; ++i) fact[i] = fact[i - 1] * static_cast<double>(i);
  std::vector<double> phi(p, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t mask = 0; mask < n; ++mask) {
      if (mask & bit) continue;
      std::size_t s = 0;
      for (std::size_t m = mask; m; m &= m - 1) ++s;
      phi[i] += fact[s] * fact[p - s - 1] / fact[p] * (v[mask | bit] - v[mask]);
    }
  }
  return phi;
}

// Probability that a random positive outscores a random negative, ties
// worth one half, by direct enumeration of all pairs.
inline double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  std::uint64_t twice_wins = 0, pos = 0, neg = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] == 1) ++pos; else ++neg;
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      if (scores[i] > scores[j]) twice_wins += 2;
      else if (scores[i] == scores[j]) twice_wins += 1;
    }
  }
  return (static_cast<double>(twice_wins) / 2.0) / (static_cast<double>(pos) * static_cast<double>(neg));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Random tree over `dim` features built top-down; children always follow
// their parent in the node array.
inline factshap::TreeModel random_tree(std::mt19937_64& rng, std::size_t dim, int max_depth) {
  factshap::TreeModel t;
  t.dimension = dim;
  t.config.max_depth = max_depth;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> feature(0, dim - 1);
  std::function<int(int)> grow = [&](int depth) -> int {
    const int index = static_cast<int>(t.nodes.size());
    t.nodes.emplace_back();
    const bool split = depth < max_depth && (depth == 0 || unit(rng) < 0.8);
    if (!split) {
      t.nodes[index].p_true = 0.02 + 0.96 * unit(rng);
      t.nodes[index].weight = 1.0;
      return index;
    }
    t.nodes[index].feature = static_cast<int>(feature(rng));
    t.nodes[index].threshold = unit(rng);
    const int left = grow(depth + 1);
    const int right = grow(depth + 1);
    t.nodes[index].left = left;
    t.nodes[index].right = right;
    return index;
  };
  grow(0);
  return t;
}

inline std::vector<Row> random_rows(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Row> rows(n, Row(dim));
  for (auto& r : rows) {
    for (auto& v : r) v = unit(rng);
  }
  return rows;
}

inline factshap::FeatureMatrix to_matrix(const std::vector<Row>& rows) {
  factshap::FeatureMatrix m;
  for (const auto& r : rows) m.push_back(factshap::FeatureVector::from_dense(r));
  return m;
}

}  // namespace oracle

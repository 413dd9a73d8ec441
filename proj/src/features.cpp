#include "factshap/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "factshap/error.hpp"

namespace factshap {

FeatureVector::FeatureVector(std::size_t dimension, std::vector<std::size_t> indices,
                             std::vector<double> values)
    : dimension_(dimension), indices_(std::move(indices)), values_(std::move(values)) {
  if (indices_.size() != values_.size()) {
    throw ValidationError("feature vector has mismatched index/value lengths");
  }
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (indices_[k] >= dimension_) {
      throw ValidationError("feature index " + std::to_string(indices_[k]) + " out of range");
    }
    if (k > 0 && indices_[k] <= indices_[k - 1]) {
      throw ValidationError("feature indices must be strictly increasing");
    }
    if (!std::isfinite(values_[k])) throw ValidationError("non-finite feature value");
  }
}

FeatureVector FeatureVector::from_dense(std::span<const double> dense) {
  std::vector<std::size_t> idx;
  std::vector<double> val;
  for (std::size_t j = 0; j < dense.size(); ++j) {
    if (dense[j] != 0.0) {
      idx.push_back(j);
      val.push_back(dense[j]);
    }
  }
  return FeatureVector(dense.size(), std::move(idx), std::move(val));
}

double FeatureVector::at(std::size_t column) const {
  auto it = std::lower_bound(indices_.begin(), indices_.end(), column);
  if (it == indices_.end() || *it != column) return 0.0;
  return values_[static_cast<std::size_t>(it - indices_.begin())];
}

double FeatureVector::norm() const {
  double sum = 0.0;
  for (double v : values_) sum += v * v;
  return std::sqrt(sum);
}

double FeatureVector::dot(std::span<const double> dense) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < indices_.size(); ++k) sum += values_[k] * dense[indices_[k]];
  return sum;
}

std::vector<double> FeatureVector::to_dense() const {
  std::vector<double> out(dimension_, 0.0);
  for (std::size_t k = 0; k < indices_.size(); ++k) out[indices_[k]] = values_[k];
  return out;
}

void FeatureVector::scale(double factor) {
  for (double& v : values_) v *= factor;
}

std::vector<double> column_means(const FeatureMatrix& rows) {
  if (rows.empty()) return {};
  std::vector<double> sums(rows.front().dimension(), 0.0);
  for (const auto& row : rows) {
    if (row.dimension() != sums.size()) throw ValidationError("rows differ in dimension");
    for (std::size_t k = 0; k < row.nnz(); ++k) sums[row.indices()[k]] += row.values()[k];
  }
  const double n = static_cast<double>(rows.size());
  for (double& s : sums) s /= n;
  return sums;
}

}  // namespace factshap

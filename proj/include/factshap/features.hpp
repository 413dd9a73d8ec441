#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace factshap {

// Sparse feature row. Indices are strictly increasing and below dimension.
class FeatureVector {
 public:
  FeatureVector() = default;
  explicit FeatureVector(std::size_t dimension) : dimension_(dimension) {}
  // Throws ValidationError if indices are unsorted, duplicated, out of range,
  // or a value is non-finite.
  FeatureVector(std::size_t dimension, std::vector<std::size_t> indices, std::vector<double> values);

  // Keeps every non-zero entry of a dense row.
  static FeatureVector from_dense(std::span<const double> dense);

  std::size_t dimension() const { return dimension_; }
  std::size_t nnz() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  const std::vector<std::size_t>& indices() const { return indices_; }
  const std::vector<double>& values() const { return values_; }

  double at(std::size_t column) const;
  double norm() const;
  double dot(std::span<const double> dense) const;
  std::vector<double> to_dense() const;
  void scale(double factor);

  bool operator==(const FeatureVector&) const = default;

 private:
  std::size_t dimension_ = 0;
  std::vector<std::size_t> indices_;
  std::vector<double> values_;
};

using FeatureMatrix = std::vector<FeatureVector>;

// Column-wise mean of the rows, dense.
std::vector<double> column_means(const FeatureMatrix& rows);

}  // namespace factshap

// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace nggp {

// Row-major n x D matrix of observations.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}
  Dataset(std::size_t rows, std::size_t cols, std::vector<double> values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_) {
      throw std::invalid_argument("Dataset: value count does not match shape");
    }
  }

  // One-dimensional data set.
  static Dataset column(std::vector<double> values) {
    std::size_t n = values.size();
    return Dataset(n, 1, std::move(values));
  }

  std::size_t size() const { return rows_; }
  std::size_t dim() const { return cols_; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) {
    return {values_.data() + i * cols_, cols_};
  }
  double operator()(std::size_t i, std::size_t j) const {
    return values_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return values_[i * cols_ + j];
  }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

}  // namespace nggp

#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace fairex {

// Dense column-major matrix of doubles. Columns are contiguous, so the
// per-feature loops in training and scoring run over unit-stride memory.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double operator()(std::size_t row, std::size_t col) const {
    assert(row < rows_ && col < cols_);
    return data_[col * rows_ + row];
  }
  double& operator()(std::size_t row, std::size_t col) {
    assert(row < rows_ && col < cols_);
    return data_[col * rows_ + row];
  }

  std::span<const double> col(std::size_t j) const {
    return {data_.data() + j * rows_, rows_};
  }
  std::span<double> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }

  std::vector<double> row(std::size_t i) const {
    std::vector<double> out(cols_);
    for (std::size_t j = 0; j < cols_; ++j) out[j] = (*this)(i, j);
    return out;
  }

  std::span<const double> data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// out[i] = intercept + sum_j x(i, j) * weights[j]
void LinearScores(const Matrix& x, std::span<const double> weights,
                  double intercept, std::span<double> out);

// out[j] = sum_i x(i, j) * r[i]
void TransposedProduct(const Matrix& x, std::span<const double> r,
                       std::span<double> out);

}  // namespace fairex
